"""Random commuting cubical diagrams and filtered complexes for property checks.

Commutativity is built in rather than searched for.  A random diagram is a
sum of three kinds of pieces:

* a constant complex whose edge maps are polynomials ``a + b*psi`` in one
  chain endomorphism ``psi`` (so they commute);
* "free" pieces ``C`` sitting at every vertex above some ``gamma``;
* "cofree" pieces sitting at every vertex below some ``gamma``;

followed by a random unimodular change of basis at each vertex.  A filtered
variant keeps every basis vector at a level and only uses level-respecting
maps; its quotients by levels give towers.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import zmod
from .complexes import ChainMap, ZComplex
from .cube import Cube
from .diagram import CubicalDiagram
from .zmod import matmul, zeros


@dataclass
class Bounds:
    lo: int = -2
    hi: int = 2
    max_rank: int = 3
    entry: int = 3


@dataclass
class Filtered:
    """A complex whose basis vectors carry filtration levels.

    ``levels[m][i]`` is the level of basis vector ``i`` in degree ``m``; the
    span of vectors of level ``>= p`` is a subcomplex.
    """

    complex: ZComplex
    levels: dict

    def level(self, m: int) -> list[int]:
        return self.levels.get(m, [])


def _pieces(rng: random.Random, b: Bounds, max_level: int) -> tuple[dict, dict, dict]:
    ranks = {m: 0 for m in range(b.lo, b.hi + 1)}
    cap = {m: rng.randint(1, b.max_rank) for m in ranks}
    levels = {m: [] for m in ranks}
    entries = []
    for _ in range(rng.randint(1, 6)):
        m = rng.randint(b.lo, b.hi)
        if rng.random() < 0.5 and m - 1 >= b.lo and ranks[m] < cap[m] and ranks[m - 1] < cap[m - 1]:
            la = rng.randint(0, max_level)
            lb = rng.randint(la, max_level)
            i, j = ranks[m], ranks[m - 1]
            ranks[m] += 1
            ranks[m - 1] += 1
            levels[m].append(la)
            levels[m - 1].append(lb)
            entries.append((m, j, i, rng.choice([1, 1, 2, 3, -1, -2])))
        elif ranks[m] < cap[m]:
            ranks[m] += 1
            levels[m].append(rng.randint(0, max_level))
    diffs = {m: zeros(ranks.get(m - 1, 0), ranks[m]) for m in ranks}
    for m, j, i, k in entries:
        diffs[m][j, i] = k
    return ranks, diffs, levels


def _level_unimodular(rng: random.Random, levels: list[int], entry: int = 1) -> np.ndarray:
    """Random unimodular matrix ``P`` with ``P e_i`` supported on levels >= level(i)."""
    n = len(levels)
    p = zmod.identity(n)
    for _ in range(rng.randint(0, 2 * n)):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j or levels[i] < levels[j]:
            continue
        # row op i += c*row j puts e_i into column j: needs level(i) >= level(j)
        c = rng.choice([c for c in range(-entry, entry + 1) if c])
        p[i] = p[i] + c * p[j]
    return p


def _conjugate(c: ZComplex, p: dict) -> tuple[ZComplex, dict]:
    inv = {m: zmod.unimodular_inverse(a) for m, a in p.items()}
    diffs = {m: matmul(matmul(p.get(m - 1, zmod.identity(c.rank(m - 1))), c.d(m)),
                       inv.get(m, zmod.identity(c.rank(m)))) for m in c.degrees}
    return ZComplex(c.ranks, diffs, check=False), inv


def _within(c: ZComplex, bound: int) -> bool:
    return all(abs(x) <= bound for m in c.degrees for x in c.d(m).flat)


def random_filtered(rng: random.Random, b: Optional[Bounds] = None, max_level: int = 0) -> Filtered:
    b = b or Bounds()
    ranks, diffs, levels = _pieces(rng, b, max_level)
    c = ZComplex(ranks, diffs, check=True)
    for _ in range(4):
        p = {m: _level_unimodular(rng, levels[m]) for m in c.degrees}
        c2, _ = _conjugate(c, p)
        if _within(c2, b.entry):
            return Filtered(c2, levels)
    return Filtered(c, levels)


def random_complex(rng: random.Random, b: Optional[Bounds] = None) -> ZComplex:
    return random_filtered(rng, b, 0).complex


def _random_homotopy(rng: random.Random, src: Filtered, tgt: Filtered) -> dict:
    """Degree +1 maps ``h_m : S_m -> T_{m+1}`` respecting levels."""
    h = {}
    for m in src.complex.degrees:
        a = zeros(tgt.complex.rank(m + 1), src.complex.rank(m))
        for i in range(a.shape[0]):
            for j in range(a.shape[1]):
                if tgt.level(m + 1)[i] >= src.level(m)[j] and rng.random() < 0.3:
                    a[i, j] = rng.choice([-1, 1])
        h[m] = a
    return h


def random_endomorphism(rng: random.Random, f: Filtered, scalar: Optional[int] = None) -> ChainMap:
    """``c*id + d h + h d`` for a random level-respecting ``h``."""
    c = f.complex
    h = _random_homotopy(rng, f, f)
    s = rng.randint(-1, 2) if scalar is None else scalar
    maps = {}
    for m in c.degrees:
        dh = matmul(c.d(m + 1), h.get(m, zeros(c.rank(m + 1), c.rank(m))))
        hd = matmul(h.get(m - 1, zeros(c.rank(m), c.rank(m - 1))), c.d(m))
        maps[m] = s * zmod.identity(c.rank(m)) + dh + hd
    return ChainMap(c, c, maps)


def _all_vertices(size: int):
    return list(itertools.product((0, 1), repeat=size))


def _leq(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


@dataclass
class FilteredDiagram:
    """A commuting diagram over all 0/1 tuples of a given length, with levels."""

    size: int
    vertices: dict  # vertex -> Filtered
    edges: dict     # (v, w) -> ChainMap

    def diagram(self, index: Cube) -> CubicalDiagram:
        verts = {v: self.vertices[v].complex for v in index.vertices}
        edges = {(v, w): self.edges[(v, w)] for v in index.vertices for w, _, _ in index.cofaces(v)}
        return CubicalDiagram(index, verts, edges, check=False)


def _direct_sum_filtered(parts: list[Filtered]) -> Filtered:
    c = ZComplex.zero()
    levels: dict = {}
    for f in parts:
        c = c.direct_sum(f.complex)
    degs = c.degrees if not c.is_zero else []
    for m in degs:
        levels[m] = [lv for f in parts for lv in (f.level(m) if f.complex.rank(m) else [])]
    return Filtered(c, levels)


def random_filtered_cube(rng: random.Random, size: int, b: Optional[Bounds] = None,
                         max_level: int = 0, conjugate: bool = True) -> FilteredDiagram:
    """Random commuting diagram over every 0/1 tuple of length ``size``."""
    b = b or Bounds()
    verts = _all_vertices(size)
    small = Bounds(b.lo, b.hi, max(1, (b.max_rank + 1) // 2), b.entry)
    # each vertex: list of (Filtered, tag) summands; edges built per summand
    parts: list[tuple[str, object, Filtered, dict]] = []
    base = random_filtered(rng, small, max_level)
    psi = random_endomorphism(rng, base)
    polys = [(rng.randint(-2, 2), rng.randint(-1, 1)) for _ in range(size)]
    parts.append(("const", None, base, {"psi": psi, "polys": polys}))
    for _ in range(rng.randint(0, 2)):
        kind = rng.choice(["free", "cofree"])
        gamma = rng.choice(verts)
        scal = [rng.choice([1, 1, -1, 2, -2, 3]) for _ in range(size)]
        parts.append((kind, gamma, random_filtered(rng, small, max_level), {"scal": scal}))

    def present(part, v) -> bool:
        kind, gamma = part[0], part[1]
        if kind == "const":
            return True
        return _leq(gamma, v) if kind == "free" else _leq(v, gamma)

    vert_f = {v: _direct_sum_filtered([p[2] for p in parts if present(p, v)]) for v in verts}
    edges = {}
    for v in verts:
        for k in range(size):
            if v[k]:
                continue
            w = v[:k] + (1,) + v[k + 1:]
            blocks_rows = [p for p in parts if present(p, w)]
            blocks_cols = [p for p in parts if present(p, v)]
            maps = {}
            for m in set(vert_f[v].complex.degrees) | set(vert_f[w].complex.degrees):
                rows = []
                for pr in blocks_rows:
                    row = []
                    for pc in blocks_cols:
                        c = pc[2].complex
                        blk = zeros(pr[2].complex.rank(m), c.rank(m))
                        if pr is pc:
                            if pr[0] == "const":
                                a, bb = pr[3]["polys"][k]
                                blk = a * zmod.identity(c.rank(m)) + bb * pr[3]["psi"][m]
                            else:
                                blk = pr[3]["scal"][k] * zmod.identity(c.rank(m))
                        row.append(blk)
                    rows.append(zmod.hstack(row, pr[2].complex.rank(m)))
                maps[m] = zmod.vstack(rows, vert_f[v].complex.rank(m))
            edges[(v, w)] = ChainMap(vert_f[v].complex, vert_f[w].complex, maps)
    if conjugate:
        vert_f, edges = _conjugate_diagram(rng, vert_f, edges)
    return FilteredDiagram(size, vert_f, edges)


def _conjugate_diagram(rng, vert_f: dict, edges: dict):
    mats, invs, new_f = {}, {}, {}
    for v, f in vert_f.items():
        p = {m: _level_unimodular(rng, f.level(m)) for m in f.complex.degrees} if not f.complex.is_zero else {}
        c2, inv = _conjugate(f.complex, p)
        mats[v], invs[v] = p, inv
        new_f[v] = Filtered(c2, f.levels)
    new_edges = {}
    for (v, w), g in edges.items():
        maps = {}
        for m in g.maps:
            pw = mats[w].get(m, zmod.identity(new_f[w].complex.rank(m)))
            iv = invs[v].get(m, zmod.identity(new_f[v].complex.rank(m)))
            maps[m] = matmul(matmul(pw, g[m]), iv)
        new_edges[(v, w)] = ChainMap(new_f[v].complex, new_f[w].complex, maps)
    return new_f, new_edges


def random_diagram(rng: random.Random, index: Cube, b: Optional[Bounds] = None) -> CubicalDiagram:
    """Random commuting diagram over ``index`` (plain or augmented)."""
    b = b or Bounds()
    for _ in range(200):
        fd = random_filtered_cube(rng, index.size, b)
        x = fd.diagram(index)
        if all(c.rank(m) <= b.max_rank for c in x.vertices.values() for m in c.degrees):
            return x
    return x


def acyclic_padding(rng: random.Random, index: Cube, b: Optional[Bounds] = None) -> CubicalDiagram:
    """Vertexwise ``cone(id_D)`` of a random diagram ``D``: acyclic at every vertex."""
    from . import complexes

    d = random_diagram(rng, index, b)
    verts = {v: complexes.cone(ChainMap.identity(c)) for v, c in d.vertices.items()}
    edges = {}
    for (v, w), g in d.edges.items():
        maps = {m: zmod.block_diag([g[m - 1], g[m]]) for m in verts[v].degrees}
        edges[(v, w)] = ChainMap(verts[v], verts[w], maps)
    return CubicalDiagram(index, verts, edges, check=False)


def inclusion_into_sum(x: CubicalDiagram, y: CubicalDiagram) -> dict:
    """Components of the vertexwise inclusion ``X -> X + Y``."""
    out = {}
    for v, c in x.vertices.items():
        tgt = c.direct_sum(y[v])
        maps = {m: zmod.vstack([zmod.identity(c.rank(m)), zeros(y[v].rank(m), c.rank(m))], c.rank(m))
                for m in c.degrees}
        out[v] = ChainMap(c, tgt, maps)
    return out


def random_acyclic_augmented(rng: random.Random, n: int, b: Optional[Bounds] = None) -> CubicalDiagram:
    """An augmented diagram over ``n + 1`` letters that is acyclic by construction.

    Along the first letter it is the inclusion ``Z -> Z + cone(id_D)``.
    """
    from .diagram import vertexwise_sum

    sub = Cube(n - 1, True) if n >= 1 else None
    if sub is None:
        z = random_complex(rng, b)
        d = random_complex(rng, b)
        from . import complexes
        pad = complexes.cone(ChainMap.identity(d))
        tgt = z.direct_sum(pad)
        inc = ChainMap(z, tgt, {m: zmod.vstack([zmod.identity(z.rank(m)), zeros(pad.rank(m), z.rank(m))],
                                                z.rank(m)) for m in z.degrees})
        return CubicalDiagram(Cube(0, True), {(0,): z, (1,): tgt}, {((0,), (1,)): inc})
    z = random_diagram(rng, sub, b)
    pad = acyclic_padding(rng, sub, b)
    w = vertexwise_sum(z, pad)
    inc = inclusion_into_sum(z, pad)
    verts, edges = {}, {}
    for beta in sub.vertices:
        verts[(0,) + beta] = z[beta]
        verts[(1,) + beta] = w[beta]
        edges[((0,) + beta, (1,) + beta)] = inc[beta]
        for beta2, _, _ in sub.cofaces(beta):
            edges[((0,) + beta, (0,) + beta2)] = z.edge(beta, beta2)
            edges[((1,) + beta, (1,) + beta2)] = w.edge(beta, beta2)
    return CubicalDiagram(Cube(n, True), verts, edges, check=False)


def filtered_to_tower(f: Filtered, length: int):
    """The quotient tower ``C / K_{p+1}`` of a level-filtered complex."""
    from .spectral import FilteredComplex
    from .towers import quotient_tower

    return quotient_tower(FilteredComplex.from_levels(f.complex, f.levels, 0, length))


def tower_map_from_filtered(g: ChainMap, src: Filtered, tgt: Filtered, ts, tt, length: int):
    """Levelwise map induced on quotient towers by a level-preserving ``g``."""
    from .spectral import FilteredComplex
    from .towers import TowerMap, _right_inverse

    fs = FilteredComplex.from_levels(src.complex, src.levels, 0, length)
    ft = FilteredComplex.from_levels(tgt.complex, tgt.levels, 0, length)
    comps = []
    for p in range(length + 1):
        maps = {}
        for m in set(src.complex.degrees) | set(tgt.complex.degrees):
            q = ft.equations(p + 1, m)
            r = _right_inverse(fs.equations(p + 1, m))
            maps[m] = matmul(matmul(q, g[m]), r)
        comps.append(ChainMap(ts.stage(p), tt.stage(p), maps))
    return TowerMap(ts, tt, comps)


def random_tower_diagram(rng: random.Random, index: Cube, length: int, b: Optional[Bounds] = None):
    """Random commuting cube of towers of the given length."""
    from .towers import TowerDiagram

    b = b or Bounds()
    fd = None
    for _ in range(200):
        fd = random_filtered_cube(rng, index.size, b, max_level=length)
        if all(fd.vertices[v].complex.rank(m) <= b.max_rank
               for v in index.vertices for m in fd.vertices[v].complex.degrees):
            break
    towers = {v: filtered_to_tower(fd.vertices[v], length) for v in index.vertices}
    edges = {}
    for v in index.vertices:
        for w, _, _ in index.cofaces(v):
            edges[(v, w)] = tower_map_from_filtered(fd.edges[(v, w)], fd.vertices[v], fd.vertices[w],
                                                    towers[v], towers[w], length)
    return TowerDiagram(index, towers, edges)
