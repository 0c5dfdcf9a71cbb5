"""Towers of fibrations and their spectral sequences.

A tower is ``X(L) -> X(L-1) -> ... -> X(0) -> X(-1) = 0`` with every map
degreewise surjective; the fiber at stage ``p`` is the kernel complex of
``X(p) -> X(p-1)``.  Stages past ``L`` repeat ``X(L)`` with identity maps, so
``X(L)`` is the limit.

The spectral sequence of a tower is that of ``X(L)`` filtered by
``K_p = ker(X(L) -> X(p-1))``, so ``E_1^{pq} = H_{q-p}(F(p))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from . import complexes, zmod
from .complexes import ChainMap, ComplexError, ZComplex
from .cube import Cube, to_bits
from .diagram import CubicalDiagram, augmentation_map, simple_of_map, simple_with_layout
from .spectral import FilteredComplex, SpectralSequence, SSPage
from .zmod import identity, matmul, zeros


class TowerError(ValueError):
    pass


def _right_inverse(q: np.ndarray) -> np.ndarray:
    """Integer ``R`` with ``Q R = I`` for a surjective ``Q``."""
    if q.shape[0] == 0:
        return zeros(q.shape[1], 0)
    r = zmod.solve_in_lattice(q, identity(q.shape[0]))
    if r is None:
        raise TowerError("map is not surjective")
    return r


def kernel_complex(f: ChainMap) -> tuple[ZComplex, dict]:
    """Kernel of a degreewise-surjective map, with its inclusion matrices."""
    src = f.source
    bases = {m: zmod.kernel_basis(f[m]) if f.target.rank(m) else identity(src.rank(m))
             for m in src.degrees}
    ranks = {m: b.shape[1] for m, b in bases.items()}
    diffs = {}
    for m in src.degrees:
        if m - 1 not in bases or not ranks[m]:
            continue
        img = matmul(src.d(m), bases[m])
        coords = zmod.solve_in_lattice(bases[m - 1], img)
        if coords is None:
            raise TowerError(f"kernel is not a subcomplex in degree {m}")
        diffs[m] = coords
    return ZComplex(ranks, diffs, check=False), bases


class Tower:
    """A finite tower of fibrations.

    Args:
        stages: complexes ``X(0), ..., X(L)``.
        maps: ``maps[p - 1]`` is the structure map ``X(p) -> X(p-1)`` for
            ``p = 1..L``.
        stab: stabilization index; maps past it must be identities.
    """

    def __init__(self, stages: Sequence[ZComplex], maps: Sequence[ChainMap],
                 stab: Optional[int] = None, check: bool = True):
        if not stages:
            raise TowerError("a tower needs at least one stage")
        if len(maps) != len(stages) - 1:
            raise TowerError("need one structure map per stage above 0")
        self.stages = list(stages)
        self.maps = list(maps)
        self.stab = self.length if stab is None else stab
        if check:
            self.validate()

    @property
    def length(self) -> int:
        return len(self.stages) - 1

    def stage(self, p: int) -> ZComplex:
        if p < 0:
            return ZComplex.zero()
        return self.stages[min(p, self.length)]

    def struct(self, p: int) -> ChainMap:
        """``X(p) -> X(p-1)``."""
        if p <= 0:
            return ChainMap.zero(self.stage(p), ZComplex.zero())
        if p > self.length:
            return ChainMap.identity(self.limit)
        return self.maps[p - 1]

    @property
    def limit(self) -> ZComplex:
        return self.stages[-1]

    def projection(self, p: int) -> ChainMap:
        """Composite ``X(L) -> X(p)``."""
        f = ChainMap.identity(self.limit)
        for k in range(self.length, max(p, -1), -1):
            f = self.struct(k) @ f
        return f if p >= 0 else ChainMap.zero(self.limit, ZComplex.zero())

    def validate(self) -> None:
        for p in range(1, self.length + 1):
            f = self.maps[p - 1]
            if f.source != self.stages[p] or f.target != self.stages[p - 1]:
                raise TowerError(f"structure map {p} has wrong endpoints")
            try:
                f.validate()
            except ComplexError as exc:
                raise TowerError(f"structure map {p}: {exc}") from None
            for m in f.degrees:
                if not zmod.is_surjective(f[m]):
                    raise TowerError(f"structure map {p} is not surjective in degree {m}")
            if p > self.stab and not (f.source == f.target and f == ChainMap.identity(f.source)):
                raise TowerError(f"structure map {p} past the stabilization index is not the identity")

    def fiber(self, p: int) -> ZComplex:
        return kernel_complex(self.struct(p))[0]

    def extend(self, length: int) -> "Tower":
        """Same tower with identity stages appended up to ``length``."""
        if length <= self.length:
            return self
        extra = length - self.length
        return Tower(self.stages + [self.limit] * extra,
                     self.maps + [ChainMap.identity(self.limit)] * extra, self.stab, check=False)

    def filtered(self) -> FilteredComplex:
        bases = {}
        for p in range(0, self.length + 1):
            pr = self.projection(p - 1)
            bases[p] = {m: (zmod.kernel_basis(pr[m]) if pr.target.rank(m) else identity(self.limit.rank(m)))
                        for m in self.limit.degrees}
        return FilteredComplex(self.limit, bases, 0, self.length)

    def spectral_sequence(self) -> SpectralSequence:
        return SpectralSequence(self.filtered())

    def __eq__(self, other) -> bool:
        return (isinstance(other, Tower) and self.stages == other.stages
                and self.maps == other.maps)

    def to_json(self) -> dict:
        return {"length": self.length, "stab": self.stab,
                "stages": [c.to_json() for c in self.stages],
                "maps": [f.to_json() for f in self.maps]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "Tower":
        try:
            stages = [ZComplex.from_json(c) for c in obj["stages"]]
            maps = [ChainMap.from_json(f, stages[i + 1], stages[i]) for i, f in enumerate(obj["maps"])]
        except (KeyError, IndexError, TypeError) as exc:
            raise TowerError(f"malformed tower document: {exc}") from None
        t = cls(stages, maps, obj.get("stab"))
        if "length" in obj and int(obj["length"]) != t.length:
            raise TowerError("declared length does not match the stages")
        return t


def constant_tower(c: ZComplex, length: int = 0) -> Tower:
    return Tower([c] * (length + 1), [ChainMap.identity(c)] * length, 0)


def quotient_tower(fc: FilteredComplex) -> Tower:
    """``X(p) = C / K_{lo+p+1}``: the tower of quotients of a filtration."""
    c = fc.complex
    n = fc.hi - fc.lo
    quots = []
    for p in range(0, n + 1):
        k = fc.lo + p + 1
        qs = {m: fc.equations(k, m) for m in c.degrees}
        rs = {m: _right_inverse(qs[m]) for m in c.degrees}
        ranks = {m: qs[m].shape[0] for m in c.degrees}
        diffs = {m: matmul(qs.get(m - 1, zeros(0, c.rank(m - 1))), matmul(c.d(m), rs[m]))
                 for m in c.degrees if m - 1 in qs}
        quots.append((ZComplex(ranks, diffs), qs, rs))
    maps = []
    for p in range(1, n + 1):
        (a, _, ra), (b, qb, _) = quots[p], quots[p - 1]
        maps.append(ChainMap(a, b, {m: matmul(qb[m], ra[m]) for m in c.degrees}))
    return Tower([q[0] for q in quots], maps)


def shift(t: Tower, n: int) -> Tower:
    """``X[n](p) = 0`` for ``p < n`` and ``X(p - n)`` otherwise."""
    if n < 0:
        raise TowerError("shift needs n >= 0")
    if n == 0:
        return t
    z = ZComplex.zero()
    stages = [z] * n + t.stages
    maps = [ChainMap.zero(z, z)] * (n - 1) + [ChainMap.zero(t.stages[0], z)] + t.maps
    return Tower(stages, maps, t.stab + n, check=False)


# -- maps of towers --------------------------------------------------------------

@dataclass
class TowerMap:
    """Levelwise chain maps ``f(p) : X(p) -> Y(p)`` commuting with structure maps."""

    source: Tower
    target: Tower
    maps: list

    def at(self, p: int) -> ChainMap:
        if p < 0:
            return ChainMap.zero(ZComplex.zero(), ZComplex.zero())
        if p < len(self.maps):
            return self.maps[p]
        return self.maps[-1]

    @property
    def length(self) -> int:
        return max(self.source.length, self.target.length, len(self.maps) - 1)

    def validate(self) -> None:
        for p in range(0, self.length + 1):
            f = self.at(p)
            if f.source != self.source.stage(p) or f.target != self.target.stage(p):
                raise TowerError(f"component {p} has wrong endpoints")
            if not f.is_valid():
                raise TowerError(f"component {p} is not a chain map")
            if p >= 1:
                lhs = self.target.struct(p) @ f
                rhs = self.at(p - 1) @ self.source.struct(p)
                if not lhs == rhs:
                    raise TowerError(f"component {p} does not commute with the structure maps")

    def limit_map(self) -> ChainMap:
        return self.at(self.length)

    def __matmul__(self, other: "TowerMap") -> "TowerMap":
        n = max(self.length, other.length) + 1
        return TowerMap(other.source, self.target, [self.at(p) @ other.at(p) for p in range(n)])


def identity_tower_map(t: Tower) -> TowerMap:
    return TowerMap(t, t, [ChainMap.identity(c) for c in t.stages])


# -- spectral sequence of a tower -------------------------------------------------

@dataclass
class TowerSS:
    tower: Tower
    ss: SpectralSequence

    @property
    def e1(self) -> SSPage:
        return self.ss.page(1)

    @property
    def e2(self) -> SSPage:
        return self.ss.page(2)


def tower_e2(t: Tower) -> TowerSS:
    """``E_1^{pq} = H_{q-p}(F(p))`` with ``d_1`` the connecting map, and ``E_2``."""
    return TowerSS(t, t.spectral_sequence())


def induced_on_page(f: ChainMap, ssx: SpectralSequence, ssy: SpectralSequence, r: int) -> dict:
    """Matrices of ``E_r(f)`` between page presentations, keyed by ``(p, q)``.

    ``f`` acts on the ambient complexes and must preserve the filtrations.
    """
    px, py = ssx.page(r), ssy.page(r)
    out = {}
    for key in sorted(set(px.entries) | set(py.entries)):
        src, tgt = px.entries.get(key), py.entries.get(key)
        ns = src.presented.ngens if src else 0
        nt = tgt.presented.ngens if tgt else 0
        if src is None or tgt is None or ns == 0 or nt == 0:
            out[key] = (zeros(nt, ns), src, tgt)
            continue
        m = key[1] - key[0]
        img = matmul(f[m], src.basis)
        coords = zmod.solve_in_lattice(tgt.basis, img)
        if coords is None:
            raise TowerError(f"map does not preserve Z_{r} at {key}")
        out[key] = (coords, src, tgt)
    return out


def _presented(e) -> zmod.Presented:
    return e.presented if e is not None else zmod.Presented.free(0)


def is_e2_weak_equivalence(f: TowerMap) -> bool:
    """Does ``f`` induce an isomorphism on every ``E_2^{pq}``?"""
    n = f.length
    x, y = f.source.extend(n), f.target.extend(n)
    g = f.at(n)
    table = induced_on_page(g, x.spectral_sequence(), y.spectral_sequence(), 2)
    return all(zmod.map_is_iso(a, _presented(s), _presented(t)) for a, s, t in table.values())


# -- diagrams of towers -------------------------------------------------------------

class TowerDiagram:
    """A commuting cube of towers; all towers are padded to a common length."""

    def __init__(self, index: Cube, vertices: Mapping, edges: Mapping, check: bool = True):
        self.index = index
        zero = Tower([ZComplex.zero()], [])
        length = max([t.length for t in vertices.values()] + [0])
        self.length = length
        self.vertices = {v: vertices.get(v, zero).extend(length) for v in index.vertices}
        self.edges = {}
        for v in index.vertices:
            for w, _, _ in index.cofaces(v):
                f = edges.get((v, w))
                src, tgt = self.vertices[v], self.vertices[w]
                if f is None:
                    f = TowerMap(src, tgt, [ChainMap.zero(src.stage(p), tgt.stage(p)) for p in range(length + 1)])
                else:
                    f = TowerMap(src, tgt, [f.at(p) for p in range(length + 1)])
                self.edges[(v, w)] = f
        if check:
            self.validate()

    def validate(self) -> None:
        for (v, w), f in self.edges.items():
            try:
                f.validate()
            except TowerError as exc:
                raise TowerError(f"edge {to_bits(v)}->{to_bits(w)}: {exc}") from None
        for p in range(self.length + 1):
            bad = self.stage(p).noncommuting_face()
            if bad:
                raise TowerError(f"stage {p}: {bad} does not commute")

    def stage(self, p: int) -> CubicalDiagram:
        verts = {v: t.stage(p) for v, t in self.vertices.items()}
        edges = {k: f.at(p) for k, f in self.edges.items()}
        return CubicalDiagram(self.index, verts, edges, check=False)


def d_construction(x: TowerDiagram) -> TowerDiagram:
    """Shift vertex ``alpha`` by ``|alpha| - 1``; an edge at stage ``p`` is the
    structure map of the source followed by the original edge map."""
    verts = {v: shift(t, sum(v) - 1) for v, t in x.vertices.items()}
    top = max(t.length for t in verts.values())
    edges = {}
    for (v, w), f in x.edges.items():
        sv, sw = verts[v], verts[w]
        k = sum(v) - 1
        comps = []
        for p in range(top + 1):
            src, tgt = sv.stage(p), sw.stage(p)
            j = p - k        # stage of the original tower at vertex v
            if j <= 0:
                comps.append(ChainMap.zero(src, tgt))
            else:
                comps.append(f.at(j - 1) @ x.vertices[v].struct(j))
        edges[(v, w)] = TowerMap(sv, sw, comps)
    return TowerDiagram(x.index, verts, edges, check=False)


@dataclass
class S2:
    """``s_2`` of a tower diagram, with the layouts of its stages."""

    tower: Tower
    d: TowerDiagram
    layouts: list


def s2_simple_with_layouts(x: TowerDiagram) -> S2:
    dx = d_construction(x)
    length = dx.length
    stages, layouts = [], []
    for p in range(length + 1):
        s, lay = simple_with_layout(dx.stage(p))
        stages.append(s)
        layouts.append(lay)
    maps = []
    for p in range(1, length + 1):
        comps = {v: t.struct(p) for v, t in dx.vertices.items()}
        f = simple_of_map(dx.stage(p), dx.stage(p - 1), comps)
        maps.append(ChainMap(stages[p], stages[p - 1], f.maps))
    return S2(Tower(stages, maps, check=False), dx, layouts)


def s2_simple(x: TowerDiagram) -> Tower:
    """Stage ``p`` is the simple of the stage-``p`` diagram of ``d(X)``."""
    return s2_simple_with_layouts(x).tower


# -- the E_1 comparison ---------------------------------------------------------------

@dataclass
class ComparisonReport:
    """Per ``(p, q)``: is the explicit map an isomorphism, and does it commute with ``d_1``."""

    iso: dict = field(default_factory=dict)
    commutes: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.iso.values()) and all(self.commutes.values())

    def failures(self) -> list:
        return sorted([("iso", k) for k, v in self.iso.items() if not v]
                      + [("d1", k) for k, v in self.commutes.items() if not v])


def comparison_lemma(x: TowerDiagram) -> ComparisonReport:
    """Compare ``E_1(s_2 X)`` with the total complex of the vertexwise ``E_1``.

    The map sends a class at vertex ``alpha`` of ``E_1^{p', q}(X_alpha)`` to
    the same vector placed in the ``alpha`` block of the limit of ``s_2 X``,
    landing in ``E_1^{p'+|alpha|-1, q}``.  It is checked to be an isomorphism
    of presented groups in every spot, and to intertwine ``d_1`` with the
    total differential ``(-1)^(|alpha|-1) d_1 + sum eps * f_*``.
    """
    s2 = s2_simple_with_layouts(x)
    big = s2.tower.spectral_sequence()
    e1 = big.page(1)
    lay = s2.layouts[-1]
    length = s2.tower.length
    # the limit of s2 has vertex alpha at stage length - |alpha| + 1 of X_alpha
    vss = {}
    for v, t in x.vertices.items():
        if s2.d.vertices[v].stage(length) != t.limit:
            raise TowerError("s2 limit does not contain the vertex limits")
        vss[v] = t.spectral_sequence().page(1)
    rep = ComparisonReport()

    def embed(v, m_total: int, vecs: np.ndarray) -> np.ndarray:
        out = zeros(big.c.rank(m_total), vecs.shape[1])
        off, r = lay.block(m_total, v)
        if r:
            out[off:off + r, :] = vecs
        return out

    def iota(p: int, q: int):
        """Generators of the direct sum at s2 spot (p, q), embedded."""
        m = q - p
        cols, pres = [], zmod.Presented.free(0)
        parts = []
        for v in x.index.vertices:
            w = sum(v)
            e = vss[v].entries.get((p - w + 1, q))
            if e is None or e.presented.ngens == 0:
                continue
            cols.append(embed(v, m, e.basis))
            pres = pres.direct_sum(e.presented)
            parts.append((v, e))
        gens = zmod.hstack(cols, big.c.rank(m)) if cols else zeros(big.c.rank(m), 0)
        return gens, pres, parts

    for (p, q), tgt in e1.entries.items():
        gens, pres, parts = iota(p, q)
        if gens.shape[1] == 0:
            rep.iso[(p, q)] = tgt.group.is_trivial
            continue
        coords = zmod.solve_in_lattice(tgt.basis, gens)
        if coords is None:
            rep.iso[(p, q)] = False
            continue
        rep.iso[(p, q)] = zmod.map_is_iso(coords, pres, tgt.presented)
        # d_1 in s2 versus the total differential, both read in E_1^{p+1, q}(s2)
        nxt = e1.entries.get((p + 1, q))
        if nxt is None:
            continue
        lhs = matmul(e1.d[(p, q)], coords)
        m = q - p
        tot_cols = []
        for v, e in parts:
            w = sum(v)
            dz = matmul(x.vertices[v].limit.d(m + w - 1), e.basis)
            col = embed(v, m - 1, dz) * ((-1) ** ((w - 1) % 2))
            for u, _, sign in x.index.cofaces(v):
                fz = matmul(x.edges[(v, u)].limit_map()[m + w - 1], e.basis)
                col = col + sign * embed(u, m - 1, fz)
            tot_cols.append(col)
        total = zmod.hstack(tot_cols, big.c.rank(m - 1))
        rhs = zmod.solve_in_lattice(nxt.basis, total)
        rep.commutes[(p, q)] = rhs is not None and zmod.map_is_zero(lhs - rhs, nxt.presented)
    return rep


# -- the (F2) criterion -------------------------------------------------------------------

@dataclass
class F2Verdict:
    acyclic: bool
    exact: bool

    @property
    def agree(self) -> bool:
        return self.acyclic == self.exact

    def to_json(self) -> dict:
        return {"acyclic": self.acyclic, "exact": self.exact, "agree": self.agree}


def square_tower_map(sq: CubicalDiagram) -> TowerMap:
    """The augmentation of an augmented square, as a map of towers from the
    constant tower on ``X_00`` to ``s_2`` of the constant-tower square."""
    if not (sq.is_augmented and sq.index.n == 1):
        raise TowerError("expected an augmented square")
    plain = sq.restrict()
    tx = TowerDiagram(plain.index, {v: constant_tower(c) for v, c in plain.vertices.items()},
                      {k: TowerMap(constant_tower(f.source), constant_tower(f.target), [f])
                       for k, f in plain.edges.items()})
    s2 = s2_simple_with_layouts(tx)
    length = s2.tower.length
    src = constant_tower(sq[(0, 0)], length)
    lam = augmentation_map(sq)
    comps = []
    for p in range(length + 1):
        tgt = s2.tower.stage(p)
        lay = s2.layouts[p]
        maps = {}
        for m in sq[(0, 0)].degrees:
            mat = zeros(tgt.rank(m), sq[(0, 0)].rank(m))
            for v in ((1, 0), (0, 1)):
                off, r = lay.block(m, v)
                if r:
                    mat[off:off + r, :] = sq.edge((0, 0), v)[m]
            maps[m] = mat
        comps.append(ChainMap(src.stage(p), tgt, maps))
    f = TowerMap(src, s2.tower, comps)
    if not lam.is_valid():
        raise TowerError("square does not give a chain map")
    f.validate()
    return f


def exactness_verdict(sq: CubicalDiagram) -> bool:
    """Is ``0 -> H(X) -> H(X~) + H(Y) -> H(Y~) -> 0`` exact in every degree?"""
    x, xt, y, yt = sq[(0, 0)], sq[(1, 0)], sq[(0, 1)], sq[(1, 1)]
    a = sq.edge((0, 0), (1, 0))
    b = sq.edge((0, 0), (0, 1))
    g = sq.edge((1, 0), (1, 1))
    h = sq.edge((0, 1), (1, 1))
    nz = [c for c in (x, xt, y, yt) if not c.is_zero]
    if not nz:
        return True
    lo, hi = min(c.lo for c in nz), max(c.hi for c in nz)
    first = ChainMap(x, xt.direct_sum(y), {m: zmod.vstack([a[m], b[m]], x.rank(m)) for m in x.degrees})
    mid = xt.direct_sum(y)
    second = ChainMap(mid, yt, {m: zmod.hstack([g[m], -h[m]], yt.rank(m)) for m in mid.degrees})
    for q in range(lo, hi + 1):
        f1, px, pm = complexes.induced_on_homology(first, q)
        f2, _, pt = complexes.induced_on_homology(second, q)
        zero = zmod.Presented.free(0)
        if not zmod.exact_at(zeros(px.ngens, 0), px, f1, pm):
            return False
        if not zmod.exact_at(f1, pm, f2, pt):
            return False
        if not zmod.exact_at(f2, pt, zeros(0, pt.ngens), zero):
            return False
    return True


def f2_tower_criterion(sq: CubicalDiagram) -> F2Verdict:
    """Both sides of the (F2) equivalence on one augmented square."""
    return F2Verdict(is_e2_weak_equivalence(square_tower_map(sq)), exactness_verdict(sq))
