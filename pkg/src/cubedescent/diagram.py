"""Cubical diagrams of complexes and their simple (total) complexes.

The simple of a diagram ``X`` over a plain cube is the total complex

    s(X)_m = sum over alpha of (X_alpha)_{m + |alpha| - 1}

with differential ``(-1)^(|alpha|-1) d + sum_k eps(alpha, k) X(alpha -> alpha + e_k)``.
It is the chain-level model of the homotopy limit over the cube.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence, Union

from . import complexes, zmod
from .complexes import ChainMap, ComplexError, ZComplex
from .cube import Cube, ProductCube, to_bits
from .zmod import zeros

Index = Union[Cube, ProductCube]


class DiagramError(ValueError):
    """Invalid diagram; ``where`` names the offending vertex, edge or face."""

    def __init__(self, message: str, where: Optional[str] = None):
        super().__init__(message if where is None else f"{where}: {message}")
        self.where = where


class CubicalDiagram:
    """A functor from a cubical index category to complexes.

    Missing vertices are zero complexes and missing edges are zero maps.
    Edges are keyed by ``(alpha, beta)`` with ``beta`` a coface of ``alpha``.
    """

    def __init__(self, index: Index, vertices: Mapping, edges: Optional[Mapping] = None,
                 check: bool = True):
        self.index = index
        self.vertices: dict = {}
        for v in index.vertices:
            self.vertices[v] = vertices.get(v, ZComplex.zero())
        for v in vertices:
            if v not in index:
                raise DiagramError("vertex not in the index category", index.label(v) if isinstance(v, tuple) else repr(v))
        self.edges: dict = {}
        edges = dict(edges or {})
        for v in index.vertices:
            for w, _, _ in index.cofaces(v):
                f = edges.pop((v, w), None)
                if f is None:
                    f = ChainMap.zero(self.vertices[v], self.vertices[w])
                self.edges[(v, w)] = f
        if edges:
            v, w = next(iter(edges))
            raise DiagramError("edge is not a coface", self._edge_label(v, w))
        if check:
            self.validate()

    def __getitem__(self, v) -> ZComplex:
        return self.vertices[v]

    def edge(self, v, w) -> ChainMap:
        return self.edges[(v, w)]

    def _edge_label(self, v, w) -> str:
        try:
            return f"{self.index.label(v)}->{self.index.label(w)}"
        except Exception:
            return f"{v!r}->{w!r}"

    def validate(self) -> None:
        for (v, w), f in self.edges.items():
            where = self._edge_label(v, w)
            if f.source != self.vertices[v] or f.target != self.vertices[w]:
                raise DiagramError("edge map endpoints do not match the vertex complexes", where)
            try:
                f.validate()
            except ComplexError as exc:
                raise DiagramError(str(exc), where) from None
        bad = self.noncommuting_face()
        if bad is not None:
            raise DiagramError("face does not commute", bad)

    def noncommuting_face(self) -> Optional[str]:
        """Label of the first square face that fails to commute, if any."""
        for v in self.index.vertices:
            paths: dict = {}
            for w, _, _ in self.index.cofaces(v):
                for u, _, _ in self.index.cofaces(w):
                    paths.setdefault(u, []).append(w)
            for u, mids in paths.items():
                ref = self.edge(mids[0], u) @ self.edge(v, mids[0])
                for w in mids[1:]:
                    other = self.edge(w, u) @ self.edge(v, w)
                    if not _same_maps(ref, other):
                        return (f"face {self.index.label(v)}->{{{self.index.label(mids[0])},"
                                f"{self.index.label(w)}}}->{self.index.label(u)}")
        return None

    @property
    def is_augmented(self) -> bool:
        return isinstance(self.index, Cube) and self.index.augmented

    def restrict(self) -> "CubicalDiagram":
        """Drop the augmentation vertex."""
        if not self.is_augmented:
            return self
        idx = self.index.plain()
        return CubicalDiagram(idx, {v: c for v, c in self.vertices.items() if v in idx},
                              {k: f for k, f in self.edges.items() if k[0] in idx}, check=False)

    def map_vertices(self, fn: Callable[[tuple, ZComplex], ZComplex]) -> "CubicalDiagram":
        return CubicalDiagram(self.index, {v: fn(v, c) for v, c in self.vertices.items()},
                              {}, check=False)

    def to_json(self) -> dict:
        if not isinstance(self.index, Cube):
            raise TypeError("only cube-indexed diagrams serialise")
        return {
            "cube": self.index.n,
            "augmented": self.index.augmented,
            "vertices": {to_bits(v): c.to_json() for v, c in self.vertices.items()},
            "edges": {f"{to_bits(v)}->{to_bits(w)}": f.to_json()
                      for (v, w), f in self.edges.items() if f.maps},
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "CubicalDiagram":
        try:
            cube = Cube(int(obj["cube"]), bool(obj.get("augmented", False)))
        except (KeyError, TypeError, ValueError) as exc:
            raise DiagramError(f"malformed diagram header: {exc}") from None
        verts = {}
        for key, c in (obj.get("vertices") or {}).items():
            try:
                v = cube.parse(key)
            except ValueError as exc:
                raise DiagramError(str(exc), f"vertices.{key}") from None
            try:
                verts[v] = ZComplex.from_json(c)
            except ComplexError as exc:
                raise DiagramError(str(exc), f"vertices.{key}") from None
        edges = {}
        for key, f in (obj.get("edges") or {}).items():
            try:
                a, b = key.split("->")
                v, w = cube.parse(a.strip()), cube.parse(b.strip())
            except ValueError:
                raise DiagramError("edge key must look like '10->11'", f"edges.{key}") from None
            try:
                edges[(v, w)] = ChainMap.from_json(f, verts.get(v, ZComplex.zero()), verts.get(w, ZComplex.zero()))
            except ComplexError as exc:
                raise DiagramError(str(exc), f"edges.{key}") from None
        return cls(cube, verts, edges)


def _same_maps(f: ChainMap, g: ChainMap) -> bool:
    degs = set(f.maps) | set(g.maps)
    return all(zmod.equal(f[m], g[m]) for m in degs)


# -- total complexes ------------------------------------------------------------

@dataclass(frozen=True)
class Layout:
    """Block positions of the vertex summands in each degree of a total complex."""

    blocks: dict  # m -> list of (vertex, offset, rank)

    def block(self, m: int, v) -> tuple[int, int]:
        for u, off, r in self.blocks.get(m, ()):
            if u == v:
                return off, r
        return 0, 0

    def rank(self, m: int) -> int:
        return sum(r for _, _, r in self.blocks.get(m, ()))

    def coordinates(self, m: int, select: Callable[[tuple], bool]) -> list[int]:
        out = []
        for v, off, r in self.blocks.get(m, ()):
            if select(v):
                out.extend(range(off, off + r))
        return out


def _total(index: Index, verts: Mapping, edges: Mapping) -> tuple[ZComplex, Layout]:
    shift = index.shift
    lo = hi = None
    for v in index.vertices:
        c = verts[v]
        if c.is_zero:
            continue
        a, b = c.lo - shift(v), c.hi - shift(v)
        lo = a if lo is None else min(lo, a)
        hi = b if hi is None else max(hi, b)
    if lo is None:
        return ZComplex.zero(), Layout({})
    blocks = {}
    for m in range(lo, hi + 1):
        row, off = [], 0
        for v in index.vertices:
            r = verts[v].rank(m + shift(v))
            row.append((v, off, r))
            off += r
        blocks[m] = row
    layout = Layout(blocks)
    ranks = {m: layout.rank(m) for m in blocks}
    diffs = {}
    for m in range(lo + 1, hi + 1):
        out = zeros(layout.rank(m - 1), layout.rank(m))
        for v, off, r in blocks[m]:
            if not r:
                continue
            dv = shift(v)
            q = m + dv
            toff, tr = layout.block(m - 1, v)
            if tr:
                out[toff:toff + tr, off:off + r] = (-1) ** (dv % 2) * verts[v].d(q)
            for w, _, sign in index.cofaces(v):
                woff, wr = layout.block(m - 1, w)
                if wr:
                    out[woff:woff + wr, off:off + r] += sign * edges[(v, w)][q]
        diffs[m] = out
    return ZComplex(ranks, diffs, check=False), layout


def simple_with_layout(x: CubicalDiagram) -> tuple[ZComplex, Layout]:
    if x.is_augmented:
        raise DiagramError("simple() takes a plain diagram; use simple_augmented()")
    return _total(x.index, x.vertices, x.edges)


def simple(x: CubicalDiagram) -> ZComplex:
    """Total complex of a diagram over a plain cube or a product of cubes."""
    return simple_with_layout(x)[0]


def augmentation_map(xp: CubicalDiagram) -> ChainMap:
    """``lambda : X_0 -> s(X)``, the sum of the edge maps out of the zero vertex."""
    if not xp.is_augmented:
        raise DiagramError("augmentation_map() needs an augmented diagram")
    x = xp.restrict()
    s, layout = simple_with_layout(x)
    x0 = xp[xp.index.zero]
    maps = {}
    for m in x0.degrees:
        mat = zeros(s.rank(m), x0.rank(m))
        for v, off, r in layout.blocks.get(m, ()):
            if r and sum(v) == 1:
                mat[off:off + r, :] = xp.edge(xp.index.zero, v)[m]
        maps[m] = mat
    return ChainMap(x0, s, maps)


def simple_augmented(xp: CubicalDiagram) -> ZComplex:
    """Simple of an augmented diagram: the fiber of the augmentation."""
    return complexes.fiber(augmentation_map(xp))


def simple_augmented_iterated(xp: CubicalDiagram) -> ZComplex:
    """Same object computed as iterated vertexwise fibers along the first letter."""
    if not xp.is_augmented:
        raise DiagramError("simple_augmented_iterated() needs an augmented diagram")
    n = xp.index.n
    if n == 0:
        return complexes.fiber(xp.edge((0,), (1,)))
    sub = Cube(n - 1, True)
    fibers, fmaps = {}, {}
    for b in sub.vertices:
        fibers[b] = complexes.fiber(xp.edge((0,) + b, (1,) + b))
    for b in sub.vertices:
        for b2, _, _ in sub.cofaces(b):
            g = xp.edge((0,) + b, (0,) + b2)
            h = xp.edge((1,) + b, (1,) + b2)
            fmaps[(b, b2)] = fiber_functor(fibers[b], fibers[b2], g, h)
    return simple_augmented_iterated(CubicalDiagram(sub, fibers, fmaps, check=False))


def fiber_functor(src: ZComplex, tgt: ZComplex, g: ChainMap, h: ChainMap) -> ChainMap:
    """Map of fibers induced by a commuting square, ``(a, b) -> (g a, h b)``."""
    maps = {}
    for m in src.degrees:
        maps[m] = zmod.block_diag([g[m], h[m + 1]])
    return ChainMap(src, tgt, maps)


def is_acyclic(xp: CubicalDiagram) -> bool:
    """An augmented diagram is acyclic iff its simple has no homology."""
    return complexes.is_acyclic(simple_augmented(xp))


def simple_of_map(x: CubicalDiagram, y: CubicalDiagram, comps: Mapping) -> ChainMap:
    """``s(f)`` for a vertexwise map ``f : X -> Y`` over the same index."""
    sx, lx = simple_with_layout(x)
    sy, ly = simple_with_layout(y)
    maps = {}
    for m in sorted(set(sx.degrees) | set(sy.degrees)):
        mat = zeros(sy.rank(m), sx.rank(m))
        for v, off, r in lx.blocks.get(m, ()):
            toff, tr = ly.block(m, v)
            if r and tr:
                mat[toff:toff + tr, off:off + r] = comps[v][m + x.index.shift(v)]
        maps[m] = mat
    return ChainMap(sx, sy, maps)


def vertexwise_sum(x: CubicalDiagram, y: CubicalDiagram) -> CubicalDiagram:
    verts = {v: x[v].direct_sum(y[v]) for v in x.index.vertices}
    edges = {k: x.edges[k].direct_sum(y.edges[k]) for k in x.edges}
    return CubicalDiagram(x.index, verts, edges, check=False)


def constant(index: Cube, c: ZComplex) -> CubicalDiagram:
    """Every vertex ``c``, every edge the identity."""
    idv = ChainMap.identity(c)
    edges = {(v, w): idv for v in index.vertices for w, _, _ in index.cofaces(v)}
    return CubicalDiagram(index, {v: c for v in index.vertices}, edges, check=False)


def truncate(x: CubicalDiagram, keep: Callable[[tuple], bool]) -> CubicalDiagram:
    """Replace every vertex failing ``keep`` by zero."""
    verts = {v: (c if keep(v) else ZComplex.zero()) for v, c in x.vertices.items()}
    edges = {(v, w): f for (v, w), f in x.edges.items() if keep(v) and keep(w)}
    return CubicalDiagram(x.index, verts, edges, check=False)


# -- morphisms of diagrams ---------------------------------------------------------

def _koszul_sign(injection: Sequence[int], alpha: tuple) -> int:
    img = [injection[k] for k, b in enumerate(alpha) if b]
    inv = sum(1 for i in range(len(img)) for j in range(i + 1, len(img)) if img[i] > img[j])
    return -1 if inv % 2 else 1


class DiagramMorphism:
    """A morphism ``(X, cube) -> (Y, cube')``.

    It consists of an injection of letters ``injection[k]`` (letter ``k`` of
    the cube of ``Y`` goes to a letter of the cube of ``X``) and chain maps
    ``components[alpha'] : X_{delta(alpha')} -> Y_{alpha'}`` natural in
    ``alpha'``.
    """

    def __init__(self, source: CubicalDiagram, target: CubicalDiagram,
                 components: Mapping, injection: Optional[Sequence[int]] = None, check: bool = True):
        self.source = source
        self.target = target
        n_src = source.index.size
        n_tgt = target.index.size
        self.injection = tuple(range(n_tgt)) if injection is None else tuple(injection)
        if len(self.injection) != n_tgt or len(set(self.injection)) != n_tgt or \
                any(not 0 <= i < n_src for i in self.injection):
            raise DiagramError(f"bad letter injection {self.injection}")
        self.components = {}
        for v in target.index.vertices:
            f = components.get(v)
            if f is None:
                f = ChainMap.zero(source[self.delta(v)], target[v])
            self.components[v] = f
        if check:
            self.validate()

    def delta(self, alpha: tuple) -> tuple:
        out = [0] * self.source.index.size
        for k, b in enumerate(alpha):
            if b:
                out[self.injection[k]] = 1
        return tuple(out)

    def validate(self) -> None:
        for v, f in self.components.items():
            where = f"component {to_bits(v)}"
            if f.source != self.source[self.delta(v)] or f.target != self.target[v]:
                raise DiagramError("component endpoints mismatch", where)
            try:
                f.validate()
            except ComplexError as exc:
                raise DiagramError(str(exc), where) from None
        for (v, w), g in self.target.edges.items():
            lhs = g @ self.components[v]
            rhs = self.components[w] @ self.source.edge(self.delta(v), self.delta(w))
            if not _same_maps(lhs, rhs):
                raise DiagramError("not natural", f"edge {to_bits(v)}->{to_bits(w)}")

    def induced(self) -> ChainMap:
        """``s(X) -> s(Y)``: restriction along the injection, then the components."""
        sx, lx = simple_with_layout(self.source)
        sy, ly = simple_with_layout(self.target)
        maps = {}
        for m in sorted(set(sx.degrees) | set(sy.degrees)):
            mat = zeros(sy.rank(m), sx.rank(m))
            for v, off, r in ly.blocks.get(m, ()):
                u = self.delta(v)
                soff, sr = lx.block(m, u)
                if r and sr:
                    sign = _koszul_sign(self.injection, v)
                    mat[off:off + r, soff:soff + sr] = sign * self.components[v][m + sum(v) - 1]
            maps[m] = mat
        return ChainMap(sx, sy, maps)

    def then(self, other: "DiagramMorphism") -> "DiagramMorphism":
        """Composite ``other o self``."""
        inj = tuple(self.injection[i] for i in other.injection)
        comps = {v: other.components[v] @ self.components[other.delta(v)]
                 for v in other.target.index.vertices}
        return DiagramMorphism(self.source, other.target, comps, inj)


def identity_morphism(x: CubicalDiagram) -> DiagramMorphism:
    return DiagramMorphism(x, x, {v: ChainMap.identity(c) for v, c in x.vertices.items()})


# -- products of cubes -------------------------------------------------------------

def restrict_to_product(x: CubicalDiagram, split: int) -> CubicalDiagram:
    """View a diagram over an augmented cube on ``a + b`` letters as a diagram
    over ``cube(a-1) x cube(b-1)`` (both halves nonzero)."""
    n = x.index.size
    a_cube, b_cube = Cube(split - 1), Cube(n - split - 1)
    idx = ProductCube((a_cube, b_cube))
    verts, edges = {}, {}
    for v in idx.vertices:
        verts[v] = x[v[0] + v[1]]
    for v in idx.vertices:
        for w, _, _ in idx.cofaces(v):
            edges[(v, w)] = x.edge(v[0] + v[1], w[0] + w[1])
    return CubicalDiagram(idx, verts, edges, check=False)


def iterated_simple(x: CubicalDiagram, outer: int = 0) -> tuple[ZComplex, Callable]:
    """``s_A s_B X`` (outer=0) or ``s_B s_A X`` (outer=1) for ``X`` over ``A x B``.

    Returns the complex and a function giving, for degree ``m`` and product
    vertex ``(alpha, beta)``, the offset of that summand.
    """
    idx = x.index
    if not isinstance(idx, ProductCube) or len(idx.factors) != 2:
        raise DiagramError("iterated_simple() needs a diagram over a product of two cubes")
    inner_i = 1 - outer
    outer_cube, inner_cube = idx.factors[outer], idx.factors[inner_i]

    def pv(o, i):
        return (o, i) if outer == 0 else (i, o)

    inner, inner_layouts = {}, {}
    for o in outer_cube.vertices:
        sub = CubicalDiagram(inner_cube, {i: x[pv(o, i)] for i in inner_cube.vertices},
                             {(i, j): x.edge(pv(o, i), pv(o, j))
                              for i in inner_cube.vertices for j, _, _ in inner_cube.cofaces(i)},
                             check=False)
        inner[o], inner_layouts[o] = simple_with_layout(sub)
    omaps = {}
    for o in outer_cube.vertices:
        for o2, _, _ in outer_cube.cofaces(o):
            comps = {i: x.edge(pv(o, i), pv(o2, i)) for i in inner_cube.vertices}
            src = CubicalDiagram(inner_cube, {i: x[pv(o, i)] for i in inner_cube.vertices}, {}, check=False)
            tgt = CubicalDiagram(inner_cube, {i: x[pv(o2, i)] for i in inner_cube.vertices}, {}, check=False)
            f = simple_of_map(src, tgt, comps)
            omaps[(o, o2)] = ChainMap(inner[o], inner[o2], f.maps)
    outer_diag = CubicalDiagram(outer_cube, inner, omaps, check=False)
    total, layout = simple_with_layout(outer_diag)

    def offset(m: int, v) -> tuple[int, int]:
        o, i = (v[0], v[1]) if outer == 0 else (v[1], v[0])
        base, _ = layout.block(m, o)
        q = m + outer_cube.shift(o)
        off, r = inner_layouts[o].block(q, i)
        return base + off, r

    return total, offset


def factorisation_map(x: CubicalDiagram, outer: int = 0) -> ChainMap:
    """The signed permutation ``mu : s_{A x B} X -> s_A s_B X`` (or ``s_B s_A``).

    Sign on the ``(alpha, beta)`` summand: ``(-1)^(|beta|-1)`` for ``A``
    outer and ``(-1)^(|alpha| (|beta|-1))`` for ``B`` outer.
    """
    direct, layout = simple_with_layout(x)
    it, offset = iterated_simple(x, outer)
    maps = {}
    for m in sorted(set(direct.degrees) | set(it.degrees)):
        mat = zeros(it.rank(m), direct.rank(m))
        for v, off, r in layout.blocks.get(m, ()):
            if not r:
                continue
            a, b = sum(v[0]), sum(v[1])
            sign = (-1) ** ((b - 1) % 2) if outer == 0 else (-1) ** ((a * (b - 1)) % 2)
            toff, tr = offset(m, v)
            for t in range(r):
                mat[toff + t, off + t] = sign
        maps[m] = mat
    return ChainMap(direct, it, maps)
