"""Descent K-theory of cubical hyperresolution documents.

A document assigns to each vertex of a cube a complex whose homology stands
in for the K-groups of a smooth variety, and to each edge the pullback map.
``KD(X)`` is the simple of that diagram; its homology carries the weight
filtration coming from the cube.

The blow-up model works degreewise with free data.  For a blow-up of ``X``
along a smooth ``Y`` of codimension ``d`` with exceptional divisor ``Y~``,
``K(Y~)`` is written as ``K(Y)^d`` (projective bundle basis ``t^i``, where
``t`` is the class of ``O(-1)``) and ``K(X~)`` as ``K(X) + K(Y)^(d-1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import numpy as np

from . import complexes, zmod
from .complexes import ChainMap, ComplexError, ZComplex
from .cube import Cube, from_bits, to_bits
from .diagram import (CubicalDiagram, DiagramError, DiagramMorphism, augmentation_map, is_acyclic,
                      simple, simple_with_layout)
from .spectral import SpectralSequence, weight_filtered
from .zmod import FgAbGroup, Presented, identity, matmul, zeros


class DocumentError(ValueError):
    """Malformed or inconsistent document; ``where`` locates the problem."""

    def __init__(self, message: str, where: Optional[str] = None):
        super().__init__(message if where is None else f"{where}: {message}")
        self.message = message
        self.where = where

    @classmethod
    def wrap(cls, exc: DiagramError, prefix: str) -> "DocumentError":
        msg = str(exc)
        if exc.where and msg.startswith(exc.where + ": "):
            msg = msg[len(exc.where) + 2:]
        return cls(msg, prefix if not exc.where else f"{prefix} {exc.where}")


# -- documents --------------------------------------------------------------------

@dataclass
class HyperresolutionDoc:
    name: str
    dimension: int
    diagram: CubicalDiagram
    labels: dict = field(default_factory=dict)
    augmentation: Optional[ZComplex] = None
    augmentation_maps: dict = field(default_factory=dict)   # weight-1 vertex -> ChainMap

    def __post_init__(self):
        self.validate()

    @property
    def cube(self) -> int:
        return self.diagram.index.n

    def validate(self) -> None:
        if self.diagram.is_augmented:
            raise DocumentError("the vertex diagram must be over a plain cube", "cube")
        if self.dimension < 0:
            raise DocumentError("dimension must be >= 0", "dimension")
        if self.cube > self.dimension:
            raise DocumentError(f"cube {self.cube} exceeds the dimension {self.dimension}", "cube")
        try:
            self.diagram.validate()
        except DiagramError as exc:
            raise DocumentError.wrap(exc, "diagram") from None
        if self.augmentation is not None:
            try:
                self.augmented_diagram().validate()
            except DiagramError as exc:
                raise DocumentError.wrap(exc, "augmentation") from None

    def augmented_diagram(self) -> CubicalDiagram:
        if self.augmentation is None:
            raise DocumentError("document has no augmentation", "augmentation")
        idx = Cube(self.cube, True)
        z = idx.zero
        verts = dict(self.diagram.vertices)
        verts[z] = self.augmentation
        edges = dict(self.diagram.edges)
        for v, f in self.augmentation_maps.items():
            edges[(z, v)] = f
        return CubicalDiagram(idx, verts, edges, check=False)

    def to_json(self) -> dict:
        d = self.diagram.to_json()
        out = {"name": self.name, "dimension": self.dimension, "cube": self.cube,
               "vertices": {k: {"label": self.labels.get(from_bits(k), ""), "complex": c}
                            for k, c in d["vertices"].items()},
               "edges": d["edges"]}
        if self.augmentation is not None:
            out["augmentation"] = {"complex": self.augmentation.to_json(),
                                   "maps": {to_bits(v): f.to_json() for v, f in self.augmentation_maps.items()}}
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "HyperresolutionDoc":
        if not isinstance(obj, Mapping):
            raise DocumentError("document must be a JSON object")
        for key in ("cube", "vertices"):
            if key not in obj:
                raise DocumentError("missing field", key)
        try:
            n = int(obj["cube"])
            cube = Cube(n)
        except (TypeError, ValueError) as exc:
            raise DocumentError(f"bad cube: {exc}", "cube") from None
        labels, verts = {}, {}
        for key, ent in (obj.get("vertices") or {}).items():
            where = f"vertices.{key}"
            try:
                v = cube.parse(key)
            except ValueError as exc:
                raise DocumentError(str(exc), where) from None
            if not isinstance(ent, Mapping) or "complex" not in ent:
                raise DocumentError("vertex needs a 'complex'", where)
            labels[v] = str(ent.get("label", ""))
            try:
                verts[v] = ZComplex.from_json(ent["complex"])
            except (ComplexError, KeyError, TypeError, ValueError) as exc:
                raise DocumentError(str(exc), where) from None
        edges = {}
        for key, f in (obj.get("edges") or {}).items():
            where = f"edges.{key}"
            try:
                a, b = key.split("->")
                v, w = cube.parse(a.strip()), cube.parse(b.strip())
            except ValueError:
                raise DocumentError("edge key must look like '10->11'", where) from None
            try:
                edges[(v, w)] = ChainMap.from_json(f, verts.get(v, ZComplex.zero()), verts.get(w, ZComplex.zero()))
            except (ComplexError, KeyError, TypeError, ValueError) as exc:
                raise DocumentError(str(exc), where) from None
        try:
            diagram = CubicalDiagram(cube, verts, edges, check=False)
        except DiagramError as exc:
            raise DocumentError(str(exc), "edges") from None
        aug, amaps = None, {}
        if obj.get("augmentation") is not None:
            a = obj["augmentation"]
            try:
                aug = ZComplex.from_json(a["complex"])
                for key, f in (a.get("maps") or {}).items():
                    v = cube.parse(key)
                    if sum(v) != 1:
                        raise DocumentError("augmentation maps go to weight-one vertices", f"augmentation.maps.{key}")
                    amaps[v] = ChainMap.from_json(f, aug, diagram[v])
            except DocumentError:
                raise
            except (ComplexError, KeyError, TypeError, ValueError) as exc:
                raise DocumentError(str(exc), "augmentation") from None
        dim = obj.get("dimension", n)
        try:
            dim = int(dim)
        except (TypeError, ValueError):
            raise DocumentError("dimension must be an integer", "dimension") from None
        return cls(str(obj.get("name", "")), dim, diagram, labels, aug, amaps)


# -- KD groups and weights ----------------------------------------------------------

def assemble_kd(doc: HyperresolutionDoc) -> ZComplex:
    """``KD(X)``: the simple of the document's diagram."""
    return simple(doc.diagram)


@dataclass
class KDRow:
    n: int
    group: FgAbGroup
    weights: dict   # p -> FgAbGroup (graded piece)

    def to_json(self) -> dict:
        return {"n": self.n, "group": self.group.to_json(),
                "weights": {str(p): g.to_json() for p, g in sorted(self.weights.items())}}


@dataclass
class KDTable:
    name: str
    cube: int
    dimension: int
    rows: list
    vanishing_ok: bool        # KD_n = 0 for n < -dimension
    weights_ok: bool          # graded pieces recover the group and live in 0..cube
    convergence_ok: bool      # E_infinity matches the filtration

    @property
    def ok(self) -> bool:
        return self.vanishing_ok and self.weights_ok and self.convergence_ok

    def row(self, n: int) -> KDRow:
        for r in self.rows:
            if r.n == n:
                return r
        raise KeyError(n)

    def to_json(self) -> dict:
        return {"name": self.name, "cube": self.cube, "dimension": self.dimension,
                "rows": [r.to_json() for r in self.rows],
                "checks": {"vanishing": self.vanishing_ok, "weights": self.weights_ok,
                           "convergence": self.convergence_ok}}


def _support(c: ZComplex) -> range:
    return range(c.lo, c.hi + 1) if not c.is_zero else range(0)


def kd_groups_and_weights(doc: HyperresolutionDoc, n_range: Optional[Sequence[int]] = None) -> KDTable:
    """KD groups with their weight graded pieces over ``n_range`` (high to low)."""
    ss = SpectralSequence(weight_filtered(doc.diagram))
    kd = ss.c
    if n_range is None:
        n_range = range(kd.hi + 1, kd.lo - 2, -1) if not kd.is_zero else range(1, -2, -1)
    rows, weights_ok, conv_ok = [], True, True
    for n in n_range:
        grp = complexes.homology(kd, n)
        if n in _support(kd):
            wf = ss.filtration(n)
            w = wf.weights()
            conv_ok &= all(ok for _, _, ok in ss.convergence(n).values())
        else:
            w = {p: FgAbGroup(0, ()) for p in range(0, doc.cube + 1)}
        weights_ok &= sum(g.rank for g in w.values()) == grp.rank
        weights_ok &= all(0 <= p <= doc.cube for p, g in w.items() if not g.is_trivial)
        rows.append(KDRow(n, grp, w))
    vanishing_ok = all(complexes.homology(kd, n).is_trivial for n in _support(kd) if n < -doc.dimension)
    return KDTable(doc.name, doc.cube, doc.dimension, rows, vanishing_ok, weights_ok, conv_ok)


def vanishes_below_cube(doc: HyperresolutionDoc) -> bool:
    """With vertex complexes in degrees >= 0, ``KD_n = 0`` for ``n < -cube``."""
    kd = assemble_kd(doc)
    return all(complexes.homology(kd, n).is_trivial for n in _support(kd) if n < -doc.cube)


# -- exact sequences -------------------------------------------------------------------

@dataclass
class SequenceNode:
    label: str
    degree: int
    presented: Presented

    @property
    def group(self) -> FgAbGroup:
        return self.presented.group


@dataclass
class ExactSequenceReport:
    """A finite sequence ``0 -> N_0 -> N_1 -> ... -> N_k -> 0`` with exactness flags."""

    nodes: list
    maps: list          # maps[i] : nodes[i] -> nodes[i+1]
    exact: list = field(default_factory=list)

    def __post_init__(self):
        if not self.exact:
            self.exact = self._check()

    def _check(self) -> list:
        out = []
        zero = Presented.free(0)
        for i, node in enumerate(self.nodes):
            pres = node.presented
            a_in = self.maps[i - 1] if i > 0 else zeros(pres.ngens, 0)
            if i < len(self.maps):
                a_out, tgt = self.maps[i], self.nodes[i + 1].presented
            else:
                a_out, tgt = zeros(0, pres.ngens), zero
            out.append(zmod.exact_at(a_in, pres, a_out, tgt))
        return out

    @property
    def ok(self) -> bool:
        return all(self.exact)

    def failures(self) -> list:
        return [(n.label, n.degree) for n, e in zip(self.nodes, self.exact) if not e]

    def to_json(self) -> dict:
        return {"nodes": [{"label": n.label, "degree": n.degree, **n.group.to_json(), "exact": e}
                          for n, e in zip(self.nodes, self.exact)],
                "ok": self.ok}


def _classes(c: ZComplex, q: int, vecs: np.ndarray) -> tuple[Presented, np.ndarray, np.ndarray]:
    """Presentation of ``H_q(c)``, its cycle basis, and coordinates of cycle vectors."""
    pres, cyc = complexes.homology_presentation(c, q)
    if vecs.shape[1] == 0:
        return pres, cyc, zeros(pres.ngens, 0)
    coords = zmod.solve_in_lattice(cyc, vecs)
    if coords is None:
        raise ComplexError("vector is not a cycle", q)
    return pres, cyc, coords


def _sum_map(a: ChainMap, b: ChainMap) -> ChainMap:
    """``x -> (a x, b x)``."""
    tgt = a.target.direct_sum(b.target)
    return ChainMap(a.source, tgt, {m: zmod.vstack([a[m], b[m]], a.source.rank(m)) for m in a.source.degrees})


def _diff_map(g: ChainMap, h: ChainMap) -> ChainMap:
    """``(u, v) -> g u - h v``."""
    src = g.source.direct_sum(h.source)
    return ChainMap(src, g.target, {m: zmod.hstack([g[m], -h[m]], g.target.rank(m)) for m in src.degrees})


def _degree_window(*cs: ZComplex) -> range:
    nz = [c for c in cs if not c.is_zero]
    if not nz:
        return range(0)
    return range(max(c.hi for c in nz) + 1, min(c.lo for c in nz) - 2, -1)


def square_sequence(sq: CubicalDiagram) -> ExactSequenceReport:
    """``... -> H_n(X) -> H_n(X~) + H_n(Y) -> H_n(Y~) -> H_{n-1}(X) -> ...`` for an
    acyclic augmented square.  The connecting map goes through the simple of
    the square and back along the (invertible) augmentation."""
    if not (sq.is_augmented and sq.index.n == 1):
        raise DiagramError("expected an augmented square")
    x, yt = sq[(0, 0)], sq[(1, 1)]
    first = _sum_map(sq.edge((0, 0), (1, 0)), sq.edge((0, 0), (0, 1)))
    second = _diff_map(sq.edge((1, 0), (1, 1)), sq.edge((0, 1), (1, 1)))
    mid = first.target
    plain = sq.restrict()
    s, lay = simple_with_layout(plain)
    lam = augmentation_map(sq)
    nodes, maps = [], []
    prev_cyc = None   # cycle basis of the previous node, to express the next map
    for n in _degree_window(x, mid, yt, s):
        px, cx = complexes.homology_presentation(x, n)
        pm, cm = complexes.homology_presentation(mid, n)
        pt, ct = complexes.homology_presentation(yt, n)
        if nodes:
            # connecting map from H_{n+1}(Y~) into H_n(X)
            maps.append(_connecting(prev_cyc, s, lay, lam, n, px, cx))
        nodes.append(SequenceNode("X", n, px))
        maps.append(_coords(matmul(first[n], cx), cm))
        nodes.append(SequenceNode("X~+Y", n, pm))
        maps.append(_coords(matmul(second[n], cm), ct))
        nodes.append(SequenceNode("Y~", n, pt))
        prev_cyc = ct
    return ExactSequenceReport(nodes, maps)


def _coords(vecs: np.ndarray, cyc: np.ndarray) -> np.ndarray:
    if vecs.shape[1] == 0 or cyc.shape[1] == 0:
        return zeros(cyc.shape[1], vecs.shape[1])
    c = zmod.solve_in_lattice(cyc, vecs)
    if c is None:
        raise ComplexError("image is not a cycle")
    return c


def _connecting(ycyc: np.ndarray, s: ZComplex, lay, lam: ChainMap, n: int,
                px: Presented, cx: np.ndarray) -> np.ndarray:
    """``H_{n+1}(Y~) -> H_n(s) -> H_n(X)`` through the inverse of ``H(lambda)``."""
    k = ycyc.shape[1]
    ps, cs = complexes.homology_presentation(s, n)
    emb = zeros(s.rank(n), k)
    off, r = lay.block(n, (1, 1))
    if r and k:
        emb[off:off + r, :] = ycyc
    cls = _coords(emb, cs)
    lam_m = _coords(matmul(lam[n], cx), cs)
    if k == 0:
        return zeros(px.ngens, 0)
    sol = zmod.solve_in_lattice(zmod.hstack([lam_m, ps.relations], ps.ngens), cls)
    if sol is None:
        raise ComplexError("augmentation is not onto homology; the square is not acyclic", n)
    return sol[:px.ngens, :]


def path_object(w: ZComplex) -> ZComplex:
    """``Path(W)_m = W_m + W_{m+1}``, ``d(a, b) = (da, a - db)``; acyclic."""
    return complexes.fiber(ChainMap.identity(w))


def strict_augmentation(x: CubicalDiagram) -> CubicalDiagram:
    """Augment a square ``U -> W <- V`` by its own simple ``P``.

    ``V`` is replaced by ``V' = V + Path(W)`` so the square commutes on the
    nose: ``P -> U`` is the projection and ``P -> V'`` is
    ``(u, v, w) -> (v, f u - g v, -w)``.  ``V' -> W`` is ``(v, a, b) -> g v + a``.
    """
    if x.is_augmented or x.index.n != 1:
        raise DiagramError("expected a plain square")
    u, v, w = x[(1, 0)], x[(0, 1)], x[(1, 1)]
    f, g = x.edge((1, 0), (1, 1)), x.edge((0, 1), (1, 1))
    p, lay = simple_with_layout(x)
    path = path_object(w)
    vp = v.direct_sum(path)
    to_u, to_vp = {}, {}
    for m in p.degrees:
        cols_u = zeros(u.rank(m), p.rank(m))
        cols_v = zeros(vp.rank(m), p.rank(m))
        ou, ru = lay.block(m, (1, 0))
        ov, rv = lay.block(m, (0, 1))
        ow, rw = lay.block(m, (1, 1))
        cols_u[:, ou:ou + ru] = identity(ru)
        # V' coordinates: v (rank V_m), then path: W_m then W_{m+1}
        cols_v[0:rv, ov:ov + rv] = identity(rv)
        base = v.rank(m)
        cols_v[base:base + w.rank(m), ou:ou + ru] = f[m]
        cols_v[base:base + w.rank(m), ov:ov + rv] = -g[m]
        cols_v[base + w.rank(m):base + w.rank(m) + rw, ow:ow + rw] = -identity(rw)
        to_u[m], to_vp[m] = cols_u, cols_v
    vp_to_w = {m: zmod.hstack([g[m], identity(w.rank(m)), zeros(w.rank(m), w.rank(m + 1))], w.rank(m))
               for m in vp.degrees}
    idx = Cube(1, True)
    return CubicalDiagram(idx, {(0, 0): p, (1, 0): u, (0, 1): vp, (1, 1): w},
                          {((0, 0), (1, 0)): ChainMap(p, u, to_u),
                           ((0, 0), (0, 1)): ChainMap(p, vp, to_vp),
                           ((1, 0), (1, 1)): f,
                           ((0, 1), (1, 1)): ChainMap(vp, w, vp_to_w)})


def acyclic_square_sequence(doc_or_square) -> tuple[ExactSequenceReport, bool]:
    """Long exact sequence of an acyclic square.

    Accepts an augmented square diagram, a document with an augmentation, or
    a plain square document (augmented by its own ``KD``).  Returns the
    sequence report and the acyclicity verdict.
    """
    if isinstance(doc_or_square, HyperresolutionDoc):
        doc = doc_or_square
        sq = doc.augmented_diagram() if doc.augmentation is not None else strict_augmentation(doc.diagram)
    elif isinstance(doc_or_square, CubicalDiagram) and not doc_or_square.is_augmented:
        sq = strict_augmentation(doc_or_square)
    else:
        sq = doc_or_square
    sq.validate()
    acyc = is_acyclic(sq)
    if not acyc:
        return ExactSequenceReport([], [], [False]), False
    return square_sequence(sq), acyc


# -- blow-ups ------------------------------------------------------------------------------

def _degreewise(obj, default=None) -> dict:
    if obj is None:
        return {} if default is None else default
    if isinstance(obj, Mapping):
        return {int(k): v for k, v in obj.items()}
    return {0: obj}


@dataclass
class BlowupData:
    """Free degreewise data for a blow-up square.

    Args:
        d: codimension of ``Y`` in ``X``.
        kx, ky: ranks of ``K_n(X)`` and ``K_n(Y)`` per degree ``n``.
        istar: matrices of ``i^*`` per degree.
        L: matrices of multiplication by ``t = [O(-1)]`` on ``K_n(Y~) = K_n(Y)^d``.
        lambdaN: matrices of multiplication by ``lambda_{-1}`` of the
            exceptional normal bundle; defaults to ``I - L^{-1}``.
        jstar: optional matrices of ``j^*`` in the ``Phi``/``Psi`` bases,
            checked against the model.
    """

    d: int
    kx: dict
    ky: dict
    istar: dict
    L: dict
    lambdaN: dict = field(default_factory=dict)
    jstar: dict = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        self.kx = {int(k): int(v) for k, v in _degreewise(self.kx).items()}
        self.ky = {int(k): int(v) for k, v in _degreewise(self.ky).items()}
        self.istar = self._matrices("istar", lambda k: (self.ky.get(k, 0), self.kx.get(k, 0)))
        self.L = self._matrices("L")
        self.lambdaN = self._matrices("lambdaN")
        self.jstar = self._matrices("jstar")
        self.validate()

    def _matrices(self, name: str, shape=None) -> dict:
        out = {}
        for k, v in _degreewise(getattr(self, name)).items():
            try:
                out[k] = zmod.as_int_matrix(v, shape(k) if shape else None)
            except (zmod.ShapeError, TypeError) as exc:
                raise DocumentError(str(exc), f"{name}.{k}") from None
        return out

    def degrees(self) -> list[int]:
        return sorted(set(self.kx) | set(self.ky))

    def rx(self, n: int) -> int:
        return self.kx.get(n, 0)

    def ry(self, n: int) -> int:
        return self.ky.get(n, 0)

    def validate(self) -> None:
        if self.d < 1:
            raise DocumentError("codimension must be >= 1", "d")
        for n in self.degrees():
            ry, rx = self.ry(n), self.rx(n)
            big = self.d * ry
            where = f"degree {n}"
            if self.istar.get(n, zeros(ry, rx)).shape != (ry, rx):
                raise DocumentError(f"istar must be {ry}x{rx}", where)
            lm = self.L_at(n)
            if lm.shape != (big, big):
                raise DocumentError(f"L must be {big}x{big}", where)
            if big and abs(_det(lm)) != 1:
                raise DocumentError("L must be invertible over Z", where)
            lam = self.lambda_at(n)
            if lam.shape != (big, big):
                raise DocumentError(f"lambdaN must be {big}x{big}", where)
            if not zmod.equal(matmul(lm, lam), matmul(lam, lm)):
                raise DocumentError("lambdaN does not commute with L (inconsistent data)", where)
            if n in self.jstar and self.jstar[n].shape != (big, rx + (self.d - 1) * ry):
                raise DocumentError("jstar has the wrong shape", where)

    def L_at(self, n: int) -> np.ndarray:
        big = self.d * self.ry(n)
        if n in self.L:
            return self.L[n]
        if self.d == 1 or big == 0:
            return identity(big)
        raise DocumentError("L is required when d > 1", f"L.{n}")

    def lambda_at(self, n: int) -> np.ndarray:
        if n in self.lambdaN:
            return self.lambdaN[n]
        lm = self.L_at(n)
        if lm.shape[0] == 0:
            return lm
        return identity(lm.shape[0]) - zmod.unimodular_inverse(lm)

    def to_json(self) -> dict:
        out = {"name": self.name, "d": self.d,
               "kx": {str(k): v for k, v in self.kx.items()},
               "ky": {str(k): v for k, v in self.ky.items()},
               "istar": {str(k): zmod.to_lists(v) for k, v in self.istar.items()},
               "L": {str(k): zmod.to_lists(v) for k, v in self.L.items()}}
        if self.lambdaN:
            out["lambdaN"] = {str(k): zmod.to_lists(v) for k, v in self.lambdaN.items()}
        if self.jstar:
            out["jstar"] = {str(k): zmod.to_lists(v) for k, v in self.jstar.items()}
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "BlowupData":
        try:
            return cls(int(obj["d"]), obj["kx"], obj["ky"], obj.get("istar", {}), obj.get("L", {}),
                       obj.get("lambdaN") or {}, obj.get("jstar") or {}, str(obj.get("name", "")))
        except KeyError as exc:
            raise DocumentError("missing field", str(exc.args[0])) from None
        except (TypeError, ValueError, zmod.ShapeError) as exc:
            if isinstance(exc, DocumentError):
                raise
            raise DocumentError(str(exc)) from None


def _det(a: np.ndarray) -> int:
    """Exact determinant by elimination over the rationals."""
    n = a.shape[0]
    m = [[Fraction(int(a[i, j])) for j in range(n)] for i in range(n)]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return int(det)


def companion(d: int, lambdas: Sequence[np.ndarray]) -> np.ndarray:
    """Multiplication by ``t`` on ``K(Y)^d`` in the basis ``t^0, ..., t^(d-1)``.

    Uses ``t^d = sum_{k=1..d} (-1)^(k+1) lambda^k(N) t^(d-k)``; ``lambdas[k-1]``
    is the matrix of ``lambda^k(N)``.
    """
    lambdas = [zmod.as_int_matrix(x) for x in lambdas]
    r = lambdas[0].shape[0] if lambdas else 0
    out = zeros(d * r, d * r)
    for i in range(d - 1):
        out[(i + 1) * r:(i + 2) * r, i * r:(i + 1) * r] = identity(r)
    for k in range(1, d + 1):
        row = d - k
        out[row * r:(row + 1) * r, (d - 1) * r:d * r] = (-1) ** (k + 1) * lambdas[k - 1]
    return out


@dataclass
class BlowupReport:
    data: BlowupData
    square: CubicalDiagram         # augmented: X, X~, Y, Y~
    cube: CubicalDiagram           # augmented 3-cube of the proof
    commutes: bool
    cube_acyclic: bool
    front_acyclic: bool
    back_acyclic: bool
    exact: bool
    ranks: dict                    # n -> (rank X, rank X~ + rank Y, rank Y~)

    @property
    def ok(self) -> bool:
        return self.commutes and self.cube_acyclic and self.front_acyclic and self.exact

    def to_json(self) -> dict:
        return {"name": self.data.name, "d": self.data.d,
                "checks": {"square_commutes": self.commutes, "cube_acyclic": self.cube_acyclic,
                           "front_acyclic": self.front_acyclic, "back_acyclic": self.back_acyclic,
                           "short_exact": self.exact},
                "ranks": {str(n): list(r) for n, r in sorted(self.ranks.items())}}


def _slot(d: int, r: int, i: int) -> np.ndarray:
    out = zeros(d * r, r)
    out[i * r:(i + 1) * r, :] = identity(r)
    return out


def _face(cube3: CubicalDiagram, letter: int, value: int) -> CubicalDiagram:
    """The augmented square of a 3-cube with one letter frozen."""
    def lift(v):
        out = list(v)
        out.insert(letter, value)
        return tuple(out)
    idx = Cube(1, True)
    verts = {v: cube3[lift(v)] for v in idx.vertices}
    edges = {(v, w): cube3.edge(lift(v), lift(w)) for v in idx.vertices for w, _, _ in idx.cofaces(v)}
    return CubicalDiagram(idx, verts, edges, check=False)


def blowup_model(b: BlowupData) -> BlowupReport:
    """Build the blow-up square and the 3-cube of its acyclicity argument."""
    d = b.d
    degs = b.degrees()
    kx = ZComplex.graded({n: b.rx(n) for n in degs})
    ky = ZComplex.graded({n: b.ry(n) for n in degs})
    kxt = ZComplex.graded({n: b.rx(n) + (d - 1) * b.ry(n) for n in degs})
    kyt = ZComplex.graded({n: d * b.ry(n) for n in degs})
    fstar, istar, gstar, jprime, jstar, incl, slot0 = {}, {}, {}, {}, {}, {}, {}
    commutes = True
    for n in degs:
        rx, ry = b.rx(n), b.ry(n)
        i_n = b.istar.get(n, zeros(ry, rx))
        lam, lm = b.lambda_at(n), b.L_at(n)
        s0 = _slot(d, ry, 0)
        cols = [matmul(s0, i_n)]
        power = identity(d * ry)
        for i in range(1, d):
            power = matmul(lm, power)
            cols.append(matmul(lam, matmul(power, s0)))
        jp = zmod.hstack(cols, d * ry)
        fstar[n] = zmod.vstack([identity(rx), zeros((d - 1) * ry, rx)], rx)
        istar[n] = i_n
        gstar[n] = s0
        jprime[n] = jp
        js = b.jstar.get(n, jp)
        # Phi and Psi are the identity in these bases: Psi j' = j* Phi
        commutes &= zmod.equal(js, jp) and zmod.equal(matmul(js, fstar[n]), matmul(s0, i_n))
        jstar[n] = js
        incl[n] = fstar[n]
        slot0[n] = s0
    if not commutes:
        raise DocumentError("j* does not satisfy Psi j' = j* Phi (inconsistent L / lambdaN data)", "jstar")
    f_map = ChainMap(kx, kxt, fstar)
    i_map = ChainMap(kx, ky, istar)
    g_map = ChainMap(ky, kyt, gstar)
    j_map = ChainMap(kxt, kyt, jstar)
    jp_map = ChainMap(kxt, kyt, jprime)
    sq = CubicalDiagram(Cube(1, True), {(0, 0): kx, (1, 0): kxt, (0, 1): ky, (1, 1): kyt},
                        {((0, 0), (1, 0)): f_map, ((0, 0), (0, 1)): i_map,
                         ((1, 0), (1, 1)): j_map, ((0, 1), (1, 1)): g_map})
    # letters: back->front, left->right, top->bottom
    idx = Cube(2, True)
    idx_x, idx_y = ChainMap.identity(kx), ChainMap.identity(ky)
    verts = {(0, 0, 0): kx, (1, 0, 0): kx, (0, 1, 0): kxt, (0, 0, 1): ky,
             (1, 1, 0): kxt, (1, 0, 1): ky, (0, 1, 1): kyt, (1, 1, 1): kyt}
    edges = {((0, 0, 0), (1, 0, 0)): idx_x,
             ((0, 0, 0), (0, 1, 0)): ChainMap(kx, kxt, incl),
             ((0, 0, 0), (0, 0, 1)): i_map,
             ((1, 0, 0), (1, 1, 0)): f_map,
             ((1, 0, 0), (1, 0, 1)): i_map,
             ((0, 1, 0), (1, 1, 0)): ChainMap.identity(kxt),     # Phi
             ((0, 1, 0), (0, 1, 1)): jp_map,
             ((0, 0, 1), (1, 0, 1)): idx_y,
             ((0, 0, 1), (0, 1, 1)): ChainMap(ky, kyt, slot0),
             ((1, 1, 0), (1, 1, 1)): j_map,
             ((1, 0, 1), (1, 1, 1)): g_map,
             ((0, 1, 1), (1, 1, 1)): ChainMap.identity(kyt)}     # Psi
    cube3 = CubicalDiagram(idx, verts, edges)
    from .towers import exactness_verdict

    ranks = {n: (b.rx(n), b.rx(n) + d * b.ry(n), d * b.ry(n)) for n in degs}
    return BlowupReport(b, sq, cube3, commutes, is_acyclic(cube3), is_acyclic(_face(cube3, 0, 1)),
                        is_acyclic(_face(cube3, 0, 0)), exactness_verdict(sq), ranks)


def p2_at_point() -> BlowupData:
    """``P^2`` blown up at a point: ``K_0(P^2) = Z^3``, ``K_0(pt) = Z``."""
    return BlowupData(2, {0: 3}, {0: 1}, {0: [[1, 1, 1]]}, {0: companion(2, [[[2]], [[1]]])},
                      name="P2 at a point")


def p3_along_line() -> BlowupData:
    """``P^3`` blown up along a line: normal bundle ``O(1) + O(1)`` on ``P^1``."""
    l1 = [[2, 0], [2, 2]]
    l2 = [[1, 0], [2, 1]]
    return BlowupData(2, {0: 4}, {0: 2}, {0: [[1, 0, 0, 0], [0, 1, 0, 0]]}, {0: companion(2, [l1, l2])},
                      name="P3 along a line")


def trivial_blowup(rank_x: int = 2, rank_y: int = 1) -> BlowupData:
    """Codimension one: the blow-up changes nothing."""
    i = zeros(rank_y, rank_x)
    for k in range(min(rank_x, rank_y)):
        i[k, k] = 1
    return BlowupData(1, {0: rank_x}, {0: rank_y}, {0: i}, {0: identity(rank_y)}, name="codimension one")


# -- compact support -------------------------------------------------------------------------

@dataclass
class CompactSupport:
    complex: ZComplex
    restriction: ChainMap
    sequence: ExactSequenceReport

    def group(self, n: int) -> FgAbGroup:
        return complexes.homology(self.complex, n)


def fiber_sequence(f: ChainMap) -> ExactSequenceReport:
    """``... -> H_n(fib) -> H_n(A) -> H_n(B) -> H_{n-1}(fib) -> ...``."""
    fib = complexes.fiber(f)
    a, bb = f.source, f.target
    proj = complexes.fiber_projection(f)
    nodes, maps = [], []
    prev = None
    for n in _degree_window(fib, a, bb):
        pf, cf = complexes.homology_presentation(fib, n)
        pa, ca = complexes.homology_presentation(a, n)
        pb, cb = complexes.homology_presentation(bb, n)
        if prev is not None:
            # b in B_{n+1} goes to (0, b) in fib_n
            emb = zmod.vstack([zeros(a.rank(n), prev.shape[1]), prev], prev.shape[1]) \
                if prev.shape[1] else zeros(fib.rank(n), 0)
            maps.append(_coords(emb, cf))
        nodes.append(SequenceNode("c", n, pf))
        maps.append(_coords(matmul(proj[n], cf), ca))
        nodes.append(SequenceNode("ambient", n, pa))
        maps.append(_coords(matmul(f[n], ca), cb))
        nodes.append(SequenceNode("closed", n, pb))
        prev = cb
    return ExactSequenceReport(nodes, maps)


def assemble_compact_support(hbar: HyperresolutionDoc, hy: Optional[HyperresolutionDoc],
                             restriction: Optional[DiagramMorphism]) -> CompactSupport:
    """``K^c(X - Y)`` as the fiber of ``KD(Xbar) -> KD(Y)``; ``hy=None`` means ``Y`` empty."""
    kbar = assemble_kd(hbar)
    if hy is None:
        f = ChainMap.zero(kbar, ZComplex.zero())
    else:
        if restriction is None:
            raise DocumentError("a restriction morphism is required", "restriction")
        if restriction.source is not hbar.diagram and not _same_diagram(restriction.source, hbar.diagram):
            raise DocumentError("restriction source is not the ambient diagram", "restriction")
        if restriction.target is not hy.diagram and not _same_diagram(restriction.target, hy.diagram):
            raise DocumentError("restriction target is not the closed diagram", "restriction")
        f = restriction.induced()
    return CompactSupport(complexes.fiber(f), f, fiber_sequence(f))


def _same_diagram(a: CubicalDiagram, b: CubicalDiagram) -> bool:
    return a.index == b.index and a.vertices == b.vertices and \
        all(a.edges[k] == b.edges[k] for k in a.edges)


def morphism_from_json(obj: Mapping, source: HyperresolutionDoc, target: HyperresolutionDoc) -> DiagramMorphism:
    inj = obj.get("injection")
    comps = {}
    tcube = target.diagram.index
    for key, f in (obj.get("components") or {}).items():
        where = f"restriction.components.{key}"
        try:
            v = tcube.parse(key)
        except ValueError as exc:
            raise DocumentError(str(exc), where) from None
        tmp = DiagramMorphism(source.diagram, target.diagram, {}, inj, check=False)
        try:
            comps[v] = ChainMap.from_json(f, source.diagram[tmp.delta(v)], target.diagram[v])
        except (ComplexError, TypeError, ValueError, KeyError) as exc:
            raise DocumentError(str(exc), where) from None
    try:
        return DiagramMorphism(source.diagram, target.diagram, comps, inj)
    except DiagramError as exc:
        raise DocumentError.wrap(exc, "restriction") from None


def compact_pair_from_json(obj: Mapping) -> tuple:
    """``{"ambient": doc, "closed": doc | null, "restriction": {...}}``."""
    if "ambient" not in obj:
        raise DocumentError("missing field", "ambient")
    hbar = _nested(obj["ambient"], "ambient")
    if obj.get("closed") is None:
        return hbar, None, None
    hy = _nested(obj["closed"], "closed")
    if "restriction" not in obj:
        raise DocumentError("missing field", "restriction")
    return hbar, hy, morphism_from_json(obj["restriction"], hbar, hy)


def _nested(obj, prefix: str) -> HyperresolutionDoc:
    try:
        return HyperresolutionDoc.from_json(obj)
    except DocumentError as exc:
        raise DocumentError(exc.message, prefix if exc.where is None else f"{prefix}.{exc.where}") from None


def compact_pair_to_json(hbar: HyperresolutionDoc, hy: Optional[HyperresolutionDoc],
                         f: Optional[DiagramMorphism], name: str = "") -> dict:
    out = {"name": name, "ambient": hbar.to_json(), "closed": hy.to_json() if hy else None}
    if f is not None:
        out["restriction"] = {"injection": list(f.injection),
                              "components": {to_bits(v): c.to_json() for v, c in f.components.items()}}
    return out


# -- comparison of hyperresolutions ----------------------------------------------------------------

@dataclass
class CompareReport:
    first: KDTable
    second: KDTable
    groups: dict      # n -> bool
    weights: dict     # (n, p) -> bool

    @property
    def all_isomorphic(self) -> bool:
        return all(self.groups.values()) and all(self.weights.values())

    def mismatches(self) -> list:
        return sorted([("KD", n) for n, ok in self.groups.items() if not ok]) + \
            sorted([("gr", n, p) for (n, p), ok in self.weights.items() if not ok])

    def to_json(self) -> dict:
        return {"first": self.first.name, "second": self.second.name,
                "all_isomorphic": self.all_isomorphic,
                "mismatches": [list(m) for m in self.mismatches()],
                "rows": [{"n": n, "first": self.first.row(n).group.to_json(),
                          "second": self.second.row(n).group.to_json(), "isomorphic": ok}
                         for n, ok in sorted(self.groups.items(), reverse=True)]}


def compare_hyperresolutions(h1: HyperresolutionDoc, h2: HyperresolutionDoc,
                             n_range: Optional[Sequence[int]] = None) -> CompareReport:
    if n_range is None:
        a, b = assemble_kd(h1), assemble_kd(h2)
        nz = [c for c in (a, b) if not c.is_zero]
        n_range = range(max(c.hi for c in nz) + 1, min(c.lo for c in nz) - 2, -1) if nz else range(1, -2, -1)
    n_range = list(n_range)
    t1, t2 = kd_groups_and_weights(h1, n_range), kd_groups_and_weights(h2, n_range)
    groups, weights = {}, {}
    top = max(h1.cube, h2.cube)
    zero = FgAbGroup(0, ())
    for n in n_range:
        r1, r2 = t1.row(n), t2.row(n)
        groups[n] = r1.group == r2.group
        for p in range(0, top + 1):
            weights[(n, p)] = r1.weights.get(p, zero) == r2.weights.get(p, zero)
    return CompareReport(t1, t2, groups, weights)


def inflate(doc: HyperresolutionDoc, k: int = 0) -> HyperresolutionDoc:
    """Add a letter that duplicates letter ``k``: the new vertex ``beta`` reads
    the old vertex with ``beta_k`` replaced by ``max(beta_k, beta_new)``.
    Edges along which the old vertex does not change are identities."""
    old = doc.diagram
    size = old.index.size
    if not 0 <= k < size:
        raise DocumentError(f"letter {k} out of range", "inflate")
    idx = Cube(size)

    def pi(beta):
        v = list(beta[:size])
        v[k] = max(v[k], beta[size])
        return tuple(v)

    verts = {b: old[pi(b)] for b in idx.vertices}
    labels = {b: doc.labels.get(pi(b), "") for b in idx.vertices}
    edges = {}
    for b in idx.vertices:
        for c, _, _ in idx.cofaces(b):
            u, w = pi(b), pi(c)
            edges[(b, c)] = ChainMap.identity(old[u]) if u == w else old.edge(u, w)
    aug_maps = {}
    if doc.augmentation is not None:
        for b in idx.vertices:
            if sum(b) == 1:
                u = pi(b)
                aug_maps[b] = doc.augmentation_maps[u]
    return HyperresolutionDoc(f"{doc.name} inflated", max(doc.dimension, size), CubicalDiagram(idx, verts, edges),
                              labels, doc.augmentation, aug_maps)


# -- Mayer-Vietoris and augmentation ----------------------------------------------------------------

@dataclass
class MVReport:
    square: CubicalDiagram
    vertex_squares_acyclic: bool
    acyclic: bool


def mayer_vietoris(x: HyperresolutionDoc, u: HyperresolutionDoc, v: HyperresolutionDoc,
                   uv: HyperresolutionDoc, maps: Mapping[str, DiagramMorphism]) -> MVReport:
    """Assemble ``KD(X) -> KD(U), KD(V) -> KD(U ∩ V)`` and test acyclicity.

    ``maps`` has keys ``xu``, ``xv``, ``uw``, ``vw`` (restrictions).
    """
    try:
        fxu, fxv, fuw, fvw = (maps[k].induced() for k in ("xu", "xv", "uw", "vw"))
    except KeyError as exc:
        raise DocumentError("missing restriction", str(exc.args[0])) from None
    sq = CubicalDiagram(Cube(1, True), {(0, 0): fxu.source, (1, 0): fxu.target, (0, 1): fxv.target,
                                        (1, 1): fuw.target},
                        {((0, 0), (1, 0)): fxu, ((0, 0), (0, 1)): fxv,
                         ((1, 0), (1, 1)): fuw, ((0, 1), (1, 1)): fvw})
    vertex_ok = True
    for a in x.diagram.index.vertices:
        vsq = CubicalDiagram(Cube(1, True), {(0, 0): x.diagram[a], (1, 0): u.diagram[a],
                                             (0, 1): v.diagram[a], (1, 1): uv.diagram[a]},
                             {((0, 0), (1, 0)): maps["xu"].components[a],
                              ((0, 0), (0, 1)): maps["xv"].components[a],
                              ((1, 0), (1, 1)): maps["uw"].components[a],
                              ((0, 1), (1, 1)): maps["vw"].components[a]})
        vertex_ok &= is_acyclic(vsq)
    return MVReport(sq, vertex_ok, is_acyclic(sq))


def identity_cover(doc: HyperresolutionDoc) -> tuple:
    """``X = U = V = U ∩ V`` with identity restrictions."""
    ident = DiagramMorphism(doc.diagram, doc.diagram,
                            {a: ChainMap.identity(c) for a, c in doc.diagram.vertices.items()})
    return doc, doc, doc, doc, {"xu": ident, "xv": ident, "uw": ident, "vw": ident}


def split_cover(a: HyperresolutionDoc, b: HyperresolutionDoc, c: HyperresolutionDoc) -> tuple:
    """``U = A + C``, ``V = B + C``, ``U ∩ V = C`` and ``X = A + B + C``.

    Restrictions are the coordinate projections; every vertex square is a
    pullback of split surjections, hence acyclic.
    """
    from .diagram import vertexwise_sum

    def doc(name, dg):
        return HyperresolutionDoc(name, max(a.dimension, b.dimension, c.dimension), dg)

    ac = vertexwise_sum(a.diagram, c.diagram)
    bc = vertexwise_sum(b.diagram, c.diagram)
    abc = vertexwise_sum(vertexwise_sum(a.diagram, b.diagram), c.diagram)

    def proj(src, tgt, pick):
        comps = {}
        for v in src.index.vertices:
            ra, rb, rc = a.diagram[v], b.diagram[v], c.diagram[v]
            parts = {"a": ra, "b": rb, "c": rc}
            src_order = [k for k in "abc" if k in pick[0]]
            tgt_order = [k for k in "abc" if k in pick[1]]
            maps = {}
            for m in sorted(set(src[v].degrees) | set(tgt[v].degrees)):
                rows = []
                for tk in tgt_order:
                    row = [identity(parts[sk].rank(m)) if sk == tk else zeros(parts[tk].rank(m), parts[sk].rank(m))
                           for sk in src_order]
                    rows.append(zmod.hstack(row, parts[tk].rank(m)))
                maps[m] = zmod.vstack(rows, src[v].rank(m))
            comps[v] = ChainMap(src[v], tgt[v], maps)
        return DiagramMorphism(src, tgt, comps)

    maps = {"xu": proj(abc, ac, ("abc", "ac")), "xv": proj(abc, bc, ("abc", "bc")),
            "uw": proj(ac, c.diagram, ("ac", "c")), "vw": proj(bc, c.diagram, ("bc", "c"))}
    return doc("X", abc), doc("U", ac), doc("V", bc), c, maps


@dataclass
class AugmentationComparison:
    map: ChainMap
    quasi_iso: bool
    acyclic: bool


def augmentation_comparison(doc: HyperresolutionDoc) -> AugmentationComparison:
    """``G(X) -> KD(X)`` from the document's augmentation."""
    aug = doc.augmented_diagram()
    lam = augmentation_map(aug)
    return AugmentationComparison(lam, complexes.is_quasi_iso(lam), is_acyclic(aug))


# -- builders ---------------------------------------------------------------------------------------

def smooth_doc(name: str, c: ZComplex, dimension: int = 0) -> HyperresolutionDoc:
    """A smooth variety: the one-vertex hyperresolution."""
    return HyperresolutionDoc(name, dimension, CubicalDiagram(Cube(0), {(1,): c}), {(1,): name})


def point() -> HyperresolutionDoc:
    return smooth_doc("pt", ZComplex.free(0, 1), 0)


def projective_space(n: int) -> HyperresolutionDoc:
    """``P^n`` with ``K_0 = Z^(n+1)`` (basis ``O, O(-1), ..., O(-n)``)."""
    return smooth_doc(f"P{n}", ZComplex.free(0, n + 1), n)


def restriction_to_points(n: int, k: int) -> np.ndarray:
    """``K_0(P^n) -> K_0(k points)``: every line bundle restricts to 1."""
    return zmod.as_int_matrix([[1] * (n + 1) for _ in range(k)], (k, n + 1))


def curve_square(name: str, normal: ZComplex, sing: ZComplex, exc: ZComplex,
                 r_normal: np.ndarray, r_sing: np.ndarray, labels=("X~", "Y", "Y~")) -> HyperresolutionDoc:
    c = Cube(1)
    diag = CubicalDiagram(c, {(1, 0): normal, (0, 1): sing, (1, 1): exc},
                          {((1, 0), (1, 1)): ChainMap(normal, exc, {0: r_normal}),
                           ((0, 1), (1, 1)): ChainMap(sing, exc, {0: r_sing})})
    return HyperresolutionDoc(name, 1, diag, dict(zip(((1, 0), (0, 1), (1, 1)), labels)))


def nodal_cubic() -> HyperresolutionDoc:
    """Normalisation ``P^1``, the node, and its two preimages."""
    return curve_square("nodal cubic", ZComplex.free(0, 2), ZComplex.free(0, 1), ZComplex.free(0, 2),
                        restriction_to_points(1, 2), [[1], [1]], ("P1", "pt", "pt+pt"))


def cuspidal_cubic() -> HyperresolutionDoc:
    """Normalisation ``P^1``, the cusp, and its single preimage."""
    return curve_square("cuspidal cubic", ZComplex.free(0, 2), ZComplex.free(0, 1), ZComplex.free(0, 1),
                        restriction_to_points(1, 1), [[1]], ("P1", "pt", "pt"))


def disjoint_union(a: HyperresolutionDoc, b: HyperresolutionDoc) -> HyperresolutionDoc:
    """Vertexwise direct sum; the smaller cube is inflated first."""
    while a.cube < b.cube:
        a = inflate(a, 0)
    while b.cube < a.cube:
        b = inflate(b, 0)
    from .diagram import vertexwise_sum

    labels = {v: f"{a.labels.get(v, '')}+{b.labels.get(v, '')}" for v in a.diagram.index.vertices}
    return HyperresolutionDoc(f"{a.name} + {b.name}", max(a.dimension, b.dimension),
                              vertexwise_sum(a.diagram, b.diagram), labels)


def point_morphism(src: HyperresolutionDoc, tgt: HyperresolutionDoc, matrix) -> DiagramMorphism:
    """Restriction between one-vertex documents given by a degree-0 matrix."""
    v = (1,)
    return DiagramMorphism(src.diagram, tgt.diagram,
                           {v: ChainMap(src.diagram[v], tgt.diagram[v], {0: matrix})})


def blowup_doc(b: BlowupData) -> HyperresolutionDoc:
    """The blow-up square as a document: ``X~, Y, Y~`` augmented by ``K(X)``."""
    rep = blowup_model(b)
    sq = rep.square
    diag = sq.restrict()
    return HyperresolutionDoc(b.name or "blow-up", max(1, b.d), diag,
                              {(1, 0): "X~", (0, 1): "Y", (1, 1): "Y~"}, sq[(0, 0)],
                              {(1, 0): sq.edge((0, 0), (1, 0)), (0, 1): sq.edge((0, 0), (0, 1))})


def _random_unimodular(rng, r: int) -> np.ndarray:
    m = identity(r)
    for _ in range(2 * r):
        i, j = rng.randrange(r), rng.randrange(r)
        if i != j:
            m[i, :] = m[i, :] + rng.choice((-1, 1)) * m[j, :]
    return m


def random_blowup(rng, lambda_scale: Optional[int] = None, min_d: int = 1) -> BlowupData:
    """Random free blow-up data.  ``lambda_scale`` replaces ``lambda_{-1}(N)``
    by that multiple of the identity (0 or 2 break exactness when d > 1)."""
    d = rng.randint(min_d, 3)
    ky = {n: rng.randint(1, 2) for n in range(rng.randint(1, 2))}
    kx = {n: r + rng.randint(0, 2) for n, r in ky.items()}
    istar, lmat, lam = {}, {}, {}
    for n in ky:
        rx, ry = kx[n], ky[n]
        istar[n] = zmod.as_int_matrix([[rng.randint(-2, 2) for _ in range(rx)] for _ in range(ry)], (ry, rx))
        lams = [zmod.as_int_matrix([[rng.randint(-2, 2) for _ in range(ry)] for _ in range(ry)], (ry, ry))
                for _ in range(d - 1)] + [_random_unimodular(rng, ry)]
        lmat[n] = companion(d, lams) if d > 1 else _random_unimodular(rng, ry)
        if lambda_scale is not None:
            lam[n] = lambda_scale * identity(d * ry)
    return BlowupData(d, kx, ky, istar, lmat, lam, name="random blow-up")


def f2_corpus(seed: int = 0, count: int = 50) -> list:
    """Named augmented squares: blow-up models, identity squares and broken
    squares, in roughly equal parts."""
    import random

    from .diagram import constant
    from .generate import Bounds, random_acyclic_augmented, random_complex, random_diagram

    rng = random.Random(seed)
    b = Bounds(lo=-1, hi=1, max_rank=2, entry=2)
    out = [("P2 at a point", blowup_model(p2_at_point()).square),
           ("P3 along a line", blowup_model(p3_along_line()).square),
           ("codimension one", blowup_model(trivial_blowup()).square)]
    broken_p2 = BlowupData(2, {0: 3}, {0: 1}, {0: [[1, 1, 1]]}, p2_at_point().L, {0: zeros(2, 2)}, name="P2 broken")
    out.append(("P2 with lambda = 0", blowup_model(broken_p2).square))
    kinds = ("blowup", "identity", "broken blowup", "scaled", "random", "acyclic")
    i = 0
    while len(out) < count:
        kind = kinds[i % len(kinds)]
        i += 1
        if kind == "blowup":
            sq = blowup_model(random_blowup(rng)).square
        elif kind == "identity":
            sq = constant(Cube(1, True), random_complex(rng, b))
        elif kind == "broken blowup":
            sq = blowup_model(random_blowup(rng, rng.choice((0, 2)), min_d=2)).square
        elif kind == "scaled":
            c = random_complex(rng, b)
            k = rng.choice((0, 2, 3))
            ident, scaled = ChainMap.identity(c), ChainMap(c, c, {m: k * identity(c.rank(m)) for m in c.degrees})
            sq = CubicalDiagram(Cube(1, True), {v: c for v in Cube(1, True).vertices},
                                {((0, 0), (1, 0)): scaled, ((0, 0), (0, 1)): ident,
                                 ((1, 0), (1, 1)): ident, ((0, 1), (1, 1)): scaled})
        elif kind == "random":
            sq = random_diagram(rng, Cube(1, True), b)
        else:
            sq = random_acyclic_augmented(rng, 1, b)
        out.append((f"{kind} {i}", sq))
    return out


def d2_example() -> HyperresolutionDoc:
    """A 2-cube whose weight spectral sequence has a nonzero ``d_2``."""
    a = ZComplex.free(0, 1)
    c = ZComplex({0: 1, 1: 1}, {1: [[1]]})
    b = ZComplex.free(1, 1)
    diag = CubicalDiagram(Cube(2), {(1, 0, 0): a, (1, 1, 0): c, (1, 1, 1): b},
                          {((1, 0, 0), (1, 1, 0)): ChainMap(a, c, {0: [[1]]}),
                           ((1, 1, 0), (1, 1, 1)): ChainMap(c, b, {1: [[1]]})})
    return HyperresolutionDoc("d2 example", 2, diag)


def _bad_face_json() -> dict:
    """A 2-cube document whose face 100 -> {110, 101} -> 111 does not commute."""
    z = ZComplex.free(0, 1)
    idx = Cube(2)
    edges = {}
    for v in idx.vertices:
        for w, _, _ in idx.cofaces(v):
            edges[(v, w)] = ChainMap(z, z, {0: [[2 if (v, w) == ((1, 0, 0), (1, 1, 0)) else 1]]})
    diag = CubicalDiagram(idx, {v: z for v in idx.vertices}, edges, check=False)
    d = diag.to_json()
    return {"name": "bad face", "dimension": 2, "cube": 2,
            "vertices": {k: {"label": "", "complex": c} for k, c in d["vertices"].items()},
            "edges": d["edges"]}


def corpus_documents() -> dict:
    """The bundled example documents by file name."""
    p1, pt = projective_space(1), point()
    two = disjoint_union(point(), point())
    two.name = "pt+pt"
    return {
        "point.json": point().to_json(),
        "p1.json": p1.to_json(),
        "p2.json": projective_space(2).to_json(),
        "nodal.json": nodal_cubic().to_json(),
        "cusp.json": cuspidal_cubic().to_json(),
        "nodal_inflated.json": inflate(nodal_cubic(), 0).to_json(),
        "pt_plus_nodal.json": disjoint_union(point(), nodal_cubic()).to_json(),
        "d2_example.json": d2_example().to_json(),
        "blowup_p2_doc.json": blowup_doc(p2_at_point()).to_json(),
        "blowup_p2.json": p2_at_point().to_json(),
        "blowup_p3.json": p3_along_line().to_json(),
        "blowup_codim1.json": trivial_blowup().to_json(),
        "blowup_broken.json": BlowupData(2, {0: 3}, {0: 1}, {0: [[1, 1, 1]]}, p2_at_point().L,
                                         {0: zeros(2, 2)}, name="P2 at a point, lambda = 0").to_json(),
        "a1.json": compact_pair_to_json(p1, pt, point_morphism(p1, pt, [[1, 1]]), "A1 = P1 - pt"),
        "p1_minus_2pts.json": compact_pair_to_json(p1, two, point_morphism(p1, two, restriction_to_points(1, 2)),
                                                   "P1 - 2 pts"),
        "p1_compact.json": compact_pair_to_json(p1, None, None, "P1"),
        "bad.json": _bad_face_json(),
    }
