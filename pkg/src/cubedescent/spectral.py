"""Spectral sequences of finitely filtered complexes, and the weight filtration.

A filtration is a decreasing chain of saturated subcomplexes
``C = K_lo ⊇ K_{lo+1} ⊇ ... ⊇ K_{hi+1} = 0``.  For a diagram over a cube,
``K_p`` is spanned by the summands of weight ``>= p + 1`` in the simple.

Pages are computed directly from lattices.  In total degree ``m`` and
filtration ``p`` (so ``q = m + p``)::

    Z_r^p = {x in K_p : D x in K_{p+r}}
    E_r^p = Z_r^p / (Z_{r-1}^{p+1} + (D K_{p-r+1} ∩ K_p))

and ``d_r`` sends the class of ``z`` to the class of ``D z`` in
``E_r^{p+r}``.  Each page is presented by generators (a basis of ``Z_r^p``)
and relations, so ``d_r`` is an integer matrix between presentations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import complexes, zmod
from .complexes import ZComplex
from .diagram import CubicalDiagram, simple_with_layout, truncate
from .zmod import FgAbGroup, Presented, identity, matmul, zeros


class FilteredComplex:
    """A bounded complex with a finite decreasing filtration.

    Args:
        complex: the ambient complex ``C``.
        bases: ``bases[p][m]`` is a matrix whose columns are a basis of the
            saturated sublattice ``K_p`` of ``C_m``, for ``lo <= p <= hi``.
            ``K_lo`` should be all of ``C``; ``K_{hi+1}`` is zero.
    """

    def __init__(self, complex: ZComplex, bases: dict, lo: int, hi: int):
        self.complex = complex
        self.lo, self.hi = lo, hi
        self._bases = bases
        self._eqs: dict = {}

    @classmethod
    def from_levels(cls, complex: ZComplex, levels: dict, lo: int, hi: int) -> "FilteredComplex":
        """Coordinate filtration: basis vector ``i`` of degree ``m`` lies in ``K_p``
        iff ``levels[m][i] >= p``."""
        bases = {}
        for p in range(lo, hi + 1):
            bases[p] = {}
            for m in complex.degrees:
                cols = [i for i, lv in enumerate(levels.get(m, [])) if lv >= p]
                b = zeros(complex.rank(m), len(cols))
                for j, i in enumerate(cols):
                    b[i, j] = 1
                bases[p][m] = b
        return cls(complex, bases, lo, hi)

    def basis(self, p: int, m: int) -> np.ndarray:
        n = self.complex.rank(m)
        if p < self.lo:
            return identity(n)
        if p > self.hi:
            return zeros(n, 0)
        return self._bases[p].get(m, zeros(n, 0))

    def equations(self, p: int, m: int) -> np.ndarray:
        """A matrix ``Q`` with ``ker Q = K_p`` in degree ``m``."""
        key = (p, m)
        if key not in self._eqs:
            n = self.complex.rank(m)
            b = self.basis(p, m)
            if b.shape[1] == 0:
                q = identity(n)
            elif n == 0:
                q = zeros(0, 0)
            else:
                q = zmod.kernel_basis(b.T).T
            self._eqs[key] = q
        return self._eqs[key]

    def validate(self) -> None:
        """Check that each ``K_p`` is a subcomplex and the chain decreases."""
        for p in range(self.lo, self.hi + 1):
            for m in self.complex.degrees:
                img = matmul(self.complex.d(m), self.basis(p, m))
                if not zmod.is_zero(matmul(self.equations(p, m - 1), img)):
                    raise ValueError(f"K_{p} is not a subcomplex in degree {m}")
                nxt = self.basis(p + 1, m)
                if not zmod.is_zero(matmul(self.equations(p, m), nxt)):
                    raise ValueError(f"K_{p + 1} is not inside K_{p} in degree {m}")

    @property
    def infinity(self) -> int:
        """A page index past which nothing changes."""
        return self.hi - self.lo + 2


@dataclass(frozen=True)
class Entry:
    """One term ``E_r^{pq}`` with its presentation.

    ``basis`` holds the generators as columns in the ambient complex (they
    span ``Z_r^p``); ``presented`` gives the relations among them.
    """

    p: int
    q: int
    group: FgAbGroup
    presented: Presented
    basis: np.ndarray


@dataclass
class SSPage:
    r: int
    entries: dict            # (p, q) -> Entry
    d: dict = field(default_factory=dict)   # (p, q) -> matrix to (p + r, q + r - 1)

    def group(self, p: int, q: int) -> FgAbGroup:
        e = self.entries.get((p, q))
        return e.group if e else FgAbGroup(0, ())

    def nonzero(self) -> list[tuple[int, int]]:
        return sorted(k for k, e in self.entries.items() if not e.group.is_trivial)

    def target(self, p: int, q: int) -> tuple[int, int]:
        return p + self.r, q + self.r - 1

    def to_json(self) -> dict:
        ents = [{"p": p, "q": q, **self.entries[(p, q)].group.to_json()} for p, q in self.nonzero()]
        ds = []
        for (p, q), a in sorted(self.d.items()):
            tp, tq = self.target(p, q)
            src, tgt = self.entries.get((p, q)), self.entries.get((tp, tq))
            if src is None or tgt is None or src.group.is_trivial or tgt.group.is_trivial:
                continue
            if zmod.map_is_zero(a, tgt.presented):
                continue
            ds.append({"p": p, "q": q, "target": [tp, tq], "matrix": zmod.to_lists(a)})
        return {"r": self.r, "entries": ents, "d": ds}


class SpectralSequence:
    """Pages of the spectral sequence of a :class:`FilteredComplex`."""

    def __init__(self, fc: FilteredComplex):
        self.fc = fc
        self.c = fc.complex
        self._z: dict = {}
        self._pages: dict = {}

    def degrees(self) -> range:
        c = self.c
        return range(c.lo, c.hi + 1) if not c.is_zero else range(0)

    def filtrations(self) -> range:
        return range(self.fc.lo, self.fc.hi + 1)

    # -- lattices --

    def z(self, r: int, p: int, m: int) -> np.ndarray:
        """Basis of ``Z_r^p`` in degree ``m``."""
        key = (r, p, m)
        if key not in self._z:
            b = self.fc.basis(p, m)
            q = self.fc.equations(p + r, m - 1)
            a = matmul(q, matmul(self.c.d(m), b))
            if b.shape[1] == 0:
                out = b
            elif a.shape[0] == 0:
                out = b
            else:
                k = zmod.kernel_basis(a)
                out = matmul(b, k)
            self._z[key] = out
        return self._z[key]

    def boundaries(self, r: int, p: int, m: int) -> np.ndarray:
        """Generators of ``D K_{p-r+1} ∩ K_p`` in degree ``m``."""
        b = self.fc.basis(p - r + 1, m + 1)
        if b.shape[1] == 0:
            return zeros(self.c.rank(m), 0)
        db = matmul(self.c.d(m + 1), b)
        q = self.fc.equations(p, m)
        a = matmul(q, db)
        k = zmod.kernel_basis(a) if a.shape[0] else identity(db.shape[1])
        return matmul(db, k)

    def entry(self, r: int, p: int, m: int) -> Entry:
        big = self.z(r, p, m)
        n = self.c.rank(m)
        small = zmod.hstack([self.z(r - 1, p + 1, m), self.boundaries(r, p, m)], n)
        grp, basis, coords = zmod.subquotient(big, small)
        return Entry(p, m + p, grp, Presented(basis.shape[1], coords), basis)

    # -- pages --

    def page(self, r: int) -> SSPage:
        if r < 1:
            raise ValueError("pages start at r = 1")
        if r in self._pages:
            return self._pages[r]
        entries = {}
        for m in self.degrees():
            for p in self.filtrations():
                entries[(p, m + p)] = self.entry(r, p, m)
        pg = SSPage(r, entries)
        for (p, q), e in entries.items():
            tgt = entries.get((p + r, q + r - 1))
            if tgt is None:
                continue
            m = q - p
            dz = matmul(self.c.d(m), e.basis)
            coords = zmod.solve_in_lattice(tgt.basis, dz) if dz.shape[1] else zeros(tgt.basis.shape[1], 0)
            if coords is None:
                raise ArithmeticError(f"d_{r} image of ({p},{q}) is not in Z_{r}")
            pg.d[(p, q)] = coords
        self._pages[r] = pg
        return pg

    def pages(self, r_max: int) -> list[SSPage]:
        return [self.page(r) for r in range(1, r_max + 1)]

    def e_infinity(self) -> SSPage:
        return self.page(self.fc.infinity)

    def page_homology(self, r: int) -> dict:
        """``H(E_r, d_r)`` at every spot, for cross-checking ``E_{r+1}``."""
        pg = self.page(r)
        out = {}
        for (p, q), e in pg.entries.items():
            src = pg.entries.get((p - r, q - r + 1))
            tgt = pg.entries.get((p + r, q + r - 1))
            a_in = pg.d[(p - r, q - r + 1)] if src is not None else zeros(e.presented.ngens, 0)
            if tgt is not None:
                a_out, tp = pg.d[(p, q)], tgt.presented
            else:
                a_out, tp = zeros(0, e.presented.ngens), Presented.free(0)
            out[(p, q)] = zmod.presented_homology(a_in, e.presented, a_out, tp)[0]
        return out

    def check_square_zero(self, r: int) -> bool:
        pg = self.page(r)
        for (p, q), a in pg.d.items():
            t = pg.target(p, q)
            b = pg.d.get(t)
            if b is None:
                continue
            tt = pg.entries[(t[0] + r, t[1] + r - 1)]
            if not zmod.map_is_zero(matmul(b, a), tt.presented):
                return False
        return True

    # -- abutment --

    def filtration(self, m: int) -> "WeightFiltration":
        cyc_pres, cyc = complexes.homology_presentation(self.c, m)
        gens = {}
        for p in range(self.fc.lo, self.fc.hi + 2):
            zp = self.z(self.fc.infinity, p, m)
            if zp.shape[1] == 0:
                gens[p] = zeros(cyc_pres.ngens, 0)
                continue
            coords = zmod.solve_in_lattice(cyc, zp)
            if coords is None:
                raise ArithmeticError("filtered cycle outside the cycle lattice")
            gens[p] = coords
        return WeightFiltration(m, self.fc.lo, self.fc.hi, cyc_pres, gens)

    def convergence(self, m: int) -> dict:
        """Compare ``E_inf^{p, m+p}`` with ``G_p / G_{p+1}`` for each ``p``."""
        einf = self.e_infinity()
        wf = self.filtration(m)
        rows = {}
        for p in self.filtrations():
            a = einf.group(p, m + p)
            b = wf.graded(p)
            rows[p] = (a, b, a == b)
        return rows


@dataclass
class WeightFiltration:
    """Decreasing filtration ``G_lo = H_m ⊇ ... ⊇ G_{hi+1} = 0``.

    ``generators[p]`` are columns in the generator coordinates of
    ``presented`` (a presentation of ``H_m``) spanning ``G_p``.
    """

    degree: int
    lo: int
    hi: int
    presented: Presented
    generators: dict

    @property
    def abutment(self) -> FgAbGroup:
        return self.presented.group

    def _lattice(self, p: int) -> np.ndarray:
        g = self.generators.get(p) if p <= self.hi + 1 else None
        if g is None:
            g = identity(self.presented.ngens) if p < self.lo else zeros(self.presented.ngens, 0)
        return zmod.hstack([g, self.presented.relations], self.presented.ngens)

    def subgroup(self, p: int) -> FgAbGroup:
        """``G_p`` as an abstract group."""
        return zmod.subquotient(self._lattice(p), self.presented.relations)[0]

    def graded(self, p: int) -> FgAbGroup:
        """``G_p / G_{p+1}``."""
        return zmod.subquotient(self._lattice(p), self._lattice(p + 1))[0]

    def weights(self) -> dict:
        return {p: self.graded(p) for p in range(self.lo, self.hi + 1)}

    def to_json(self) -> dict:
        return {"degree": self.degree, "abutment": self.abutment.to_json(),
                "subgroups": {str(p): self.subgroup(p).to_json() for p in range(self.lo, self.hi + 2)},
                "graded": {str(p): g.to_json() for p, g in self.weights().items()}}


# -- the weight filtration of a cube diagram ------------------------------------

@dataclass
class FiltrationPiece:
    """``F^p X`` together with ``K_p`` and ``K_{p+1}``; ``s(F^p X) = s(X) / K_{p+1}``."""

    p: int
    truncated: CubicalDiagram   # vertices of weight > p + 1 replaced by zero
    sub: dict                   # m -> columns spanning K_p inside the simple
    kernel: dict                # m -> columns spanning K_{p+1}


@dataclass
class FiltrationPieces:
    diagram: CubicalDiagram
    simple: ZComplex
    layout: object
    pieces: list

    def piece(self, p: int) -> FiltrationPiece:
        for f in self.pieces:
            if f.p == p:
                return f
        raise KeyError(p)

    @property
    def tower(self):
        """The quotient tower ``s(F^p X)``, ``p = 0..n``."""
        from .towers import quotient_tower
        return quotient_tower(weight_filtered(self.diagram))


def _plain_n(x: CubicalDiagram) -> int:
    if x.is_augmented:
        raise ValueError("the weight filtration is defined for plain diagrams")
    return x.index.size - 1 if hasattr(x.index, "size") else len(x.index.factors)


def weight_filtered(x: CubicalDiagram) -> FilteredComplex:
    """The simple of ``x`` filtered by ``K_p`` = summands with ``|alpha| >= p + 1``."""
    n = _plain_n(x)
    s, layout = simple_with_layout(x)
    levels = {}
    for m in s.degrees:
        lv = []
        for v, _, r in layout.blocks.get(m, ()):
            lv.extend([x.index.weight(v) - 1] * r)
        levels[m] = lv
    return FilteredComplex.from_levels(s, levels, 0, n)


def filtration_pieces(x: CubicalDiagram) -> FiltrationPieces:
    """Truncations ``F^p X`` for ``p = -1..n`` and the sublattices ``K_p``."""
    n = _plain_n(x)
    fc = weight_filtered(x)
    pieces = []
    for p in range(-1, n + 1):
        trunc = truncate(x, lambda v, p=p: x.index.weight(v) <= p + 1)
        degs = fc.complex.degrees
        pieces.append(FiltrationPiece(p, trunc, {m: fc.basis(p, m) for m in degs},
                                      {m: fc.basis(p + 1, m) for m in degs}))
    _, layout = simple_with_layout(x)
    return FiltrationPieces(x, fc.complex, layout, pieces)


def spectral_sequence(x: CubicalDiagram) -> SpectralSequence:
    return SpectralSequence(weight_filtered(x))


def e1_page(x: CubicalDiagram) -> SSPage:
    return spectral_sequence(x).page(1)


def pages(x: CubicalDiagram, r_max: int) -> list[SSPage]:
    return spectral_sequence(x).pages(r_max)


def abutment_filtration(x: CubicalDiagram, n: int) -> WeightFiltration:
    return spectral_sequence(x).filtration(n)
