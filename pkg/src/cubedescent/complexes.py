"""Bounded chain complexes of finitely generated free abelian groups.

Indexing is homological: ``d_m`` goes from degree ``m`` to ``m - 1`` and is
stored as a ``rank(m-1) x rank(m)`` integer matrix.  Homology ``H_q`` plays
the role of the homotopy group ``pi_q`` of a spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

import numpy as np

from . import zmod
from .zmod import FgAbGroup, Presented, as_int_matrix, matmul, zeros


class ComplexError(ValueError):
    """A complex or chain map failed validation."""

    def __init__(self, message: str, degree: Optional[int] = None):
        super().__init__(message)
        self.degree = degree


def _frozen(a: np.ndarray) -> np.ndarray:
    a = a.copy()
    a.flags.writeable = False
    return a


class ZComplex:
    """A bounded complex ``... -> C_m --d_m--> C_{m-1} -> ...``.

    Args:
        ranks: mapping degree -> rank (zero ranks may be omitted).
        diffs: mapping degree ``m`` -> matrix of ``d_m``; missing entries are
            zero maps.
        check: verify shapes and ``d o d = 0``.
    """

    __slots__ = ("_ranks", "_diffs", "lo", "hi")

    def __init__(self, ranks: Mapping[int, int], diffs: Optional[Mapping[int, object]] = None,
                 check: bool = True):
        r = {int(m): int(k) for m, k in ranks.items() if int(k)}
        if any(k < 0 for k in r.values()):
            raise ComplexError("negative rank")
        self._ranks = r
        self.lo = min(r) if r else 0
        self.hi = max(r) if r else 0
        self._diffs = {}
        for m, mat in (diffs or {}).items():
            m = int(m)
            shape = (self.rank(m - 1), self.rank(m))
            try:
                a = as_int_matrix(mat, shape)
            except zmod.ShapeError as exc:
                raise ComplexError(f"d_{m}: {exc}", m) from None
            if not zmod.is_zero(a):
                self._diffs[m] = _frozen(a)
        if check:
            self.validate()

    # -- structure --

    def rank(self, m: int) -> int:
        return self._ranks.get(m, 0)

    def d(self, m: int) -> np.ndarray:
        a = self._diffs.get(m)
        if a is None:
            return zeros(self.rank(m - 1), self.rank(m))
        return a

    @property
    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    @property
    def ranks(self) -> dict[int, int]:
        return dict(self._ranks)

    @property
    def is_zero(self) -> bool:
        return not self._ranks

    def total_rank(self) -> int:
        return sum(self._ranks.values())

    def validate(self) -> None:
        for m in self._diffs:
            if m - 1 not in self._ranks or m not in self._ranks:
                raise ComplexError(f"d_{m} is nonzero between empty degrees", m)
        for m in self._diffs:
            if m - 1 in self._diffs and not zmod.is_zero(matmul(self._diffs[m - 1], self._diffs[m])):
                raise ComplexError(f"d_{m - 1} o d_{m} != 0", m)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ZComplex):
            return NotImplemented
        if self._ranks != other._ranks:
            return False
        return all(zmod.equal(self.d(m), other.d(m)) for m in set(self._diffs) | set(other._diffs))

    def __hash__(self):
        return hash(tuple(sorted(self._ranks.items())))

    def __repr__(self) -> str:
        body = ", ".join(f"{m}:{self.rank(m)}" for m in sorted(self._ranks))
        return f"ZComplex({{{body}}})"

    # -- constructions --

    @classmethod
    def zero(cls) -> "ZComplex":
        return cls({})

    @classmethod
    def free(cls, degree: int, rank: int) -> "ZComplex":
        return cls({degree: rank})

    @classmethod
    def graded(cls, ranks: Mapping[int, int]) -> "ZComplex":
        """Zero-differential complex (an Eilenberg-MacLane style surrogate)."""
        return cls(ranks)

    def direct_sum(self, other: "ZComplex") -> "ZComplex":
        degs = set(self._ranks) | set(other._ranks)
        ranks = {m: self.rank(m) + other.rank(m) for m in degs}
        diffs = {m: zmod.block_diag([self.d(m), other.d(m)]) for m in degs}
        return ZComplex(ranks, diffs, check=False)

    def to_json(self) -> dict:
        if self.is_zero:
            return {"lo": 0, "hi": 0, "ranks": [0], "d": {}}
        return {
            "lo": self.lo,
            "hi": self.hi,
            "ranks": [self.rank(m) for m in self.degrees],
            "d": {str(m): zmod.to_lists(a) for m, a in sorted(self._diffs.items())},
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "ZComplex":
        try:
            lo, hi = int(obj["lo"]), int(obj["hi"])
            ranks = list(obj["ranks"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ComplexError(f"malformed complex: {exc}") from None
        if len(ranks) != hi - lo + 1:
            raise ComplexError(f"expected {hi - lo + 1} ranks for degrees {lo}..{hi}, got {len(ranks)}")
        diffs = {int(m): a for m, a in (obj.get("d") or {}).items()}
        return cls({lo + i: r for i, r in enumerate(ranks)}, diffs)


@dataclass(frozen=True)
class ChainMap:
    """Degreewise matrices ``f_m : A_m -> B_m`` commuting with ``d``."""

    source: ZComplex
    target: ZComplex
    maps: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for m, mat in self.maps.items():
            m = int(m)
            shape = (self.target.rank(m), self.source.rank(m))
            try:
                a = as_int_matrix(mat, shape)
            except zmod.ShapeError as exc:
                raise ComplexError(f"f_{m}: {exc}", m) from None
            if not zmod.is_zero(a):
                clean[m] = _frozen(a)
        object.__setattr__(self, "maps", clean)

    def __getitem__(self, m: int) -> np.ndarray:
        a = self.maps.get(m)
        if a is None:
            return zeros(self.target.rank(m), self.source.rank(m))
        return a

    @property
    def degrees(self) -> list[int]:
        return sorted(set(self.source.degrees) | set(self.target.degrees))

    def validate(self) -> None:
        for m in range(min(self.source.lo, self.target.lo), max(self.source.hi, self.target.hi) + 2):
            lhs = matmul(self[m - 1], self.source.d(m))
            rhs = matmul(self.target.d(m), self[m])
            if not zmod.equal(lhs, rhs):
                raise ComplexError(f"chain map does not commute with d_{m}", m)

    def is_valid(self) -> bool:
        try:
            self.validate()
        except ComplexError:
            return False
        return True

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        """Composition ``self o other``."""
        degs = set(self.maps) & set(other.maps)
        return ChainMap(other.source, self.target, {m: matmul(self[m], other[m]) for m in degs})

    def __add__(self, other: "ChainMap") -> "ChainMap":
        degs = set(self.maps) | set(other.maps)
        return ChainMap(self.source, self.target, {m: self[m] + other[m] for m in degs})

    def __neg__(self) -> "ChainMap":
        return ChainMap(self.source, self.target, {m: -a for m, a in self.maps.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChainMap):
            return NotImplemented
        degs = set(self.maps) | set(other.maps)
        return (self.source == other.source and self.target == other.target
                and all(zmod.equal(self[m], other[m]) for m in degs))

    __hash__ = None

    @classmethod
    def identity(cls, c: ZComplex) -> "ChainMap":
        return cls(c, c, {m: zmod.identity(c.rank(m)) for m in c.degrees})

    @classmethod
    def zero(cls, a: ZComplex, b: ZComplex) -> "ChainMap":
        return cls(a, b, {})

    def direct_sum(self, other: "ChainMap") -> "ChainMap":
        degs = set(self.maps) | set(other.maps)
        return ChainMap(self.source.direct_sum(other.source), self.target.direct_sum(other.target),
                        {m: zmod.block_diag([self[m], other[m]]) for m in degs})

    def to_json(self) -> dict:
        return {"f": {str(m): zmod.to_lists(a) for m, a in sorted(self.maps.items())}}

    @classmethod
    def from_json(cls, obj: Mapping, source: ZComplex, target: ZComplex) -> "ChainMap":
        return cls(source, target, {int(m): a for m, a in (obj.get("f") or {}).items()})


# -- homology -----------------------------------------------------------------

def cycles(c: ZComplex, q: int) -> np.ndarray:
    return zmod.kernel_basis(c.d(q))


def homology_presentation(c: ZComplex, q: int) -> tuple[Presented, np.ndarray]:
    """``H_q(C)`` as a presented group on a basis of the cycles.

    Returns the presentation and the cycle basis (columns, in ``C_q``).
    """
    z = cycles(c, q)
    b = c.d(q + 1)
    if b.shape[1]:
        rel = zmod.solve_in_lattice(z, b)
        if rel is None:
            raise ComplexError("boundaries are not cycles", q + 1)
    else:
        rel = zeros(z.shape[1], 0)
    return Presented(z.shape[1], rel), z


def homology(c: ZComplex, q: int) -> FgAbGroup:
    """``ker(d_q) / im(d_{q+1})`` in normal form."""
    return homology_presentation(c, q)[0].group


def homology_all(c: ZComplex, degrees: Optional[Iterable[int]] = None) -> dict[int, FgAbGroup]:
    degs = c.degrees if degrees is None else degrees
    return {q: homology(c, q) for q in degs}


def is_acyclic(c: ZComplex) -> bool:
    return all(homology(c, q).is_trivial for q in c.degrees)


def euler_characteristic(c: ZComplex) -> int:
    return sum((-1) ** (m % 2) * c.rank(m) for m in c.degrees)


def induced_on_homology(f: ChainMap, q: int):
    """Matrix of ``H_q(f)`` between the cycle-basis presentations."""
    src, zs = homology_presentation(f.source, q)
    tgt, zt = homology_presentation(f.target, q)
    img = matmul(f[q], zs)
    coords = zmod.solve_in_lattice(zt, img) if img.shape[1] else zeros(zt.shape[1], 0)
    if coords is None:
        raise ComplexError("map does not send cycles to cycles", q)
    return coords, src, tgt


# -- cones, fibers, loops -----------------------------------------------------

def _degrees(*cs: ZComplex) -> range:
    nonzero = [c for c in cs if not c.is_zero]
    if not nonzero:
        return range(0)
    return range(min(c.lo for c in nonzero) - 1, max(c.hi for c in nonzero) + 2)


def fiber(f: ChainMap) -> ZComplex:
    """Homotopy fiber: degree ``m`` is ``A_m + B_{m+1}``, ``D(a, b) = (da, f a - db)``."""
    a, b = f.source, f.target
    ranks, diffs = {}, {}
    for m in _degrees(a, b):
        ranks[m] = a.rank(m) + b.rank(m + 1)
    for m in _degrees(a, b):
        top = zmod.hstack([a.d(m), zeros(a.rank(m - 1), b.rank(m + 1))], a.rank(m - 1))
        bot = zmod.hstack([f[m], -b.d(m + 1)], b.rank(m))
        diffs[m] = zmod.vstack([top, bot], ranks.get(m, 0))
    return ZComplex(ranks, diffs, check=False)


def fiber_projection(f: ChainMap) -> ChainMap:
    """The canonical map ``fiber(f) -> A``."""
    fib = fiber(f)
    a = f.source
    return ChainMap(fib, a, {m: zmod.hstack([zmod.identity(a.rank(m)), zeros(a.rank(m), f.target.rank(m + 1))],
                                            a.rank(m)) for m in fib.degrees})


def fiber_inclusion(f: ChainMap) -> ChainMap:
    """The map ``loop(B) -> fiber(f)``, ``b -> (0, b)``."""
    fib = fiber(f)
    lb = loop(f.target)
    return ChainMap(lb, fib, {m: zmod.vstack([zeros(f.source.rank(m), f.target.rank(m + 1)),
                                              zmod.identity(f.target.rank(m + 1))], f.target.rank(m + 1))
                              for m in fib.degrees})


def cone(f: ChainMap) -> ZComplex:
    """Mapping cone: degree ``m`` is ``A_{m-1} + B_m``, ``D(a, b) = (-da, f a + db)``."""
    a, b = f.source, f.target
    ranks, diffs = {}, {}
    for m in _degrees(a, b):
        ranks[m] = a.rank(m - 1) + b.rank(m)
    for m in _degrees(a, b):
        top = zmod.hstack([-a.d(m - 1), zeros(a.rank(m - 2), b.rank(m))], a.rank(m - 2))
        bot = zmod.hstack([f[m - 1], b.d(m)], b.rank(m - 1))
        diffs[m] = zmod.vstack([top, bot], ranks.get(m, 0))
    return ZComplex(ranks, diffs, check=False)


def loop(c: ZComplex) -> ZComplex:
    """``loop(C)_m = C_{m+1}`` with differential ``-d``."""
    return ZComplex({m - 1: r for m, r in c.ranks.items()},
                    {m - 1: -c.d(m) for m in c.degrees}, check=False)


def shift_down(c: ZComplex, k: int) -> ZComplex:
    """``k``-fold loop: degree ``m`` carries ``C_{m+k}``, differential ``(-1)^k d``."""
    sign = -1 if k % 2 else 1
    return ZComplex({m - k: r for m, r in c.ranks.items()},
                    {m - k: sign * c.d(m) for m in c.degrees}, check=False)


def is_quasi_iso(f: ChainMap) -> bool:
    """True iff the cone of ``f`` is acyclic."""
    return is_acyclic(cone(f))
