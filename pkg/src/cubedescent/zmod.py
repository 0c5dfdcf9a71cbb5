"""Exact integer linear algebra.

Matrices are numpy arrays of dtype ``object`` holding Python ints, so
entries never overflow and never become floats.  Everything here is a pure
function of its inputs; pivot choices are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np


class ShapeError(ValueError):
    pass


def as_int_matrix(data, shape: Optional[tuple[int, int]] = None) -> np.ndarray:
    """Coerce nested sequences (or an array) to an exact integer matrix.

    ``shape`` is needed to give empty matrices their column count.
    """
    if isinstance(data, np.ndarray) and data.dtype == object and data.ndim == 2:
        out = data.copy()
    else:
        rows = [list(r) for r in data] if data is not None else []
        if shape is not None and (shape[0] == 0 or shape[1] == 0):
            return zeros(*shape)
        out = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
        for i, r in enumerate(rows):
            if len(r) != out.shape[1]:
                raise ShapeError("ragged matrix rows")
            for j, x in enumerate(r):
                out[i, j] = _to_int(x)
        if shape is not None and out.shape != tuple(shape):
            if out.size == 0 and (shape[0] == 0 or shape[1] == 0):
                return zeros(*shape)
            raise ShapeError(f"expected shape {tuple(shape)}, got {out.shape}")
        return out
    flat = out.reshape(-1)
    for i, x in enumerate(flat):
        if type(x) is not int:
            flat[i] = _to_int(x)
    if shape is not None and out.shape != tuple(shape):
        raise ShapeError(f"expected shape {tuple(shape)}, got {out.shape}")
    return out


def _to_int(x) -> int:
    if isinstance(x, bool):
        raise TypeError("booleans are not matrix entries")
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, float) and x.is_integer():
        return int(x)
    raise TypeError(f"non-integer matrix entry {x!r}")


def zeros(rows: int, cols: int) -> np.ndarray:
    out = np.empty((rows, cols), dtype=object)
    out.fill(0)
    return out


def identity(n: int) -> np.ndarray:
    out = zeros(n, n)
    for i in range(n):
        out[i, i] = 1
    return out


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    if a.shape[1] == 0:
        return zeros(a.shape[0], b.shape[1])
    return a.dot(b)


def hstack(blocks: Sequence[np.ndarray], rows: int) -> np.ndarray:
    blocks = [b for b in blocks if b.shape[1]]
    if not blocks:
        return zeros(rows, 0)
    return np.concatenate(blocks, axis=1)


def vstack(blocks: Sequence[np.ndarray], cols: int) -> np.ndarray:
    blocks = [b for b in blocks if b.shape[0]]
    if not blocks:
        return zeros(0, cols)
    return np.concatenate(blocks, axis=0)


def block_diag(blocks: Sequence[np.ndarray]) -> np.ndarray:
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = zeros(rows, cols)
    r = c = 0
    for b in blocks:
        out[r:r + b.shape[0], c:c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


def is_zero(a: np.ndarray) -> bool:
    return all(x == 0 for x in a.flat)


def equal(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and all(x == y for x, y in zip(a.flat, b.flat))


def to_lists(a: np.ndarray) -> list[list[int]]:
    return [[int(x) for x in row] for row in a]


# -- Smith normal form --------------------------------------------------------

def snf(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Smith normal form with transforms.

    Returns ``(U, D, V)`` with ``U @ M @ V == D``, ``U`` and ``V`` unimodular
    and ``D`` diagonal with non-negative entries ``d_1 | d_2 | ...``.

    Pivot rule: the entry of smallest absolute value in the active block,
    ties broken by lowest (row, column) in row-major order.
    """
    a = as_int_matrix(m)
    rows, cols = a.shape
    u = identity(rows)
    v = identity(cols)
    t = 0
    while t < min(rows, cols):
        piv = _smallest(a, t, range(t, rows), range(t, cols))
        if piv is None:
            break
        _move_pivot(a, u, v, t, piv)
        while True:
            clean = True
            p = a[t, t]
            for i in range(t + 1, rows):
                if a[i, t]:
                    q = a[i, t] // p
                    a[i] -= q * a[t]
                    u[i] -= q * u[t]
                    if a[i, t]:
                        clean = False
            for j in range(t + 1, cols):
                if a[t, j]:
                    q = a[t, j] // p
                    a[:, j] -= q * a[:, t]
                    v[:, j] -= q * v[:, t]
                    if a[t, j]:
                        clean = False
            if not clean:
                line = [(i, t) for i in range(t, rows)] + [(t, j) for j in range(t + 1, cols)]
                piv = min((abs(a[i, j]), i, j) for i, j in line if a[i, j])
                _move_pivot(a, u, v, t, (piv[1], piv[2]))
                continue
            bad = _first_nondivisible(a, t, p)
            if bad is None:
                break
            a[t] += a[bad]
            u[t] += u[bad]
        if a[t, t] < 0:
            a[t] = -a[t]
            u[t] = -u[t]
        t += 1
    return u, a, v


def _smallest(a, t, rows, cols):
    best = None
    for i in rows:
        for j in cols:
            x = a[i, j]
            if x and (best is None or abs(x) < best[0]):
                best = (abs(x), i, j)
    return None if best is None else (best[1], best[2])


def _move_pivot(a, u, v, t, piv):
    i, j = piv
    if i != t:
        a[[t, i]] = a[[i, t]]
        u[[t, i]] = u[[i, t]]
    if j != t:
        a[:, [t, j]] = a[:, [j, t]]
        v[:, [t, j]] = v[:, [j, t]]


def _first_nondivisible(a, t, p):
    rows, cols = a.shape
    for i in range(t + 1, rows):
        for j in range(t + 1, cols):
            if a[i, j] % p:
                return i
    return None


def invariant_factors(m) -> list[int]:
    """Nonzero diagonal entries of the Smith form, in divisibility order."""
    _, d, _ = snf(m)
    return [int(d[i, i]) for i in range(min(d.shape)) if d[i, i]]


def unimodular_inverse(m) -> np.ndarray:
    a = as_int_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ShapeError("inverse of a non-square matrix")
    u, d, v = snf(a)
    n = a.shape[0]
    if any(d[i, i] != 1 for i in range(n)):
        raise ValueError("matrix is not unimodular")
    return matmul(v, u)


# -- Hermite normal form and lattices -----------------------------------------

def hnf(m) -> tuple[np.ndarray, np.ndarray, list[int]]:
    """Column Hermite normal form.

    Returns ``(H, W, pivot_rows)`` with ``H == M @ W``, ``W`` unimodular.
    The first ``k = len(pivot_rows)`` columns of ``H`` are a basis of the
    column lattice of ``M`` in echelon form (column ``j`` has its leading
    positive entry in row ``pivot_rows[j]``, and entries to its left in that
    row are reduced modulo it); the remaining columns are zero, so the last
    columns of ``W`` span the kernel.
    """
    h = as_int_matrix(m)
    rows, cols = h.shape
    w = identity(cols)
    pivots: list[int] = []
    k = 0
    for i in range(rows):
        if k == cols:
            break
        while True:
            nz = [j for j in range(k, cols) if h[i, j]]
            if not nz:
                break
            j0 = min(nz, key=lambda j: (abs(h[i, j]), j))
            if j0 != k:
                h[:, [k, j0]] = h[:, [j0, k]]
                w[:, [k, j0]] = w[:, [j0, k]]
            done = True
            for j in range(k + 1, cols):
                if h[i, j]:
                    q = h[i, j] // h[i, k]
                    h[:, j] -= q * h[:, k]
                    w[:, j] -= q * w[:, k]
                    if h[i, j]:
                        done = False
            if done:
                break
        if k < cols and h[i, k]:
            if h[i, k] < 0:
                h[:, k] = -h[:, k]
                w[:, k] = -w[:, k]
            for j in range(k):
                q = h[i, j] // h[i, k]
                if q:
                    h[:, j] -= q * h[:, k]
                    w[:, j] -= q * w[:, k]
            pivots.append(i)
            k += 1
    return h, w, pivots


def rank(m) -> int:
    return len(hnf(m)[2])


def kernel_basis(m) -> np.ndarray:
    """Columns form a basis of the integer kernel lattice ``{x : M x = 0}``."""
    a = as_int_matrix(m)
    _, w, piv = hnf(a)
    return w[:, len(piv):]


def image_basis(gens) -> np.ndarray:
    """Canonical (Hermite) basis of the lattice spanned by the columns."""
    h, _, piv = hnf(gens)
    return h[:, :len(piv)]


def lattice_equal(a, b) -> bool:
    return equal(image_basis(a), image_basis(b))


def solve_in_lattice(m, v) -> Optional[np.ndarray]:
    """Integer solution of ``M x = v``, or ``None`` if there is none.

    ``v`` may be a vector or a matrix of right-hand sides; for a matrix every
    column must be solvable.
    """
    a = as_int_matrix(m)
    vec = np.ndim(v) == 1
    rhs = as_int_matrix([[x] for x in v], (len(v), 1)) if vec else as_int_matrix(v)
    if rhs.shape[0] != a.shape[0]:
        raise ShapeError(f"right-hand side has {rhs.shape[0]} rows, matrix has {a.shape[0]}")
    h, w, piv = hnf(a)
    k = len(piv)
    y = zeros(k, rhs.shape[1])
    for c in range(rhs.shape[1]):
        res = rhs[:, c].copy()
        for j, r in enumerate(piv):
            q, rem = divmod(res[r], h[r, j])
            if rem:
                return None
            y[j, c] = q
            if q:
                res -= q * h[:, j]
        if any(res):
            return None
    x = matmul(w[:, :k], y)
    return x[:, 0] if vec else x


def contains(gens, v) -> bool:
    return solve_in_lattice(gens, v) is not None


def is_surjective(m) -> bool:
    """True iff ``M: Z^cols -> Z^rows`` is onto."""
    a = as_int_matrix(m)
    if a.shape[0] == 0:
        return True
    return invariant_factors(a) == [1] * a.shape[0]


# -- finitely generated abelian groups ----------------------------------------

@dataclass(frozen=True)
class FgAbGroup:
    """Z^rank + Z/t_1 + ... with t_1 | t_2 | ... and every t_i >= 2."""

    rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("negative rank")
        t = tuple(int(x) for x in self.torsion)
        if any(x < 2 for x in t):
            raise ValueError("invariant factors must be >= 2")
        if any(t[i + 1] % t[i] for i in range(len(t) - 1)):
            raise ValueError("invariant factors must form a divisibility chain")
        object.__setattr__(self, "torsion", t)

    @classmethod
    def from_diagonal(cls, diag: Iterable[int], ngens: int) -> "FgAbGroup":
        diag = [abs(int(x)) for x in diag if x]
        return cls(ngens - len(diag), tuple(x for x in diag if x != 1))

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    def __add__(self, other: "FgAbGroup") -> "FgAbGroup":
        # Direct sum: renormalise the torsion through a diagonal Smith form.
        t = list(self.torsion) + list(other.torsion)
        if not t:
            return FgAbGroup(self.rank + other.rank)
        diag = zeros(len(t), len(t))
        for i, x in enumerate(t):
            diag[i, i] = x
        return FgAbGroup(self.rank + other.rank,
                         tuple(x for x in invariant_factors(diag) if x != 1))

    def __str__(self) -> str:
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append(f"Z^{self.rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}

    @classmethod
    def from_json(cls, obj: dict) -> "FgAbGroup":
        return cls(int(obj["rank"]), tuple(obj.get("torsion", ())))


def group_sum(groups: Iterable[FgAbGroup]) -> FgAbGroup:
    out = FgAbGroup()
    for g in groups:
        out = out + g
    return out


def cokernel(m) -> FgAbGroup:
    """``Z^rows / im(M)`` in normal form."""
    a = as_int_matrix(m)
    if a.shape[1] == 0:
        return FgAbGroup(a.shape[0])
    return FgAbGroup.from_diagonal(invariant_factors(a), a.shape[0])


# -- presented groups ---------------------------------------------------------

@dataclass(frozen=True)
class Presented:
    """The group ``Z^ngens / span(relations)``.

    ``relations`` is an ``ngens x r`` matrix whose columns are relations.
    Maps between presented groups are plain integer matrices acting on the
    generators.
    """

    ngens: int
    relations: np.ndarray

    @classmethod
    def free(cls, n: int) -> "Presented":
        return cls(n, zeros(n, 0))

    @property
    def group(self) -> FgAbGroup:
        return cokernel(self.relations)

    def is_zero_element(self, v) -> bool:
        return contains(self.relations, v)

    def direct_sum(self, other: "Presented") -> "Presented":
        return Presented(self.ngens + other.ngens,
                         block_diag([self.relations, other.relations]))


def subquotient(big, small) -> tuple[FgAbGroup, np.ndarray, np.ndarray]:
    """The group ``L / S`` for lattices given by generating columns, ``S <= L``.

    Returns the group together with a basis of ``L`` and the coordinates of
    the generators of ``S`` in that basis.
    """
    basis = image_basis(big)
    small = as_int_matrix(small)
    if small.shape[1] == 0:
        coords = zeros(basis.shape[1], 0)
    else:
        coords = solve_in_lattice(basis, small)
        if coords is None:
            raise ValueError("subquotient: S is not contained in L")
    return cokernel(coords), basis, coords


def preimage_lattice(a, target: Presented) -> np.ndarray:
    """Basis of ``{x : A x in span(target.relations)}``."""
    a = as_int_matrix(a)
    n = a.shape[1]
    stacked = hstack([a, target.relations], a.shape[0])
    if stacked.shape[1] == 0:
        return identity(n)
    k = kernel_basis(stacked)
    return image_basis(k[:n, :]) if k.shape[1] else zeros(n, 0)


def map_kernel(a, src: Presented, tgt: Presented) -> tuple[FgAbGroup, np.ndarray]:
    """Kernel of an induced map of presented groups, as a subquotient."""
    pre = preimage_lattice(a, tgt)
    grp, basis, _ = subquotient(pre, src.relations)
    return grp, basis


def map_is_injective(a, src: Presented, tgt: Presented) -> bool:
    pre = preimage_lattice(a, tgt)
    return all(contains(src.relations, pre[:, j]) for j in range(pre.shape[1]))


def map_is_surjective(a, tgt: Presented) -> bool:
    gens = hstack([as_int_matrix(a), tgt.relations], tgt.ngens)
    return lattice_equal(gens, identity(tgt.ngens)) if tgt.ngens else True


def map_is_iso(a, src: Presented, tgt: Presented) -> bool:
    return map_is_injective(a, src, tgt) and map_is_surjective(a, tgt)


def map_is_zero(a, tgt: Presented) -> bool:
    a = as_int_matrix(a)
    return all(contains(tgt.relations, a[:, j]) for j in range(a.shape[1]))


def presented_homology(a_in, mid: Presented, a_out, tgt: Presented) -> tuple[FgAbGroup, Presented, np.ndarray]:
    """Homology at ``mid`` of ``src --a_in--> mid --a_out--> tgt``.

    Returns the group, a presentation of it, and the basis (in ``mid``
    generator coordinates) of the cycle lattice its generators refer to.
    """
    cycles = preimage_lattice(a_out, tgt)
    bounds = hstack([as_int_matrix(a_in), mid.relations], mid.ngens)
    grp, basis, coords = subquotient(cycles, bounds)
    return grp, Presented(basis.shape[1], coords), basis


def exact_at(a_in, mid: Presented, a_out, tgt: Presented) -> bool:
    """Is ``ker(a_out) == im(a_in)`` inside the presented group ``mid``?"""
    try:
        return presented_homology(a_in, mid, a_out, tgt)[0].is_trivial
    except ValueError:
        # image not inside the kernel: not even a complex at this node
        return False
