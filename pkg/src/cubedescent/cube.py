"""Cubical index categories.

A vertex of the cube on ``n + 1`` letters is a tuple of 0/1 entries; its
weight is the number of ones.  The plain cube omits the all-zero tuple, the
augmented cube keeps it.  Products of plain cubes have pairs (triples, ...)
of such tuples as vertices.

Coface signs follow the exterior-algebra rule: flipping position ``k`` of
``alpha`` costs ``(-1) ** #{j < k : alpha[j] == 1}``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator

Vertex = tuple


def weight(alpha: tuple[int, ...]) -> int:
    return sum(alpha)


def coface_sign(alpha: tuple[int, ...], k: int) -> int:
    return -1 if sum(alpha[:k]) % 2 else 1


def cofaces(alpha: tuple[int, ...]) -> list[tuple[tuple[int, ...], int, int]]:
    """All ``(beta, k, sign)`` with ``beta`` obtained by flipping a 0 at ``k``."""
    out = []
    for k, bit in enumerate(alpha):
        if not bit:
            beta = alpha[:k] + (1,) + alpha[k + 1:]
            out.append((beta, k, coface_sign(alpha, k)))
    return out


def to_bits(alpha: tuple[int, ...]) -> str:
    return "".join(str(b) for b in alpha)


def from_bits(s: str) -> tuple[int, ...]:
    if not s or any(c not in "01" for c in s):
        raise ValueError(f"not a vertex bitstring: {s!r}")
    return tuple(int(c) for c in s)


def _vertex_key(alpha):
    # weight first; within a weight, earlier ones first: (1,0) before (0,1)
    return (sum(alpha), tuple(-b for b in alpha))


@dataclass(frozen=True)
class Cube:
    """The cube on ``n + 1`` letters, optionally augmented."""

    n: int
    augmented: bool = False

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"cube dimension must be >= 0, got {self.n}")

    @property
    def size(self) -> int:
        return self.n + 1

    @cached_property
    def vertices(self) -> tuple[tuple[int, ...], ...]:
        verts = [v for v in itertools.product((0, 1), repeat=self.size)
                 if self.augmented or any(v)]
        return tuple(sorted(verts, key=_vertex_key))

    def __contains__(self, alpha) -> bool:
        return (isinstance(alpha, tuple) and len(alpha) == self.size
                and all(b in (0, 1) for b in alpha)
                and (self.augmented or any(alpha)))

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self.vertices)

    def __len__(self) -> int:
        return len(self.vertices)

    def weight(self, alpha) -> int:
        return sum(alpha)

    def shift(self, alpha) -> int:
        """Degree offset of ``alpha`` in the simple: ``|alpha| - 1``."""
        return sum(alpha) - 1

    def cofaces(self, alpha):
        return cofaces(alpha)

    @property
    def zero(self) -> tuple[int, ...]:
        return (0,) * self.size

    @property
    def top(self) -> tuple[int, ...]:
        return (1,) * self.size

    def plain(self) -> "Cube":
        return Cube(self.n, False)

    def label(self, alpha) -> str:
        return to_bits(alpha)

    def parse(self, s: str) -> tuple[int, ...]:
        alpha = from_bits(s)
        if alpha not in self:
            raise ValueError(f"{s!r} is not a vertex of {self}")
        return alpha

    def __str__(self) -> str:
        return f"cube{self.n}{'+' if self.augmented else ''}"


def build_cube(n: int, augmented: bool = False) -> Cube:
    return Cube(n, augmented)


@dataclass(frozen=True)
class ProductCube:
    """A finite product of plain cubes.

    Vertices are tuples of factor vertices, weight is additive and the shift
    in the simple is ``weight - number_of_factors``.  Coface signs are those
    of the concatenated tuple, so the simple has square-zero differential.
    """

    factors: tuple[Cube, ...]

    def __post_init__(self):
        if not self.factors:
            raise ValueError("empty product")
        if any(f.augmented for f in self.factors):
            raise ValueError("augmented cubes cannot be factors of a product")

    @cached_property
    def vertices(self):
        verts = itertools.product(*(f.vertices for f in self.factors))
        return tuple(sorted(verts, key=lambda v: (self.weight(v), tuple(_vertex_key(a) for a in v))))

    def __contains__(self, v) -> bool:
        return (isinstance(v, tuple) and len(v) == len(self.factors)
                and all(a in f for a, f in zip(v, self.factors)))

    def __iter__(self):
        return iter(self.vertices)

    def __len__(self) -> int:
        return len(self.vertices)

    def weight(self, v) -> int:
        return sum(sum(a) for a in v)

    def shift(self, v) -> int:
        return self.weight(v) - len(self.factors)

    def cofaces(self, v):
        out = []
        before = 0
        for i, a in enumerate(v):
            for b, k, s in cofaces(a):
                w = v[:i] + (b,) + v[i + 1:]
                out.append((w, (i, k), s * (-1) ** before))
            before += sum(a)
        return out

    def label(self, v) -> str:
        return "x".join(to_bits(a) for a in v)

    def __str__(self) -> str:
        return " x ".join(str(f) for f in self.factors)


def cube_product(a: Cube, b: Cube) -> ProductCube:
    return ProductCube((a, b))
