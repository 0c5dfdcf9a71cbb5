"""Randomised checks of the descent-category axioms for the total-complex model.

Each trial draws random commuting diagrams and checks:

* ``product``: ``s(X + Y)`` is ``s(X) + s(Y)`` up to the block permutation,
  which is verified to be a chain isomorphism;
* ``factorisation``: ``mu`` from the simple over a product of cubes to both
  iterated simples is a chain map and a signed permutation, natural for a
  vertexwise map;
* ``exactness``: a vertexwise quasi-isomorphism ``X -> X + cone(id)`` gives
  a quasi-isomorphism of simples;
* ``acyclicity``: for an augmented diagram, the simple is acyclic exactly when
  the augmentation is a quasi-isomorphism, and the fiber form agrees with the
  iterated-fiber form.

Every simple built along the way is checked for ``D o D = 0``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import complexes
from .complexes import ChainMap, ComplexError, ZComplex
from .cube import Cube
from .diagram import (CubicalDiagram, augmentation_map, factorisation_map, iterated_simple,
                      restrict_to_product, simple, simple_augmented, simple_augmented_iterated,
                      simple_of_map, simple_with_layout, vertexwise_sum)
from .generate import Bounds, acyclic_padding, inclusion_into_sum, random_acyclic_augmented, random_diagram
from .zmod import zeros

CHECKS = ("product", "factorisation", "exactness", "acyclicity", "square_zero")


@dataclass
class AxiomReport:
    seed: int
    trials: int
    passed: dict = field(default_factory=lambda: {c: 0 for c in CHECKS})
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, check: str, trial: int, ok: bool, detail: str = "") -> None:
        if ok:
            self.passed[check] += 1
        else:
            self.failures.append({"check": check, "trial": trial, "detail": detail})

    def to_json(self) -> dict:
        return {"seed": self.seed, "trials": self.trials, "passed": dict(self.passed),
                "failures": list(self.failures), "ok": self.ok}


def is_signed_permutation(a: np.ndarray) -> bool:
    if a.shape[0] != a.shape[1]:
        return False
    if a.size == 0:
        return True
    nz = a != 0
    return bool(np.all(nz.sum(axis=0) == 1) and np.all(nz.sum(axis=1) == 1)
                and all(abs(x) in (0, 1) for x in a.flat))


def _square_zero(c: ZComplex) -> bool:
    try:
        c.validate()
        return True
    except ComplexError:
        return False


def sum_comparison(x: CubicalDiagram, y: CubicalDiagram) -> ChainMap:
    """Block map ``s(X) + s(Y) -> s(X + Y)``."""
    sx, lx = simple_with_layout(x)
    sy, ly = simple_with_layout(y)
    xy = vertexwise_sum(x, y)
    sxy, lxy = simple_with_layout(xy)
    src = sx.direct_sum(sy)
    maps = {}
    for m in sorted(set(src.degrees) | set(sxy.degrees)):
        mat = zeros(sxy.rank(m), src.rank(m))
        base_y = sx.rank(m)
        for v in x.index.vertices:
            toff, _ = lxy.block(m, v)
            off, r = lx.block(m, v)
            for t in range(r):
                mat[toff + t, off + t] = 1
            off2, r2 = ly.block(m, v)
            for t in range(r2):
                mat[toff + r + t, base_y + off2 + t] = 1
        maps[m] = mat
    return ChainMap(src, sxy, maps)


def check_product(x: CubicalDiagram, y: CubicalDiagram) -> tuple[bool, str]:
    f = sum_comparison(x, y)
    if not f.is_valid():
        return False, "block permutation is not a chain map"
    if not all(is_signed_permutation(f[m]) for m in f.maps):
        return False, "block map is not a permutation"
    return True, ""


def check_factorisation(xp: CubicalDiagram, split: int, pad: Optional[CubicalDiagram] = None) -> tuple[bool, str]:
    x = restrict_to_product(xp, split)
    for outer in (0, 1):
        mu = factorisation_map(x, outer)
        if not mu.is_valid():
            return False, f"mu (outer={outer}) is not a chain map"
        if not all(is_signed_permutation(mu[m]) for m in mu.maps):
            return False, f"mu (outer={outer}) is not a signed permutation"
        if not _square_zero(mu.target):
            return False, "iterated simple has D o D != 0"
    if pad is not None:
        y = restrict_to_product(vertexwise_sum(xp, pad), split)
        comps_aug = inclusion_into_sum(xp, pad)
        comps = {v: comps_aug[v[0] + v[1]] for v in x.index.vertices}
        sf = simple_of_map(x, y, comps)
        for outer in (0, 1):
            mx, my = factorisation_map(x, outer), factorisation_map(y, outer)
            it_f = _iterated_map(x, y, comps, outer, mx.target, my.target)
            if not (my @ sf == it_f @ mx):
                return False, f"mu (outer={outer}) not natural"
    return True, ""


def _iterated_map(x, y, comps, outer, tx: ZComplex, ty: ZComplex) -> ChainMap:
    """The map of iterated simples induced by a vertexwise map."""
    _, ox = iterated_simple(x, outer)
    _, oy = iterated_simple(y, outer)
    maps = {}
    for m in sorted(set(tx.degrees) | set(ty.degrees)):
        mat = zeros(ty.rank(m), tx.rank(m))
        for v in x.index.vertices:
            soff, sr = ox(m, v)
            toff, tr = oy(m, v)
            if sr and tr:
                mat[toff:toff + tr, soff:soff + sr] = comps[v][m + x.index.shift(v)]
        maps[m] = mat
    return ChainMap(tx, ty, maps)


def check_exactness(x: CubicalDiagram, pad: CubicalDiagram) -> tuple[bool, str]:
    y = vertexwise_sum(x, pad)
    comps = inclusion_into_sum(x, pad)
    if not all(complexes.is_quasi_iso(f) for f in comps.values()):
        return False, "generator produced a non quasi-isomorphism"
    sf = simple_of_map(x, y, comps)
    if not sf.is_valid():
        return False, "s(f) is not a chain map"
    if not complexes.is_quasi_iso(sf):
        return False, "s(f) is not a quasi-isomorphism"
    return True, ""


def check_acyclicity(xp: CubicalDiagram) -> tuple[bool, str]:
    lam = augmentation_map(xp)
    if not lam.is_valid():
        return False, "augmentation is not a chain map"
    a = complexes.is_acyclic(simple_augmented(xp))
    b = complexes.is_quasi_iso(lam)
    if a != b:
        return False, f"acyclic={a} but augmentation quasi-iso={b}"
    fib, it = simple_augmented(xp), simple_augmented_iterated(xp)
    degs = range(min(fib.lo, it.lo), max(fib.hi, it.hi) + 1) if not (fib.is_zero and it.is_zero) else []
    for q in degs:
        if complexes.homology(fib, q) != complexes.homology(it, q):
            return False, f"fiber and iterated forms differ in degree {q}"
    return True, ""


def verify_descent_axioms(seed: int = 0, trials: int = 200, max_cube: int = 2,
                          bounds: Optional[Bounds] = None) -> AxiomReport:
    """Run ``trials`` randomised rounds over cubes up to ``cube(max_cube)``."""
    rng = random.Random(seed)
    b = bounds or Bounds()
    rep = AxiomReport(seed, trials)
    for t in range(trials):
        n = rng.randint(0, max_cube)
        idx = Cube(n)
        x, y = random_diagram(rng, idx, b), random_diagram(rng, idx, b)
        ok, why = check_product(x, y)
        rep.record("product", t, ok, why)

        pad = acyclic_padding(rng, idx, b)
        ok, why = check_exactness(x, pad)
        rep.record("exactness", t, ok, why)

        if max_cube >= 1:
            size = rng.randint(2, max(2, max_cube + 1))
            split = rng.randint(1, size - 1)
            xp = random_diagram(rng, Cube(size - 1, True), b)
            ok, why = check_factorisation(xp, split, acyclic_padding(rng, Cube(size - 1, True), b))
            rep.record("factorisation", t, ok, why)
        else:
            rep.record("factorisation", t, True)

        m = rng.randint(0, max_cube)
        aug = random_acyclic_augmented(rng, m, b) if t % 2 else random_diagram(rng, Cube(m, True), b)
        ok, why = check_acyclicity(aug)
        rep.record("acyclicity", t, ok, why)

        built = [simple(x), simple(y), simple(vertexwise_sum(x, pad)), simple_augmented(aug),
                 simple_augmented_iterated(aug)]
        rep.record("square_zero", t, all(_square_zero(c) for c in built), "D o D != 0")
    return rep
