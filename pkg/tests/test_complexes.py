import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cubedescent import complexes
from cubedescent.complexes import (ChainMap, ComplexError, ZComplex, cone, fiber, fiber_inclusion,
                                   fiber_projection, homology, is_acyclic, is_quasi_iso, loop)
from cubedescent.generate import Bounds, random_complex
from cubedescent.zmod import FgAbGroup, matmul

Z = FgAbGroup(1)
Z2 = FgAbGroup(0, (2,))
ZERO = FgAbGroup()


def times(k: int, degree: int = 0) -> ChainMap:
    z = ZComplex.free(degree, 1)
    return ChainMap(z, z, {degree: [[k]]})


def two_term(k: int) -> ZComplex:
    return ZComplex({0: 1, 1: 1}, {1: [[k]]})


def test_point_homology():
    c = ZComplex.free(0, 1)
    assert homology(c, 0) == Z
    assert homology(c, 1) == ZERO and homology(c, -1) == ZERO


def test_two_term_homology():
    assert homology(two_term(2), 0) == Z2
    assert homology(two_term(2), 1) == ZERO
    assert homology(two_term(0), 0) == Z and homology(two_term(0), 1) == Z


def test_square_zero_is_enforced():
    with pytest.raises(ComplexError):
        ZComplex({0: 1, 1: 1, 2: 1}, {1: [[1]], 2: [[1]]})


def test_shape_mismatch_is_rejected():
    with pytest.raises(ComplexError):
        ZComplex({0: 1, 1: 2}, {1: [[1]]})


def test_json_roundtrip(rng):
    for _ in range(10):
        c = random_complex(rng)
        assert ZComplex.from_json(c.to_json()) == c


def test_fiber_examples():
    assert is_acyclic(fiber(ChainMap.identity(two_term(3))))
    b = two_term(2)
    assert fiber(ChainMap.zero(ZComplex.zero(), b)) == loop(b)
    f = fiber(times(2))
    assert homology(f, 0) == ZERO and homology(f, -1) == Z2


def test_cone_examples():
    assert is_acyclic(cone(ChainMap.identity(two_term(5))))
    b = two_term(2)
    assert cone(ChainMap.zero(ZComplex.zero(), b)) == b
    assert homology(cone(times(2)), 0) == Z2


def test_loop_examples():
    assert loop(ZComplex.free(0, 1)) == ZComplex.free(-1, 1)
    assert is_acyclic(loop(two_term(1)))
    assert homology(loop(two_term(2)), -1) == Z2


def test_quasi_iso_examples():
    c = two_term(2)
    assert is_quasi_iso(ChainMap.identity(c))
    assert not is_quasi_iso(times(2))
    pad = cone(ChainMap.identity(two_term(3)))
    total = c.direct_sum(pad)
    inc = ChainMap(c, total, {m: [[1]] + [[0]] * pad.rank(m) for m in c.degrees})
    assert is_quasi_iso(inc)


def test_chain_map_validation():
    c = two_term(2)
    with pytest.raises(ComplexError):
        ChainMap(c, c, {0: [[1]], 1: [[0]]}).validate()


def test_fiber_sequence_maps_are_chain_maps(rng):
    b = Bounds(lo=-1, hi=1, max_rank=2)
    for _ in range(10):
        c = random_complex(rng, b)
        f = ChainMap.identity(c)
        assert fiber_projection(f).is_valid()
        assert fiber_inclusion(f).is_valid()


@given(st.integers(0, 10_000))
def test_euler_characteristic_of_fiber(seed):
    r = random.Random(seed)
    c = random_complex(r, Bounds(lo=-1, hi=1, max_rank=2, entry=2))
    f = ChainMap.identity(c)
    assert complexes.euler_characteristic(fiber(f)) == 0
    assert complexes.euler_characteristic(cone(f)) == 0


@given(st.integers(0, 10_000))
def test_random_complexes_square_to_zero(seed):
    c = random_complex(random.Random(seed))
    for m in c.degrees:
        assert not matmul(c.d(m), c.d(m + 1)).any()
