import random

import numpy as np
import pytest

from cubedescent.axioms import (CHECKS, check_acyclicity, check_exactness, check_factorisation,
                                check_product, is_signed_permutation, verify_descent_axioms)
from cubedescent.complexes import ChainMap, ZComplex
from cubedescent.cube import Cube
from cubedescent.diagram import CubicalDiagram
from cubedescent.generate import Bounds, acyclic_padding, random_acyclic_augmented, random_diagram
from cubedescent.zmod import as_int_matrix

B = Bounds(lo=-1, hi=1, max_rank=2, entry=2)


def test_signed_permutation_detector():
    assert is_signed_permutation(as_int_matrix([[0, -1], [1, 0]]))
    assert not is_signed_permutation(as_int_matrix([[1, 1], [0, 1]]))
    assert not is_signed_permutation(as_int_matrix([[2]]))
    assert is_signed_permutation(np.empty((0, 0), dtype=object))


def test_short_run_passes():
    rep = verify_descent_axioms(seed=3, trials=15, max_cube=2, bounds=B)
    assert rep.ok, rep.failures
    assert set(rep.passed) == set(CHECKS)
    assert all(v == 15 for v in rep.passed.values())
    assert rep.to_json()["ok"]


def test_report_is_deterministic():
    a = verify_descent_axioms(seed=5, trials=5, bounds=B).to_json()
    b = verify_descent_axioms(seed=5, trials=5, bounds=B).to_json()
    assert a == b


@pytest.mark.parametrize("seed", range(5))
def test_individual_checks(seed):
    r = random.Random(seed)
    x, y = random_diagram(r, Cube(1), B), random_diagram(r, Cube(1), B)
    assert check_product(x, y)[0]
    assert check_exactness(x, acyclic_padding(r, Cube(1), B))[0]
    xp = random_diagram(r, Cube(2, True), B)
    assert check_factorisation(xp, 1, acyclic_padding(r, Cube(2, True), B))[0]
    assert check_acyclicity(random_acyclic_augmented(r, 1, B))[0]


def test_acyclicity_check_on_a_non_acyclic_square():
    z = ZComplex.free(0, 1)
    sq = CubicalDiagram(Cube(1, True), {(0, 0): z, (1, 0): z}, {((0, 0), (1, 0)): ChainMap(z, z, {0: [[2]]})})
    ok, _ = check_acyclicity(sq)
    assert ok   # both sides say "not acyclic"
