import random

import pytest

from cubedescent import complexes
from cubedescent.complexes import ChainMap, ZComplex, homology, loop
from cubedescent.cube import Cube, cube_product
from cubedescent.diagram import (CubicalDiagram, DiagramError, DiagramMorphism, augmentation_map,
                                 constant, factorisation_map, identity_morphism, is_acyclic,
                                 restrict_to_product, simple, simple_augmented,
                                 simple_augmented_iterated)
from cubedescent.generate import Bounds, random_acyclic_augmented, random_diagram
from cubedescent.kweight import nodal_cubic
from cubedescent.axioms import is_signed_permutation
from cubedescent.zmod import FgAbGroup

Z = FgAbGroup(1)
Z0 = ZComplex.free(0, 1)


def ident(c=Z0):
    return ChainMap.identity(c)


def cospan(f=None, g=None):
    """Z -> Z <- Z over the plain square."""
    return CubicalDiagram(Cube(1), {(1, 0): Z0, (0, 1): Z0, (1, 1): Z0},
                          {((1, 0), (1, 1)): f or ident(), ((0, 1), (1, 1)): g or ident()})


def test_identity_cospan_is_the_pullback():
    s = simple(cospan())
    assert homology(s, 0) == Z
    assert homology(s, -1) == FgAbGroup()


def test_zero_diagram():
    assert simple(CubicalDiagram(Cube(1), {})).is_zero


def test_nodal_square():
    s = simple(nodal_cubic().diagram)
    assert homology(s, 0) == FgAbGroup(2)
    assert homology(s, -1) == Z


def test_noncommuting_face_is_located():
    idx = Cube(2)
    edges = {(v, w): ident() for v in idx.vertices for w, _, _ in idx.cofaces(v)}
    edges[((1, 0, 0), (1, 1, 0))] = ChainMap(Z0, Z0, {0: [[2]]})
    with pytest.raises(DiagramError) as err:
        CubicalDiagram(idx, {v: Z0 for v in idx.vertices}, edges)
    assert err.value.where == "face 100->{110,101}->111"


def test_edge_must_be_a_coface():
    with pytest.raises(DiagramError):
        CubicalDiagram(Cube(1), {(1, 0): Z0, (0, 1): Z0}, {((1, 0), (0, 1)): ident()})


def test_json_roundtrip():
    x = nodal_cubic().diagram
    y = CubicalDiagram.from_json(x.to_json())
    assert simple(y) == simple(x)


def test_constant_augmented_is_acyclic():
    for n in range(3):
        assert is_acyclic(constant(Cube(n, True), ZComplex({0: 1, 1: 2}, {1: [[1, 1]]})))


def test_constant_augmentation_over_a_point_is_identity():
    lam = augmentation_map(constant(Cube(0, True), Z0))
    assert complexes.is_quasi_iso(lam)


def test_zero_augmentation_gives_loop():
    x = random_diagram(random.Random(3), Cube(1))
    aug = CubicalDiagram(Cube(1, True), dict(x.vertices), dict(x.edges))
    assert simple_augmented(aug) == loop(simple(x))
    lam = augmentation_map(aug)
    assert all(not lam[m].any() for m in lam.maps)


def test_times_two_square_is_not_acyclic():
    sq = CubicalDiagram(Cube(1, True), {(0, 0): Z0, (1, 0): Z0},
                        {((0, 0), (1, 0)): ChainMap(Z0, Z0, {0: [[2]]})})
    assert not is_acyclic(sq)


def test_nodal_augmentation_map():
    doc = nodal_cubic()
    # K_0 of the node: Z^2 mapping into the two weight-one vertices
    g = ZComplex.free(0, 2)
    aug = CubicalDiagram(Cube(1, True), {(0, 0): g, **doc.diagram.vertices},
                         {((0, 0), (1, 0)): ChainMap(g, doc.diagram[(1, 0)], {0: [[1, 0], [0, 1]]}),
                          ((0, 0), (0, 1)): ChainMap(g, doc.diagram[(0, 1)], {0: [[1, 1]]}),
                          **doc.diagram.edges})
    lam = augmentation_map(aug)
    assert lam.is_valid()
    assert lam[0].shape == (3, 2)


def test_fiber_and_iterated_forms_agree():
    r = random.Random(5)
    for _ in range(10):
        x = random_acyclic_augmented(r, r.randint(0, 2), Bounds(lo=-1, hi=1, max_rank=2))
        assert complexes.is_acyclic(simple_augmented(x))
        assert complexes.is_acyclic(simple_augmented_iterated(x))


def test_mu_on_square_times_point():
    x = random_diagram(random.Random(11), Cube(2, True), Bounds(lo=-1, hi=1, max_rank=2))
    p = restrict_to_product(x, 2)
    assert p.index == cube_product(Cube(1), Cube(0))
    for outer in (0, 1):
        mu = factorisation_map(p, outer)
        assert mu.is_valid()
        assert all(is_signed_permutation(mu[m]) for m in mu.maps)


def test_identity_morphism_induces_identity():
    x = nodal_cubic().diagram
    f = identity_morphism(x).induced()
    assert f == ChainMap.identity(simple(x))


def test_morphism_naturality_is_checked():
    x = cospan()
    y = cospan()
    comps = {v: ident() for v in x.index.vertices}
    comps[(1, 1)] = ChainMap(Z0, Z0, {0: [[2]]})
    with pytest.raises(DiagramError):
        DiagramMorphism(x, y, comps)


def test_morphism_with_letter_injection():
    # the point diagram as a face of the square: letter 0 of the point goes to letter 1
    pt = CubicalDiagram(Cube(0), {(1,): Z0})
    sq = cospan()
    f = DiagramMorphism(sq, pt, {(1,): ident()}, injection=[1])
    assert f.delta((1,)) == (0, 1)
    assert f.induced().is_valid()
