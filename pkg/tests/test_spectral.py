import random

import pytest

from cubedescent import complexes, zmod
from cubedescent.complexes import ZComplex
from cubedescent.cube import Cube
from cubedescent.diagram import CubicalDiagram, simple
from cubedescent.generate import Bounds, random_diagram, random_filtered
from cubedescent.kweight import (cuspidal_cubic, d2_example, disjoint_union, inflate, nodal_cubic, point,
                                 projective_space)
from cubedescent.spectral import (FilteredComplex, SpectralSequence, abutment_filtration, e1_page,
                                  filtration_pieces, pages, spectral_sequence)
from cubedescent.zmod import FgAbGroup

Z = FgAbGroup(1)
ZERO = FgAbGroup()


def test_nodal_e1_and_d1():
    pg = e1_page(nodal_cubic().diagram)
    assert pg.nonzero() == [(0, 0), (1, 0)]
    assert pg.group(0, 0) == FgAbGroup(3) and pg.group(1, 0) == FgAbGroup(2)
    d1 = pg.d[(0, 0)]
    # up to the basis of E_1 the differential is the restriction matrix with a sign
    assert zmod.invariant_factors(d1) == zmod.invariant_factors([[1, 1, -1], [1, 1, -1]])


def test_nodal_e2():
    e2 = pages(nodal_cubic().diagram, 2)[1]
    assert e2.group(0, 0) == FgAbGroup(2)
    assert e2.group(1, 0) == Z


def test_cusp_e2():
    e2 = pages(cuspidal_cubic().diagram, 2)[1]
    assert e2.group(1, 0) == ZERO


def test_single_vertex_e1_at_p0():
    pg = e1_page(projective_space(2).diagram)
    assert pg.nonzero() == [(0, 0)]


def test_e1_is_additive_for_disjoint_unions():
    a, b = inflate(point(), 0), nodal_cubic()
    pu, pa, pb = (e1_page(d.diagram) for d in (disjoint_union(a, b), a, b))
    keys = set(pu.entries) | set(pa.entries) | set(pb.entries)
    for key in keys:
        assert pu.group(*key) == pa.group(*key) + pb.group(*key)


def test_square_pages_stabilise_at_e2():
    r = random.Random(2)
    for _ in range(10):
        ss = spectral_sequence(random_diagram(r, Cube(1), Bounds(lo=-1, hi=1, max_rank=2)))
        e2, einf = ss.page(2), ss.e_infinity()
        assert {k: e2.group(*k) for k in e2.entries} == {k: einf.group(*k) for k in einf.entries}


def test_hand_built_d2():
    ss = spectral_sequence(d2_example().diagram)
    e1, e2, e3 = ss.page(1), ss.page(2), ss.page(3)
    assert e1.nonzero() == [(0, 0), (2, 1)]
    assert e2.nonzero() == [(0, 0), (2, 1)]
    assert zmod.to_lists(e2.d[(0, 0)]) in ([[-1]], [[1]])
    assert e3.nonzero() == []
    assert all(complexes.homology(ss.c, m).is_trivial for m in ss.c.degrees)


@pytest.mark.parametrize("seed", range(12))
def test_next_page_is_homology(seed):
    r = random.Random(seed)
    x = random_diagram(r, Cube(r.randint(1, 2)), Bounds(lo=-1, hi=1, max_rank=2, entry=2))
    ss = spectral_sequence(x)
    for k in range(1, ss.fc.infinity):
        assert ss.check_square_zero(k)
        nxt = ss.page(k + 1)
        for key, g in ss.page_homology(k).items():
            assert nxt.group(*key) == g
    for m in ss.degrees():
        assert all(ok for _, _, ok in ss.convergence(m).values())


def test_random_filtered_complex_converges():
    r = random.Random(9)
    for _ in range(10):
        f = random_filtered(r, Bounds(lo=-1, hi=1, max_rank=2), max_level=2)
        fc = FilteredComplex.from_levels(f.complex, {m: f.level(m) for m in f.complex.degrees}, 0, 2)
        ss = SpectralSequence(fc)
        for m in ss.degrees():
            assert all(ok for _, _, ok in ss.convergence(m).values())


def test_nodal_abutment():
    x = nodal_cubic().diagram
    w = abutment_filtration(x, -1)
    assert w.subgroup(1) == Z and w.abutment == Z
    w0 = abutment_filtration(x, 0)
    assert w0.subgroup(1) == ZERO and w0.graded(0) == FgAbGroup(2)


def test_smooth_filtration_is_trivial():
    w = abutment_filtration(projective_space(1).diagram, 0)
    assert w.subgroup(0) == FgAbGroup(2) and w.subgroup(1) == ZERO


def test_filtration_pieces_of_nodal_square():
    x = nodal_cubic().diagram
    fp = filtration_pieces(x)
    top = fp.piece(1)
    assert simple(top.truncated) == simple(x)
    assert all(top.kernel[m].shape[1] == 0 for m in fp.simple.degrees)
    assert fp.piece(-1).truncated.vertices == {v: ZComplex.zero() for v in x.index.vertices}
    k1 = fp.piece(1).sub
    # K_1 is the Y~ block, which sits in total degree -1
    assert k1[-1].shape[1] == 2 and k1[0].shape[1] == 0


def test_page_json_lists_nonzero_cells():
    js = pages(nodal_cubic().diagram, 2)[1].to_json()
    assert js["r"] == 2
    assert [(e["p"], e["q"], e["rank"]) for e in js["entries"]] == [(0, 0, 2), (1, 0, 1)]


def test_filtration_must_be_subcomplexes():
    c = ZComplex({0: 1, 1: 1}, {1: [[1]]})
    # boundary target deeper than the source: fine
    FilteredComplex.from_levels(c, {0: [1], 1: [0]}, 0, 1).validate()
    # source deeper than its boundary: K_1 is not a subcomplex
    with pytest.raises(ValueError):
        FilteredComplex.from_levels(c, {0: [0], 1: [1]}, 0, 1).validate()


def test_diagram_cube_is_required():
    with pytest.raises(ValueError):
        spectral_sequence(CubicalDiagram(Cube(1, True), {}))
