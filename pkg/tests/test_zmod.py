import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form

from cubedescent import zmod
from cubedescent.zmod import FgAbGroup, Presented, as_int_matrix, cokernel, matmul, snf, solve_in_lattice

small = st.integers(-4, 4)


@st.composite
def matrices(draw, max_dim=4):
    r = draw(st.integers(1, max_dim))
    c = draw(st.integers(1, max_dim))
    return [[draw(small) for _ in range(c)] for _ in range(r)]


def sympy_factors(rows):
    """Invariant factors from sympy's Smith form, used as an independent oracle."""
    d = smith_normal_form(sympy.Matrix(rows), domain=sympy.ZZ)
    return sorted(abs(int(d[i, i])) for i in range(min(d.shape)) if d[i, i] != 0)


def test_snf_examples():
    assert zmod.to_lists(snf([[2]])[1]) == [[2]]
    _, d, _ = snf([[1, 1, -1], [1, 1, -1]])
    assert zmod.to_lists(d) == [[1, 0, 0], [0, 0, 0]]
    assert zmod.rank([[1, 1, -1], [1, 1, -1]]) == 1
    _, d, _ = snf(np.zeros((2, 3), dtype=object))
    assert zmod.is_zero(d) and zmod.rank(d) == 0


@given(matrices())
def test_snf_transforms_and_sympy_oracle(rows):
    m = as_int_matrix(rows)
    u, d, v = snf(m)
    assert zmod.equal(matmul(matmul(u, m), v), d)
    assert abs(round(float(sympy.Matrix(zmod.to_lists(u)).det()))) == 1
    assert abs(round(float(sympy.Matrix(zmod.to_lists(v)).det()))) == 1
    diag = [int(d[i, i]) for i in range(min(d.shape))]
    nz = [x for x in diag if x]
    assert all(x > 0 for x in nz)
    assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
    assert sorted(nz) == sympy_factors(rows)
    off = d.copy()
    for i in range(min(d.shape)):
        off[i, i] = 0
    assert zmod.is_zero(off)


@pytest.mark.parametrize("rows, group", [
    ([[2]], FgAbGroup(0, (2,))),
    ([[1, 1], [1, 1]], FgAbGroup(1)),
    ([[1, 0], [0, 1]], FgAbGroup(0)),
    ([[2, 0], [0, 4]], FgAbGroup(0, (2, 4))),
    ([[6, 0], [0, 4]], FgAbGroup(0, (2, 12))),
])
def test_cokernel(rows, group):
    assert cokernel(rows) == group


def test_group_text():
    assert str(FgAbGroup(2, (2,))) == "Z^2 + Z/2"
    assert str(FgAbGroup()) == "0"
    assert FgAbGroup(0, (2,)) + FgAbGroup(0, (3,)) == FgAbGroup(0, (6,))
    assert FgAbGroup.from_json(FgAbGroup(1, (2,)).to_json()) == FgAbGroup(1, (2,))
    with pytest.raises(ValueError):
        FgAbGroup(0, (4, 2))


def test_solve_examples():
    assert list(solve_in_lattice([[2]], [4])) == [2]
    assert solve_in_lattice([[2]], [3]) is None
    x = solve_in_lattice([[1, 1], [1, 1]], [1, 1])
    assert x[0] + x[1] == 1


@given(matrices(), st.lists(small, min_size=4, max_size=4))
def test_solve_recovers_image_points(rows, coeffs):
    m = as_int_matrix(rows)
    x0 = as_int_matrix([[c] for c in coeffs[:m.shape[1]]])
    v = matmul(m, x0)
    x = solve_in_lattice(m, v)
    assert x is not None and zmod.equal(matmul(m, x), v)
    y = solve_in_lattice(m, v[:, 0])
    assert list(matmul(m, y.reshape(-1, 1))[:, 0]) == list(v[:, 0])


@given(matrices())
def test_kernel_basis(rows):
    m = as_int_matrix(rows)
    k = zmod.kernel_basis(m)
    assert zmod.is_zero(matmul(m, k))
    assert k.shape[1] == m.shape[1] - zmod.rank(m)
    # saturated: the kernel lattice has torsion-free cokernel
    if k.shape[1]:
        assert cokernel(k).torsion == ()


@given(matrices())
def test_image_basis_spans_same_lattice(rows):
    m = as_int_matrix(rows)
    b = zmod.image_basis(m)
    assert zmod.lattice_equal(b, m)
    assert b.shape[1] == zmod.rank(m)


def test_presented_helpers():
    z2 = Presented(1, as_int_matrix([[2]]))
    z = Presented.free(1)
    assert z2.group == FgAbGroup(0, (2,))
    assert zmod.map_is_surjective(as_int_matrix([[1]]), z2)
    assert not zmod.map_is_injective(as_int_matrix([[1]]), z, z2)
    assert zmod.map_is_zero(as_int_matrix([[2]]), z2)
    assert zmod.map_is_iso(as_int_matrix([[-1]]), z, z)
    # 0 -> Z -x2-> Z -> Z/2 -> 0
    assert zmod.exact_at(zmod.zeros(1, 0), z, as_int_matrix([[2]]), z)
    assert zmod.exact_at(as_int_matrix([[2]]), z, as_int_matrix([[1]]), z2)
    assert not zmod.exact_at(as_int_matrix([[3]]), z, as_int_matrix([[1]]), z2)


def test_subquotient():
    big = as_int_matrix([[1, 0], [0, 1]])
    small = as_int_matrix([[2], [0]])
    g, _, _ = zmod.subquotient(big, small)
    assert g == FgAbGroup(1, (2,))


def test_shape_errors():
    with pytest.raises(zmod.ShapeError):
        as_int_matrix([[1, 2], [3]])
    with pytest.raises(zmod.ShapeError):
        as_int_matrix([[1, 2]], (2, 1))
    assert as_int_matrix([], (0, 3)).shape == (0, 3)
