from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from conftest import brute_polarize, homogeneous_polys, small_ints, symforms
from projinv.algebra import (
    Echelon,
    ExactMatrix,
    MultiPoly,
    SymForm,
    as_fraction,
    kernel_basis,
    poly_arith,
    polarize,
    rank_mod_p,
    solve,
)
from projinv.errors import PreconditionError

matrices = st.integers(1, 6).flatmap(
    lambda r: st.integers(1, 6).flatmap(
        lambda c: st.lists(st.lists(st.integers(-5, 5), min_size=c, max_size=c), min_size=r, max_size=r)))
vectors3 = st.lists(small_ints, min_size=3, max_size=3)


def test_polarize_xy():
    xy = MultiPoly(["x", "y"], {(1, 1): 1})
    assert polarize(SymForm.from_poly(xy), (1, 0), (0, 1)) == Fraction(1, 2)


def test_floats_rejected():
    with pytest.raises(TypeError):
        as_fraction(0.5)


def test_poly_arith_ops():
    x = MultiPoly.variable(["x", "y"], 0)
    y = MultiPoly.variable(["x", "y"], 1)
    assert poly_arith(x, y, "mul") == MultiPoly(["x", "y"], {(1, 1): 1})
    assert poly_arith(x, None, "scale", Fraction(2, 3)).evaluate([3, 0]) == 2
    with pytest.raises(PreconditionError):
        poly_arith(x, MultiPoly.variable(["u", "v"], 0), "add")


@given(symforms(3, 3), vectors3, vectors3, vectors3)
def test_polarize_matches_inclusion_exclusion(f, u, v, w):
    assert f.polarize(u, v, w) == brute_polarize(f, [u, v, w])


@given(symforms(3, 2), vectors3, vectors3)
def test_polarize_symmetric_and_diagonal(f, u, v):
    assert f.polarize(u, v) == f.polarize(v, u)
    assert f.polarize(u, u) == f.evaluate(u)


@given(homogeneous_polys(3, 3), vectors3)
def test_symform_round_trip(p, v):
    f = SymForm.from_poly(p, 3)
    assert f.to_poly(p.variables) == p
    assert f.evaluate(v) == p.evaluate(v)


@given(homogeneous_polys(2, 2), homogeneous_polys(2, 3), st.lists(small_ints, min_size=2, max_size=2))
def test_ring_operations_agree_with_evaluation(p, q, v):
    assert (p * q).evaluate(v) == p.evaluate(v) * q.evaluate(v)
    assert (p + p).evaluate(v) == 2 * p.evaluate(v)
    assert (p - p).is_zero()


@given(homogeneous_polys(2, 3))
def test_derivative_euler(p):
    # Euler: sum x_i d_i p = deg * p for homogeneous p
    x = [MultiPoly.variable(p.variables, i) for i in range(2)]
    euler = x[0] * p.derivative(0) + x[1] * p.derivative(1)
    assert euler == p.scale(3)


@given(matrices)
def test_rank_matches_sympy_and_mod_p(rows):
    m = ExactMatrix.from_dense(rows)
    r = m.rank()
    assert r == sympy.Matrix(rows).rank()
    # entries and sizes keep every minor below the prime, so ranks agree
    assert r == rank_mod_p(m, 1_000_003)
    assert r + m.nullity() == m.ncols


@given(matrices)
def test_kernel_vectors_are_killed(rows):
    m = ExactMatrix.from_dense(rows)
    ker = kernel_basis(m)
    assert len(ker) == m.ncols - m.rank()
    for v in ker:
        assert not any(m.apply(v))


@given(matrices, st.data())
def test_solve_consistent_systems(rows, data):
    m = ExactMatrix.from_dense(rows)
    x = data.draw(st.lists(small_ints, min_size=m.ncols, max_size=m.ncols))
    b = m.apply(x)
    sol = solve(m, b)
    assert sol is not None and m.apply(sol) == b


def test_solve_inconsistent():
    assert solve(ExactMatrix.from_dense([[1, 1], [2, 2]]), [1, 3]) is None


@given(matrices)
def test_transpose_and_product(rows):
    m = ExactMatrix.from_dense(rows)
    assert m.transpose().transpose() == m
    assert (m @ ExactMatrix.identity(m.ncols)) == m
    assert m.rank() == m.transpose().rank()


@given(st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), max_size=6))
def test_echelon_membership(rows):
    ech = Echelon(4)
    for r in rows:
        ech.add({j: x for j, x in enumerate(r) if x})
    for r in rows:
        assert ech.contains({j: x for j, x in enumerate(r) if x})
    assert ech.rank == sympy.Matrix(rows).rank() if rows else ech.rank == 0
    assert len(ech.free_columns()) == 4 - ech.rank
