import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from conftest import symforms
from projinv.algebra import SymForm, monomials
from projinv.errors import MalformedInput, PreconditionError
from projinv.jets import default_variables, fundamental_forms
from projinv.models import grassmannian2, quadric, rank_two_chss_fixtures, segre
from projinv.prolongation import (
    PolySpace,
    bertini_test,
    ii_polyspace,
    mobile_bertini_details,
    mobile_bertini_fixture_check,
    polyspace_from_json,
    polyspace_to_json,
    prolong,
    prolongation_property_check,
    quadric_rank,
)


@st.composite
def poly_spaces(draw, max_dim=3, max_k=2):
    n = draw(st.integers(1, max_dim))
    k = draw(st.integers(1, max_k))
    count = draw(st.integers(0, 3))
    return PolySpace.span(k, n, [draw(symforms(n, k)) for _ in range(count)])


def brute_prolong_dim(A: PolySpace, j: int) -> int:
    """Unknown coefficients of a degree k+j polynomial plus unknown combinations
    of the basis for each j-th partial; the kernel dimension is dim A^(j)."""
    n = A.dim
    xs = sympy.symbols(f"x0:{n}")
    monos = monomials(n, A.degree + j)
    cs = sympy.symbols(f"c0:{len(monos)}")
    P = sum(c * sympy.prod(x ** e for x, e in zip(xs, m)) for c, m in zip(cs, monos))
    basis = [sympy.sympify(str(b[0].to_poly(default_variables(n))).replace("^", "**"),
                           locals={f"x{i + 1}": xs[i] for i in range(n)}) for b in A.basis]
    unknowns = list(cs)
    equations = []
    import itertools
    for J in itertools.combinations_with_replacement(range(n), j):
        ts = sympy.symbols(f"t_{'_'.join(map(str, J))}_0:{len(basis)}")
        unknowns.extend(ts)
        expr = sympy.diff(P, *[xs[i] for i in J]) - sum((t * b for t, b in zip(ts, basis)), sympy.Integer(0))
        equations.extend(sympy.Poly(sympy.expand(expr), *xs).coeffs() if expr != 0 else [])
    if not equations:
        return len(cs)
    M = sympy.Matrix([[sympy.diff(e, u) for u in unknowns] for e in equations])
    return len(unknowns) - M.rank()


def test_full_space_prolongs_to_full():
    for n, k in [(2, 2), (3, 1)]:
        assert prolong(PolySpace.full(k, n), 2).dimension == len(monomials(n, k + 2))


def test_single_product_has_no_prolongation():
    xy = SymForm(2, 2, {(0, 1): Fraction(1, 2)})
    assert prolong(PolySpace.span(2, 2, [xy]), 1).dimension == 0


@given(poly_spaces(), st.integers(1, 2))
def test_prolong_matches_brute_force(A, j):
    assert prolong(A, j).dimension == brute_prolong_dim(A, j)


@given(poly_spaces(max_dim=3, max_k=2))
def test_prolong_composes(A):
    for i, j in [(1, 1), (0, 2), (2, 1)]:
        assert prolong(A, i + j) == prolong(prolong(A, i), j)


@given(poly_spaces())
def test_polyspace_json_round_trip(A):
    assert polyspace_from_json(polyspace_to_json(A)) == A


def test_polyspace_validation():
    f = SymForm(2, 2, {(0, 0): 1})
    with pytest.raises(PreconditionError):
        PolySpace(2, 2, 1, [(f,), (f,)])
    with pytest.raises(MalformedInput):
        polyspace_from_json({"schema": "polyspace-v1", "degree": 2, "dim": 2,
                             "basis": [[[{"exps": [1, 0], "num": 1}]]]})


@pytest.mark.parametrize("fx", [segre(2, 2), grassmannian2(5)], ids=lambda f: f.label)
def test_ii_first_prolongation_vanishes(fx):
    assert prolong(ii_polyspace(fundamental_forms(fx.graph)), 1).dimension == 0


def test_quadric_prolongations_are_nonzero():
    # a single nondegenerate quadric: A^(1) = 0 once n >= 2; the full S^2 is its own family
    assert prolong(ii_polyspace(fundamental_forms(quadric(3, 3).graph)), 1).dimension == 0
    assert prolong(ii_polyspace(fundamental_forms(quadric(1, 1).graph)), 1).dimension == 1


@pytest.mark.parametrize("fx", rank_two_chss_fixtures(), ids=lambda f: f.label)
def test_prolongation_property_on_fixtures(fx):
    assert all(c.contained for c in prolongation_property_check(fx.graph))


def test_bertini_segre12():
    A = ii_polyspace(fundamental_forms(segre(1, 2).graph))
    rep = bertini_test(A, trials=6, seed=3)
    assert rep.generic_rank == 2
    assert rep.contained_in_zeros
    assert len(rep.singular_basis) == 1
    v = rep.singular_basis[0]
    assert v[0] == 0 and any(v[1:])


def test_bertini_is_seed_deterministic():
    A = ii_polyspace(fundamental_forms(grassmannian2(5).graph))
    assert bertini_test(A, 5, seed=11).to_json() == bertini_test(A, 5, seed=11).to_json()


def _random_invertible(n, rng):
    while True:
        m = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
        if sympy.Matrix(m).det() != 0:
            return m


@pytest.mark.parametrize("seed", range(4))
def test_bertini_rank_invariant_under_change_of_coordinates(seed):
    rng = random.Random(seed)
    A = ii_polyspace(fundamental_forms(segre(1, 3).graph))
    P = sympy.Matrix(_random_invertible(A.dim, rng))
    moved = []
    for (f,) in A.basis:
        M = P.T * sympy.Matrix(f.matrix()) * P
        moved.append(SymForm.from_matrix([[Fraction(int(x.p), int(x.q)) for x in row] for row in M.tolist()]))
    B = PolySpace.span(2, A.dim, moved)
    assert bertini_test(B, 6, seed).generic_rank == bertini_test(A, 6, seed).generic_rank
    assert quadric_rank(moved[0]) == quadric_rank(A.basis[0][0])


@pytest.mark.parametrize("p,q", [(1, 2), (1, 3), (2, 2), (2, 3)])
def test_mobile_bertini_on_segre(p, q):
    assert mobile_bertini_fixture_check(segre(p, q), trials=6, seed=1)


def test_mobile_bertini_checks_extra_directions():
    res = mobile_bertini_details(segre(1, 3), trials=4, seed=0)
    assert len(res.checked) >= len(res.report.singular_basis) + 4


def test_mobile_bertini_rejects_other_models():
    with pytest.raises(PreconditionError):
        mobile_bertini_fixture_check(quadric(3, 3))
    with pytest.raises(PreconditionError):
        mobile_bertini_fixture_check(segre(2, 1))
