from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from projinv.errors import PreconditionError
from projinv.kostant import (
    build_root_system,
    character,
    cohomology_degree,
    decompose_module,
    dual_weight,
    end_module_weights,
    freudenthal,
    grade_of_weight,
    kostant_weight,
    levi_dimension,
    module_dimension,
    perp_components,
    predict,
    product_root_system,
)
from projinv.models import grassmannian2, quadric, segre
from projinv.rigidity import perp_complex, rigidity_report

TYPES = [("A", 1, 1), ("A", 4, 10), ("B", 3, 9), ("C", 3, 9), ("D", 4, 12), ("D", 5, 20),
         ("E", 6, 36), ("E", 7, 63), ("E", 8, 120), ("F", 4, 24), ("G", 2, 6)]


def weyl_dimension(rs, lam) -> Fraction:
    num = den = Fraction(1)
    for beta in rs.positive_roots:
        num *= rs.coroot_pairing([l + 1 for l in lam], beta)
        den *= rs.coroot_pairing(rs.rho, beta)
    return num / den


@pytest.mark.parametrize("kind,rank,count", TYPES)
def test_positive_root_counts(kind, rank, count):
    rs = build_root_system(kind, rank)
    assert len(rs.positive_roots) == count
    assert all(rs.cartan[i][i] == 2 for i in range(rank))


@pytest.mark.parametrize("kind,rank,count", TYPES)
def test_rho_is_half_the_positive_roots(kind, rank, count):
    rs = build_root_system(kind, rank)
    total = [sum(b[i] for b in rs.positive_roots) for i in range(rank)]
    assert rs.from_root_coords([Fraction(x, 2) for x in total]) == rs.rho


def test_a2_basics():
    rs = build_root_system("A2")
    assert len(rs.positive_roots) == 3
    assert rs.to_root_coords(rs.rho) == (1, 1)


@pytest.mark.parametrize("bad", [("A", 0), ("B", 1), ("E", 5), ("F", 3), ("G", 3), ("X", 2)])
def test_invalid_root_systems(bad):
    with pytest.raises(PreconditionError):
        build_root_system(*bad)


weights4 = st.lists(st.integers(-4, 4), min_size=4, max_size=4)


@given(weights4, st.integers(1, 4))
def test_affine_reflection_is_involution(mu, i0):
    rs = build_root_system("A", 4)
    assert kostant_weight(rs, kostant_weight(rs, mu, i0), i0) == tuple(mu)


@given(weights4)
def test_root_coordinate_round_trip(mu):
    rs = build_root_system("D", 4)
    assert rs.from_root_coords(rs.to_root_coords(mu)) == tuple(mu)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_adjoint_multiplicities(n):
    rs = build_root_system("A", n)
    ch = character(rs, rs.highest_root)
    assert ch[(0,) * n] == n
    roots = {rs.root_to_weight(b) for b in rs.positive_roots}
    roots |= {tuple(-x for x in r) for r in roots}
    assert all(ch[r] == 1 for r in roots)
    assert sum(ch.values()) == n * (n + 2)


@pytest.mark.parametrize("kind,rank,lam", [("B", 2, (1, 1)), ("G", 2, (1, 0)), ("G", 2, (0, 1)),
                                           ("C", 3, (0, 1, 0)), ("A", 3, (1, 1, 0)), ("F", 4, (0, 0, 0, 1)),
                                           ("D", 4, (0, 0, 1, 1))])
def test_freudenthal_matches_weyl_dimension(kind, rank, lam):
    rs = build_root_system(kind, rank)
    assert module_dimension(rs, lam) == weyl_dimension(rs, lam)


def test_trivial_module_gives_minus_simple_root():
    rs = build_root_system("A", 4)
    for i0 in range(1, 5):
        mu = kostant_weight(rs, (0, 0, 0, 0), i0)
        assert mu == tuple(-x for x in rs.simple_roots[i0 - 1])
        assert grade_of_weight(rs, mu, i0) == -1
        assert grade_of_weight(rs, rs.simple_roots[i0 - 1], i0) == 1


def test_sl2_end_decomposition():
    rs = build_root_system("A", 1)
    assert sorted(decompose_module(rs, end_module_weights(rs, (1,)))) == [(0,), (2,)]


def test_sl2_x_sl3_perp_is_ad_tensor_ad():
    rs = product_root_system(build_root_system("A", 1), build_root_system("A", 2))
    comps = perp_components(rs, (1, 1, 0))
    assert comps == [(2, 1, 1)]
    assert module_dimension(rs, comps[0]) == 24
    assert sum(perp_complex(segre(1, 2).graph).perp_dims().values()) == 24


def test_grassmannian25_perp_components():
    rs = build_root_system("A", 4)
    comps = perp_components(rs, (0, 1, 0, 0))
    assert comps == [(0, 1, 1, 0)]
    engine = sum(perp_complex(grassmannian2(5).graph).perp_dims().values())
    assert module_dimension(rs, comps[0]) == engine == 75
    assert all(grade_of_weight(rs, kostant_weight(rs, c, 2), 2) <= 0 for c in comps)


def test_decompose_rejects_non_characters():
    rs = build_root_system("A", 1)
    with pytest.raises(PreconditionError):
        decompose_module(rs, Counter({(2,): 1}))
    with pytest.raises(PreconditionError):
        decompose_module(rs, Counter({(-1,): 1}))
    with pytest.raises(PreconditionError):
        end_module_weights(build_root_system("E", 6), (0, 0, 0, 0, 0, 1))


def test_dual_weights():
    rs = build_root_system("A", 4)
    assert dual_weight(rs, (0, 1, 0, 0)) == (0, 0, 1, 0)
    assert dual_weight(build_root_system("D", 5), (0, 0, 0, 0, 1)) == (0, 0, 0, 1, 0)
    assert dual_weight(build_root_system("B", 3), (1, 0, 0)) == (1, 0, 0)


@pytest.mark.parametrize("fx,kind,rank,node,lam", [
    (quadric(3, 3), "B", 2, 1, (2, 0)),
    (quadric(4, 4), "A", 3, 2, (0, 2, 0)),
], ids=["quadric(3,3)", "quadric(4,4)"])
def test_quadric_obstruction_predicted(fx, kind, rank, node, lam):
    # g_perp of a quadric is S^2_0 V; Kostant puts its cohomology in degree 1
    rs = build_root_system(kind, rank)
    pred = predict(rs, lam, node)
    assert pred.cohomology_degree == 1
    assert rigidity_report(fx.graph).h_dims[1] == pred.levi_dim
    assert pred.dimension == sum(perp_complex(fx.graph).perp_dims().values())


def test_levi_dimension_requires_levi_dominance():
    rs = build_root_system("A", 3)
    with pytest.raises(PreconditionError):
        levi_dimension(rs, (-3, 1, 0), 2)
    assert cohomology_degree(rs, (0, 0, 0), 2) == 1
