import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings

from conftest import ii_systems
from projinv.algebra import SymForm, kernel_basis
from projinv.errors import MalformedInput, PreconditionError
from projinv.models import grassmannian2, quadric, segre, veronese2
from projinv.rigidity import (
    FrameSplit,
    build_g0,
    closure_checks,
    cohomology,
    complex_defects,
    decode_f3,
    encode_f3,
    ii_action,
    ii_from_json,
    normalize_f3,
    perp_complex,
    rigidity_report,
)


def normalizer_dim_oracle(forms) -> int:
    """dim of {u in gl(V)_0 : [u, X_alpha] in span(X_beta)} computed with sympy."""
    n, a = forms[0].dim, len(forms)
    size = 1 + n + a
    T = lambda al: 1 + al
    N = lambda mu: 1 + n + mu
    X = []
    for al in range(n):
        m = sympy.zeros(size)
        m[T(al), 0] = 1
        for mu, f in enumerate(forms):
            for be in range(n):
                m[N(mu), T(be)] = f.entry(tuple(sorted((al, be))))
        X.append(m)
    blocks = [[0], [T(i) for i in range(n)], [N(i) for i in range(a)]]
    us = []
    u = sympy.zeros(size)
    for blk in blocks:
        for i in blk:
            for j in blk:
                s = sympy.Symbol(f"u_{i}_{j}")
                us.append(s)
                u[i, j] = s
    cs = sympy.symbols(f"c0:{n * n}")
    eqs = []
    for al in range(n):
        expr = u * X[al] - X[al] * u - sum((cs[al * n + be] * X[be] for be in range(n)), sympy.zeros(size))
        eqs.extend(e for e in expr if e != 0)
    unknowns = us + list(cs)
    M = sympy.Matrix([[sympy.diff(e, v) for v in unknowns] for e in eqs])
    return len(unknowns) - M.rank()


@settings(max_examples=12)
@given(ii_systems(max_n=3, max_a=2))
def test_g0_matches_normalizer_oracle(forms):
    if all(f.is_zero() for f in forms):
        return
    assert len(build_g0(forms)) == normalizer_dim_oracle(forms)


@pytest.mark.parametrize("fx,h", [
    (segre(1, 1), (2, 0, 0)), (segre(1, 2), (2, 0, 0)), (segre(2, 2), (0, 0, 0)),
    (quadric(3, 3), (7, 0, 0)), (quadric(4, 4), (16, 0, 0)), (grassmannian2(4), (16, 0, 0)),
    (veronese2(2), (6, 0, 0)),
], ids=lambda x: getattr(x, "label", str(x)))
def test_cohomology_of_fixtures(fx, h):
    rep = rigidity_report(fx.graph)
    assert tuple(rep.h_dims[p] for p in (1, 2, 3)) == h
    assert rep.verdict == (h == (0, 0, 0))


def test_perp_dims_segre12():
    cx = perp_complex(segre(1, 2).graph)
    assert sum(cx.perp_dims().values()) == 24
    assert (len(cx.gminus1), len(cx.g0), len(cx.g1)) == (3, 6, 3)


def test_g0_contains_identity_and_annihilates():
    cx = perp_complex(grassmannian2(5).graph)
    identity = {(i, i): Fraction(1) for i in range(cx.split.size)}
    assert cx.g_echelon[0].contains(cx.split.coords(identity, 0))
    assert all(not ii_action(cx.split, cx.q, u) for u in cx.g0)


@settings(max_examples=25)
@given(ii_systems(max_n=4, max_a=4))
def test_complex_and_closure_on_random_ii(forms):
    cx = perp_complex(forms)
    assert all(complex_defects(cx).values())
    checks = closure_checks(cx)
    assert checks["g0_annihilates_ii"] and checks["g1_bracket_lands_in_g0"]


def _conjugate(forms, P, Q):
    """II under x -> P x on T and a change Q on N."""
    Pm = sympy.Matrix(P)
    mats = [Pm.T * sympy.Matrix(f.matrix()) * Pm for f in forms]
    out = []
    for mu in range(len(forms)):
        m = sum((Q[mu][nu] * mats[nu] for nu in range(len(forms))), sympy.zeros(len(P)))
        out.append(SymForm.from_matrix([[Fraction(int(x.p), int(x.q)) for x in row] for row in m.tolist()]))
    return out


def _invertible(n, rng):
    while True:
        m = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
        if sympy.Matrix(m).det() != 0:
            return m


@pytest.mark.parametrize("fx", [segre(1, 2), quadric(3, 3), segre(2, 2)], ids=lambda f: f.label)
def test_cohomology_invariant_under_frame_change(fx):
    rng = random.Random(7)
    forms = fx.graph.second_fundamental_form()
    moved = _conjugate(forms, _invertible(fx.graph.n, rng), _invertible(fx.graph.a, rng))
    assert rigidity_report(moved).h_dims == rigidity_report(forms).h_dims


def _kernel_cochains(cx):
    return kernel_basis(cx.boundary1(1))


@pytest.mark.parametrize("fx", [segre(1, 2), quadric(3, 3)], ids=lambda f: f.label)
def test_f3_round_trip(fx):
    cx = perp_complex(fx.graph)
    rng = random.Random(1)
    for _ in range(3):
        phi = [Fraction(0)] * cx.boundary1(1).ncols
        for k in _kernel_cochains(cx):
            c = rng.randint(-3, 3)
            phi = [x + c * y for x, y in zip(phi, k)]
        cubics = decode_f3(cx, phi)
        assert encode_f3(cx, cubics) == phi


def test_zero_f3_normalizes():
    fx = segre(2, 2)
    res = normalize_f3(fx.graph.second_fundamental_form(), [SymForm.zero(3, 4)] * 4)
    assert res.normalized_to_zero and res.residual is None


def test_segre22_every_admissible_f3_normalizes():
    cx = perp_complex(segre(2, 2).graph)
    for k in _kernel_cochains(cx)[:4]:
        res = normalize_f3(cx.q, decode_f3(cx, k), cx)
        assert res.normalized_to_zero
        xi = [Fraction(0)] * cx.perp_dim(1)
        index = {pair: i for i, pair in enumerate(cx.perp_basis[1])}
        for pair, c in res.witness.items():
            xi[index[pair]] = c
        assert cx.boundary0(1).apply(xi) == k


def test_quadric_has_non_normalizable_f3():
    cx = perp_complex(quadric(3, 3).graph)
    results = [normalize_f3(cx.q, decode_f3(cx, k), cx) for k in _kernel_cochains(cx)]
    blocked = [r for r in results if not r.normalized_to_zero]
    assert blocked and all(any(r.residual) for r in blocked)


def test_inadmissible_f3_rejected():
    cx = perp_complex(segre(2, 2).graph)
    cubic = [SymForm(3, 4, {(0, 0, 0): 1})] + [SymForm.zero(3, 4)] * 3
    with pytest.raises(PreconditionError):
        normalize_f3(cx.q, cubic, cx)


def test_raw_ii_json():
    doc = {"n": 2, "a": 1, "quadrics": [[{"exps": [1, 1], "num": 1}]]}
    assert rigidity_report(ii_from_json(doc)).h_dims[1] == 2
    with pytest.raises(MalformedInput):
        ii_from_json({"n": 2, "a": 2, "quadrics": [[{"exps": [1, 1], "num": 1}]]})
    with pytest.raises(MalformedInput):
        ii_from_json({"n": 2, "a": 1, "quadrics": [[{"exps": [1, 2], "num": 1}]]})


def test_degenerate_input_flag():
    rep = cohomology(perp_complex([SymForm(2, 2, {(0, 0): 1}), SymForm(2, 2, {(0, 0): 2})]))
    assert rep.flags["degenerate_input"] and not rep.flags["ii_spans_normal_space"]


def test_frame_split_grades():
    split = FrameSplit(3, 2)
    assert split.graded_dims() == {-2: 2, -1: 3 + 6, 0: 1 + 9 + 4, 1: 3 + 6, 2: 2}
