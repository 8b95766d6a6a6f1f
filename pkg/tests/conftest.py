import itertools
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from projinv.algebra import MultiPoly, SymForm, monomials
from projinv.jets import JetGraph, default_variables

settings.register_profile(
    "default", deadline=None, max_examples=30,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

small_ints = st.integers(min_value=-3, max_value=3)


@st.composite
def homogeneous_polys(draw, n, d, density=0.6):
    variables = default_variables(n)
    terms = {}
    for e in monomials(n, d):
        if draw(st.floats(0, 1)) < density:
            terms[e] = Fraction(draw(small_ints))
    return MultiPoly(variables, terms)


@st.composite
def symforms(draw, n, d):
    return SymForm.from_poly(draw(homogeneous_polys(n, d)), d)


@st.composite
def jet_graphs(draw, max_n=3, max_a=2, kmax=4):
    n = draw(st.integers(1, max_n))
    a = draw(st.integers(0, max_a))
    variables = default_variables(n)
    polys = []
    for _ in range(a):
        p = MultiPoly(variables)
        for d in range(2, kmax + 1):
            p = p + draw(homogeneous_polys(n, d, density=0.3))
        polys.append(p)
    if not polys:
        return JetGraph.zero(n, 0, kmax)
    return JetGraph.from_polys(n, polys, kmax=kmax)


@st.composite
def ii_systems(draw, max_n=4, max_a=4):
    """Random quadric systems with small integer coefficients."""
    n = draw(st.integers(1, max_n))
    a = draw(st.integers(1, max_a))
    return [draw(symforms(n, 2)) for _ in range(a)]


def brute_polarize(f: SymForm, vectors) -> Fraction:
    """Inclusion-exclusion polarization from point evaluations only."""
    d = f.degree
    total = Fraction(0)
    for r in range(d + 1):
        for subset in itertools.combinations(range(d), r):
            point = [sum((Fraction(vectors[i][j]) for i in subset), Fraction(0)) for j in range(f.dim)]
            total += (-1) ** (d - r) * f.evaluate(point)
    fact = 1
    for k in range(2, d + 1):
        fact *= k
    return total / fact


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    def log(number: int, ok: bool, detail: str):
        line = f"CRITERION {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return log


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
