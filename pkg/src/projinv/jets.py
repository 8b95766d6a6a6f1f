"""Submanifold germs as truncated Taylor graphs and their pointwise invariants.

A germ of ``X^n`` in ``P^{n+a}`` is written near the origin as the graph
``z^mu = sum_d c_d^mu(x, ..., x)`` over its tangent space.  The Fubini forms
are ``F_d = (-1)^d c_d``; the sign only matters when F_d is compared with the
moving-frame tensors, every zero set and span below is sign-blind.
"""

from __future__ import annotations

import enum
import itertools
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (
    Echelon,
    ExactMatrix,
    MultiPoly,
    SymForm,
    as_fraction,
    monomials,
    kernel_basis,
    sparse,
)
from .errors import MalformedInput, PreconditionError

SCHEMA = "jetgraph-v1"


class Contact(enum.Enum):
    INFINITY_UP_TO_TRUNCATION = "infinity_up_to_truncation"

    def __repr__(self) -> str:
        return self.name


INFINITY_UP_TO_TRUNCATION = Contact.INFINITY_UP_TO_TRUNCATION


def contact_at_least(order, k: int) -> bool:
    return order is INFINITY_UP_TO_TRUNCATION or order >= k


def default_variables(n: int) -> tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(n))


@dataclass(frozen=True)
class JetGraph:
    """Raw Taylor coefficients ``c_d^mu`` for ``2 <= d <= kmax``.

    ``coeffs`` is keyed by ``(mu, d)`` with ``mu`` zero-based; absent keys are
    zero forms.
    """

    n: int
    a: int
    kmax: int
    coeffs: dict[tuple[int, int], SymForm] = field(default_factory=dict)
    variables: tuple[str, ...] = ()

    def __post_init__(self):
        if self.n < 1 or self.a < 0:
            raise PreconditionError("need n >= 1 and a >= 0")
        if self.kmax < 2:
            raise PreconditionError("kmax must be at least 2")
        if not self.variables:
            object.__setattr__(self, "variables", default_variables(self.n))
        if len(self.variables) != self.n:
            raise MalformedInput("variable list has the wrong length")
        clean = {}
        for (mu, d), f in self.coeffs.items():
            if not 0 <= mu < self.a:
                raise MalformedInput(f"normal index {mu + 1} out of range 1..{self.a}")
            if not 2 <= d <= self.kmax:
                raise MalformedInput(f"degree {d} outside 2..{self.kmax}")
            if f.degree != d or f.dim != self.n:
                raise MalformedInput(f"form for (mu={mu + 1}, d={d}) has the wrong shape")
            if not f.is_zero():
                clean[(mu, d)] = f
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def from_polys(cls, n: int, polys: Sequence[MultiPoly], kmax: int | None = None,
                   variables: Sequence[str] = ()) -> JetGraph:
        """Build from one graph function per normal direction."""
        degs = [p.degree() for p in polys]
        top = max([2, *degs])
        kmax = top if kmax is None else kmax
        coeffs = {}
        for mu, p in enumerate(polys):
            if len(p.variables) != n:
                raise MalformedInput("graph function has the wrong number of variables")
            for e in p.terms:
                d = sum(e)
                if d < 2:
                    raise MalformedInput("graph functions must vanish to order 2 at the origin")
                if d > kmax:
                    raise MalformedInput(f"term of degree {d} exceeds kmax={kmax}")
            for d in range(2, kmax + 1):
                part = p.homogeneous_part(d)
                if not part.is_zero():
                    coeffs[(mu, d)] = SymForm.from_poly(part, d)
        if not variables and polys:
            variables = polys[0].variables
        return cls(n, len(polys), kmax, coeffs, tuple(variables))

    @classmethod
    def zero(cls, n: int, a: int = 0, kmax: int = 4) -> JetGraph:
        return cls(n, a, kmax)

    def coefficient(self, mu: int, d: int) -> SymForm:
        return self.coeffs.get((mu, d)) or SymForm.zero(d, self.n)

    def graph_poly(self, mu: int) -> MultiPoly:
        out = MultiPoly(self.variables)
        for d in range(2, self.kmax + 1):
            out = out + self.coefficient(mu, d).to_poly(self.variables)
        return out

    def fubini(self, k: int) -> list[SymForm]:
        """``F_k = (-1)^k c_k`` as a list of ``a`` scalar forms."""
        sign = -1 if k % 2 else 1
        return [self.coefficient(mu, k).scale(sign) for mu in range(self.a)]

    def second_fundamental_form(self) -> list[SymForm]:
        return self.fubini(2)

    def with_kmax(self, kmax: int) -> JetGraph:
        if kmax < max((d for _, d in self.coeffs), default=2):
            raise PreconditionError("cannot truncate below a nonzero coefficient")
        return JetGraph(self.n, self.a, kmax, dict(self.coeffs), self.variables)

    def to_json(self) -> dict:
        out = []
        for (mu, d) in sorted(self.coeffs):
            poly = self.coeffs[(mu, d)].to_poly(self.variables)
            terms = [
                {"exps": list(e), "num": c.numerator, "den": c.denominator}
                for e, c in sorted(poly.terms.items(), reverse=True)
            ]
            out.append({"mu": mu + 1, "degree": d, "terms": terms})
        return {"schema": SCHEMA, "n": self.n, "a": self.a, "kmax": self.kmax, "coeffs": out}

    @classmethod
    def from_json(cls, data: dict) -> JetGraph:
        if not isinstance(data, dict) or data.get("schema") != SCHEMA:
            raise MalformedInput(f"expected a {SCHEMA} document")
        try:
            n, a, kmax = int(data["n"]), int(data["a"]), int(data["kmax"])
            coeffs: dict[tuple[int, int], SymForm] = {}
            variables = default_variables(n)
            for entry in data["coeffs"]:
                mu, d = int(entry["mu"]) - 1, int(entry["degree"])
                poly = MultiPoly(variables, terms_from_json(entry["terms"], n))
                if not poly.is_homogeneous(d):
                    raise MalformedInput(f"terms for mu={mu + 1} are not of degree {d}")
                f = SymForm.from_poly(poly, d)
                if (mu, d) in coeffs:
                    f = coeffs[(mu, d)] + f
                coeffs[(mu, d)] = f
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, MalformedInput):
                raise
            raise MalformedInput(f"bad {SCHEMA} document: {exc}") from exc
        return cls(n, a, kmax, coeffs)


def terms_from_json(terms, n: int) -> dict[tuple[int, ...], Fraction]:
    out: dict[tuple[int, ...], Fraction] = {}
    for t in terms:
        exps = tuple(int(e) for e in t["exps"])
        if len(exps) != n:
            raise MalformedInput(f"exponent vector {list(exps)} should have length {n}")
        den = int(t.get("den", 1))
        if den == 0:
            raise MalformedInput("zero denominator")
        out[exps] = out.get(exps, Fraction(0)) + Fraction(int(t["num"]), den)
    return out


def terms_to_json(poly: MultiPoly) -> list[dict]:
    return [
        {"exps": list(e), "num": c.numerator, "den": c.denominator}
        for e, c in sorted(poly.terms.items(), reverse=True)
    ]


# ---------------------------------------------------------------------------
# Contact and asymptotic cones
# ---------------------------------------------------------------------------


def _direction(g: JetGraph, v: Sequence) -> list[Fraction]:
    if len(v) != g.n:
        raise PreconditionError(f"direction must have {g.n} entries")
    v = [as_fraction(x) for x in v]
    if not any(v):
        raise PreconditionError("zero vector is not a direction")
    return v


def contact_order(g: JetGraph, v: Sequence):
    """Order of contact of the line through the origin in direction ``v``.

    Returns ``d - 1`` for the smallest ``d`` with some ``c_d^mu(v, ..., v) != 0``,
    or :data:`INFINITY_UP_TO_TRUNCATION` when every coefficient up to ``kmax``
    vanishes along ``v``.
    """
    v = _direction(g, v)
    for d in range(2, g.kmax + 1):
        if any(not g.coefficient(mu, d).evaluate(v) == 0 for mu in range(g.a)):
            return d - 1
    return INFINITY_UP_TO_TRUNCATION


@dataclass(frozen=True)
class ConeIdeal:
    k: int
    generators: tuple[MultiPoly, ...]
    variables: tuple[str, ...]

    def contains(self, v: Sequence) -> bool:
        return all(p.evaluate(v) == 0 for p in self.generators)

    def search(self, candidates: Sequence[Sequence]) -> list[Sequence]:
        return [v for v in candidates if any(v) and self.contains(v)]


def cone_ideal(g: JetGraph, k: int) -> ConeIdeal:
    """Generators ``c_d^mu(v, ..., v)`` for ``2 <= d <= k`` (zero ones dropped)."""
    if not 2 <= k <= g.kmax:
        raise PreconditionError(f"k must lie in 2..{g.kmax}")
    gens = []
    for d in range(2, k + 1):
        for mu in range(g.a):
            f = g.coefficient(mu, d)
            if not f.is_zero():
                gens.append(f.to_poly(g.variables))
    return ConeIdeal(k, tuple(gens), g.variables)


def zeros_contains(ideal: ConeIdeal, v: Sequence) -> bool:
    return ideal.contains(v)


def linear_subspace_in_zeros(ideal: ConeIdeal, basis: Sequence[Sequence]) -> bool:
    """Whether the whole span of ``basis`` lies in the zero set.

    Each generator of degree ``d`` is checked on all multisets of ``d`` basis
    vectors via polarization, which is exact for a linear space.
    """
    for p in ideal.generators:
        f = SymForm.from_poly(p)
        for combo in itertools.combinations_with_replacement(range(len(basis)), f.degree):
            if f.polarize(*(basis[i] for i in combo)) != 0:
                return False
    return True


def projectively_empty(ideal: ConeIdeal, max_degree: int = 6) -> int | None:
    """Certify that the ideal has no nonzero zeros.

    Looks for a degree ``m`` at which every pure power ``x_i^m`` lies in the
    span of the monomial multiples of the generators.  Returns that ``m`` or
    ``None`` if no certificate exists up to ``max_degree``.
    """
    n = len(ideal.variables)
    if not ideal.generators:
        return None
    for m in range(min(p.degree() for p in ideal.generators), max_degree + 1):
        cols = {e: i for i, e in enumerate(monomials(n, m))}
        ech = Echelon(len(cols))
        for p in ideal.generators:
            if p.degree() > m:
                continue
            for shift in monomials(n, m - p.degree()):
                row = {}
                for e, c in p.terms.items():
                    row[cols[tuple(x + y for x, y in zip(e, shift))]] = c
                ech.add(row)
        powers = [tuple(m * int(j == i) for j in range(n)) for i in range(n)]
        if all(ech.contains({cols[e]: 1}) for e in powers):
            return m
    return None


# ---------------------------------------------------------------------------
# Fundamental forms and the osculating filtration
# ---------------------------------------------------------------------------


def image_vectors(forms: Sequence[SymForm], d: int, n: int) -> list[list[Fraction]]:
    """Columns ``(F^mu_I)_mu`` of an N-valued form, one per sorted index ``I``."""
    out = []
    for idx in itertools.combinations_with_replacement(range(n), d):
        vec = [f.entry(idx) for f in forms]
        if any(vec):
            out.append(vec)
    return out


def annihilator(basis: Sequence[Sequence], dim: int) -> list[list[Fraction]]:
    if not basis:
        return [[Fraction(int(i == j)) for j in range(dim)] for i in range(dim)]
    return kernel_basis(ExactMatrix.from_dense([list(b) for b in basis], dim))


def combine(forms: Sequence[SymForm], xi: Sequence[Fraction], d: int, n: int) -> SymForm:
    out = SymForm.zero(d, n)
    for c, f in zip(xi, forms):
        if c:
            out = out + f.scale(c)
    return out


def form_span(forms: Sequence[SymForm]) -> list[SymForm]:
    """A basis (as forms) of the linear span of scalar forms of one shape."""
    if not forms:
        return []
    d, n = forms[0].degree, forms[0].dim
    keys = list(itertools.combinations_with_replacement(range(n), d))
    ech = Echelon(len(keys))
    for f in forms:
        ech.add(sparse([f.entry(k) for k in keys]))
    return [SymForm(d, n, {keys[j]: c for j, c in row.items()}) for row in ech.basis()]


@dataclass(frozen=True)
class FundamentalFormSystem:
    n: int
    a: int
    kmax: int
    forms: dict[int, list[SymForm]]
    filtration: dict[int, list[list[Fraction]]]
    conormal: dict[int, list[list[Fraction]]]
    reduced: dict[int, list[SymForm]]

    def ii_space(self) -> list[SymForm]:
        """Basis of ``II(N*)`` inside ``S^2 T*``."""
        return form_span(self.forms[2])

    @property
    def dim_ii(self) -> int:
        return len(self.ii_space())

    def osculating_dims(self) -> dict[int, int]:
        return {k: len(b) for k, b in self.filtration.items()}

    def reduced_space(self, k: int) -> list[SymForm]:
        """Basis of ``FF_k(N_k*)`` as a space of scalar degree-k forms."""
        return form_span(self.reduced[k])

    def is_reduced_zero(self, k: int) -> bool:
        return all(f.is_zero() for f in self.reduced[k])


def fundamental_forms(g: JetGraph) -> FundamentalFormSystem:
    forms = {k: g.fubini(k) for k in range(2, g.kmax + 1)}
    filtration: dict[int, list[list[Fraction]]] = {}
    conormal: dict[int, list[list[Fraction]]] = {}
    reduced: dict[int, list[SymForm]] = {}
    ech = Echelon(g.a)
    for k in range(2, g.kmax + 1):
        prev = [[row.get(j, Fraction(0)) for j in range(g.a)] for row in ech.basis()]
        conormal[k] = annihilator(prev, g.a) if g.a else []
        reduced[k] = [combine(forms[k], xi, k, g.n) for xi in conormal[k]]
        for vec in image_vectors(forms[k], k, g.n):
            ech.add(sparse(vec))
        filtration[k] = [[row.get(j, Fraction(0)) for j in range(g.a)] for row in ech.basis()]
    return FundamentalFormSystem(g.n, g.a, g.kmax, forms, filtration, conormal, reduced)


def variety_rank(g: JetGraph | FundamentalFormSystem) -> int:
    """Index of the last nonzero fundamental form; 1 when all vanish."""
    ffs = fundamental_forms(g) if isinstance(g, JetGraph) else g
    last = 1
    for k in sorted(ffs.reduced):
        if not ffs.is_reduced_zero(k):
            last = k
    return last
