"""Prolongations of spaces of symmetric forms and Bertini-type rank tests."""

from __future__ import annotations

import itertools
import math
import random
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (
    Echelon,
    ExactMatrix,
    MultiPoly,
    SymForm,
    index_to_exps,
    kernel_basis,
    monomials,
    multinomial,
    sparse,
)
from .errors import MalformedInput, PreconditionError
from .jets import (
    INFINITY_UP_TO_TRUNCATION,
    FundamentalFormSystem,
    JetGraph,
    contact_order,
    default_variables,
    fundamental_forms,
    terms_from_json,
    terms_to_json,
)

DEFAULT_BOX = 10


def _falling(e: int, k: int) -> int:
    return math.perm(e, k)


class PolySpace:
    """A linear space of ``W``-valued degree-``k`` forms on ``Q^n``.

    Elements are tuples of ``w`` SymForms.  Internally an element is a vector
    of monomial coefficients indexed by ``(monomial, component)``.
    """

    def __init__(self, degree: int, dim: int, w: int = 1, basis: Sequence[Sequence[SymForm]] = ()):
        if degree < 1 or dim < 1 or w < 1:
            raise PreconditionError("degree, dim and w must be positive")
        self.degree = degree
        self.dim = dim
        self.w = w
        self.monos = monomials(dim, degree)
        self._mono_index = {e: i for i, e in enumerate(self.monos)}
        basis = [tuple(b) for b in basis]
        for b in basis:
            if len(b) != w or any(f.degree != degree or f.dim != dim for f in b):
                raise PreconditionError("basis element has the wrong shape")
        ech = Echelon(self.ambient_dim)
        for b in basis:
            if not ech.add(self.coordinates(b)):
                raise PreconditionError("basis is linearly dependent")
        self.basis: tuple[tuple[SymForm, ...], ...] = tuple(basis)
        self._ech = ech

    @classmethod
    def span(cls, degree: int, dim: int, elements: Sequence, w: int = 1) -> PolySpace:
        """Space spanned by ``elements`` (scalar SymForms allowed when ``w == 1``)."""
        elements = [(e,) if isinstance(e, SymForm) else tuple(e) for e in elements]
        probe = cls(degree, dim, w)
        ech = Echelon(probe.ambient_dim)
        for e in elements:
            ech.add(probe.coordinates(e))
        return cls(degree, dim, w, [probe.element(r) for r in ech.basis()])

    @classmethod
    def full(cls, degree: int, dim: int, w: int = 1) -> PolySpace:
        probe = cls(degree, dim, w)
        return cls(degree, dim, w, [probe.element({i: 1}) for i in range(probe.ambient_dim)])

    @property
    def ambient_dim(self) -> int:
        return len(self.monos) * self.w

    def __len__(self) -> int:
        return len(self.basis)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def coordinates(self, element: Sequence[SymForm]) -> dict[int, Fraction]:
        out = {}
        for c, f in enumerate(element):
            for idx, val in f.coeffs.items():
                e = index_to_exps(idx, self.dim)
                out[self._mono_index[e] * self.w + c] = val * multinomial(e)
        return out

    def element(self, coords: dict[int, Fraction]) -> tuple[SymForm, ...]:
        comps: list[dict] = [{} for _ in range(self.w)]
        for pos, val in coords.items():
            m, c = divmod(pos, self.w)
            e = self.monos[m]
            comps[c][tuple(i for i, k in enumerate(e) for _ in range(k))] = Fraction(val) / multinomial(e)
        return tuple(SymForm(self.degree, self.dim, d) for d in comps)

    def contains(self, element) -> bool:
        if isinstance(element, SymForm):
            element = (element,)
        return self._ech.contains(self.coordinates(element))

    def contains_space(self, other: PolySpace) -> bool:
        return all(self.contains(b) for b in other.basis)

    def residual(self, coords: dict[int, Fraction]) -> list[Fraction]:
        return self._ech.complement_coordinates(coords)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolySpace):
            return NotImplemented
        return ((self.degree, self.dim, self.w, self.dimension)
                == (other.degree, other.dim, other.w, other.dimension)
                and self.contains_space(other))

    def __repr__(self) -> str:
        return f"PolySpace(k={self.degree}, n={self.dim}, w={self.w}, dim={self.dimension})"


def derivative_multi_indices(n: int, j: int) -> list[tuple[int, ...]]:
    return [index_to_exps(c, n) for c in itertools.combinations_with_replacement(range(n), j)]


def prolong(A: PolySpace, j: int) -> PolySpace:
    """``A^(j)``: degree ``k + j`` forms all of whose ``j``-th partials lie in ``A``."""
    if j < 0:
        raise PreconditionError("prolongation order must be non-negative")
    if j == 0:
        return A
    big = PolySpace(A.degree + j, A.dim, A.w)
    ders = derivative_multi_indices(A.dim, j)
    n_res = A.ambient_dim - A.dimension
    # residue of each unit vector of S^k (x) W modulo A
    unit_res = [A.residual({t: 1}) for t in range(A.ambient_dim)]
    columns = []
    for m, e in enumerate(big.monos):
        for c in range(A.w):
            col: dict[int, Fraction] = {}
            for r, J in enumerate(ders):
                if any(ei < ji for ei, ji in zip(e, J)):
                    continue
                factor = math.prod(_falling(ei, ji) for ei, ji in zip(e, J))
                low = tuple(ei - ji for ei, ji in zip(e, J))
                t = A._mono_index[low] * A.w + c
                for s, val in enumerate(unit_res[t]):
                    if val:
                        col[r * n_res + s] = col.get(r * n_res + s, 0) + factor * val
            columns.append(col)
    mat = ExactMatrix.from_columns(columns, len(ders) * n_res)
    kern = kernel_basis(mat)
    return PolySpace(A.degree + j, A.dim, A.w, [big.element(sparse(v)) for v in kern])


def all_partials_in(A: PolySpace, element: Sequence[SymForm], j: int) -> bool:
    """Direct re-check: every ``j``-th partial of ``element`` lies in ``A``."""
    polys = [f.to_poly() for f in element]
    for J in derivative_multi_indices(A.dim, j):
        parts = []
        for p in polys:
            for i, k in enumerate(J):
                for _ in range(k):
                    p = p.derivative(i)
            parts.append(SymForm.from_poly(p, A.degree) if not p.is_zero() else SymForm.zero(A.degree, A.dim))
        if not A.contains(tuple(parts)):
            return False
    return True


# ---------------------------------------------------------------------------
# Cartan's prolongation property
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProlongationCheck:
    k: int
    lhs_dim: int
    rhs_dim: int
    contained: bool
    equal: bool

    def to_json(self) -> dict:
        return {"k": self.k, "lhs_dim": self.lhs_dim, "rhs_dim": self.rhs_dim,
                "contained": self.contained, "equal": self.equal}


def ii_polyspace(F: FundamentalFormSystem) -> PolySpace:
    return PolySpace.span(2, F.n, F.ii_space())


def prolongation_property_check(F: FundamentalFormSystem | JetGraph) -> list[ProlongationCheck]:
    """Compare ``FF_k(N_k*)`` with ``FF_2(N_2*)^(k-2)`` for every ``k >= 3``."""
    if isinstance(F, JetGraph):
        F = fundamental_forms(F)
    ii = ii_polyspace(F)
    out = []
    for k in range(3, F.kmax + 1):
        lhs = PolySpace.span(k, F.n, F.reduced_space(k))
        rhs = prolong(ii, k - 2)
        contained = rhs.contains_space(lhs)
        out.append(ProlongationCheck(k, lhs.dimension, rhs.dimension, contained,
                                     contained and lhs.dimension == rhs.dimension))
    return out


# ---------------------------------------------------------------------------
# Bertini
# ---------------------------------------------------------------------------


def quadric_rank(q: SymForm) -> int:
    return ExactMatrix.from_dense(q.matrix()).rank()


@dataclass(frozen=True)
class QuadricPencilReport:
    generic_rank: int
    witness: SymForm
    witness_coefficients: tuple[int, ...]
    singular_basis: tuple[tuple[Fraction, ...], ...]
    contained_in_zeros: bool
    seed: int
    trials: int
    trial_ranks: tuple[int, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "generic_rank": self.generic_rank,
            "seed": self.seed,
            "trials": self.trials,
            "trial_ranks": list(self.trial_ranks),
            "witness_coefficients": list(self.witness_coefficients),
            "singular_basis": [[str(x) for x in v] for v in self.singular_basis],
            "contained_in_zeros": self.contained_in_zeros,
        }


def trial_rng(seed: int, trial: int) -> random.Random:
    return random.Random(seed * 1_000_003 + trial)


def span_in_quadric_zeros(quadrics: Sequence[SymForm], basis: Sequence[Sequence]) -> bool:
    """Polarized vanishing ``Q(v_i, v_j) = 0`` for all pairs of basis vectors."""
    for q in quadrics:
        for i, j in itertools.combinations_with_replacement(range(len(basis)), 2):
            if q.polarize(basis[i], basis[j]) != 0:
                return False
    return True


def bertini_test(A: PolySpace, trials: int = 8, seed: int = 0, box: int = DEFAULT_BOX) -> QuadricPencilReport:
    """Classical Bertini check on a generic member of a system of quadrics."""
    if A.w != 1 or A.degree != 2:
        raise PreconditionError("bertini_test needs a space of scalar quadrics")
    if A.dimension == 0:
        raise PreconditionError("empty system of quadrics")
    if trials < 1:
        raise PreconditionError("trials must be at least 1")
    quads = [b[0] for b in A.basis]
    best = None
    ranks = []
    for t in range(trials):
        rng = trial_rng(seed, t)
        coeffs = tuple(rng.randint(-box, box) for _ in quads)
        q = SymForm.zero(2, A.dim)
        for c, b in zip(coeffs, quads):
            q = q + b.scale(c)
        r = quadric_rank(q)
        ranks.append(r)
        if best is None or r > best[0]:
            best = (r, q, coeffs)
    r, q, coeffs = best
    sing = kernel_basis(ExactMatrix.from_dense(q.matrix()))
    return QuadricPencilReport(
        generic_rank=r,
        witness=q,
        witness_coefficients=coeffs,
        singular_basis=tuple(tuple(v) for v in sing),
        contained_in_zeros=span_in_quadric_zeros(quads, sing),
        seed=seed,
        trials=trials,
        trial_ranks=tuple(ranks),
    )


@dataclass(frozen=True)
class MobileBertiniResult:
    ok: bool
    report: QuadricPencilReport
    checked: tuple[tuple[Fraction, ...], ...]

    def to_json(self) -> dict:
        return {"ok": self.ok, "bertini": self.report.to_json(),
                "checked_directions": [[str(x) for x in v] for v in self.checked]}


def mobile_bertini_details(fixture, trials: int = 8, seed: int = 0) -> MobileBertiniResult:
    if not fixture.name == "segre":
        raise PreconditionError("mobile Bertini fixture check applies to catalog Segre graphs")
    p, q = fixture.params
    if q < p:
        raise PreconditionError("expects the larger factor second (b >= a)")
    g = fixture.graph
    F = fundamental_forms(g)
    report = bertini_test(ii_polyspace(F), trials=trials, seed=seed)
    rng = trial_rng(seed, trials)
    directions = [tuple(v) for v in report.singular_basis]
    if len(report.singular_basis) > 1:
        for _ in range(3):
            coeffs = [rng.randint(-DEFAULT_BOX, DEFAULT_BOX) for _ in report.singular_basis]
            v = tuple(sum((c * x for c, x in zip(coeffs, col)), Fraction(0))
                      for col in zip(*report.singular_basis))
            if any(v):
                directions.append(v)
    # the factor directions recorded with the fixture, checked directly
    for sub in fixture.expected["c2"]["linear_subspaces"]:
        directions.extend(tuple(Fraction(x) for x in b) for b in sub)
    ok = report.contained_in_zeros and all(
        contact_order(g, v) is INFINITY_UP_TO_TRUNCATION for v in directions)
    return MobileBertiniResult(ok, report, tuple(directions))


def mobile_bertini_fixture_check(fixture, trials: int = 8, seed: int = 0) -> bool:
    """Every singular direction of the generic II-quadric is a line on the model."""
    return mobile_bertini_details(fixture, trials, seed).ok


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

POLYSPACE_SCHEMA = "polyspace-v1"


def polyspace_to_json(A: PolySpace) -> dict:
    variables = default_variables(A.dim)
    return {
        "schema": POLYSPACE_SCHEMA, "degree": A.degree, "dim": A.dim, "w": A.w,
        "basis": [[terms_to_json(f.to_poly(variables)) for f in b] for b in A.basis],
    }


def polyspace_from_json(data: dict) -> PolySpace:
    """Read a ``polyspace-v1`` document; the basis may be any spanning set."""
    if not isinstance(data, dict) or data.get("schema") != POLYSPACE_SCHEMA:
        raise MalformedInput(f"expected a {POLYSPACE_SCHEMA} document")
    try:
        k, n, w = int(data["degree"]), int(data["dim"]), int(data.get("w", 1))
        variables = default_variables(n)
        elements = []
        for elt in data["basis"]:
            if len(elt) != w:
                raise MalformedInput(f"each element needs {w} components")
            comps = []
            for terms in elt:
                poly = MultiPoly(variables, terms_from_json(terms, n))
                if not poly.is_homogeneous(k):
                    raise MalformedInput(f"component is not homogeneous of degree {k}")
                comps.append(SymForm.from_poly(poly, k))
            elements.append(tuple(comps))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, MalformedInput):
            raise
        raise MalformedInput(f"bad {POLYSPACE_SCHEMA} document: {exc}") from exc
    return PolySpace.span(k, n, elements, w)
