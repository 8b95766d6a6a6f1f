"""Exact arithmetic substrate: sparse polynomials, symmetric tensors, linear algebra.

Everything is over the rationals via :class:`fractions.Fraction`.  Vectors are
plain lists of Fractions; sparse rows are ``{column: Fraction}`` dicts with no
zero entries.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Mapping, Sequence
from fractions import Fraction

from .errors import MalformedInput, PreconditionError

Rational = Fraction
Exps = tuple[int, ...]


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass int, str or Fraction")
    return Fraction(x)


# ---------------------------------------------------------------------------
# Multivariate polynomials
# ---------------------------------------------------------------------------


class MultiPoly:
    """Sparse polynomial ``{exponent tuple: coefficient}`` in a fixed variable list."""

    __slots__ = ("variables", "terms")

    def __init__(self, variables: Sequence[str], terms: Mapping[Exps, object] | None = None):
        self.variables = tuple(variables)
        nv = len(self.variables)
        clean: dict[Exps, Fraction] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nv or any(e < 0 for e in exps):
                raise MalformedInput(f"bad exponent vector {exps} for {nv} variables")
            c = as_fraction(c)
            if c:
                clean[exps] = clean.get(exps, Fraction(0)) + c
                if not clean[exps]:
                    del clean[exps]
        self.terms = clean

    @classmethod
    def variable(cls, variables: Sequence[str], i: int) -> MultiPoly:
        exps = [0] * len(variables)
        exps[i] = 1
        return cls(variables, {tuple(exps): 1})

    @classmethod
    def constant(cls, variables: Sequence[str], c) -> MultiPoly:
        return cls(variables, {(0,) * len(variables): c})

    def _check(self, other: MultiPoly) -> None:
        if self.variables != other.variables:
            raise PreconditionError(
                f"variable lists differ: {self.variables} vs {other.variables}"
            )

    def __add__(self, other: MultiPoly) -> MultiPoly:
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(self.variables, out)

    def __neg__(self) -> MultiPoly:
        return MultiPoly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: MultiPoly) -> MultiPoly:
        return self + (-other)

    def __mul__(self, other) -> MultiPoly:
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        self._check(other)
        out: dict[Exps, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(self.variables, out)

    __rmul__ = __mul__

    def scale(self, c) -> MultiPoly:
        c = as_fraction(c)
        return MultiPoly(self.variables, {e: c * v for e, v in self.terms.items()})

    def __pow__(self, k: int) -> MultiPoly:
        out = MultiPoly.constant(self.variables, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.variables, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self, d: int | None = None) -> bool:
        degs = {sum(e) for e in self.terms}
        if not degs:
            return True
        return len(degs) == 1 and (d is None or degs == {d})

    def homogeneous_part(self, d: int) -> MultiPoly:
        return MultiPoly(self.variables, {e: c for e, c in self.terms.items() if sum(e) == d})

    def evaluate(self, point: Sequence) -> Fraction:
        if len(point) != len(self.variables):
            raise PreconditionError("point dimension does not match variable count")
        pt = [as_fraction(x) for x in point]
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for x, k in zip(pt, e):
                if k:
                    term *= x**k
            total += term
        return total

    def derivative(self, i: int) -> MultiPoly:
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                out[tuple(e2)] = c * e[i]
        return MultiPoly(self.variables, out)

    def substitute_linear(self, images: Sequence[MultiPoly]) -> MultiPoly:
        """Compose with ``x_i -> images[i]`` (used for changes of coordinates)."""
        if len(images) != len(self.variables):
            raise PreconditionError("need one image per variable")
        target = images[0].variables if images else self.variables
        out = MultiPoly(target)
        for e, c in self.terms.items():
            term = MultiPoly.constant(target, c)
            for img, k in zip(images, e):
                if k:
                    term = term * img**k
            out = out + term
        return out

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, e) if k
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts)


def monomials(n: int, d: int) -> list[Exps]:
    """Exponent vectors of degree ``d`` in ``n`` variables, in a fixed order."""
    out = []
    for combo in itertools.combinations_with_replacement(range(n), d):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return out


def multinomial(exps: Exps) -> int:
    out = math.factorial(sum(exps))
    for k in exps:
        out //= math.factorial(k)
    return out


def exps_to_index(exps: Exps) -> tuple[int, ...]:
    return tuple(i for i, k in enumerate(exps) for _ in range(k))


def index_to_exps(index: Iterable[int], n: int) -> Exps:
    e = [0] * n
    for i in index:
        e[i] += 1
    return tuple(e)


# ---------------------------------------------------------------------------
# Symmetric forms
# ---------------------------------------------------------------------------


class SymForm:
    """Symmetric ``d``-linear form on ``Q^n``.

    ``coeffs`` maps a sorted index tuple to the tensor entry.  The associated
    polynomial ``f`` satisfies ``f(v) = B(v, ..., v)``, so the coefficient of a
    monomial is the tensor entry times its multinomial count.
    """

    __slots__ = ("degree", "dim", "coeffs")

    def __init__(self, degree: int, dim: int, coeffs: Mapping[tuple[int, ...], object] | None = None):
        if degree < 1 or dim < 0:
            raise PreconditionError("degree must be positive and dim non-negative")
        self.degree = degree
        self.dim = dim
        clean = {}
        for idx, c in (coeffs or {}).items():
            key = tuple(sorted(idx))
            if len(key) != degree or any(not 0 <= i < dim for i in key):
                raise MalformedInput(f"bad index {idx} for degree {degree}, dim {dim}")
            c = as_fraction(c)
            if c:
                clean[key] = c
        self.coeffs = clean

    @classmethod
    def zero(cls, degree: int, dim: int) -> SymForm:
        return cls(degree, dim)

    @classmethod
    def from_poly(cls, poly: MultiPoly, degree: int | None = None) -> SymForm:
        d = poly.degree() if degree is None else degree
        if d < 1:
            if poly.is_zero() and degree is not None:
                return cls(degree, len(poly.variables))
            raise PreconditionError("need a positive degree")
        if not poly.is_homogeneous(d):
            raise PreconditionError(f"polynomial is not homogeneous of degree {d}")
        n = len(poly.variables)
        return cls(d, n, {exps_to_index(e): c / multinomial(e) for e, c in poly.terms.items()})

    @classmethod
    def from_matrix(cls, m: Sequence[Sequence]) -> SymForm:
        n = len(m)
        coeffs = {}
        for i in range(n):
            for j in range(i, n):
                if as_fraction(m[i][j]) != as_fraction(m[j][i]):
                    raise PreconditionError("matrix is not symmetric")
                coeffs[(i, j)] = m[i][j]
        return cls(2, n, coeffs)

    def entry(self, index: Sequence[int]) -> Fraction:
        return self.coeffs.get(tuple(sorted(index)), Fraction(0))

    def matrix(self) -> list[list[Fraction]]:
        if self.degree != 2:
            raise PreconditionError("matrix() needs a quadratic form")
        return [[self.entry((i, j)) for j in range(self.dim)] for i in range(self.dim)]

    def to_poly(self, variables: Sequence[str] | None = None) -> MultiPoly:
        variables = variables or [f"x{i + 1}" for i in range(self.dim)]
        return MultiPoly(
            variables,
            {index_to_exps(k, self.dim): c * multinomial(index_to_exps(k, self.dim))
             for k, c in self.coeffs.items()},
        )

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: SymForm) -> SymForm:
        self._check(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) + c
        return SymForm(self.degree, self.dim, out)

    def scale(self, c) -> SymForm:
        c = as_fraction(c)
        return SymForm(self.degree, self.dim, {k: c * v for k, v in self.coeffs.items()})

    def __neg__(self) -> SymForm:
        return self.scale(-1)

    def __sub__(self, other: SymForm) -> SymForm:
        return self + (-other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymForm):
            return NotImplemented
        return (self.degree, self.dim, self.coeffs) == (other.degree, other.dim, other.coeffs)

    def __hash__(self) -> int:
        return hash((self.degree, self.dim, frozenset(self.coeffs.items())))

    def _check(self, other: SymForm) -> None:
        if (self.degree, self.dim) != (other.degree, other.dim):
            raise PreconditionError("forms of different shape")

    def polarize(self, *vectors: Sequence) -> Fraction:
        if len(vectors) != self.degree:
            raise PreconditionError(f"need {self.degree} vectors, got {len(vectors)}")
        vs = []
        for v in vectors:
            if len(v) != self.dim:
                raise PreconditionError("vector dimension mismatch")
            vs.append([as_fraction(x) for x in v])
        total = Fraction(0)
        for key, c in self.coeffs.items():
            # sum over the distinct orderings of the multi-index
            for perm in set(itertools.permutations(key)):
                term = c
                for v, i in zip(vs, perm):
                    term *= v[i]
                    if not term:
                        break
                total += term
        return total

    def evaluate(self, v: Sequence) -> Fraction:
        return self.polarize(*([v] * self.degree))

    def contract(self, v: Sequence) -> SymForm:
        """Insert ``v`` into one slot, giving a form of degree ``d - 1``."""
        if self.degree == 1:
            raise PreconditionError("cannot contract a linear form to degree 0")
        v = [as_fraction(x) for x in v]
        out: dict[tuple[int, ...], Fraction] = {}
        for rest in itertools.combinations_with_replacement(range(self.dim), self.degree - 1):
            s = sum((v[i] * self.entry(rest + (i,)) for i in range(self.dim) if v[i]), Fraction(0))
            if s:
                out[rest] = s
        return SymForm(self.degree - 1, self.dim, out)

    def __repr__(self) -> str:
        return f"SymForm(d={self.degree}, n={self.dim}, {self.to_poly()!r})"


def poly_arith(p: MultiPoly, q: MultiPoly | None, op: str, scalar=None) -> MultiPoly:
    """Functional front for ``add``/``mul``/``scale`` on polynomials."""
    if op == "add":
        return p + q
    if op == "mul":
        return p * q
    if op == "scale":
        return p.scale(scalar)
    raise PreconditionError(f"unknown op {op!r}")


def polarize(f: SymForm, *vectors: Sequence) -> Fraction:
    return f.polarize(*vectors)


# ---------------------------------------------------------------------------
# Linear algebra
# ---------------------------------------------------------------------------


SparseRow = dict[int, Fraction]


def sparse(vec: Sequence) -> SparseRow:
    return {i: as_fraction(x) for i, x in enumerate(vec) if x}


def dense(row: Mapping[int, Fraction], length: int) -> list[Fraction]:
    out = [Fraction(0)] * length
    for i, c in row.items():
        out[i] = c
    return out


class Echelon:
    """Incrementally maintained reduced row echelon basis of a subspace of ``Q^dim``.

    Every stored row has a 1 at its pivot and zeros at all other pivots, so
    :meth:`reduce` is a single pass.  The pivot is the smallest column still
    present after reduction, which keeps the result independent of insertion
    order up to the usual RREF uniqueness.
    """

    def __init__(self, dim: int, rows: Iterable[Mapping[int, object]] = ()):
        self.dim = dim
        self.rows: dict[int, SparseRow] = {}
        for r in rows:
            self.add(r)

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> list[int]:
        return sorted(self.rows)

    def free_columns(self) -> list[int]:
        return [j for j in range(self.dim) if j not in self.rows]

    def reduce(self, vec: Mapping[int, object]) -> SparseRow:
        v = {i: as_fraction(c) for i, c in vec.items() if c}
        for p in [p for p in v if p in self.rows]:
            c = v.get(p)
            if not c:
                continue
            for j, rc in self.rows[p].items():
                nv = v.get(j, 0) - c * rc
                if nv:
                    v[j] = nv
                else:
                    v.pop(j, None)
        return v

    def contains(self, vec: Mapping[int, object]) -> bool:
        return not self.reduce(vec)

    def add(self, vec: Mapping[int, object]) -> bool:
        """Add ``vec`` to the span; return True when it was independent."""
        v = self.reduce(vec)
        if not v:
            return False
        p = min(v)
        inv = 1 / v[p]
        v = {j: c * inv for j, c in v.items()}
        for q, row in self.rows.items():
            c = row.get(p)
            if c:
                for j, vc in v.items():
                    nv = row.get(j, 0) - c * vc
                    if nv:
                        row[j] = nv
                    else:
                        row.pop(j, None)
        self.rows[p] = v
        return True

    def basis(self) -> list[SparseRow]:
        return [dict(self.rows[p]) for p in self.pivots]

    def complement_coordinates(self, vec: Mapping[int, object]) -> list[Fraction]:
        """Coordinates of ``vec`` modulo the span, on the non-pivot columns."""
        r = self.reduce(vec)
        return [r.get(j, Fraction(0)) for j in self.free_columns()]


class ExactMatrix:
    """Sparse rational matrix; rows are stored as ``{col: value}`` dicts."""

    __slots__ = ("nrows", "ncols", "_rows")

    def __init__(self, nrows: int, ncols: int, rows: Sequence[Mapping[int, object]] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        if rows is None:
            rows = [{} for _ in range(nrows)]
        if len(rows) != nrows:
            raise PreconditionError("row count mismatch")
        clean = []
        for r in rows:
            d = {}
            for j, c in r.items():
                if not 0 <= j < ncols:
                    raise PreconditionError(f"column {j} out of range")
                c = as_fraction(c)
                if c:
                    d[j] = c
            clean.append(d)
        self._rows = clean

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence], ncols: int | None = None) -> ExactMatrix:
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise PreconditionError("ragged matrix")
        return cls(len(rows), ncols, [sparse(r) for r in rows])

    @classmethod
    def from_columns(cls, cols: Sequence[Mapping[int, object]], nrows: int) -> ExactMatrix:
        rows: list[dict[int, object]] = [{} for _ in range(nrows)]
        for j, col in enumerate(cols):
            for i, c in col.items():
                if c:
                    rows[i][j] = c
        return cls(nrows, len(cols), rows)

    @classmethod
    def identity(cls, n: int) -> ExactMatrix:
        return cls(n, n, [{i: 1} for i in range(n)])

    def row(self, i: int) -> SparseRow:
        return dict(self._rows[i])

    def rows(self) -> list[SparseRow]:
        return [dict(r) for r in self._rows]

    def to_dense(self) -> list[list[Fraction]]:
        return [dense(r, self.ncols) for r in self._rows]

    def transpose(self) -> ExactMatrix:
        cols: list[dict[int, Fraction]] = [{} for _ in range(self.ncols)]
        for i, r in enumerate(self._rows):
            for j, c in r.items():
                cols[j][i] = c
        return ExactMatrix(self.ncols, self.nrows, cols)

    def __matmul__(self, other):
        if isinstance(other, ExactMatrix):
            if self.ncols != other.nrows:
                raise PreconditionError("shape mismatch in product")
            out = []
            for r in self._rows:
                acc: dict[int, Fraction] = {}
                for k, c in r.items():
                    for j, oc in other._rows[k].items():
                        acc[j] = acc.get(j, 0) + c * oc
                out.append(acc)
            return ExactMatrix(self.nrows, other.ncols, out)
        return self.apply(other)

    def apply(self, vec: Sequence) -> list[Fraction]:
        if len(vec) != self.ncols:
            raise PreconditionError("vector length mismatch")
        v = [as_fraction(x) for x in vec]
        return [sum((c * v[j] for j, c in r.items()), Fraction(0)) for r in self._rows]

    def is_zero(self) -> bool:
        return not any(self._rows)

    def echelon(self) -> Echelon:
        return Echelon(self.ncols, self._rows)

    def rank(self) -> int:
        return self.echelon().rank

    def nullity(self) -> int:
        return self.ncols - self.rank()

    def kernel(self) -> list[list[Fraction]]:
        return kernel_basis(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (self.nrows, self.ncols, self._rows) == (other.nrows, other.ncols, other._rows)

    def __repr__(self) -> str:
        return f"ExactMatrix({self.nrows}x{self.ncols}, nnz={sum(map(len, self._rows))})"


def kernel_basis(m: ExactMatrix) -> list[list[Fraction]]:
    """Basis of ``{v : m v = 0}``, one vector per free column of the RREF."""
    ech = m.echelon()
    out = []
    for f in ech.free_columns():
        v = [Fraction(0)] * m.ncols
        v[f] = Fraction(1)
        for p, row in ech.rows.items():
            c = row.get(f)
            if c:
                v[p] = -c
        out.append(v)
    return out


def solve(m: ExactMatrix, b: Sequence) -> list[Fraction] | None:
    """One solution of ``m x = b`` (free variables set to zero) or None."""
    if len(b) != m.nrows:
        raise PreconditionError("right-hand side has wrong length")
    n = m.ncols
    ech = Echelon(n + 1)
    for r, bi in zip(m.rows(), b):
        bi = as_fraction(bi)
        if bi:
            r[n] = bi
        ech.add(r)
    if n in ech.rows:
        return None
    x = [Fraction(0)] * n
    for p, row in ech.rows.items():
        x[p] = row.get(n, Fraction(0))
    return x


def column_space(m: ExactMatrix) -> Echelon:
    return m.transpose().echelon()


def rank_mod_p(m: ExactMatrix, p: int) -> int:
    """Rank over ``GF(p)``; denominators must be invertible mod ``p``."""
    rows = []
    for r in m.rows():
        d = [0] * m.ncols
        for j, c in r.items():
            den = c.denominator % p
            if den == 0:
                raise PreconditionError("denominator divisible by the prime")
            d[j] = c.numerator * pow(den, -1, p) % p
        rows.append(d)
    rank = 0
    for col in range(m.ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        prow = [x * inv % p for x in rows[rank]]
        rows[rank] = prow
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], prow)]
        rank += 1
    return rank


def span_echelon(vectors: Iterable[Sequence], dim: int) -> Echelon:
    return Echelon(dim, (sparse(v) for v in vectors))
