"""Second-order rigidity: the graded algebra of a second fundamental form and
the cohomology ``H^{p,1}(T, gl(V)/g)`` for ``p = 1, 2, 3``.

Conventions.  ``V = L + T + N`` with basis ``e_0 | e_1..e_n | e_{n+1}..e_{n+a}``;
``E(i, j)`` is the matrix unit sending ``e_j`` to ``e_i``.  With filtration
degrees 0, 1, 2 on L, T, N the grade of ``E(i, j)`` is ``deg j - deg i``, so
``L* (x) T`` and ``T* (x) N`` have grade -1.  The line L is trivialised by
``e_0``; this absorbs the twist of II by L.

``g_{-1}`` is spanned by ``X_alpha = E(alpha, 0) + q^mu_{alpha beta} E(mu, beta)``.
The quotient ``g_perp = gl(V)/g`` is modelled on the non-pivot coordinates of
the RREF of ``g`` in each grade.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (
    Echelon,
    ExactMatrix,
    SymForm,
    as_fraction,
    kernel_basis,
    solve,
    sparse,
)
from .errors import InvariantBreach, MalformedInput, PreconditionError
from .jets import JetGraph

Mat = dict[tuple[int, int], Fraction]
GRADES = (-2, -1, 0, 1, 2)


def bracket(x: Mat, y: Mat) -> Mat:
    """Commutator ``xy - yx`` of sparse matrices."""
    out: dict[tuple[int, int], Fraction] = {}
    by_row_y: dict[int, list[tuple[int, Fraction]]] = {}
    for (k, j), c in y.items():
        by_row_y.setdefault(k, []).append((j, c))
    by_row_x: dict[int, list[tuple[int, Fraction]]] = {}
    for (k, j), c in x.items():
        by_row_x.setdefault(k, []).append((j, c))
    for (i, k), c in x.items():
        for j, d in by_row_y.get(k, ()):
            out[(i, j)] = out.get((i, j), 0) + c * d
    for (i, k), c in y.items():
        for j, d in by_row_x.get(k, ()):
            out[(i, j)] = out.get((i, j), 0) - c * d
    return {key: v for key, v in out.items() if v}


class FrameSplit:
    """Graded bookkeeping for ``gl(V)`` with ``V = L + T + N``."""

    def __init__(self, n: int, a: int):
        if n < 1 or a < 0:
            raise PreconditionError("need n >= 1 and a >= 0")
        self.n = n
        self.a = a
        self.size = 1 + n + a
        self.pairs: dict[int, list[tuple[int, int]]] = {g: [] for g in GRADES}
        for i in range(self.size):
            for j in range(self.size):
                self.pairs[self.deg(j) - self.deg(i)].append((i, j))
        self.index = {g: {p: k for k, p in enumerate(ps)} for g, ps in self.pairs.items()}

    def deg(self, i: int) -> int:
        if i == 0:
            return 0
        return 1 if i <= self.n else 2

    def t(self, alpha: int) -> int:
        return 1 + alpha

    def nn(self, mu: int) -> int:
        return 1 + self.n + mu

    def dim(self, g: int) -> int:
        return len(self.pairs.get(g, ()))

    def coords(self, m: Mat, g: int) -> dict[int, Fraction]:
        idx = self.index[g]
        out = {}
        for key, c in m.items():
            if key not in idx:
                raise InvariantBreach(f"matrix entry {key} is not of grade {g}")
            out[idx[key]] = c
        return out

    def matrix(self, vec, g: int) -> Mat:
        items = vec.items() if isinstance(vec, dict) else enumerate(vec)
        return {self.pairs[g][k]: as_fraction(c) for k, c in items if c}

    def graded_dims(self) -> dict[int, int]:
        return {g: self.dim(g) for g in GRADES}


def ii_from_forms(forms: Sequence[SymForm]) -> list[list[list[Fraction]]]:
    """``q[mu][alpha][beta]`` from a list of quadratic SymForms."""
    return [f.matrix() for f in forms]


def _ii_tensor(ii) -> tuple[int, int, list[list[list[Fraction]]]]:
    if isinstance(ii, JetGraph):
        forms = ii.second_fundamental_form()
        return ii.n, ii.a, ii_from_forms(forms)
    forms = list(ii)
    if not forms:
        raise PreconditionError("empty II; pass a JetGraph to fix n")
    if isinstance(forms[0], SymForm):
        return forms[0].dim, len(forms), ii_from_forms(forms)
    q = [[[as_fraction(x) for x in row] for row in m] for m in forms]
    return len(q[0]), len(q), q


@dataclass
class GradedPerpComplex:
    split: FrameSplit
    q: list[list[list[Fraction]]]
    gminus1: list[Mat]
    g0: list[Mat]
    g1: list[Mat]
    g_echelon: dict[int, Echelon]
    perp_basis: dict[int, list[tuple[int, int]]]
    d0: dict[int, ExactMatrix]
    d1: dict[int, ExactMatrix]
    flags: dict[str, bool] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.split.n

    @property
    def a(self) -> int:
        return self.split.a

    def perp_dim(self, g: int) -> int:
        return len(self.perp_basis.get(g, ()))

    def perp_dims(self) -> dict[int, int]:
        return {g: self.perp_dim(g) for g in GRADES}

    def project(self, m: Mat, g: int) -> list[Fraction]:
        """Coordinates of ``m`` (grade ``g``) in ``(g_perp)_g``."""
        if g not in self.g_echelon:
            return []
        return self.g_echelon[g].complement_coordinates(self.split.coords(m, g))

    def act(self, alpha: int, m: Mat) -> Mat:
        return bracket(self.gminus1[alpha], m)

    def boundary0(self, p: int) -> ExactMatrix:
        """``d^{p+1,0}: (g_perp)_p -> T* (x) (g_perp)_{p-1}``."""
        return self.d0[p]

    def boundary1(self, p: int) -> ExactMatrix:
        """``d^{p,1}: T* (x) (g_perp)_{p-1} -> L2 T* (x) (g_perp)_{p-2}``."""
        return self.d1[p - 1]


def _gminus1(split: FrameSplit, q) -> list[Mat]:
    out = []
    for al in range(split.n):
        m: Mat = {(split.t(al), 0): Fraction(1)}
        for mu in range(split.a):
            for be in range(split.n):
                c = q[mu][al][be]
                if c:
                    m[(split.nn(mu), split.t(be))] = c
        out.append(m)
    return out


def ii_action(split: FrameSplit, q, u: Mat) -> dict[tuple[int, int, int], Fraction]:
    """``u.II`` for ``u`` in ``gl(V)_0``, keyed by ``(mu, alpha, beta)`` with ``alpha <= beta``.

    ``(-x^mu_nu q^nu_ab + x^c_a q^mu_cb + x^c_b q^mu_ac - x^0_0 q^mu_ab)``.
    """
    n, a = split.n, split.a
    out = {}
    x00 = u.get((0, 0), Fraction(0))
    for mu in range(a):
        for al in range(n):
            for be in range(al, n):
                s = -x00 * q[mu][al][be]
                for nu in range(a):
                    s -= u.get((split.nn(mu), split.nn(nu)), 0) * q[nu][al][be]
                for ga in range(n):
                    s += u.get((split.t(ga), split.t(al)), 0) * q[mu][ga][be]
                    s += u.get((split.t(ga), split.t(be)), 0) * q[mu][al][ga]
                if s:
                    out[(mu, al, be)] = s
    return out


def build_g0(ii, split: FrameSplit | None = None) -> list[Mat]:
    """Basis of the annihilator of II in ``gl(V)_0``."""
    n, a, q = _ii_tensor(ii)
    split = split or FrameSplit(n, a)
    rows_index = {key: r for r, key in enumerate(
        (mu, al, be) for mu in range(a) for al in range(n) for be in range(al, n))}
    cols = []
    for pair in split.pairs[0]:
        img = ii_action(split, q, {pair: Fraction(1)})
        cols.append({rows_index[k]: v for k, v in img.items()})
    mat = ExactMatrix.from_columns(cols, len(rows_index))
    return [split.matrix(v, 0) for v in kernel_basis(mat)]


def build_g1(g0: Sequence[Mat], gminus1: Sequence[Mat], split: FrameSplit) -> list[Mat]:
    """Largest ``g_1`` in ``gl(V)_1`` with ``[g_1, g_{-1}]`` inside ``g_0``."""
    ech0 = Echelon(split.dim(0), (split.coords(m, 0) for m in g0))
    nfree = split.dim(0) - ech0.rank
    cols = []
    for pair in split.pairs[1]:
        col = {}
        for al, x in enumerate(gminus1):
            res = ech0.complement_coordinates(split.coords(bracket(x, {pair: Fraction(1)}), 0))
            for s, v in enumerate(res):
                if v:
                    col[al * nfree + s] = v
        cols.append(col)
    mat = ExactMatrix.from_columns(cols, len(gminus1) * nfree)
    return [split.matrix(v, 1) for v in kernel_basis(mat)]


def _d0(cx: GradedPerpComplex, s: int) -> ExactMatrix:
    # (g_perp)_s -> T* (x) (g_perp)_{s-1}; row index alpha * dim(s-1) + j
    n = cx.n
    tgt = cx.perp_dim(s - 1)
    cols = []
    for pair in cx.perp_basis.get(s, ()):
        col = {}
        if tgt:
            for al in range(n):
                for j, v in enumerate(cx.project(cx.act(al, {pair: Fraction(1)}), s - 1)):
                    if v:
                        col[al * tgt + j] = v
        cols.append(col)
    return ExactMatrix.from_columns(cols, n * tgt)


def wedge_pairs(n: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(n), 2))


def _d1(cx: GradedPerpComplex, s: int) -> ExactMatrix:
    # T* (x) (g_perp)_s -> L2 T* (x) (g_perp)_{s-1}
    # (d phi)(e_a, e_c) = X_a . phi(e_c) - X_c . phi(e_a)
    n = cx.n
    src = cx.perp_basis.get(s, ())
    tgt = cx.perp_dim(s - 1)
    pairs = wedge_pairs(n)
    pair_index = {p: r for r, p in enumerate(pairs)}
    images = {}
    for k, pair in enumerate(src):
        for al in range(n):
            images[(al, k)] = cx.project(cx.act(al, {pair: Fraction(1)}), s - 1) if tgt else []
    cols = []
    for be in range(n):
        for k in range(len(src)):
            col: dict[int, Fraction] = {}
            for other in range(n):
                if other == be:
                    continue
                # phi = e^be (x) xi_k is nonzero only on e_be
                if other < be:
                    r, sign = pair_index[(other, be)], 1
                else:
                    r, sign = pair_index[(be, other)], -1
                for j, v in enumerate(images[(other, k)]):
                    if v:
                        col[r * tgt + j] = col.get(r * tgt + j, 0) + sign * v
            cols.append(col)
    return ExactMatrix.from_columns(cols, len(pairs) * tgt)


def perp_complex(ii, split: FrameSplit | None = None) -> GradedPerpComplex:
    """Build ``g``, the quotient ``g_perp`` and the differentials in grades 0..3."""
    n, a, q = _ii_tensor(ii)
    if split is None:
        split = FrameSplit(n, a)
    elif (split.n, split.a) != (n, a):
        raise PreconditionError("frame split does not match II dimensions")
    gm1 = _gminus1(split, q)
    g0 = build_g0(q, split) if a else [split.matrix({k: 1}, 0) for k in range(split.dim(0))]
    g1 = build_g1(g0, gm1, split)
    g_by_grade = {-2: [], -1: gm1, 0: g0, 1: g1, 2: []}
    echelons = {g: Echelon(split.dim(g), (split.coords(m, g) for m in ms))
                for g, ms in g_by_grade.items()}
    perp = {g: [split.pairs[g][j] for j in echelons[g].free_columns()] for g in GRADES}
    cx = GradedPerpComplex(split, q, gm1, g0, g1, echelons, perp, {}, {})
    for s in range(0, 4):
        cx.d0[s] = _d0(cx, s)
    for s in range(0, 3):
        cx.d1[s] = _d1(cx, s)
    cx.flags = algebra_flags(cx)
    return cx


def algebra_flags(cx: GradedPerpComplex) -> dict[str, bool]:
    split = cx.split
    n, a, q = split.n, split.a, cx.q
    ii_forms_nonzero = any(q[mu][i][j] for mu in range(a) for i in range(n) for j in range(n))
    image = Echelon(a)
    for i in range(n):
        for j in range(i, n):
            image.add(sparse([q[mu][i][j] for mu in range(a)]))
    ech0 = cx.g_echelon[0]
    # the identity of gl(V) lies in g_0 but is never a bracket
    spans = Echelon(split.dim(0), [split.coords({(i, i): Fraction(1) for i in range(split.size)}, 0)])
    for u in cx.g1:
        for x in cx.gminus1:
            spans.add(split.coords(bracket(u, x), 0))
    g1_abelian = all(not bracket(u, v) for u, v in itertools.combinations(cx.g1, 2))
    g0g1 = all(cx.g_echelon[1].contains(split.coords(bracket(u, v), 1)) for u in cx.g0 for v in cx.g1)
    return {
        "degenerate_input": (not ii_forms_nonzero) or image.rank < a,
        "ii_spans_normal_space": image.rank == a,
        "g1_bracket_spans_g0_mod_scalars": spans.rank == ech0.rank,
        "g_is_subalgebra": g1_abelian and g0g1,
    }


@dataclass(frozen=True)
class CohomologyReport:
    kernel_dims: dict[int, int]
    image_dims: dict[int, int]
    h_dims: dict[int, int]
    algebra_dims: dict[int, int]
    perp_dims: dict[int, int]
    flags: dict[str, bool]

    @property
    def verdict(self) -> bool:
        return all(self.h_dims[p] == 0 for p in (1, 2, 3))

    def to_json(self) -> dict:
        return {
            "h": {f"H^{p},1": self.h_dims[p] for p in (1, 2, 3)},
            "kernel_dims": {f"ker d^{p},1": self.kernel_dims[p] for p in (1, 2, 3)},
            "image_dims": {f"im d^{p + 1},0": self.image_dims[p] for p in (1, 2, 3)},
            "algebra_dims": {"g_-1": self.algebra_dims[-1], "g_0": self.algebra_dims[0],
                             "g_1": self.algebra_dims[1], "total": sum(self.algebra_dims.values())},
            "perp_dims": {str(g): d for g, d in sorted(self.perp_dims.items())},
            "verdict": self.verdict,
            "flags": dict(sorted(self.flags.items())),
        }


def cohomology(cx: GradedPerpComplex) -> CohomologyReport:
    """Exact dims of ``H^{p,1} = ker d^{p,1} / im d^{p+1,0}`` for ``p = 1, 2, 3``."""
    kers, ims, hs = {}, {}, {}
    for p in (1, 2, 3):
        d1 = cx.boundary1(p)
        d0 = cx.boundary0(p)
        if d0.nrows != d1.ncols:
            raise InvariantBreach(f"shape mismatch at p={p}")
        ker = d1.ncols - d1.rank()
        im = d0.rank()
        if ker < im:
            raise InvariantBreach(f"image exceeds kernel at p={p}")
        kers[p], ims[p], hs[p] = ker, im, ker - im
    algebra = {-1: len(cx.gminus1), 0: len(cx.g0), 1: len(cx.g1)}
    return CohomologyReport(kers, ims, hs, algebra, cx.perp_dims(), dict(cx.flags))


def rigidity_report(ii) -> CohomologyReport:
    return cohomology(perp_complex(ii))


def complex_defects(cx: GradedPerpComplex) -> dict[int, bool]:
    """``d^{p,1} o d^{p+1,0} == 0`` for each ``p``."""
    return {p: (cx.boundary1(p) @ cx.boundary0(p)).is_zero() for p in (1, 2, 3)}


def closure_checks(cx: GradedPerpComplex) -> dict[str, bool]:
    split = cx.split
    ann = all(not ii_action(split, cx.q, u) for u in cx.g0)
    ech_m1 = cx.g_echelon[-1]
    ech_0 = cx.g_echelon[0]
    g0_preserves = all(ech_m1.contains(split.coords(bracket(u, x), -1)) for u in cx.g0 for x in cx.gminus1)
    g1_into_g0 = all(ech_0.contains(split.coords(bracket(u, x), 0)) for u in cx.g1 for x in cx.gminus1)
    tangent_abelian = all(not bracket(x, y) for x, y in itertools.combinations(cx.gminus1, 2))
    return {"g0_annihilates_ii": ann, "g0_preserves_gminus1": g0_preserves,
            "g1_bracket_lands_in_g0": g1_into_g0, "tangent_abelian": tangent_abelian}


# ---------------------------------------------------------------------------
# F3 normalisation
# ---------------------------------------------------------------------------


def encode_f3(cx: GradedPerpComplex, cubics: Sequence[SymForm]) -> list[Fraction]:
    """Turn an N-valued cubic ``r`` into a cochain ``T -> (g_perp)_0``.

    For each ``delta`` solve ``u.II = r(., ., e_delta)`` over ``gl(V)_0``; the
    cochain is the class of the solution modulo ``g_0``.  Coordinates are
    ordered ``(delta, j)`` as in the domain of ``d^{1,1}``.
    """
    split = cx.split
    n, a = split.n, split.a
    if len(cubics) != a or any(f.degree != 3 or f.dim != n for f in cubics):
        raise PreconditionError(f"expected {a} cubic forms in {n} variables")
    rows_index = {key: r for r, key in enumerate(
        (mu, al, be) for mu in range(a) for al in range(n) for be in range(al, n))}
    cols = []
    for pair in split.pairs[0]:
        img = ii_action(split, cx.q, {pair: Fraction(1)})
        cols.append({rows_index[k]: v for k, v in img.items()})
    rho = ExactMatrix.from_columns(cols, len(rows_index))
    out: list[Fraction] = []
    for de in range(n):
        rhs = [Fraction(0)] * len(rows_index)
        for (mu, al, be), r in rows_index.items():
            rhs[r] = cubics[mu].entry((al, be, de))
        sol = solve(rho, rhs)
        if sol is None:
            raise PreconditionError("inadmissible F3: a slice is not of the form u.II")
        out.extend(cx.project(split.matrix(sol, 0), 0))
    return out


def decode_f3(cx: GradedPerpComplex, cochain: Sequence) -> list[SymForm]:
    """Inverse of :func:`encode_f3`: apply ``u -> u.II`` slice by slice."""
    split = cx.split
    n, a = split.n, split.a
    m = cx.perp_dim(0)
    slices = []
    for de in range(n):
        u = {pair: as_fraction(c) for pair, c in zip(cx.perp_basis[0], cochain[de * m:(de + 1) * m]) if c}
        slices.append(ii_action(split, cx.q, u))
    forms = []
    for mu in range(a):
        coeffs = {}
        for idx in itertools.combinations_with_replacement(range(n), 3):
            al, be, de = idx
            coeffs[idx] = slices[de].get((mu, al, be), Fraction(0))
        forms.append(SymForm(3, n, coeffs))
    return forms


@dataclass(frozen=True)
class F3Normalization:
    normalized_to_zero: bool
    witness: dict | None
    residual: list[Fraction] | None

    def to_json(self) -> dict:
        return {
            "normalized_to_zero": self.normalized_to_zero,
            "witness": None if self.witness is None else
            [{"row": i, "col": j, "value": str(v)} for (i, j), v in sorted(self.witness.items())],
            "residual": None if self.residual is None else [str(x) for x in self.residual],
        }


def normalize_f3(ii, cubics: Sequence[SymForm], cx: GradedPerpComplex | None = None) -> F3Normalization:
    """Decide whether a fiber motion in ``(g_perp)_1`` brings ``F3`` to zero."""
    cx = cx or perp_complex(ii)
    phi = encode_f3(cx, cubics)
    d11 = cx.boundary1(1)
    if any(d11.apply(phi)):
        raise PreconditionError("inadmissible F3: d^{1,1} of the cochain is nonzero (cubic part not fully symmetric)")
    d20 = cx.boundary0(1)
    sol = solve(d20, phi)
    if sol is not None:
        witness = {pair: c for pair, c in zip(cx.perp_basis[1], sol) if c}
        return F3Normalization(True, witness, None)
    image = d20.transpose().echelon()
    residual = dense_residual(image, phi)
    return F3Normalization(False, None, residual)


def dense_residual(ech: Echelon, vec: Sequence) -> list[Fraction]:
    r = ech.reduce(sparse(vec))
    return [r.get(j, Fraction(0)) for j in range(ech.dim)]


# ---------------------------------------------------------------------------
# JSON input for a raw II
# ---------------------------------------------------------------------------


def ii_from_json(data: dict) -> list[SymForm]:
    from .jets import default_variables, terms_from_json
    from .algebra import MultiPoly

    try:
        n, a = int(data["n"]), int(data["a"])
        quads = data["quadrics"]
        if len(quads) != a:
            raise MalformedInput(f"expected {a} quadrics, got {len(quads)}")
        forms = []
        for qd in quads:
            terms = qd["terms"] if isinstance(qd, dict) else qd
            poly = MultiPoly(default_variables(n), terms_from_json(terms, n))
            if not poly.is_homogeneous(2):
                raise MalformedInput("quadrics must be homogeneous of degree 2")
            forms.append(SymForm.from_poly(poly, 2))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, MalformedInput):
            raise
        raise MalformedInput(f"bad II document: {exc}") from exc
    return forms
