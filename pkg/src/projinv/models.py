"""Graph charts of the model varieties, each with its expected invariants.

Every chart is centred at the identity-corner point of the model, so the
graph is exactly quadratic and all higher Taylor coefficients vanish.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import sympy

from .algebra import MultiPoly
from .errors import InvariantBreach, PreconditionError
from .jets import JetGraph


@dataclass(frozen=True)
class ModelFixture:
    name: str
    params: tuple[int, ...]
    graph: JetGraph | None
    expected: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        return f"{self.name}({','.join(map(str, self.params))})"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "params": list(self.params),
            "graph": self.graph.to_json() if self.graph is not None else None,
            "expected": self.expected,
        }


def _unit(n: int, i: int) -> list[int]:
    return [int(j == i) for j in range(n)]


def _rigidity(chss: bool, sufficient, rigid, note: str = "") -> dict:
    return {"chss": chss, "sufficient_condition": sufficient, "rigid_order_two": rigid, "note": note}


def segre(p: int, q: int, kmax: int = 4) -> ModelFixture:
    """``Seg(P^p x P^q)``: rank-one matrices with corner entry 1, ``z_ij = a_i b_j``."""
    if p < 1 or q < 1:
        raise PreconditionError("segre needs p, q >= 1")
    names = [f"a{i + 1}" for i in range(p)] + [f"b{j + 1}" for j in range(q)]
    n = p + q
    polys = [
        MultiPoly.variable(names, i) * MultiPoly.variable(names, p + j)
        for i in range(p) for j in range(q)
    ]
    graph = JetGraph.from_polys(n, polys, kmax=kmax, variables=names)
    if p == 1 and q == 1:
        rig = _rigidity(True, False, False, "quadric surface")
    elif min(p, q) == 1:
        rig = _rigidity(True, False, True, "rigid, but the second-order sufficient condition fails")
    else:
        rig = _rigidity(True, True, True)
    expected = {
        "n": n,
        "a": p * q,
        "dim_ii": p * q,
        "variety_rank": 2,
        "c2": {
            "description": f"P^{p - 1} disjoint union P^{q - 1}",
            "linear_subspaces": [
                [_unit(n, i) for i in range(p)],
                [_unit(n, p + j) for j in range(q)],
            ],
        },
        "rigidity": rig,
        "symmetry_algebra_dim": (p + 1) ** 2 + (q + 1) ** 2 - 1,
        "lie": {"simple": False, "factors": [["A", p], ["A", q]], "nodes": [1, 1]},
    }
    return ModelFixture("segre", (p, q), graph, expected)


def segre_swap(p: int, q: int) -> tuple[list[int], list[int]]:
    """Permutations taking ``segre(p, q)`` to ``segre(q, p)``.

    Returns ``(tangent, normal)`` with ``tangent[i]`` the index in the swapped
    chart of tangent variable ``i`` and likewise for normal coordinates.
    """
    tangent = [q + i for i in range(p)] + [j for j in range(q)]
    normal = [j * p + i for i in range(p) for j in range(q)]
    return tangent, normal


def quadric(n: int, r: int | None = None, kmax: int = 4) -> ModelFixture:
    """Hypersurface ``z = x_1^2 + ... + x_r^2``."""
    r = n if r is None else r
    if n < 1 or not 1 <= r <= n:
        raise PreconditionError("quadric needs n >= 1 and 1 <= r <= n")
    names = [f"x{i + 1}" for i in range(n)]
    poly = MultiPoly(names)
    for i in range(r):
        poly = poly + MultiPoly.variable(names, i) ** 2
    graph = JetGraph.from_polys(n, [poly], kmax=kmax, variables=names)
    vertex = [_unit(n, i) for i in range(r, n)]
    c2 = {"description": f"rank {r} quadric cone", "linear_subspaces": [vertex] if vertex else []}
    if r == 1:
        c2["description"] = "double hyperplane"
        c2["gauss_image_one_dimensional"] = True
    if r == n and n >= 2:
        rig = _rigidity(True, False, False, "quadric hypersurface: third-order data needed")
        lie = _quadric_lie(n)
        sym = (n + 2) * (n + 1) // 2 + 1
    else:
        rig = _rigidity(False, None, None, "not covered")
        lie = None
        sym = None
    expected = {
        "n": n, "a": 1, "dim_ii": 1, "variety_rank": 2, "c2": c2,
        "rigidity": rig, "symmetry_algebra_dim": sym, "lie": lie,
    }
    return ModelFixture("quadric", (n, r), graph, expected)


def _quadric_lie(n: int) -> dict | None:
    # Q^n = SO(n+2)/P_1 with V the standard representation
    if n == 2:
        return {"simple": False, "factors": [["A", 1], ["A", 1]], "nodes": [1, 1]}
    if n == 4:
        return {"simple": True, "type": "A", "rank": 3, "node": 2, "module": [0, 1, 0]}
    if n % 2:
        rank = (n + 1) // 2
        return {"simple": True, "type": "B", "rank": rank, "node": 1, "module": _fund(rank, 1)}
    rank = (n + 2) // 2
    return {"simple": True, "type": "D", "rank": rank, "node": 1, "module": _fund(rank, 1)}


def _fund(rank: int, i: int) -> list[int]:
    return [int(j == i - 1) for j in range(rank)]


def grassmannian2(m: int, kmax: int = 4) -> ModelFixture:
    """``G(2, m)`` in the Plucker chart ``E = <e1 + x.e, e2 + y.e>``.

    Tangent variables are ``x_1..x_{m-2}, y_1..y_{m-2}``; normal coordinates
    are the minors ``x_i y_j - x_j y_i`` for ``i < j``.
    """
    if m < 4:
        raise PreconditionError("grassmannian2 needs m >= 4")
    k = m - 2
    names = [f"x{i + 1}" for i in range(k)] + [f"y{i + 1}" for i in range(k)]
    X = [MultiPoly.variable(names, i) for i in range(k)]
    Y = [MultiPoly.variable(names, k + i) for i in range(k)]
    polys = [X[i] * Y[j] - X[j] * Y[i] for i, j in itertools.combinations(range(k), 2)]
    graph = JetGraph.from_polys(2 * k, polys, kmax=kmax, variables=names)
    a = comb(m, 2) - 1 - 2 * k
    if m == 4:
        rig = _rigidity(True, False, False, "G(2,4) is the quadric Q^4")
    else:
        rig = _rigidity(True, True, True)
    expected = {
        "n": 2 * k,
        "a": a,
        "dim_ii": a,
        "variety_rank": 2,
        "c2": {"description": f"Seg(P^1 x P^{k - 1}) (rank-one 2 x {k} matrices)", "linear_subspaces": []},
        "rigidity": rig,
        "symmetry_algebra_dim": m * m,
        "lie": {"simple": True, "type": "A", "rank": m - 1, "node": 2, "module": _fund(m - 1, 2)},
    }
    return ModelFixture("grassmannian2", (m,), graph, expected)


def veronese2(n: int, kmax: int = 4) -> ModelFixture:
    """Quadratic Veronese chart ``z_ij = x_i x_j`` for ``i <= j``."""
    if n < 1:
        raise PreconditionError("veronese2 needs n >= 1")
    names = [f"x{i + 1}" for i in range(n)]
    polys = [
        MultiPoly.variable(names, i) * MultiPoly.variable(names, j)
        for i, j in itertools.combinations_with_replacement(range(n), 2)
    ]
    graph = JetGraph.from_polys(n, polys, kmax=kmax, variables=names)
    a = n * (n + 1) // 2
    expected = {
        "n": n, "a": a, "dim_ii": a, "variety_rank": 2,
        "c2": {"description": "empty", "linear_subspaces": [], "empty": True},
        "rigidity": _rigidity(False, None, None, "not a CHSS in its minimal embedding"),
        "symmetry_algebra_dim": (n + 1) ** 2,
        "lie": None,
    }
    return ModelFixture("veronese2", (n,), graph, expected)


def linear_space(n: int, a: int = 0, kmax: int = 4) -> ModelFixture:
    """``P^n`` linearly embedded: the zero graph."""
    graph = JetGraph.zero(n, a, kmax)
    expected = {
        "n": n, "a": a, "dim_ii": 0, "variety_rank": 1,
        "c2": {"description": "all of PT", "linear_subspaces": [[_unit(n, i) for i in range(n)]]},
        "rigidity": _rigidity(False, None, None, "rank one"),
        "symmetry_algebra_dim": None,
        "lie": None,
    }
    return ModelFixture("linear", (n, a), graph, expected)


def spinor10() -> ModelFixture:
    """Metadata-only stub for ``D5/P5`` in ``P^15``."""
    expected = {
        "n": 10, "a": 5, "dim_ii": 5, "variety_rank": 2, "c2": None,
        "rigidity": _rigidity(True, True, True),
        "symmetry_algebra_dim": 46,
        "lie": {"simple": True, "type": "D", "rank": 5, "node": 5, "module": _fund(5, 5)},
        "stub": True,
    }
    return ModelFixture("spinor10", (), None, expected)


def cayley_plane() -> ModelFixture:
    """Metadata-only stub for ``E6/P6`` in ``P^26``."""
    expected = {
        "n": 16, "a": 10, "dim_ii": 10, "variety_rank": 2, "c2": None,
        "rigidity": _rigidity(True, True, True),
        "symmetry_algebra_dim": 79,
        "lie": {"simple": True, "type": "E", "rank": 6, "node": 6, "module": _fund(6, 6)},
        "stub": True,
    }
    return ModelFixture("cayley_plane", (), None, expected)


def congruence_diagonalize(m) -> tuple[sympy.Matrix, list]:
    """Rational ``M`` with ``M^T m M`` diagonal (symmetric Gaussian elimination)."""
    a = sympy.Matrix(m).applyfunc(sympy.Rational)
    n = a.rows
    total = sympy.eye(n)
    for i in range(n):
        if a[i, i] == 0:
            j = next((j for j in range(i + 1, n) if a[j, j] != 0), None)
            if j is not None:
                step = sympy.eye(n).elementary_col_op("n<->m", col1=i, col2=j)
            else:
                j = next((j for j in range(i + 1, n) if a[i, j] != 0), None)
                if j is None:
                    continue
                step = sympy.eye(n)
                step[j, i] = 1
            a = step.T * a * step
            total = total * step
        step = sympy.eye(n)
        for j in range(i + 1, n):
            step[i, j] = -a[i, j] / a[i, i]
        a = step.T * a * step
        total = total * step
    return total, [a[i, i] for i in range(n)]


def quadric_equivalence(a, b) -> sympy.Matrix:
    """``P`` over an algebraic extension with ``P^T b P = a`` exactly.

    The forms must have equal rank.  Over the rationals this can fail (the
    signature is an obstruction), so the square roots of the diagonal ratios
    are adjoined.
    """
    ma, da = congruence_diagonalize(a)
    mb, db = congruence_diagonalize(b)
    order_a = sorted(range(len(da)), key=lambda i: da[i] == 0)
    order_b = sorted(range(len(db)), key=lambda i: db[i] == 0)
    if sum(x != 0 for x in da) != sum(x != 0 for x in db):
        raise PreconditionError("forms have different ranks")
    n = len(da)
    perm_a = sympy.zeros(n)
    perm_b = sympy.zeros(n)
    for k, (i, j) in enumerate(zip(order_a, order_b)):
        perm_a[i, k] = 1
        perm_b[j, k] = 1
    ma, mb = ma * perm_a, mb * perm_b
    da = [da[i] for i in order_a]
    db = [db[i] for i in order_b]
    scale = sympy.diag(*[sympy.sqrt(x / y) if y != 0 else 1 for x, y in zip(da, db)])
    p = mb * scale * ma.inv()
    residual = (p.T * sympy.Matrix(b) * p - sympy.Matrix(a)).applyfunc(sympy.expand)
    if residual != sympy.zeros(n):
        raise InvariantBreach("change of basis failed to verify")
    return p


def hypersurface_equivalence(f: ModelFixture, g: ModelFixture) -> sympy.Matrix:
    """``P`` with ``g(P x) = f(x)`` for two exactly quadratic hypersurface charts."""
    for fx in (f, g):
        if fx.graph is None or fx.graph.a != 1:
            raise PreconditionError("hypersurface charts only")
        if any(not fx.graph.coefficient(0, d).is_zero() for d in range(3, fx.graph.kmax + 1)):
            raise PreconditionError("chart is not exactly quadratic")
    if f.graph.n != g.graph.n:
        raise PreconditionError("dimension mismatch")
    ma = [[sympy.Rational(x.numerator, x.denominator) for x in row] for row in f.graph.coefficient(0, 2).matrix()]
    mb = [[sympy.Rational(x.numerator, x.denominator) for x in row] for row in g.graph.coefficient(0, 2).matrix()]
    return quadric_equivalence(ma, mb)


CATALOG = {
    "segre": segre,
    "quadric": quadric,
    "grassmannian2": grassmannian2,
    "veronese2": veronese2,
    "linear": linear_space,
    "spinor10": spinor10,
    "cayley_plane": cayley_plane,
}


def build(name: str, *params: int, **kw) -> ModelFixture:
    try:
        ctor = CATALOG[name]
    except KeyError:
        raise PreconditionError(f"unknown catalog entry {name!r}; choose from {sorted(CATALOG)}") from None
    return ctor(*params, **kw)


def rank_two_chss_fixtures() -> list[ModelFixture]:
    return [segre(1, 2), segre(2, 2), segre(1, 3), segre(2, 3), grassmannian2(4),
            grassmannian2(5), quadric(2, 2), quadric(3, 3), quadric(4, 4)]
