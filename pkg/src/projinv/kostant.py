"""Root systems, Freudenthal multiplicities and Kostant's weight formula.

Conventions (Bourbaki numbering).  ``cartan[i][j] = <alpha_i, alpha_j^vee>``,
so row ``i`` is the simple root ``alpha_i`` written in fundamental weights.
Weights are tuples of integers in the fundamental-weight basis unless said
otherwise; root coordinates are Fractions.
"""

from __future__ import annotations

import itertools
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .algebra import ExactMatrix, solve
from .errors import InvariantBreach, PreconditionError

Weight = tuple[int, ...]

POSITIVE_ROOT_COUNTS = {"E6": 36, "E7": 63, "E8": 120, "F4": 24, "G2": 6}


def cartan_matrix(kind: str, rank: int) -> list[list[int]]:
    kind = kind.upper()
    valid = {
        "A": rank >= 1, "B": rank >= 2, "C": rank >= 2, "D": rank >= 3,
        "E": rank in (6, 7, 8), "F": rank == 4, "G": rank == 2,
    }
    if not valid.get(kind, False):
        raise PreconditionError(f"invalid root system {kind}{rank}")
    A = [[2 if i == j else 0 for j in range(rank)] for i in range(rank)]

    def link(i, j, aij=-1, aji=-1):
        A[i][j], A[j][i] = aij, aji

    if kind in "ABCD":
        for i in range(rank - 1):
            link(i, i + 1)
        if kind == "B":
            link(rank - 2, rank - 1, -2, -1)
        elif kind == "C":
            link(rank - 2, rank - 1, -1, -2)
        elif kind == "D":
            A[rank - 2][rank - 1] = A[rank - 1][rank - 2] = 0
            link(rank - 3, rank - 1)
    elif kind == "E":
        link(0, 2)
        link(1, 3)
        for i in range(2, rank - 1):
            link(i, i + 1)
    elif kind == "F":
        link(0, 1)
        link(1, 2, -2, -1)
        link(2, 3)
    elif kind == "G":
        link(0, 1, -1, -3)
    return A


def _inverse(m: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    n = len(m)
    mat = ExactMatrix.from_dense(m)
    cols = []
    for j in range(n):
        sol = solve(mat, [int(i == j) for i in range(n)])
        if sol is None:
            raise InvariantBreach("Cartan matrix is singular")
        cols.append(sol)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class RootSystem:
    """A (possibly reducible) root system given by its Cartan matrix."""

    label: str
    cartan: tuple[tuple[int, ...], ...]
    components: tuple[tuple[str, int], ...] = field(default=())

    @property
    def rank(self) -> int:
        return len(self.cartan)

    @cached_property
    def simple_roots(self) -> list[Weight]:
        return [tuple(r) for r in self.cartan]

    @cached_property
    def root_lengths(self) -> list[Fraction]:
        """``(alpha_i, alpha_i) / 2`` normalised so the shortest root in each
        component has value 1."""
        r = self.rank
        d: list[Fraction | None] = [None] * r
        for start in range(r):
            if d[start] is not None:
                continue
            d[start] = Fraction(1)
            comp, stack = [start], [start]
            while stack:
                i = stack.pop()
                for j in range(r):
                    if j != i and self.cartan[i][j] and d[j] is None:
                        # (a_i, a_j) = A_ij d_j = A_ji d_i
                        d[j] = d[i] * self.cartan[j][i] / self.cartan[i][j]
                        comp.append(j)
                        stack.append(j)
            low = min(d[i] for i in comp)
            for i in comp:
                d[i] = d[i] / low
        return d  # type: ignore[return-value]

    @cached_property
    def symmetric_form(self) -> list[list[Fraction]]:
        """``(alpha_i, alpha_j)`` on simple roots."""
        d = self.root_lengths
        return [[self.cartan[i][j] * d[j] for j in range(self.rank)] for i in range(self.rank)]

    @cached_property
    def _to_root(self) -> list[list[Fraction]]:
        # m = A^T c, so c = (A^T)^{-1} m
        at = [[self.cartan[j][i] for j in range(self.rank)] for i in range(self.rank)]
        return _inverse(at)

    def to_root_coords(self, mu: Sequence[int]) -> tuple[Fraction, ...]:
        return tuple(sum((row[j] * mu[j] for j in range(self.rank)), Fraction(0))
                     for row in self._to_root)

    def from_root_coords(self, c: Sequence) -> tuple:
        out = []
        for j in range(self.rank):
            s = sum((Fraction(c[i]) * self.cartan[i][j] for i in range(self.rank)), Fraction(0))
            out.append(int(s) if s.denominator == 1 else s)
        return tuple(out)

    def inner(self, mu: Sequence[int], nu: Sequence[int]) -> Fraction:
        """``(mu, nu)`` for weights in fundamental coordinates."""
        c = self.to_root_coords(mu)
        # (alpha_i, nu) = d_i * <nu, alpha_i^vee> = d_i * nu_i
        return sum((c[i] * self.root_lengths[i] * nu[i] for i in range(self.rank)), Fraction(0))

    @cached_property
    def positive_roots(self) -> list[tuple[int, ...]]:
        """Positive roots in simple-root coordinates, ordered by height."""
        r = self.rank
        simple = [tuple(int(i == j) for j in range(r)) for i in range(r)]
        roots = set(simple)
        layer = list(simple)
        while layer:
            nxt = []
            for beta in layer:
                pairing = [sum(beta[k] * self.cartan[k][i] for k in range(r)) for i in range(r)]
                for i in range(r):
                    p = 0
                    down = list(beta)
                    while True:
                        down[i] -= 1
                        if tuple(down) in roots:
                            p += 1
                        else:
                            break
                    if p - pairing[i] > 0:
                        up = list(beta)
                        up[i] += 1
                        up = tuple(up)
                        if up not in roots:
                            roots.add(up)
                            nxt.append(up)
            layer = nxt
        return sorted(roots, key=lambda b: (sum(b), b))

    def root_to_weight(self, beta: Sequence[int]) -> Weight:
        return tuple(sum(beta[i] * self.cartan[i][j] for i in range(self.rank)) for j in range(self.rank))

    def coroot_pairing(self, mu: Sequence[int], beta: Sequence[int]) -> Fraction:
        """``<mu, beta^vee>`` for ``beta`` in root coordinates."""
        num = sum((beta[i] * self.root_lengths[i] * mu[i] for i in range(self.rank)), Fraction(0))
        b = self.root_to_weight(beta)
        norm = self.inner(b, b)
        return 2 * num / norm

    @cached_property
    def rho(self) -> Weight:
        return (1,) * self.rank

    @cached_property
    def highest_root(self) -> Weight:
        return self.root_to_weight(self.positive_roots[-1])

    def reflect(self, mu: Sequence[int], i: int) -> Weight:
        m = mu[i]
        return tuple(x - m * a for x, a in zip(mu, self.cartan[i]))

    def dominant_conjugate(self, mu: Sequence[int]) -> Weight:
        mu = tuple(mu)
        while True:
            for i in range(self.rank):
                if mu[i] < 0:
                    mu = self.reflect(mu, i)
                    break
            else:
                return mu

    def orbit(self, mu: Sequence[int]) -> list[Weight]:
        mu = tuple(mu)
        seen = {mu}
        stack = [mu]
        while stack:
            x = stack.pop()
            for i in range(self.rank):
                if x[i]:
                    y = self.reflect(x, i)
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
        return sorted(seen)

    def is_dominant(self, mu: Sequence[int]) -> bool:
        return all(x >= 0 for x in mu)

    def height(self, mu: Sequence[int]) -> Fraction:
        return sum(self.to_root_coords(mu), Fraction(0))


def build_root_system(kind: str, rank: int | None = None) -> RootSystem:
    """``build_root_system("A", 4)`` or ``build_root_system("E6")``."""
    if rank is None:
        kind, rank = kind[0], int(kind[1:])
    kind = kind.upper()
    A = cartan_matrix(kind, rank)
    return RootSystem(f"{kind}{rank}", tuple(tuple(r) for r in A), ((kind, rank),))


def product_root_system(*systems: RootSystem) -> RootSystem:
    """Orthogonal sum, used for the Segre factors."""
    r = sum(s.rank for s in systems)
    A = [[0] * r for _ in range(r)]
    off = 0
    for s in systems:
        for i in range(s.rank):
            for j in range(s.rank):
                A[off + i][off + j] = s.cartan[i][j]
        off += s.rank
    return RootSystem("x".join(s.label for s in systems), tuple(tuple(x) for x in A),
                      tuple(c for s in systems for c in s.components))


# ---------------------------------------------------------------------------
# Kostant
# ---------------------------------------------------------------------------


def _node(rs: RootSystem, i0: int) -> int:
    if not 1 <= i0 <= rs.rank:
        raise PreconditionError(f"node must lie in 1..{rs.rank}")
    return i0 - 1


def kostant_weight(rs: RootSystem, lam: Sequence[int], i0: int) -> Weight:
    """``sigma_{i0}(lambda + rho) - rho`` (``i0`` is 1-based)."""
    i = _node(rs, i0)
    if len(lam) != rs.rank:
        raise PreconditionError("weight has the wrong length")
    shifted = tuple(l + r for l, r in zip(lam, rs.rho))
    return tuple(x - r for x, r in zip(rs.reflect(shifted, i), rs.rho))


def affine_reflect(rs: RootSystem, mu: Sequence[int], i0: int) -> Weight:
    return kostant_weight(rs, mu, i0)


def grade_of_weight(rs: RootSystem, mu: Sequence[int], i0: int) -> Fraction:
    """Coefficient of ``alpha_{i0}`` in the simple-root expansion of ``mu``."""
    return rs.to_root_coords(mu)[_node(rs, i0)]


def dual_weight(rs: RootSystem, lam: Sequence[int]) -> Weight:
    """Highest weight of the dual module, ``-w0(lambda)``."""
    # the lowest weight of V(lambda) is w0(lambda); find it as the orbit
    # element of minimal height
    low = min(rs.orbit(lam), key=rs.height)
    return tuple(-x for x in low)


def cohomology_degree(rs: RootSystem, lam: Sequence[int], i0: int) -> Fraction:
    """Grade ``p`` in which ``H^1(T, V(lambda))`` sits when ``T = g_{-1}``.

    Kostant's formula is stated for the positive nilradical; for ``T = g_{-1}``
    the cohomology is the twist of ``H^1(g_1, V(lambda)*)``, whose lowest
    weight is ``-(sigma(lambda* + rho) - rho)``.  Its grade is therefore the
    negative of the grade of the Kostant weight of the dual module.
    """
    return -grade_of_weight(rs, kostant_weight(rs, dual_weight(rs, lam), i0), i0)


def levi_dimension(rs: RootSystem, mu: Sequence[int], i0: int) -> int:
    """Weyl dimension of the Levi module of highest weight ``mu``."""
    i = _node(rs, i0)
    num, den = Fraction(1), Fraction(1)
    for beta in rs.positive_roots:
        if beta[i]:
            continue
        num *= rs.coroot_pairing([m + 1 for m in mu], beta)
        den *= rs.coroot_pairing(rs.rho, beta)
    val = num / den
    if val.denominator != 1 or val < 0:
        raise PreconditionError(f"{mu} is not dominant for the Levi factor")
    return int(val)


def dominant_for_levi(rs: RootSystem, mu: Sequence[int], i0: int) -> bool:
    i = _node(rs, i0)
    return all(x >= 0 for j, x in enumerate(mu) if j != i)


# ---------------------------------------------------------------------------
# Freudenthal and module decomposition
# ---------------------------------------------------------------------------


def dominant_weights_below(rs: RootSystem, lam: Sequence[int]) -> list[Weight]:
    """Dominant ``mu`` with ``lambda - mu`` a non-negative root combination."""
    c = rs.to_root_coords(lam)
    bounds = [int(x) for x in c]  # floor, since c >= 0 for dominant lambda
    out = []
    for ks in itertools.product(*(range(b + 1) for b in bounds)):
        mu = tuple(l - sum(k * rs.cartan[i][j] for i, k in enumerate(ks)) for j, l in enumerate(lam))
        if rs.is_dominant(mu):
            out.append(mu)
    return sorted(out, key=lambda m: (-rs.height(m), m))


def freudenthal(rs: RootSystem, lam: Sequence[int]) -> dict[Weight, int]:
    """Multiplicities of the dominant weights of ``V(lambda)``."""
    lam = tuple(lam)
    if not rs.is_dominant(lam):
        raise PreconditionError("highest weight must be dominant")
    lam_c = rs.to_root_coords(lam)
    lr = tuple(l + r for l, r in zip(lam, rs.rho))
    top = rs.inner(lr, lr)
    pos = [(beta, rs.root_to_weight(beta)) for beta in rs.positive_roots]
    mult: dict[Weight, int] = {}
    for mu in dominant_weights_below(rs, lam):
        if mu == lam:
            mult[mu] = 1
            continue
        total = Fraction(0)
        for beta, bw in pos:
            k = 1
            while True:
                nu = tuple(m + k * b for m, b in zip(mu, bw))
                nu_c = rs.to_root_coords(nu)
                if any(x > y for x, y in zip(nu_c, lam_c)):
                    break
                m_nu = mult.get(rs.dominant_conjugate(nu), 0)
                if m_nu:
                    total += m_nu * rs.inner(nu, bw)
                k += 1
        mr = tuple(m + r for m, r in zip(mu, rs.rho))
        denom = top - rs.inner(mr, mr)
        val = 2 * total / denom
        if val.denominator != 1:
            raise InvariantBreach(f"non-integral multiplicity {val} at {mu}")
        if val:
            mult[mu] = int(val)
    return mult


def character(rs: RootSystem, lam: Sequence[int]) -> Counter:
    """Full weight multiset of ``V(lambda)``."""
    out: Counter = Counter()
    for mu, m in freudenthal(rs, lam).items():
        for w in rs.orbit(mu):
            out[w] += m
    return out


def module_dimension(rs: RootSystem, lam: Sequence[int]) -> int:
    return sum(character(rs, lam).values())


def tensor_weights(a: Counter, b: Counter) -> Counter:
    out: Counter = Counter()
    for w1, m1 in a.items():
        for w2, m2 in b.items():
            out[tuple(x + y for x, y in zip(w1, w2))] += m1 * m2
    return out


def dual_character(ch: Counter) -> Counter:
    return Counter({tuple(-x for x in w): m for w, m in ch.items()})


def decompose_module(rs: RootSystem, weights: Counter) -> list[Weight]:
    """Greedy peeling of a weight multiset into irreducible highest weights."""
    remaining = Counter({w: m for w, m in weights.items() if m})
    if any(m < 0 for m in remaining.values()):
        raise PreconditionError("negative multiplicity in input")
    out = []
    while remaining:
        top = max(remaining, key=lambda w: (rs.height(w), w))
        if not rs.is_dominant(top):
            raise PreconditionError(f"maximal weight {top} is not dominant; multiset is not a character")
        out.append(top)
        for w, m in character(rs, top).items():
            left = remaining.get(w, 0) - m
            if left < 0:
                raise PreconditionError(f"not decomposable: weight {w} would get multiplicity {left}")
            if left:
                remaining[w] = left
            else:
                remaining.pop(w, None)
    return out


def end_module_weights(rs: RootSystem, lam_v: Sequence[int], max_dim: int = 12) -> Counter:
    """Weights of ``V (x) V*`` for ``V = V(lambda_v)``; desk scale only."""
    ch = character(rs, lam_v)
    if sum(ch.values()) > max_dim:
        raise PreconditionError(f"dim V = {sum(ch.values())} exceeds the cap {max_dim}")
    return tensor_weights(ch, dual_character(ch))


def adjoint_weights(rs: RootSystem) -> list[Weight]:
    """Highest weights of the adjoint module, one per simple factor."""
    out = []
    off = 0
    for kind, r in rs.components or ((rs.label[0], rs.rank),):
        sub = build_root_system(kind, r)
        hr = sub.highest_root
        w = [0] * rs.rank
        w[off:off + r] = hr
        out.append(tuple(w))
        off += r
    return out


def perp_components(rs: RootSystem, lam_v: Sequence[int], max_dim: int = 12) -> list[Weight]:
    """Irreducible components of ``gl(V)/g`` where ``g`` = semisimple part + scalars."""
    comps = Counter(decompose_module(rs, end_module_weights(rs, lam_v, max_dim)))
    for w in adjoint_weights(rs) + [(0,) * rs.rank]:
        if comps[w] <= 0:
            raise InvariantBreach(f"expected component {w} missing from End(V)")
        comps[w] -= 1
    return sorted(comps.elements(), key=lambda w: (-rs.height(w), w))


@dataclass(frozen=True)
class KostantPrediction:
    component: Weight
    dimension: int
    weight: Weight
    grade: Fraction
    cohomology_degree: Fraction
    levi_dim: int

    def to_json(self) -> dict:
        return {"component": list(self.component), "dimension": self.dimension,
                "weight": list(self.weight), "grade": str(self.grade),
                "cohomology_degree": str(self.cohomology_degree), "levi_dim": self.levi_dim}


def predict(rs: RootSystem, lam: Sequence[int], i0: int) -> KostantPrediction:
    lam = tuple(lam)
    mu = kostant_weight(rs, lam, i0)
    dual_mu = kostant_weight(rs, dual_weight(rs, lam), i0)
    return KostantPrediction(
        component=lam,
        dimension=module_dimension(rs, lam),
        weight=mu,
        grade=grade_of_weight(rs, mu, i0),
        cohomology_degree=cohomology_degree(rs, lam, i0),
        levi_dim=levi_dimension(rs, dual_mu, i0),
    )
