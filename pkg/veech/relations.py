"""Linear relations among roots of unity.

Order bounds for primitive relations over a field of bounded degree, subset
decomposition of a vanishing relation, and the two exhaustive searches over
roots of odd order that bound the torsion of admissible solutions.
"""
import asyncio
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations, permutations, product
from math import ceil, gcd
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
from sympy import primerange

from veech.config import debug_print
from veech.errors import InvalidQueryError, NotARelationError
from veech.exactnum import CycloElem, RootSum, cyclotomic_table
from veech.monitoring import gather_parallel
from veech.search import determinant_sums, ratio_fixing_group
from veech.utils import divisors, euler_phi, factorization, lcm, multiplicative_order_of_root, units

MAX_RELATION_LENGTH = 12
PAIR_MODULUS = 63
DET_MODULUS = 819
SPOT_CHECK_SAMPLES = 1000
M2_CHUNK = 64


# ---------------------------------------------------------------------------
# Order bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrderBoundQuery:
    k: int
    d: int

    def __post_init__(self):
        if self.k < 2:
            raise InvalidQueryError(f"relation length k must be >= 2, got {self.k}")
        if self.d < 1:
            raise InvalidQueryError(f"degree bound d must be >= 1, got {self.d}")


def prime_cost(p: int, d: int) -> int:
    """Contribution of a prime dividing the order exactly once"""
    return (p - 1) // gcd(d, p - 1) - 1


def dz_admissible(n: int, q: OrderBoundQuery, strict: bool = False) -> bool:
    """Order bound for a primitive relation of length q.k over a field of degree q.d.

    strict applies the conditions literally; otherwise n passes when some
    multiple of n passes literally, which makes the test divisor-monotone.
    """
    if n < 1:
        raise InvalidQueryError(f"order must be positive, got {n}")
    total = 0
    for p, e in factorization(n).items():
        if e >= 2:
            if (2 * q.d) % p ** (e - 1):
                return False
        elif strict or (2 * q.d) % p:
            total += prime_cost(p, q.d)
    return total <= q.k - 2


def dz_enumerate_maximal(q: OrderBoundQuery, prime_cap: int = 100) -> Set[int]:
    """Maximal admissible orders under divisibility"""
    base = 1
    for p, e in factorization(2 * q.d).items():
        base *= p ** (e + 1)
    budget = q.k - 2
    optional = []
    for p in primerange(2, prime_cap + 1):
        if base % p == 0:
            continue
        cost = prime_cost(p, q.d)
        if cost == 0:
            base *= p
        elif cost <= budget:
            optional.append((p, cost))
    feasible = []
    for size in range(len(optional) + 1):
        for chosen in combinations(optional, size):
            if sum(cost for _, cost in chosen) <= budget:
                feasible.append(frozenset(p for p, _ in chosen))
    maximal = [s for s in feasible if not any(s < other for other in feasible)]
    return {base * reduce(lambda a, b: a * b, s, 1) for s in maximal}


# ---------------------------------------------------------------------------
# Subrelations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RelationTerm:
    coeff: CycloElem
    root: Tuple[int, int]

    def __post_init__(self):
        if self.coeff.is_zero():
            raise InvalidQueryError("relation terms need a nonzero coefficient")

    def value(self) -> CycloElem:
        return self.coeff * CycloElem.zeta(*self.root)


@dataclass(frozen=True)
class PartitionResult:
    primitive: bool
    vanishing_subsets: Tuple[Tuple[int, ...], ...]
    partitions: Tuple[Tuple[Tuple[int, ...], ...], ...]


def relation_order(terms: Sequence[RelationTerm]) -> int:
    """Size of the group generated by the ratios z_j / z_1"""
    n0, e0 = terms[0].root
    orders = []
    for term in terms[1:]:
        n, e = term.root
        m = lcm(n, n0)
        orders.append(multiplicative_order_of_root(e * (m // n) - e0 * (m // n0), m))
    return lcm(*orders) if orders else 1


def residue_relation(c: Sequence[CycloElem], n: int, exponents: Sequence[int], power: int = 1) -> List[RelationTerm]:
    """The 2g-term relation sum c_j (x_j^r - x_j^-r) = 0"""
    terms = []
    for cj, e in zip(c, exponents):
        terms.append(RelationTerm(cj, (n, (power * e) % n)))
        terms.append(RelationTerm(-cj, (n, (-power * e) % n)))
    return terms


def primitive_partition(terms: Sequence[RelationTerm]) -> PartitionResult:
    k = len(terms)
    if k > MAX_RELATION_LENGTH:
        raise InvalidQueryError(f"subset enumeration is limited to {MAX_RELATION_LENGTH} terms, got {k}")
    values = [term.value() for term in terms]
    modulus = lcm(*(v.modulus for v in values))
    values = [v.lift(modulus) for v in values]
    if not reduce(lambda a, b: a + b, values).is_zero():
        raise NotARelationError("the full sum does not vanish")
    vanishing = []
    for mask in range(1, (1 << k) - 1):
        members = tuple(i for i in range(k) if mask >> i & 1)
        if reduce(lambda a, b: a + b, (values[i] for i in members)).is_zero():
            vanishing.append(members)
    minimal = [s for s in vanishing if not any(set(o) < set(s) for o in vanishing)]
    partitions = []

    def cover(remaining: frozenset, blocks: List[Tuple[int, ...]]):
        if not remaining:
            partitions.append(tuple(blocks))
            return
        first = min(remaining)
        for block in minimal:
            if block[0] == first and remaining.issuperset(block):
                cover(remaining - set(block), blocks + [block])

    if vanishing:
        cover(frozenset(range(k)), [])
    return PartitionResult(not vanishing, tuple(vanishing), tuple(p for p in partitions if len(p) > 1))


# ---------------------------------------------------------------------------
# Pair search over roots of order dividing 63
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class PairHit:
    a: int
    b: int
    degree: int
    orders: Tuple[int, int]

    @property
    def classification(self) -> str:
        o1, o2 = self.orders
        if gcd(o1, o2) in (7, 9):
            return "gcd-7-9"
        if {o1, o2} == {7, 3}:
            return "orders-7-3"
        if {o1, o2} == {9, 3}:
            return "orders-9-3"
        return "residual"


def _cosine(n: int, e: int) -> RootSum:
    return RootSum(n, {e: 1, -e: 1})


def cosine_degree(order: int) -> int:
    """Degree of 2cos(2*pi/order) over Q"""
    return 1 if order <= 2 else euler_phi(order) // 2


def pair_search_63() -> List[PairHit]:
    n = PAIR_MODULUS
    group = units(n)
    cosines = {e: _cosine(n, e) for e in range(1, n)}
    hits = []
    for a in range(1, n):
        for b in range(1, n):
            if b in (a, n - a):
                continue
            top, bottom = cosines[a], cosines[b]
            fixing = sum(1 for k in group
                         if (cosines[a * k % n] * bottom - top * cosines[b * k % n]).is_zero())
            degree = len(group) // fixing
            if degree in (1, 3):
                hits.append(PairHit(a, b, degree, (multiplicative_order_of_root(a, n),
                                                    multiplicative_order_of_root(b, n))))
    debug_print(f"[DEBUG] pair_search_63 - {len(hits)} pairs with rational or cubic ratio")
    return sorted(hits)


@dataclass
class PairAudit:
    total: int
    classes: Dict[str, int]
    strict_pass: bool
    extended_pass: bool
    order_21_cosine_degree: int

    def lines(self) -> List[str]:
        strict = "PASS" if self.strict_pass else "FAIL"
        extended = "PASS" if self.extended_pass else "FAIL"
        return [
            f"pairs: {self.total}",
            "classes: " + ", ".join(f"{k}={v}" for k, v in sorted(self.classes.items())),
            f"gcd in {{7,9}} or {{7,3}}: {strict}",
            f"gcd in {{7,9}} or an order-3 partner of order 7 or 9: {extended}",
            f"cosine degree at order 21: {self.order_21_cosine_degree}",
        ]


def audit_pairs(hits: Sequence[PairHit]) -> PairAudit:
    classes = Counter(hit.classification for hit in hits)
    strict = all(hit.classification in ("gcd-7-9", "orders-7-3") for hit in hits)
    extended = "residual" not in classes
    return PairAudit(len(hits), dict(classes), strict, extended, cosine_degree(21))


# ---------------------------------------------------------------------------
# Determinant search over roots of order dividing 819
# ---------------------------------------------------------------------------

def det_terms() -> Tuple[np.ndarray, np.ndarray]:
    """48 (weight, exponent multipliers) pairs of the 3x3 determinant with rows
    y + y^-1, y^2 - y^-2, y^8 + y^-8"""
    weights, alphas = [], []
    for order in permutations(range(3)):
        inversions = sum(1 for i, j in combinations(range(3), 2) if order[i] > order[j])
        sign = -1 if inversions % 2 else 1
        for eps in product((1, -1), repeat=3):
            alpha = [0, 0, 0]
            alpha[order[0]] += eps[0]
            alpha[order[1]] += 2 * eps[1]
            alpha[order[2]] += 8 * eps[2]
            weights.append(sign * eps[1])
            alphas.append(alpha)
    return np.array(weights, dtype=np.int64), np.array(alphas, dtype=np.int64)


def det_vanishes_exactly(n0: int, triple: Sequence[int]) -> bool:
    weights, alphas = det_terms()
    exps = (alphas @ np.array(triple, dtype=np.int64)) % n0
    acc = np.zeros(n0, dtype=np.int64)
    np.add.at(acc, exps, weights)
    return not np.any(acc @ cyclotomic_table(n0).dense)


@dataclass
class DetChunkResult:
    m1: int
    searched: int
    float_survivors: int
    confirmed: List[Tuple[int, int, int]]
    spot_checked: int
    spot_mismatches: int


def _allowed_exponents(n0: int, m1: int) -> np.ndarray:
    values = np.arange(1, n0, dtype=np.int64)
    mask = (np.gcd(values, n0) >= m1) & (values != m1) & (values != n0 - m1)
    return values[mask]


def _det_chunk(item: Tuple[int, int, int, int, float, int]) -> DetChunkResult:
    n0, m1, lo, hi, tolerance, samples = item
    allowed = _allowed_exponents(n0, m1)
    m2_values = allowed[(allowed >= lo) & (allowed < hi)]
    pairs = [(m2, m3) for m2 in m2_values for m3 in allowed[allowed > m2] if m3 != n0 - m2]
    result = DetChunkResult(m1, len(pairs), 0, [], 0, 0)
    if not pairs:
        return result
    grid = np.array(pairs, dtype=np.int64)
    weights, alphas = det_terms()
    exps = (alphas[:, 0:1] * m1 + alphas[:, 1:2] * grid[:, 0] + alphas[:, 2:3] * grid[:, 1]) % n0
    roots = np.exp(2j * np.pi * np.arange(n0) / n0)
    sums = (weights[:, None] * roots[exps]).sum(axis=0)
    near_zero = np.abs(sums) < tolerance
    result.float_survivors = int(near_zero.sum())
    table = cyclotomic_table(n0).dense
    for index in np.flatnonzero(near_zero):
        acc = np.zeros(n0, dtype=np.int64)
        np.add.at(acc, exps[:, index], weights)
        if not np.any(acc @ table):
            m2, m3 = grid[index]
            result.confirmed.append((m1, int(m2), int(m3)))
    rejected = np.flatnonzero(~near_zero)
    if len(rejected):
        rng = np.random.default_rng(n0 * m1 + lo)
        picked = rng.choice(rejected, size=min(samples, len(rejected)), replace=False)
        for index in sorted(picked):
            acc = np.zeros(n0, dtype=np.int64)
            np.add.at(acc, exps[:, index], weights)
            result.spot_checked += 1
            if not np.any(acc @ table):
                result.spot_mismatches += 1
    return result


@dataclass
class DetSearchReport:
    n0: int
    triples: List[Tuple[int, int, int]]
    searched: int
    float_survivors: int
    spot_checked: int
    spot_mismatches: int
    per_divisor: Dict[int, int] = field(default_factory=dict)

    @property
    def prefilter_sound(self) -> bool:
        return self.spot_mismatches == 0


def det_work_items(n0: int, m1_values: Sequence[int], tolerance: float) -> List[tuple]:
    chunks = [(m1, lo) for m1 in m1_values for lo in range(1, n0, M2_CHUNK)]
    samples = ceil(SPOT_CHECK_SAMPLES / len(chunks)) if chunks else 0
    return [(n0, m1, lo, lo + M2_CHUNK, tolerance, samples) for m1, lo in chunks]


async def det_search_async(n0: int = DET_MODULUS, m1_values: Optional[Sequence[int]] = None,
                           tolerance: float = 1e-6, workers: int = 1) -> DetSearchReport:
    if m1_values is None:
        m1_values = [d for d in divisors(n0) if d < n0]
    items = det_work_items(n0, m1_values, tolerance)
    chunks = await gather_parallel(_det_chunk, items, workers)
    triples = sorted(t for chunk in chunks for t in chunk.confirmed)
    per_divisor = Counter(t[0] for t in triples)
    return DetSearchReport(
        n0=n0,
        triples=triples,
        searched=sum(c.searched for c in chunks),
        float_survivors=sum(c.float_survivors for c in chunks),
        spot_checked=sum(c.spot_checked for c in chunks),
        spot_mismatches=sum(c.spot_mismatches for c in chunks),
        per_divisor={m1: per_divisor.get(m1, 0) for m1 in m1_values},
    )


def det_search(n0: int = DET_MODULUS, m1_values: Optional[Sequence[int]] = None,
               tolerance: float = 1e-6, workers: int = 1) -> DetSearchReport:
    return asyncio.run(det_search_async(n0, m1_values, tolerance, workers))


def det_search_819(tolerance: float = 1e-6, workers: int = 1) -> List[Tuple[int, int, int]]:
    return det_search(DET_MODULUS, None, tolerance, workers).triples


def _divides_7_or_9(order: int) -> bool:
    return 7 % order == 0 or 9 % order == 0


def triple_branches(n0: int, triple: Sequence[int]) -> List[str]:
    """Branch labels; "orders-7-9" means every y_j has order dividing 7 or dividing 9"""
    branches = []
    if len({(3 * m) % n0 for m in triple}) == 1:
        branches.append("cube-equal")
    if all(_divides_7_or_9(multiplicative_order_of_root(m, n0)) for m in triple):
        branches.append("orders-7-9")
    return branches


def residue_ratios_cubic(n0: int, triple: Sequence[int]) -> bool:
    """Whether x_j = i*y_j gives circumference ratios generating a cubic field"""
    orders = [multiplicative_order_of_root(m, n0) for m in triple]
    n = lcm(4, *orders)
    exponents = [(n // 4 + m * n // n0) % n for m in triple]
    sums = determinant_sums(n, exponents)
    if any(s.is_zero() for s in sums):
        return False
    return len(units(n)) == 3 * len(ratio_fixing_group(n, sums))


@dataclass
class DetAudit:
    total: int
    branch_counts: Dict[str, int]
    dichotomy_pass: bool
    cubic_followups: int
    followup_pass: bool

    def lines(self) -> List[str]:
        return [
            f"triples: {self.total}",
            "branches: " + ", ".join(f"{k}={v}" for k, v in sorted(self.branch_counts.items())),
            f"dichotomy: {'PASS' if self.dichotomy_pass else 'FAIL'}",
            f"cubic ratios only with all orders dividing 7 or all dividing 9 "
            f"({self.cubic_followups} cubic): {'PASS' if self.followup_pass else 'FAIL'}",
        ]


def audit_triples(n0: int, triples: Sequence[Tuple[int, int, int]]) -> DetAudit:
    counts: Counter = Counter()
    dichotomy = True
    cubic = 0
    followup = True
    for triple in triples:
        branches = triple_branches(n0, triple)
        counts.update(branches)
        if not branches:
            dichotomy = False
            continue
        if "orders-7-9" in branches and residue_ratios_cubic(n0, triple):
            cubic += 1
            orders = {multiplicative_order_of_root(m, n0) for m in triple}
            if not (orders <= {1, 7} or orders <= {1, 3, 9}):
                followup = False
    return DetAudit(len(triples), dict(counts), dichotomy, cubic, followup)
