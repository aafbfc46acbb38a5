"""Admissible root tuples for the residue equations

    sum_j c_j (x_j - x_j^-1) = 0,    sum_j c_j (x_j^2 - x_j^-2) = 0,

with circumferences recovered as ratios of 2x2 minors, heights from the
trace-dual basis, and the symmetric/asymmetric filters.
"""
import asyncio
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import reduce
from itertools import combinations, permutations, product
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from veech.config import PREC_BITS, debug_print
from veech.errors import (
    DegenerateBasisError,
    InvalidModulusError,
    InvalidQueryError,
    InvariantBreachError,
)
from veech.exactnum import (
    CubicFieldDesc,
    CycloElem,
    RootSum,
    cubic_field,
    dual_basis,
    sign_at_standard_embedding,
)
from veech.monitoring import gather_parallel
from veech.utils import scan_moduli, signed_fraction, units

EXPECTED_MODULI = (7, 14, 18)


class Reason(str, Enum):
    OK = "ok"
    GCD = "gcd"
    DISTINCTNESS = "distinctness"
    NOT_CUBIC = "not-cubic"
    NOT_BASIS = "not-basis"
    MODULI_NOT_RATIONAL = "moduli-not-rational"
    SIGN_FAILURE = "sign-failure"


@dataclass(frozen=True)
class Verdict:
    passed: bool
    reason: Reason
    detail: str = ""


PASS = Verdict(True, Reason.OK)


# ---------------------------------------------------------------------------
# Root tuples
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class RootTuple:
    n: int
    exponents: Tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise InvalidModulusError(f"modulus must be positive, got {self.n}")
        if any(not 0 <= e < self.n for e in self.exponents):
            raise InvalidQueryError(f"exponents {self.exponents} must lie in [0, {self.n})")

    @property
    def g(self) -> int:
        return len(self.exponents)

    def roots(self) -> Tuple[CycloElem, ...]:
        return tuple(CycloElem.zeta(self.n, e) for e in self.exponents)

    def theta(self) -> Tuple[Fraction, ...]:
        return tuple(signed_fraction(e, self.n) for e in self.exponents)

    def gcd_ok(self) -> bool:
        return reduce(gcd, self.exponents, self.n) == 1

    def distinct(self) -> bool:
        """+-1 and x_j^(+-1) are 2g+2 distinct roots"""
        seen = set()
        for e in self.exponents:
            if e == 0 or 2 * e == self.n:
                return False
            pair = {e, (-e) % self.n}
            if seen & pair:
                return False
            seen |= pair
        return True

    def permuted(self, order: Sequence[int]) -> "RootTuple":
        return RootTuple(self.n, tuple(self.exponents[i] for i in order))

    def inverted(self) -> "RootTuple":
        return RootTuple(self.n, tuple((-e) % self.n for e in self.exponents))

    def symmetry_orbit(self) -> List["RootTuple"]:
        """Images under permutations and simultaneous inversion"""
        images = []
        for order in permutations(range(self.g)):
            image = self.permuted(order)
            images.extend([image, image.inverted()])
        return images

    def canonical(self) -> "RootTuple":
        return min(self.symmetry_orbit())

    def label(self) -> str:
        return f"n={self.n} ({','.join(str(e) for e in self.exponents)})"


# ---------------------------------------------------------------------------
# Circumferences
# ---------------------------------------------------------------------------

def _odd_part(n: int, e: int, power: int) -> RootSum:
    return RootSum(n, {power * e: 1, -power * e: -1})


def determinant_sums(n: int, exponents: Sequence[int]) -> Tuple[RootSum, ...]:
    """D_j = A_{j+1} B_{j+2} - B_{j+1} A_{j+2} with A = x - x^-1, B = x^2 - x^-2"""
    a = [_odd_part(n, e, 1) for e in exponents]
    b = [_odd_part(n, e, 2) for e in exponents]
    g = len(exponents)
    return tuple(a[(j + 1) % g] * b[(j + 2) % g] - b[(j + 1) % g] * a[(j + 2) % g] for j in range(g))


def ratio_fixing_group(n: int, sums: Sequence[RootSum]) -> Tuple[int, ...]:
    """Units k whose automorphism fixes every ratio D_j / D_1"""
    first = sums[0]
    fixing = []
    for k in units(n):
        first_k = first.galois(k)
        if all((other.galois(k) * first - other * first_k).is_zero() for other in sums[1:]):
            fixing.append(k)
    return tuple(fixing)


def residue_sums(c: Sequence[CycloElem], roots: Sequence[CycloElem]) -> Tuple[CycloElem, CycloElem]:
    first = reduce(lambda acc, j: acc + c[j] * (roots[j] - roots[j].inv()), range(len(c)), CycloElem.rational(0))
    second = reduce(lambda acc, j: acc + c[j] * (roots[j] ** 2 - roots[j] ** -2), range(len(c)), CycloElem.rational(0))
    return first, second


def circumference_ratios(t: RootTuple) -> Tuple[CycloElem, ...]:
    """(1, c_2, c_3) from the 2x2 minors of the residue system"""
    if not t.distinct():
        raise InvariantBreachError(f"{t.label()} violates distinctness")
    sums = [s.to_elem() for s in determinant_sums(t.n, t.exponents)]
    if any(s.is_zero() for s in sums):
        raise InvariantBreachError(f"{t.label()} has a vanishing minor despite distinctness")
    first_inv = sums[0].inv()
    c = tuple(s * first_inv for s in sums)
    if not all(cj.is_real() for cj in c):
        raise InvariantBreachError(f"{t.label()} produced non-real circumferences")
    if any(not r.is_zero() for r in residue_sums(c, t.roots())):
        raise InvariantBreachError(f"{t.label()} circumferences do not solve the residue equations")
    return c


def compute_s(c: Sequence[CycloElem], theta: Sequence[Fraction]) -> CycloElem:
    """Length of the distinguished saddle connection: sum c_j (sgn(theta_j) - 2 theta_j)"""
    total = CycloElem.rational(0)
    for cj, th in zip(c, theta):
        if th == 0:
            raise InvariantBreachError("x_j = 1 breaches distinctness")
        sign = 1 if th > 0 else -1
        total = total + cj * (sign - 2 * th)
    return total


def chain_lengths(s: CycloElem, c: Sequence[CycloElem]) -> Tuple[CycloElem, ...]:
    """l_0 = s and l_k = c_k - l_(k-1)"""
    lengths = [s]
    for cj in c:
        lengths.append(cj - lengths[-1])
    return tuple(lengths)


# ---------------------------------------------------------------------------
# Candidates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Candidate:
    root_tuple: RootTuple
    c: Tuple[CycloElem, ...]
    h: Tuple[CycloElem, ...]
    K: CubicFieldDesc
    s: CycloElem
    theta: Tuple[Fraction, ...]
    reversed: bool = False

    @property
    def saddle_lengths(self) -> Tuple[CycloElem, ...]:
        return chain_lengths(self.s, self.c)

    def moduli_ratios(self) -> Dict[Tuple[int, int], Fraction]:
        ratios = {}
        for j, k in combinations(range(len(self.c)), 2):
            ratios[(j, k)] = (self.h[j] * self.c[k] / (self.c[j] * self.h[k])).rational_value()
        return ratios

    def label(self) -> str:
        return self.root_tuple.label() + (" reversed" if self.reversed else "")


def choose_generator(t: RootTuple, c: Sequence[CycloElem], fixing: Sequence[int]) -> CycloElem:
    """2cos(2*pi/n) when it generates K, then x_j + x_j^-1, then the circumferences"""
    zeta = CycloElem.zeta(t.n)
    options = [zeta + zeta.inv()] + [x + x.inv() for x in t.roots()] + list(c[1:])
    for candidate in options:
        if not candidate.is_rational() and all(candidate.galois(k) == candidate for k in fixing):
            return candidate
    raise InvariantBreachError(f"{t.label()}: no generator for the field of the ratios")


def normalized_heights(c: Sequence[CycloElem], K: CubicFieldDesc) -> Tuple[CycloElem, ...]:
    d = dual_basis(c, K)
    first = d[0].inv()
    return tuple(dj * first for dj in d)


def _algebraic_stage(t: RootTuple):
    """Everything that does not depend on the real embedding; returns (c, K, h) or a failing Verdict"""
    if not t.gcd_ok():
        return Verdict(False, Reason.GCD)
    if not t.distinct():
        return Verdict(False, Reason.DISTINCTNESS)
    sums = determinant_sums(t.n, t.exponents)
    if any(s.is_zero() for s in sums):
        debug_print(f"[DEBUG] _algebraic_stage - vanishing minor for {t.label()}")
        return Verdict(False, Reason.DISTINCTNESS, "invariant-breach: vanishing minor")
    fixing = ratio_fixing_group(t.n, sums)
    index = len(units(t.n)) // len(fixing)
    if index != 3:
        return Verdict(False, Reason.NOT_CUBIC, f"degree {index}")
    c = circumference_ratios(t)
    K = cubic_field(choose_generator(t, c, fixing))
    if K.fixing_group != fixing:
        raise InvariantBreachError(f"{t.label()}: generator does not match the field of the ratios")
    try:
        h = normalized_heights(c, K)
    except DegenerateBasisError:
        return Verdict(False, Reason.NOT_BASIS)
    for j, k in combinations(range(t.g), 2):
        if not (h[j] * c[k] / (c[j] * h[k])).is_rational():
            return Verdict(False, Reason.MODULI_NOT_RATIONAL, f"ratio {j + 1},{k + 1}")
    return c, K, h


def build_candidate(t: RootTuple, start_bits: int = PREC_BITS) -> Tuple[Optional[Candidate], Verdict]:
    stage = _algebraic_stage(t)
    if isinstance(stage, Verdict):
        return None, stage
    c, K, h = stage
    for name, values in (("c", c), ("h", h)):
        for j, value in enumerate(values[1:], start=2):
            if sign_at_standard_embedding(value, start_bits) <= 0:
                return None, Verdict(False, Reason.SIGN_FAILURE, f"{name}{j}")
    theta = t.theta()
    cand = Candidate(t, c, h, K, compute_s(c, theta), theta)
    return cand, PASS


def symmetric_verdict(t: RootTuple, start_bits: int = PREC_BITS) -> Verdict:
    return build_candidate(t, start_bits)[1]


def check_symmetric(t: RootTuple, start_bits: int = PREC_BITS) -> bool:
    return symmetric_verdict(t, start_bits).passed


def asymmetric_verdict(cand: Candidate, start_bits: int = PREC_BITS) -> Verdict:
    """s > 0 and every chain length positive; flags when only the last inequality fails"""
    for j, cj in enumerate(cand.c, start=1):
        if sign_at_standard_embedding(cj, start_bits) <= 0:
            return Verdict(False, Reason.SIGN_FAILURE, f"c{j}")
    lengths = cand.saddle_lengths
    failing = [k for k, length in enumerate(lengths) if sign_at_standard_embedding(length, start_bits) <= 0]
    if not failing:
        return PASS
    detail = "s" if failing[0] == 0 else f"l{failing[0]}"
    if failing == [len(lengths) - 1]:
        detail += " chain-form-differs"
    return Verdict(False, Reason.SIGN_FAILURE, detail)


def check_asymmetric(t: RootTuple, start_bits: int = PREC_BITS) -> bool:
    cand, verdict = build_candidate(t, start_bits)
    return verdict.passed and asymmetric_verdict(cand, start_bits).passed


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

@dataclass
class EnumerationResult:
    n: int
    symmetric: List[RootTuple] = field(default_factory=list)
    asymmetric: List[RootTuple] = field(default_factory=list)
    candidates: Dict[RootTuple, Candidate] = field(default_factory=dict)
    reasons: Counter = field(default_factory=Counter)
    flags: List[str] = field(default_factory=list)

    @property
    def field_labels(self) -> List[str]:
        return sorted({cand.K.label for cand in self.candidates.values()})


def _galois_key(n: int, values: Sequence[int]) -> Tuple[int, ...]:
    """Representative of an unsigned exponent set under (Z/n)^x"""
    best = None
    for k in units(n):
        image = tuple(sorted(min(k * a % n, n - k * a % n) for a in values))
        if best is None or image < best:
            best = image
    return best


def _gcd_ok_count(n: int) -> int:
    grid = np.indices((n, n, n)).reshape(3, -1)
    return int(np.count_nonzero(np.gcd(np.gcd(np.gcd(grid[0], grid[1]), grid[2]), n) == 1))


def enumerate_candidates(n: int, start_bits: int = PREC_BITS) -> EnumerationResult:
    if n < 3:
        raise InvalidQueryError(f"modulus must be at least 3, got {n}")
    result = EnumerationResult(n)
    g = 3
    signed_count = 2 ** g * len(list(permutations(range(g))))
    gcd_ok = _gcd_ok_count(n)
    result.reasons[Reason.GCD.value] = n ** g - gcd_ok
    algebraic: Dict[Tuple[int, ...], Verdict] = {}
    unsigned_sets = 0
    half = (n + 1) // 2
    for values in combinations(range(1, half), g):
        if reduce(gcd, values, n) != 1:
            continue
        unsigned_sets += 1
        key = _galois_key(n, values)
        if key not in algebraic:
            stage = _algebraic_stage(RootTuple(n, values))
            algebraic[key] = stage if isinstance(stage, Verdict) else PASS
        verdict = algebraic[key]
        if not verdict.passed:
            result.reasons[verdict.reason.value] += signed_count
            continue
        for order in permutations(values):
            for signs in product((1, -1), repeat=g):
                t = RootTuple(n, tuple((s * e) % n for s, e in zip(signs, order)))
                cand, sym = build_candidate(t, start_bits)
                if not sym.passed:
                    result.reasons[sym.reason.value] += 1
                    continue
                result.symmetric.append(t.canonical())
                asym = asymmetric_verdict(cand, start_bits)
                if "chain-form-differs" in asym.detail:
                    result.flags.append(f"chain-form-differs {t.label()}")
                if asym.passed:
                    result.reasons[Reason.OK.value] += 1
                    result.asymmetric.append(t)
                    result.candidates[t] = cand
                else:
                    result.reasons[asym.reason.value] += 1
    result.reasons[Reason.DISTINCTNESS.value] += gcd_ok - signed_count * unsigned_sets
    result.symmetric = sorted(set(result.symmetric))
    result.asymmetric = sorted(result.asymmetric)
    debug_print(f"[DEBUG] enumerate_candidates - n={n}: {len(algebraic)} Galois classes, "
                f"{len(result.symmetric)} symmetric, {len(result.asymmetric)} asymmetric")
    return result


@dataclass
class OrderScan:
    results: Dict[int, EnumerationResult]
    flags: List[str] = field(default_factory=list)

    @property
    def moduli_with_candidates(self) -> List[int]:
        return sorted(n for n, r in self.results.items() if r.symmetric)

    def candidates(self) -> List[Candidate]:
        return [self.results[n].candidates[t] for n in sorted(self.results) for t in self.results[n].asymmetric]


def _scan_item(item: Tuple[int, int]) -> EnumerationResult:
    n, start_bits = item
    return enumerate_candidates(n, start_bits)


async def run_order_scan_async(workers: int = 1, start_bits: int = PREC_BITS) -> OrderScan:
    moduli = scan_moduli()
    results = await gather_parallel(_scan_item, [(n, start_bits) for n in moduli], workers)
    scan = OrderScan(dict(zip(moduli, results)))
    unexpected = [n for n in scan.moduli_with_candidates if n not in EXPECTED_MODULI]
    if unexpected:
        scan.flags.append(f"unexpected moduli with candidates: {unexpected}")
    for r in results:
        scan.flags.extend(r.flags)
    return scan


def run_order_scan(workers: int = 1, start_bits: int = PREC_BITS) -> OrderScan:
    """Every n >= 3 dividing 56 or 72"""
    return asyncio.run(run_order_scan_async(workers, start_bits))
