"""Twist parameters of the surviving candidates.

With t2 = 0 sheared away, t1 = k/q and p = floor(q*s), rationality of the
vertical moduli ratio is the matrix equation

    M_L (P, q, 1)^T = u M_R (P^2, Pq, q^2)^T,    P = p + 1,  u > 1 rational,

whose entries are the coordinates of s, h2 and s*h2 in the basis (1, t, t^2).
Eliminating u leaves integer constraints on (P, q) that are solved exactly and
cross-checked against the moduli ratio evaluated directly for every q.
"""
import asyncio
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import reduce
from math import gcd, isqrt
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import QQ, Poly, Rational, floor, groebner, symbols

from veech.config import PREC_BITS, Q_MAX, debug_print
from veech.errors import (
    ContradictionError,
    DegenerateRankError,
    InvariantBreachError,
    UnderdeterminedCaseError,
)
from veech.exactnum import CycloElem, combine, exact_floor, expand_in_cubic_basis, nullspace, rank
from veech.flatmodel import build_veech_14gon
from veech.monitoring import gather_parallel
from veech.search import Candidate, OrderScan, normalized_heights, run_order_scan_async
from veech.utils import lcm

P_SYM, Q_SYM = symbols("P q")
VEECH_LABEL = "Veech 14-gon"
EXPECTED_SURVIVORS = ((7, (1, 5, 3)), (14, (1, 11, 5)))

Monomial = Tuple[int, int]


class TwistReason(str, Enum):
    SURVIVOR = "survivor"
    INDEPENDENT = "s-h2-independent"
    NO_FORWARD = "no-forward-solution"
    REVERSED_INDEPENDENT = "reversed-independent"
    NO_REVERSE = "no-reverse-solution"


# ---------------------------------------------------------------------------
# Polynomials in (P, q)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolyPQ:
    """Exact polynomial in P and q, stored as sorted (degP, degq) -> coefficient"""
    terms: Tuple[Tuple[Monomial, Fraction], ...]

    @classmethod
    def from_dict(cls, coeffs: Dict[Monomial, Fraction]) -> "PolyPQ":
        return cls(tuple(sorted((m, Fraction(c)) for m, c in coeffs.items() if c)))

    @classmethod
    def from_poly(cls, poly: Poly) -> "PolyPQ":
        return cls.from_dict({(int(i), int(j)): Fraction(int(c.p), int(c.q)) for (i, j), c in poly.terms()})

    def to_poly(self) -> Poly:
        coeffs = {m: Rational(c.numerator, c.denominator) for m, c in self.terms}
        return Poly.from_dict(coeffs or {(0, 0): 0}, P_SYM, Q_SYM, domain="QQ")

    def is_zero(self) -> bool:
        return not self.terms

    def degree_in_P(self) -> int:
        return max((m[0] for m, _ in self.terms), default=-1)

    def coefficient_in_q(self, i: int) -> Dict[int, Fraction]:
        """Coefficient of P^i as a polynomial in q"""
        return {m[1]: c for m, c in self.terms if m[0] == i}

    def __call__(self, P: Fraction, q: Fraction) -> Fraction:
        return sum((c * Fraction(P) ** i * Fraction(q) ** j for (i, j), c in self.terms), Fraction(0))

    def normalized(self) -> "PolyPQ":
        """Primitive integer content, monomial factors split off, positive
        leading coefficient in lexicographic P-then-q order"""
        if not self.terms:
            return self
        min_p = min(m[0] for m, _ in self.terms)
        min_q = min(m[1] for m, _ in self.terms)
        denom = lcm(*(c.denominator for _, c in self.terms))
        numers = [int(c * denom) for _, c in self.terms]
        content = reduce(gcd, numers)
        if max(self.terms)[1] < 0:
            content = -content
        return PolyPQ.from_dict({(i - min_p, j - min_q): Fraction(v, content)
                                 for ((i, j), _), v in zip(self.terms, numers)})

    def __str__(self) -> str:
        return str(self.to_poly().as_expr())


def _linear_form(row: Sequence[Fraction], monomials: Sequence[Monomial]) -> Dict[Monomial, Fraction]:
    out: Dict[Monomial, Fraction] = {}
    for coeff, m in zip(row, monomials):
        if coeff:
            out[m] = out.get(m, Fraction(0)) + coeff
    return out


def _poly_mul(a: Dict[Monomial, Fraction], b: Dict[Monomial, Fraction]) -> Dict[Monomial, Fraction]:
    out: Dict[Monomial, Fraction] = {}
    for (i1, j1), c1 in a.items():
        for (i2, j2), c2 in b.items():
            key = (i1 + i2, j1 + j2)
            out[key] = out.get(key, Fraction(0)) + c1 * c2
    return out


def _poly_sub(a: Dict[Monomial, Fraction], b: Dict[Monomial, Fraction]) -> Dict[Monomial, Fraction]:
    out = dict(a)
    for m, c in b.items():
        out[m] = out.get(m, Fraction(0)) - c
    return out


LEFT_MONOMIALS = ((1, 0), (0, 1), (0, 0))
RIGHT_MONOMIALS = ((2, 0), (1, 1), (0, 2))


# ---------------------------------------------------------------------------
# Linear dependence of s and h2, and the matrix equation
# ---------------------------------------------------------------------------

def _primitive_integer(vector: Sequence[Fraction]) -> Tuple[int, ...]:
    denom = lcm(*(Fraction(v).denominator for v in vector))
    ints = [int(Fraction(v) * denom) for v in vector]
    content = reduce(gcd, ints)
    first = next(v for v in ints if v)
    if first < 0:
        content = -content
    return tuple(v // content for v in ints)


def dependence_lambda(cand: Candidate) -> Optional[Tuple[int, int, int]]:
    """(l1, l2, l3) with l1 (s - 1) + l2 h2 + l3 (s h2 + 1) = 0, or None"""
    s, h2 = cand.s, cand.h[1]
    elements = (s - 1, h2, s * h2 + 1)
    columns = [expand_in_cubic_basis(x, cand.K) for x in elements]
    kernel = nullspace([[columns[j][i] for j in range(3)] for i in range(3)])
    if not kernel:
        return None
    lam = _primitive_integer(kernel[0])
    total = reduce(lambda acc, pair: acc + pair[1] * pair[0], zip(lam, elements), CycloElem.rational(0))
    if not total.is_zero():
        raise InvariantBreachError(f"{cand.label()}: dependence relation does not vanish")
    return lam


@dataclass(frozen=True)
class CaseData:
    candidate: Candidate
    a: Tuple[Fraction, ...]
    b: Tuple[Fraction, ...]
    k: Tuple[Fraction, ...]
    M_L: Tuple[Tuple[Fraction, ...], ...]
    M_R: Tuple[Tuple[Fraction, ...], ...]

    def left(self, P, q) -> Tuple[Fraction, ...]:
        x = (Fraction(P), Fraction(q), Fraction(1))
        return tuple(sum((m * v for m, v in zip(row, x)), Fraction(0)) for row in self.M_L)

    def right(self, P, q) -> Tuple[Fraction, ...]:
        P, q = Fraction(P), Fraction(q)
        y = (P * P, P * q, q * q)
        return tuple(sum((m * v for m, v in zip(row, y)), Fraction(0)) for row in self.M_R)


def build_case(cand: Candidate) -> CaseData:
    K = cand.K
    s, h2 = cand.s, cand.h[1]
    a = expand_in_cubic_basis(s, K)
    b = expand_in_cubic_basis(h2, K)
    k = expand_in_cubic_basis(s * h2, K)
    for coords, value in ((a, s), (b, h2), (k, s * h2)):
        if combine(coords, K) != value:
            raise InvariantBreachError(f"{cand.label()}: basis expansion does not recombine")
    one = (Fraction(1), Fraction(0), Fraction(0))
    M_L = tuple((-2 * b[i], one[i] + b[i] + k[i], b[i]) for i in range(3))
    M_R = tuple((-b[i], one[i] + b[i] + k[i], -a[i] - k[i]) for i in range(3))
    if any(row[0] + 2 * row[2] for row in M_L):
        raise InvariantBreachError(f"{cand.label()}: (1, 0, 2) is not in the kernel of M_L")
    if rank(M_R) == 3:
        raise ContradictionError(f"{cand.label()}: M_R is invertible although s and h2 are dependent")
    return CaseData(cand, a, b, k, M_L, M_R)


# ---------------------------------------------------------------------------
# Eliminating u
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Elimination:
    left_kernel: Tuple[Fraction, ...]
    right_kernel: Tuple[Fraction, ...]
    lam: Optional[Fraction]
    constraints: Tuple[PolyPQ, ...]
    minors_in_ideal: bool

    @property
    def feasible(self) -> bool:
        return self.lam is not None

    @property
    def inverse_u(self) -> Optional[PolyPQ]:
        """1/u = P - lam*q"""
        if self.lam is None:
            return None
        return PolyPQ.from_dict({(1, 0): Fraction(1), (0, 1): -self.lam})


def _row_forms(case: CaseData):
    lefts = [_linear_form(row, LEFT_MONOMIALS) for row in case.M_L]
    rights = [_linear_form(row, RIGHT_MONOMIALS) for row in case.M_R]
    return lefts, rights


def _minors_in_ideal(case: CaseData, constraints: Sequence[PolyPQ]) -> bool:
    lefts, rights = _row_forms(case)
    basis = groebner([c.to_poly().as_expr() for c in constraints], P_SYM, Q_SYM, order="lex", domain=QQ)
    for i in range(3):
        for j in range(i + 1, 3):
            minor = PolyPQ.from_dict(_poly_sub(_poly_mul(lefts[i], rights[j]), _poly_mul(lefts[j], rights[i])))
            if minor.is_zero():
                continue
            if basis.reduce(minor.to_poly().as_expr())[1] != 0:
                return False
    return True


def eliminate_u(case: CaseData) -> Elimination:
    label = case.candidate.label()
    if rank(case.M_R) != 2:
        raise DegenerateRankError(f"{label}: rank of M_R is {rank(case.M_R)}, expected 2")
    transpose = [[case.M_R[i][j] for i in range(3)] for j in range(3)]
    ell = nullspace(transpose)[0]
    kappa = nullspace(case.M_R)[0]
    for j in range(3):
        if sum((ell[i] * case.M_L[i][j] for i in range(3)), Fraction(0)):
            raise ContradictionError(f"{label}: left kernel of M_R does not annihilate M_L")
    # rows y with y.b = 0 drop the P^2 and constant terms: gamma q = u q (gamma P - mu q)
    lam = None
    found = False
    for y in nullspace([case.b]):
        gamma = y[0] + sum((yi * ki for yi, ki in zip(y, case.k)), Fraction(0))
        mu = sum((yi * (ai + ki) for yi, ai, ki in zip(y, case.a, case.k)), Fraction(0))
        if gamma == 0 and mu == 0:
            continue
        found = True
        if gamma != 0:
            lam = mu / gamma
        break
    if not found:
        raise UnderdeterminedCaseError(f"{label}: every row orthogonal to b vanishes identically")
    if lam is None:
        debug_print(f"[DEBUG] eliminate_u - {label}: u*mu*q^2 = 0 has no solution with u, q > 0")
        return Elimination(ell, kappa, None, (), True)
    inverse_u = {(1, 0): Fraction(1), (0, 1): -lam}
    lefts, rights = _row_forms(case)
    constraints = []
    for left, right in zip(lefts, rights):
        poly = PolyPQ.from_dict(_poly_sub(_poly_mul(left, inverse_u), right)).normalized()
        if not poly.is_zero() and poly not in constraints:
            constraints.append(poly)
    if not constraints:
        raise UnderdeterminedCaseError(f"{label}: all constraints vanish identically")
    constraints.sort(key=lambda c: (-c.degree_in_P(), c.terms))
    in_ideal = _minors_in_ideal(case, constraints)
    debug_print(f"[DEBUG] eliminate_u - {label}: 1/u = P - ({lam})q, {len(constraints)} constraints")
    return Elimination(ell, kappa, lam, tuple(constraints), in_ideal)


# ---------------------------------------------------------------------------
# Integer solutions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TwistSolution:
    p: int
    q: int
    u: Fraction
    valid: bool = True
    reason: str = ""

    @property
    def twists(self) -> Tuple[Fraction, ...]:
        """All k/q in [0, 1) with gcd(k, q) = 1"""
        return tuple(Fraction(k, self.q) for k in range(self.q) if gcd(k, self.q) == 1)


@dataclass(frozen=True)
class DirectRow:
    q: int
    p: int
    ratio: Optional[Fraction]

    @property
    def rational(self) -> bool:
        return self.ratio is not None


@dataclass
class SolveResult:
    solutions: List[TwistSolution] = field(default_factory=list)
    rejected: List[TwistSolution] = field(default_factory=list)
    complete: bool = True
    q_bound: Optional[int] = None
    discriminant: Optional[Dict[int, Fraction]] = None
    direct: List[DirectRow] = field(default_factory=list)
    routes_agree: bool = True
    note: str = ""


def _q_poly(coeffs: Dict[int, Fraction]) -> Poly:
    terms = {(j,): Rational(c.numerator, c.denominator) for j, c in coeffs.items()}
    return Poly.from_dict(terms or {(0,): 0}, Q_SYM, domain="QQ")


def _rational_sqrt(value: Fraction) -> Optional[Fraction]:
    if value < 0:
        return None
    num, den = isqrt(value.numerator), isqrt(value.denominator)
    if num * num == value.numerator and den * den == value.denominator:
        return Fraction(num, den)
    return None


def moduli_ratio_at(s: CycloElem, h2: CycloElem, p: int, q: int) -> CycloElem:
    """h1' c2' / (h2' c1') for the C1-side vertical cylinders"""
    numerator = (s * q - p) * (h2 * (q - p) + q)
    denominator = (s * (-q) + (p + 1)) * (h2 * (q - p - 1) + q)
    return numerator / denominator


def direct_route(cand: Candidate, q_max: int, start_bits: int = PREC_BITS) -> List[DirectRow]:
    rows = []
    for q in range(1, q_max + 1):
        p = exact_floor(cand.s * q, start_bits)
        ratio = moduli_ratio_at(cand.s, cand.h[1], p, q)
        rows.append(DirectRow(q, p, ratio.rational_value() if ratio.is_rational() else None))
    return rows


def _discriminant(quadratic: PolyPQ) -> Tuple[Poly, Dict[int, Fraction]]:
    A, B, C = (_q_poly(quadratic.coefficient_in_q(i)) for i in (2, 1, 0))
    D = B ** 2 - 4 * A * C
    shown = D
    if A.is_ground:
        shown = D.quo_ground(A.LC() ** 2)
    coeffs = {int(m[0]): Fraction(int(c.p), int(c.q)) for m, c in shown.terms() if c}
    return D, coeffs


def _q_bound(D: Poly) -> Optional[int]:
    """Largest q with D(q) >= 0 when D tends to -infinity, else None"""
    if D.is_zero:
        return None
    if D.degree() <= 0:
        return 0 if D.LC() < 0 else None
    if D.LC() > 0:
        return None
    roots = D.intervals()
    if not roots:
        return 0
    return max(0, max(int(floor(high)) for (_, high), _ in roots))


def _candidate_P(quadratic: PolyPQ, q: int) -> List[Fraction]:
    A = sum((c * q ** j for j, c in quadratic.coefficient_in_q(2).items()), Fraction(0))
    B = sum((c * q ** j for j, c in quadratic.coefficient_in_q(1).items()), Fraction(0))
    C = sum((c * q ** j for j, c in quadratic.coefficient_in_q(0).items()), Fraction(0))
    if A == 0:
        return [-C / B] if B else []
    root = _rational_sqrt(B * B - 4 * A * C)
    if root is None:
        return []
    return sorted({(-B - root) / (2 * A), (-B + root) / (2 * A)})


def _verify_solution(case: CaseData, elim: Elimination, P: int, q: int,
                     start_bits: int) -> Optional[TwistSolution]:
    """None unless P fits the geometric ranges; otherwise a checked solution"""
    if not 1 <= P <= q:
        return None
    inverse_u = Fraction(P) - elim.lam * q
    if not 0 < inverse_u < 1:
        return None
    if any(c(P, q) for c in elim.constraints):
        return None
    u = 1 / inverse_u
    left, right = case.left(P, q), case.right(P, q)
    if any(lv != u * rv for lv, rv in zip(left, right)):
        raise ContradictionError(f"{case.candidate.label()}: (P, q) = ({P}, {q}) fails the matrix equation")
    cand = case.candidate
    p = P - 1
    floor_p = exact_floor(cand.s * q, start_bits)
    if p != floor_p:
        return TwistSolution(p, q, u, False, f"floor(q*s) = {floor_p}")
    ratio = moduli_ratio_at(cand.s, cand.h[1], p, q)
    if not ratio.is_rational() or ratio.rational_value() != u - 1:
        raise ContradictionError(f"{cand.label()}: moduli ratio at q={q} disagrees with u = {u}")
    return TwistSolution(p, q, u)


def integer_solutions(case: CaseData, elim: Elimination, q_max: int = Q_MAX,
                      start_bits: int = PREC_BITS) -> SolveResult:
    cand = case.candidate
    result = SolveResult()
    result.direct = direct_route(cand, q_max, start_bits)
    if not elim.feasible:
        result.note = "u-infeasible"
    elif elim.lam <= 0:
        result.note = "1/u >= P >= 1"
    else:
        quadratic = elim.constraints[0]
        q_bound = None
        if quadratic.degree_in_P() == 2:
            D, result.discriminant = _discriminant(quadratic)
            q_bound = _q_bound(D)
        if q_bound is None:
            result.complete = False
            result.note = "q unbounded, searched q <= q_max"
            q_bound = q_max
        result.q_bound = q_bound
        for q in range(1, q_bound + 1):
            for P in _candidate_P(quadratic, q):
                if P.denominator != 1:
                    continue
                solution = _verify_solution(case, elim, int(P), q, start_bits)
                if solution is None:
                    continue
                (result.solutions if solution.valid else result.rejected).append(solution)
    symbolic = {s.q for s in result.solutions if s.q <= q_max}
    direct = {row.q for row in result.direct if row.rational and row.ratio > 0}
    result.routes_agree = symbolic == direct
    debug_print(f"[DEBUG] integer_solutions - {cand.label()}: {len(result.solutions)} solutions, "
                f"complete={result.complete}, routes agree={result.routes_agree}")
    return result


# ---------------------------------------------------------------------------
# Chain reversal and classification
# ---------------------------------------------------------------------------

def reverse_chain(cand: Candidate) -> Candidate:
    """Read the chain from C3, rescaled to c1 = h1 = 1"""
    c1, c2, c3 = cand.c
    c = (CycloElem.rational(1, c3.modulus), c2 / c3, c1 / c3)
    s = cand.saddle_lengths[-1] / c3
    h = normalized_heights(c, cand.K)
    return Candidate(cand.root_tuple, c, h, cand.K, s, tuple(reversed(cand.theta)), not cand.reversed)


@dataclass
class CaseReport:
    candidate: Candidate
    dependence: Optional[Tuple[int, int, int]]
    case: Optional[CaseData] = None
    elimination: Optional[Elimination] = None
    solve: Optional[SolveResult] = None

    @property
    def solved(self) -> bool:
        return self.solve is not None and bool(self.solve.solutions)


def analyze_case(cand: Candidate, q_max: int = Q_MAX, start_bits: int = PREC_BITS) -> CaseReport:
    lam = dependence_lambda(cand)
    report = CaseReport(cand, lam)
    if lam is None:
        return report
    report.case = build_case(cand)
    report.elimination = eliminate_u(report.case)
    report.solve = integer_solutions(report.case, report.elimination, q_max, start_bits)
    return report


@dataclass
class CandidateVerdict:
    forward: CaseReport
    reverse: Optional[CaseReport]
    reason: TwistReason

    @property
    def candidate(self) -> Candidate:
        return self.forward.candidate


def _candidate_item(item: Tuple[Candidate, int, int]) -> CandidateVerdict:
    cand, q_max, start_bits = item
    forward = analyze_case(cand, q_max, start_bits)
    if forward.dependence is None:
        return CandidateVerdict(forward, None, TwistReason.INDEPENDENT)
    if not forward.solved:
        return CandidateVerdict(forward, None, TwistReason.NO_FORWARD)
    reverse = analyze_case(reverse_chain(cand), q_max, start_bits)
    if reverse.dependence is None:
        return CandidateVerdict(forward, reverse, TwistReason.REVERSED_INDEPENDENT)
    if not reverse.solved:
        return CandidateVerdict(forward, reverse, TwistReason.NO_REVERSE)
    return CandidateVerdict(forward, reverse, TwistReason.SURVIVOR)


@dataclass(frozen=True)
class Survivor:
    candidate: Candidate
    t1: Fraction
    t3: Fraction

    def key(self) -> Tuple[int, Tuple[int, ...]]:
        return self.candidate.root_tuple.n, self.candidate.root_tuple.exponents


def _same_chain(c, h, s, other_c, other_h, other_s) -> bool:
    return all(x == y for x, y in zip(c, other_c)) and all(x == y for x, y in zip(h, other_h)) and s == other_s


def _twists_match(a: Tuple[Fraction, Fraction], b: Tuple[Fraction, Fraction]) -> bool:
    return all(x % 1 == y % 1 or x % 1 == (-y) % 1 for x, y in zip(a, b))


def same_orbit(a: Survivor, b: Survivor) -> bool:
    """Equal normalized chains, possibly read from the other end"""
    ca, cb = a.candidate, b.candidate
    if _same_chain(ca.c, ca.h, ca.s, cb.c, cb.h, cb.s) and _twists_match((a.t1, a.t3), (b.t1, b.t3)):
        return True
    rev = reverse_chain(ca)
    return _same_chain(rev.c, rev.h, rev.s, cb.c, cb.h, cb.s) and _twists_match((a.t3, a.t1), (b.t1, b.t3))


def matches_veech_14gon(survivor: Survivor, polygon=None) -> bool:
    polygon = polygon or build_veech_14gon()
    twists = (polygon.twists[0], polygon.twists[2])
    cand = survivor.candidate
    if _same_chain(polygon.c, polygon.h, polygon.s, cand.c, cand.h, cand.s):
        return _twists_match(twists, (survivor.t1, survivor.t3))
    rev = reverse_chain(cand)
    return (_same_chain(polygon.c, polygon.h, polygon.s, rev.c, rev.h, rev.s)
            and _twists_match(twists, (survivor.t3, survivor.t1)))


@dataclass
class OrbitClass:
    members: List[Survivor]
    label: str


@dataclass
class ClassificationReport:
    scan: OrderScan
    verdicts: List[CandidateVerdict]
    survivors: List[Survivor]
    orbits: List[OrbitClass]
    flags: List[str] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return not any(flag.startswith("incomplete") for flag in self.flags)

    @property
    def dependence_survivors(self) -> List[Candidate]:
        return [v.candidate for v in self.verdicts if v.forward.dependence is not None]

    @property
    def survivor_keys(self) -> List[Tuple[int, Tuple[int, ...]]]:
        return sorted({s.key() for s in self.survivors})

    def exit_code(self) -> int:
        if not self.complete:
            return 3
        unique = len(self.orbits) == 1 and self.orbits[0].label == VEECH_LABEL
        if unique and self.survivor_keys == sorted(EXPECTED_SURVIVORS):
            return 0
        return 2


def group_orbits(survivors: Sequence[Survivor]) -> List[OrbitClass]:
    polygon = build_veech_14gon()
    classes: List[List[Survivor]] = []
    for survivor in survivors:
        for members in classes:
            if same_orbit(members[0], survivor):
                members.append(survivor)
                break
        else:
            classes.append([survivor])
    return [OrbitClass(members, VEECH_LABEL if matches_veech_14gon(members[0], polygon) else "unidentified")
            for members in classes]


async def classify_all_async(q_max: int = Q_MAX, workers: int = 1,
                             start_bits: int = PREC_BITS) -> ClassificationReport:
    scan = await run_order_scan_async(workers, start_bits)
    candidates = scan.candidates()
    verdicts = await gather_parallel(_candidate_item, [(c, q_max, start_bits) for c in candidates], workers)
    flags = list(scan.flags)
    survivors = []
    for verdict in verdicts:
        label = verdict.candidate.label()
        for report in (verdict.forward, verdict.reverse):
            if report is None or report.solve is None:
                continue
            if not report.solve.complete:
                flags.append(f"incomplete {report.candidate.label()}: {report.solve.note}")
            if not report.solve.routes_agree:
                flags.append(f"route disagreement {report.candidate.label()}")
            if report.elimination is not None and not report.elimination.minors_in_ideal:
                flags.append(f"minor check {report.candidate.label()}")
        if verdict.reason != TwistReason.SURVIVOR:
            continue
        for forward in verdict.forward.solve.solutions:
            for backward in verdict.reverse.solve.solutions:
                for t1 in forward.twists:
                    for t3 in backward.twists:
                        survivors.append(Survivor(verdict.candidate, t1, t3))
        debug_print(f"[DEBUG] classify_all - {label} survives")
    orbits = group_orbits(survivors)
    return ClassificationReport(scan, verdicts, survivors, orbits, flags)


def classify_all(q_max: int = Q_MAX, workers: int = 1, start_bits: int = PREC_BITS) -> ClassificationReport:
    return asyncio.run(classify_all_async(q_max, workers, start_bits))
