"""Exact arithmetic in cyclotomic fields Q(zeta_n) and their cubic subfields.

Elements are stored in the power basis 1, zeta, ..., zeta^(phi(n)-1) modulo the
n-th cyclotomic polynomial, as integer numerators over one positive common
denominator, so equality of canonical forms is equality of field elements.
"""
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache, reduce
from math import gcd
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from mpmath.ctx_iv import MPIntervalContext
from sympy import Symbol, cyclotomic_poly, discrete_log, primitive_root
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from veech.config import PREC_BITS, debug_print
from veech.errors import (
    DegenerateBasisError,
    DivisionByZeroError,
    InvalidModulusError,
    InvariantBreachError,
    NotAutomorphismError,
    NotInSubfieldError,
    NotRealError,
)
from veech.utils import divisors, euler_phi, factorization, lcm, units

Scalar = Union[int, Fraction]

# Doubling stops here; a nonzero element never needs this much precision
MAX_SIGN_BITS = 1 << 16
# Entries of the dense reduction table must stay far below int64 overflow
TABLE_LIMIT = 1 << 40
# Bound on any entry of a table-times-coefficients product
INT64_SAFE = 1 << 62


# ---------------------------------------------------------------------------
# Reduction tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CyclotomicTable:
    """x^e mod Phi_n for every exponent 0 <= e < n"""
    modulus: int
    phi: int
    rows: Tuple[Tuple[Tuple[int, int], ...], ...]

    @cached_property
    def dense(self) -> np.ndarray:
        table = np.zeros((self.modulus, self.phi), dtype=np.int64)
        for e, row in enumerate(self.rows):
            for k, value in row:
                if abs(value) >= TABLE_LIMIT:
                    raise InvariantBreachError(f"reduction table for n={self.modulus} overflows int64")
                table[e, k] = value
        return table

    @cached_property
    def entry_bound(self) -> int:
        return max((abs(value) for row in self.rows for _, value in row), default=0)

    def reduce(self, acc: Sequence[int]) -> List[int]:
        """Fold a length-n coefficient vector onto the power basis"""
        out = list(acc[:self.phi])
        for e in range(self.phi, self.modulus):
            v = acc[e]
            if v:
                for k, value in self.rows[e]:
                    out[k] += v * value
        return out


@lru_cache(maxsize=None)
def cyclotomic_table(n: int) -> CyclotomicTable:
    if n < 1:
        raise InvalidModulusError(f"modulus must be positive, got {n}")
    poly = [int(c) for c in reversed(cyclotomic_poly(n, Symbol("x"), polys=True).all_coeffs())]
    phi = len(poly) - 1
    rows = []
    current = [0] * phi
    current[0] = 1
    for _ in range(n):
        rows.append(tuple((k, v) for k, v in enumerate(current) if v))
        carry = current[-1]
        current = [0] + current[:-1]
        if carry:
            for k in range(phi):
                current[k] -= carry * poly[k]
    debug_print(f"[DEBUG] cyclotomic_table - built n={n}, phi={phi}")
    return CyclotomicTable(n, phi, tuple(rows))


def _normalize(numer: List[int], denom: int) -> Tuple[Tuple[int, ...], int]:
    if denom < 0:
        numer, denom = [-v for v in numer], -denom
    common = reduce(gcd, numer, denom)
    if common > 1:
        numer = [v // common for v in numer]
        denom //= common
    if not any(numer):
        denom = 1
    return tuple(numer), denom


def _as_fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def _qq(x: Fraction) -> Tuple[int, int]:
    return x.numerator, x.denominator


# ---------------------------------------------------------------------------
# Field elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CycloElem:
    """An element of Q(zeta_n) in canonical power-basis form"""
    modulus: int
    numer: Tuple[int, ...]
    denom: int = 1

    # construction --------------------------------------------------------

    @classmethod
    def _make(cls, n: int, numer: List[int], denom: int = 1) -> "CycloElem":
        numer, denom = _normalize(numer, denom)
        return cls(n, numer, denom)

    @classmethod
    def rational(cls, value: Scalar, n: int = 1) -> "CycloElem":
        value = Fraction(value)
        numer = [0] * euler_phi(n)
        numer[0] = value.numerator
        return cls._make(n, numer, value.denominator)

    @classmethod
    def zeta(cls, n: int, exponent: int = 1) -> "CycloElem":
        return canonicalize(n, {exponent: 1})

    @property
    def coeffs(self) -> Tuple[Fraction, ...]:
        return tuple(Fraction(v, self.denom) for v in self.numer)

    # predicates ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.numer)

    def is_rational(self) -> bool:
        return not any(self.numer[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return Fraction(self.numer[0], self.denom)

    def is_real(self) -> bool:
        return self.conjugate() == self

    # embeddings ------------------------------------------------------------

    def lift(self, m: int) -> "CycloElem":
        """Image in Q(zeta_m) for a multiple m of the modulus"""
        n = self.modulus
        if m == n:
            return self
        if m % n:
            raise InvalidModulusError(f"cannot lift from Q(zeta_{n}) to Q(zeta_{m})")
        f = m // n
        acc = [0] * m
        for j, v in enumerate(self.numer):
            if v:
                acc[(j * f) % m] += v
        return CycloElem._make(m, cyclotomic_table(m).reduce(acc), self.denom)

    def descend(self) -> "CycloElem":
        """The same element written over its smallest cyclotomic field"""
        return self._descended

    @cached_property
    def _descended(self) -> "CycloElem":
        n = self.modulus
        if self.is_rational():
            return CycloElem.rational(self.rational_value())
        group = units(n)
        for m in divisors(n):
            if m == n:
                return self
            fixing = [k for k in group if k % m == 1 % m]
            if all(self.galois(k) == self for k in fixing):
                basis = [CycloElem.zeta(m, i).lift(n) for i in range(euler_phi(m))]
                coords = SpanSolver([b.coeffs for b in basis]).solve(self.coeffs)
                if coords is None:
                    raise InvariantBreachError(f"descent of {self!r} to Q(zeta_{m}) failed")
                return canonicalize(m, dict(enumerate(coords)))
        return self

    def to_complex(self) -> complex:
        angles = 2 * np.pi * np.arange(self.modulus)[:len(self.numer)] / self.modulus
        values = np.array([float(v) for v in self.numer])
        return complex(np.sum(values * np.exp(1j * angles)) / self.denom)

    # arithmetic ------------------------------------------------------------

    def _coerce(self, other) -> Tuple["CycloElem", "CycloElem"]:
        if isinstance(other, (int, Fraction)):
            other = CycloElem.rational(other, self.modulus)
        elif not isinstance(other, CycloElem):
            return NotImplemented
        if other.modulus == self.modulus:
            return self, other
        m = lcm(self.modulus, other.modulus)
        return self.lift(m), other.lift(m)

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        numer = [x * b.denom + y * a.denom for x, y in zip(a.numer, b.numer)]
        return CycloElem._make(a.modulus, numer, a.denom * b.denom)

    __radd__ = __add__

    def __neg__(self):
        return CycloElem(self.modulus, tuple(-v for v in self.numer), self.denom)

    def __sub__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        return pair[0] + (-pair[1])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            numer = [v * other.numerator for v in self.numer]
            return CycloElem._make(self.modulus, numer, self.denom * other.denominator)
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        n = a.modulus
        acc = [0] * n
        for i, x in enumerate(a.numer):
            if x:
                for j, y in enumerate(b.numer):
                    if y:
                        acc[(i + j) % n] += x * y
        return CycloElem._make(n, cyclotomic_table(n).reduce(acc), a.denom * b.denom)

    __rmul__ = __mul__

    def inv(self) -> "CycloElem":
        if self.is_zero():
            raise DivisionByZeroError("inverse of the zero element")
        if self.is_rational():
            return CycloElem.rational(1 / self.rational_value(), self.modulus)
        n, phi = self.modulus, len(self.numer)
        table = cyclotomic_table(n)
        # column j holds numer * x^j
        columns = []
        for j in range(phi):
            acc = [0] * n
            for i, x in enumerate(self.numer):
                if x:
                    acc[(i + j) % n] += x
            columns.append(table.reduce(acc))
        matrix = DomainMatrix.from_list(
            [[columns[j][i] for j in range(phi)] for i in range(phi)], QQ)
        rhs = DomainMatrix.from_list([[int(i == 0)] for i in range(phi)], QQ)
        solution = [_as_fraction(row[0]) for row in matrix.lu_solve(rhs).to_list()]
        return canonicalize(n, dict(enumerate(solution))) * self.denom

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DivisionByZeroError("division by zero")
            return self * (1 / Fraction(other))
        if not isinstance(other, CycloElem):
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        return self.inv() * other

    def __pow__(self, exponent: int) -> "CycloElem":
        if exponent < 0:
            return self.inv() ** (-exponent)
        result = CycloElem.rational(1, self.modulus)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    # Galois ----------------------------------------------------------------

    def galois(self, k: int) -> "CycloElem":
        n = self.modulus
        if gcd(k, n) != 1:
            raise NotAutomorphismError(f"gcd({k}, {n}) != 1")
        k %= n
        if k == 1 % n or self.is_rational():
            return self
        acc = [0] * n
        for j, v in enumerate(self.numer):
            if v:
                acc[(j * k) % n] += v
        return CycloElem._make(n, cyclotomic_table(n).reduce(acc), self.denom)

    def conjugate(self) -> "CycloElem":
        return self.galois(-1)

    def stabilizer(self) -> Tuple[int, ...]:
        return tuple(k for k in units(self.modulus) if self.galois(k) == self)

    def degree(self) -> int:
        return len(units(self.modulus)) // len(self.stabilizer())

    # comparison ------------------------------------------------------------

    def __eq__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        return a.numer == b.numer and a.denom == b.denom

    def __hash__(self):
        low = self.descend()
        return hash((low.modulus, low.numer, low.denom))

    def __repr__(self):
        terms = []
        for j, value in enumerate(self.coeffs):
            if value:
                terms.append(f"{value}" if j == 0 else f"{value}*z{self.modulus}^{j}")
        return " + ".join(terms) if terms else "0"


def canonicalize(n: int, raw: Mapping[int, Scalar]) -> CycloElem:
    """Canonical form of sum(raw[e] * zeta_n^e)"""
    if n < 1:
        raise InvalidModulusError(f"modulus must be positive, got {n}")
    values = {e % n: Fraction(0) for e in raw}
    for e, v in raw.items():
        values[e % n] += Fraction(v)
    denom = reduce(lambda acc, v: acc * v.denominator // gcd(acc, v.denominator), values.values(), 1)
    acc = [0] * n
    for e, v in values.items():
        acc[e] += v.numerator * (denom // v.denominator)
    return CycloElem._make(n, cyclotomic_table(n).reduce(acc), denom)


def mul(a: CycloElem, b: CycloElem) -> CycloElem:
    return a * b


def inv(a: CycloElem) -> CycloElem:
    return a.inv()


def galois_apply(k: int, a: CycloElem) -> CycloElem:
    return a.galois(k)


def conjugate(a: CycloElem) -> CycloElem:
    return a.conjugate()


def degree_over_Q(a: CycloElem) -> int:
    return a.degree()


# ---------------------------------------------------------------------------
# Certified signs
# ---------------------------------------------------------------------------

def _interval_value(a: CycloElem, bits: int):
    ctx = MPIntervalContext()
    ctx.prec = bits
    total = ctx.mpf(0)
    for j, v in enumerate(a.numer):
        if v:
            total += ctx.mpf(v) * ctx.cos(2 * ctx.pi * j / a.modulus)
    return total


def sign_at_standard_embedding(a: CycloElem, start_bits: int = PREC_BITS) -> int:
    """Exact sign of a real element under zeta_n -> exp(2*pi*i/n)"""
    if not a.is_real():
        raise NotRealError(f"{a!r} is not fixed by complex conjugation")
    if a.is_zero():
        return 0
    if a.is_rational():
        return 1 if a.numer[0] > 0 else -1
    bits = start_bits
    while bits <= MAX_SIGN_BITS:
        value = _interval_value(a, bits)
        if (value > 0) is True:
            return 1
        if (value < 0) is True:
            return -1
        debug_print(f"[DEBUG] sign_at_standard_embedding - {bits} bits inconclusive, doubling")
        bits *= 2
    raise InvariantBreachError(f"sign of nonzero {a!r} not resolved at {MAX_SIGN_BITS} bits")


def compare(a: Union[CycloElem, Scalar], b: Union[CycloElem, Scalar], start_bits: int = PREC_BITS) -> int:
    """Sign of a - b for real elements"""
    diff = a - b
    if not isinstance(diff, CycloElem):
        diff = CycloElem.rational(diff)
    return sign_at_standard_embedding(diff, start_bits)


def exact_floor(a: CycloElem, start_bits: int = PREC_BITS) -> int:
    guess = int(np.floor(a.to_complex().real))
    while compare(a, guess, start_bits) < 0:
        guess -= 1
    while compare(a, guess + 1, start_bits) >= 0:
        guess += 1
    return guess


# ---------------------------------------------------------------------------
# Unreduced root sums for hot loops
# ---------------------------------------------------------------------------

class RootSum:
    """Integer combination of n-th roots of unity kept as exponent -> coefficient.

    Products and Galois images never touch the cyclotomic polynomial; only
    is_zero() reduces, through the dense int64 table.
    """
    __slots__ = ("modulus", "terms")

    def __init__(self, n: int, terms: Mapping[int, int]):
        self.modulus = n
        folded: Dict[int, int] = {}
        for e, v in terms.items():
            e %= n
            folded[e] = folded.get(e, 0) + v
        self.terms = {e: v for e, v in folded.items() if v}

    @classmethod
    def root(cls, n: int, exponent: int, coeff: int = 1) -> "RootSum":
        return cls(n, {exponent: coeff})

    def __add__(self, other: "RootSum") -> "RootSum":
        merged = dict(self.terms)
        for e, v in other.terms.items():
            merged[e] = merged.get(e, 0) + v
        return RootSum(self.modulus, merged)

    def __neg__(self) -> "RootSum":
        return RootSum(self.modulus, {e: -v for e, v in self.terms.items()})

    def __sub__(self, other: "RootSum") -> "RootSum":
        return self + (-other)

    def __mul__(self, other: "RootSum") -> "RootSum":
        n = self.modulus
        product: Dict[int, int] = {}
        for e1, v1 in self.terms.items():
            for e2, v2 in other.terms.items():
                e = (e1 + e2) % n
                product[e] = product.get(e, 0) + v1 * v2
        return RootSum(n, product)

    def galois(self, k: int) -> "RootSum":
        return RootSum(self.modulus, {e * k: v for e, v in self.terms.items()})

    def is_zero(self) -> bool:
        if not self.terms:
            return True
        table = cyclotomic_table(self.modulus)
        if sum(abs(v) for v in self.terms.values()) * table.entry_bound >= INT64_SAFE:
            return self.to_elem().is_zero()
        coefs = np.fromiter(self.terms.values(), dtype=np.int64)
        exps = np.fromiter(self.terms.keys(), dtype=np.int64)
        return not np.any(coefs @ table.dense[exps])

    def to_elem(self) -> CycloElem:
        return canonicalize(self.modulus, self.terms)


# ---------------------------------------------------------------------------
# Exact linear algebra helpers
# ---------------------------------------------------------------------------

class SpanSolver:
    """Solves target = sum r_i * column_i over Q for a fixed set of columns"""

    def __init__(self, columns: Sequence[Sequence[Fraction]]):
        self.size = len(columns)
        self.rows = len(columns[0])
        self.columns = [tuple(Fraction(v) for v in col) for col in columns]
        transposed = DomainMatrix.from_list(
            [[_qq(v) for v in col] for col in self.columns], QQ)
        _, pivots = transposed.rref()
        if len(pivots) != self.size:
            raise DegenerateBasisError("columns are linearly dependent")
        self.pivot_rows = tuple(pivots)
        square = DomainMatrix.from_list(
            [[_qq(self.columns[j][i]) for j in range(self.size)] for i in self.pivot_rows], QQ)
        self.inverse = [[_as_fraction(x) for x in row] for row in square.inv().to_list()]

    def solve(self, target: Sequence[Fraction]) -> Optional[Tuple[Fraction, ...]]:
        picked = [Fraction(target[i]) for i in self.pivot_rows]
        coords = tuple(sum((row[k] * picked[k] for k in range(self.size)), Fraction(0))
                       for row in self.inverse)
        for i in range(self.rows):
            value = sum((coords[j] * self.columns[j][i] for j in range(self.size)), Fraction(0))
            if value != target[i]:
                return None
        return coords


def rational_matrix(rows: Iterable[Iterable[Scalar]]) -> DomainMatrix:
    return DomainMatrix.from_list([[_qq(Fraction(v)) for v in row] for row in rows], QQ)


def matrix_to_fractions(matrix: DomainMatrix) -> List[List[Fraction]]:
    return [[_as_fraction(x) for x in row] for row in matrix.to_list()]


def nullspace(rows: Sequence[Sequence[Scalar]]) -> List[Tuple[Fraction, ...]]:
    """Basis of the right kernel over Q"""
    kernel = rational_matrix(rows).nullspace()
    return [tuple(row) for row in matrix_to_fractions(kernel)]


def rank(rows: Sequence[Sequence[Scalar]]) -> int:
    return rational_matrix(rows).rank()


# ---------------------------------------------------------------------------
# Cubic subfields
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CubicFieldDesc:
    ambient_modulus: int
    generator_t: CycloElem
    conductor: int
    fixing_group: Tuple[int, ...]

    @property
    def power_basis(self) -> Tuple[CycloElem, CycloElem, CycloElem]:
        t = self.generator_t
        return CycloElem.rational(1, self.ambient_modulus), t, t * t

    @cached_property
    def coset_representatives(self) -> Tuple[int, int, int]:
        n = self.ambient_modulus
        g = next(k for k in units(n) if k not in self.fixing_group)
        return 1, g, (g * g) % n

    @cached_property
    def _solver(self) -> SpanSolver:
        return SpanSolver([b.coeffs for b in self.power_basis])

    def contains(self, a: CycloElem) -> bool:
        a = _into(a, self.ambient_modulus)
        return a is not None and all(a.galois(k) == a for k in self.fixing_group)

    def same_field(self, other: "CubicFieldDesc") -> bool:
        return self.contains(other.generator_t)

    @cached_property
    def label(self) -> str:
        """Q(cos(pi/m)) for the least m that generates this field, else the conductor"""
        for m in range(2, 4 * self.conductor + 1):
            candidate = CycloElem.zeta(2 * m) + CycloElem.zeta(2 * m, -1)
            if candidate.degree() == 3 and self.contains(candidate):
                return f"Q(cos(pi/{m}))"
        return f"cubic field of conductor {self.conductor}"


def _into(a: CycloElem, n: int) -> Optional[CycloElem]:
    if n % a.modulus == 0:
        return a.lift(n)
    low = a.descend()
    if n % low.modulus == 0:
        return low.lift(n)
    return None


def _conductor(t: CycloElem, fixing: Tuple[int, ...]) -> int:
    n = t.modulus
    group = units(n)
    for d in divisors(n):
        if all(k in fixing for k in group if k % d == 1 % d):
            return d
    return n


def cubic_field(t: CycloElem) -> CubicFieldDesc:
    """Descriptor of Q(t) for a cubic element t"""
    fixing = t.stabilizer()
    if len(units(t.modulus)) != 3 * len(fixing):
        raise NotInSubfieldError(f"{t!r} does not generate a cubic field")
    return CubicFieldDesc(t.modulus, t, _conductor(t, fixing), fixing)


def field_from_group(n: int, fixing: Iterable[int]) -> CubicFieldDesc:
    """Cubic field fixed by an index-3 subgroup, generated by a Gaussian period of some zeta_n^e

    Unit exponents first, then non-units (periods of zeta_d for d | n, counted with multiplicity).
    """
    fixing = tuple(sorted(k % n for k in fixing))
    for e in sorted(range(1, n), key=lambda e: (gcd(e, n) != 1, e)):
        period = canonicalize(n, Counter((e * h) % n for h in fixing))
        if period.degree() == 3:
            return CubicFieldDesc(n, period, _conductor(period, fixing), fixing)
    raise InvariantBreachError(f"no Gaussian period generates the fixed field of {fixing}")


def cubic_subfields(n: int) -> List[CubicFieldDesc]:
    """Every cubic subfield of Q(zeta_n), one per index-3 subgroup of (Z/n)^x"""
    characters = []
    for p, e in sorted(factorization(n).items()):
        if p == 2 or (p - 1) * p ** (e - 1) % 3:
            continue
        q = p ** e
        root = int(primitive_root(q))
        characters.append((q, root, 9 if p == 3 else p))
    fields = []
    rank_3 = len(characters)
    for index in range(1, 3 ** rank_3):
        vector = [(index // 3 ** i) % 3 for i in range(rank_3)]
        if next(v for v in vector if v) != 1:
            continue
        fixing = []
        for k in units(n):
            value = sum(v * int(discrete_log(q, k % q, root)) for v, (q, root, _) in zip(vector, characters))
            if value % 3 == 0:
                fixing.append(k)
        fields.append(field_from_group(n, fixing))
    return sorted(fields, key=lambda K: (K.conductor, K.fixing_group))


# ---------------------------------------------------------------------------
# Trace pairing
# ---------------------------------------------------------------------------

def expand_in_cubic_basis(a: CycloElem, K: CubicFieldDesc) -> Tuple[Fraction, Fraction, Fraction]:
    lifted = _into(a, K.ambient_modulus)
    coords = None if lifted is None else K._solver.solve(lifted.coeffs)
    if coords is None:
        raise NotInSubfieldError(f"{a!r} is not in {K.label}")
    return coords


def combine(coords: Sequence[Scalar], K: CubicFieldDesc) -> CycloElem:
    one, t, t2 = K.power_basis
    return one * Fraction(coords[0]) + t * Fraction(coords[1]) + t2 * Fraction(coords[2])


def trace_K(a: CycloElem, K: CubicFieldDesc) -> Fraction:
    lifted = _into(a, K.ambient_modulus)
    if lifted is None or not K.contains(lifted):
        raise NotInSubfieldError(f"{a!r} is not in {K.label}")
    total = reduce(lambda acc, k: acc + lifted.galois(k), K.coset_representatives[1:], lifted)
    if not total.is_rational():
        raise InvariantBreachError(f"trace of {a!r} is not rational")
    return total.rational_value()


def gram_matrix(c: Sequence[CycloElem], K: CubicFieldDesc) -> List[List[Fraction]]:
    return [[trace_K(ci * cj, K) for cj in c] for ci in c]


def dual_basis(c: Sequence[CycloElem], K: CubicFieldDesc) -> Tuple[CycloElem, CycloElem, CycloElem]:
    """(d_1, d_2, d_3) with trace_K(c_i * d_j) = delta_ij"""
    gram = rational_matrix(gram_matrix(c, K))
    if gram.det() == 0:
        raise DegenerateBasisError("Gram matrix of the trace pairing is singular")
    inverse = matrix_to_fractions(gram.inv())
    return tuple(
        reduce(lambda acc, i: acc + c[i] * inverse[i][j], range(1, 3), c[0] * inverse[0][j])
        for j in range(3)
    )
