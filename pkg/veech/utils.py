import re
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, List, Tuple, Union

from sympy import divisors as _divisors, factorint, totient

# Pre-compile the "num/den" pattern used by every report format
RATIONAL = re.compile(r'^\s*(-?\d+)\s*(?:/\s*(\d+))?\s*$')

# Moduli of the order scan: n >= 3 dividing 2^3*7 or 2^3*9
SCAN_BOUNDS = (56, 72)


@lru_cache(maxsize=None)
def units(n: int) -> Tuple[int, ...]:
    """Representatives of (Z/n)^x in increasing order"""
    if n <= 2:
        return (1,)
    return tuple(k for k in range(1, n) if gcd(k, n) == 1)


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    return int(totient(n))


@lru_cache(maxsize=None)
def divisors(n: int) -> Tuple[int, ...]:
    return tuple(int(d) for d in _divisors(n))


def factorization(n: int) -> Dict[int, int]:
    return {int(p): int(e) for p, e in factorint(n).items()}


def lcm(*values: int) -> int:
    result = 1
    for v in values:
        result = result * v // gcd(result, v)
    return result


def multiplicative_order_of_root(exponent: int, n: int) -> int:
    """Order of exp(2*pi*i*exponent/n)"""
    return n // gcd(exponent % n, n)


def scan_moduli() -> List[int]:
    found = set()
    for bound in SCAN_BOUNDS:
        found.update(d for d in divisors(bound) if d >= 3)
    return sorted(found)


def signed_fraction(exponent: int, n: int) -> Fraction:
    """Map exponent/n into (-1/2, 1/2]"""
    theta = Fraction(exponent % n, n)
    return theta - 1 if theta > Fraction(1, 2) else theta


def format_fraction(value: Union[Fraction, int]) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(text: Union[str, int, Fraction]) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    match = RATIONAL.match(text)
    if not match:
        raise ValueError(f"not a rational number: {text!r}")
    numerator, denominator = match.groups()
    return Fraction(int(numerator), int(denominator or 1))
