"""Flat chains of horizontal cylinders and their vertical decompositions.

The C1-side of a chain with t2 = 0 is read off the first-return rotation of
the upward vertical flow on the core circle of C1: the orbits of the two
endpoints of the saddle connection gamma0 cut the circle into intervals, and
each cycle of intervals under the rotation is one vertical cylinder.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key, reduce
from typing import Dict, List, Sequence, Tuple, Union

from veech.config import PREC_BITS, debug_print
from veech.errors import (
    DegenerateSaddleError,
    GeometricInfeasibilityError,
    InvalidQueryError,
    InvariantBreachError,
    NonPeriodicError,
)
from veech.exactnum import CycloElem, compare, exact_floor
from veech.search import Candidate, chain_lengths
from veech.utils import lcm

SIDE_C1 = "C1"
SIDE_C3 = "C3"
GAMMA0 = "gamma0"
GAMMA0_PRIME = "gamma0'"
# Tracing gives up after STEP_FACTOR * q * lcm(denominators) steps
STEP_FACTOR = 64
VEECH_MODULUS = 28

Number = Union[CycloElem, Fraction, int]


def _elem(x: Number) -> CycloElem:
    return x if isinstance(x, CycloElem) else CycloElem.rational(x)


@dataclass(frozen=True)
class ChainSurface:
    """Horizontal chain C1 - ... - Cg with t2 = 0; twists are stored as
    rational fractions of the circumference of their cylinder"""
    c: Tuple[CycloElem, ...]
    h: Tuple[CycloElem, ...]
    s: CycloElem
    twists: Tuple[Fraction, ...]
    saddle_lengths: Tuple[CycloElem, ...]

    @property
    def g(self) -> int:
        return len(self.c)

    @property
    def area(self) -> CycloElem:
        return reduce(lambda acc, pair: acc + pair[0] * pair[1], zip(self.c, self.h), CycloElem.rational(0))

    def side_area(self, side: str = SIDE_C1) -> CycloElem:
        """Area of the component cut off by the vertical loops in C2"""
        surf = self if side == SIDE_C1 else self.reversed()
        return surf.c[0] * surf.h[0] + surf.saddle_lengths[1] * surf.h[1]

    def reversed(self) -> "ChainSurface":
        """The same chain read from Cg, rescaled to c1 = h1 = 1"""
        c_last, h_last = self.c[-1], self.h[-1]
        c = tuple(x / c_last for x in reversed(self.c))
        h = tuple(x / h_last for x in reversed(self.h))
        return chain_surface(c, h, self.saddle_lengths[-1] / c_last, self.twists[-1], self.twists[0])


def chain_surface(c: Sequence[Number], h: Sequence[Number], s: Number,
                  t1: Fraction, t3: Fraction = Fraction(0), start_bits: int = PREC_BITS) -> ChainSurface:
    c = tuple(_elem(x) for x in c)
    h = tuple(_elem(x) for x in h)
    s = _elem(s)
    if len(c) != 3 or len(h) != 3:
        raise InvalidQueryError("chain surfaces are built for genus 3")
    for name, values in (("c", c), ("h", h)):
        for j, value in enumerate(values, start=1):
            if compare(value, 0, start_bits) <= 0:
                raise GeometricInfeasibilityError(f"{name}{j} is not positive")
    lengths = chain_lengths(s, c)
    for k, length in enumerate(lengths):
        if compare(length, 0, start_bits) <= 0:
            raise GeometricInfeasibilityError(f"saddle length l{k} is not positive")
    twists = (Fraction(t1) % 1, Fraction(0), Fraction(t3) % 1)
    surf = ChainSurface(c, h, s, twists, lengths)
    if compare(surf.area, 0, start_bits) <= 0:
        raise GeometricInfeasibilityError("surface area is not positive")
    return surf


def build_chain_surface(cand: Candidate, t1: Fraction, t3: Fraction = Fraction(0),
                        start_bits: int = PREC_BITS) -> ChainSurface:
    return chain_surface(cand.c, cand.h, cand.s, t1, t3, start_bits)


# ---------------------------------------------------------------------------
# Vertical decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VerticalCylinder:
    height: CycloElem
    circumference: CycloElem
    crossings: Dict[str, int] = field(default_factory=dict)

    def same_as(self, other: "VerticalCylinder") -> bool:
        return (self.height == other.height and self.circumference == other.circumference
                and self.crossings == other.crossings)


def _mod(x: CycloElem, length: CycloElem) -> CycloElem:
    return x - length * exact_floor(x / length)


def _orbit(start: CycloElem, shift: CycloElem, length: CycloElem, cap: int) -> List[CycloElem]:
    points = [start]
    x = _mod(start - shift, length)
    while x != start:
        points.append(x)
        if len(points) > cap:
            raise NonPeriodicError(f"rotation orbit did not close after {cap} steps")
        x = _mod(x - shift, length)
    return points


def vertical_side_decomposition(surf: ChainSurface, side: str = SIDE_C1,
                                start_bits: int = PREC_BITS) -> List[VerticalCylinder]:
    """Vertical cylinders on one side, traced from the first-return rotation"""
    if side == SIDE_C3:
        return vertical_side_decomposition(surf.reversed(), SIDE_C1, start_bits)
    if side != SIDE_C1:
        raise InvalidQueryError(f"unknown side {side!r}")
    t1 = surf.twists[0]
    length, s = surf.c[0], surf.s
    shift = length * t1
    q = t1.denominator
    cap = STEP_FACTOR * q * lcm(q, s.denom, length.denom)
    zero = CycloElem.rational(0)
    marks = _orbit(zero, shift, length, cap)
    marks_s = _orbit(s, shift, length, cap)
    if any(m == x for m in marks for x in marks_s):
        raise DegenerateSaddleError("an endpoint of gamma0 lies on the orbit of the other")
    points = sorted(marks + marks_s, key=cmp_to_key(lambda a, b: compare(a, b, start_bits)))
    ends = points[1:] + [length]
    widths = [end - start for start, end in zip(points, ends)]
    through_gamma0 = [compare(start, s, start_bits) < 0 for start in points]

    def image(index: int) -> int:
        target = _mod(points[index] - shift, length)
        for j, start in enumerate(points):
            if start == target:
                return j
        raise InvariantBreachError("rotation does not permute the intervals")

    cylinders = []
    seen = set()
    for first in range(len(points)):
        if first in seen:
            continue
        cycle = [first]
        j = image(first)
        while j != first:
            cycle.append(j)
            j = image(j)
        seen.update(cycle)
        if any(widths[j] != widths[first] for j in cycle):
            raise InvariantBreachError("intervals of one vertical cylinder differ in width")
        hits = sum(1 for j in cycle if through_gamma0[j])
        misses = len(cycle) - hits
        circumference = surf.h[0] * len(cycle) + surf.h[1] * misses
        cylinders.append(VerticalCylinder(widths[first], circumference, {GAMMA0: hits, GAMMA0_PRIME: misses}))
    if len(cylinders) != 2:
        raise InvariantBreachError(f"expected 2 vertical cylinders on the C1-side, traced {len(cylinders)}")
    debug_print(f"[DEBUG] vertical_side_decomposition - q={q}, {len(points)} intervals")
    return cylinders


def predicted_decomposition(surf: ChainSurface, start_bits: int = PREC_BITS) -> List[VerticalCylinder]:
    """Closed forms for the C1-side with t1 = k/q and p = floor(q*s/c1)"""
    t1 = surf.twists[0]
    q = t1.denominator
    c1, h1, h2 = surf.c[0], surf.h[0], surf.h[1]
    p = exact_floor(surf.s * q / c1, start_bits)
    return [
        VerticalCylinder(surf.s - c1 * Fraction(p, q), h1 * q + h2 * (q - p - 1),
                         {GAMMA0: p + 1, GAMMA0_PRIME: q - p - 1}),
        VerticalCylinder(c1 * Fraction(p + 1, q) - surf.s, h1 * q + h2 * (q - p),
                         {GAMMA0: p, GAMMA0_PRIME: q - p}),
    ]


def moduli_ratio_check(cyls: Sequence[VerticalCylinder]) -> List[Tuple[CycloElem, bool]]:
    if len(cyls) < 2:
        raise InvalidQueryError("moduli ratios need at least two cylinders")
    out = []
    for i in range(len(cyls)):
        for j in range(i + 1, len(cyls)):
            ratio = cyls[i].height * cyls[j].circumference / (cyls[j].height * cyls[i].circumference)
            out.append((ratio, ratio.is_rational()))
    return out


# ---------------------------------------------------------------------------
# The regular 14-gon
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VeechPolygon:
    vertices: Tuple[Tuple[CycloElem, CycloElem], ...]
    raw_c: Tuple[CycloElem, ...]
    raw_h: Tuple[CycloElem, ...]
    raw_s: CycloElem
    raw_twists: Tuple[CycloElem, ...]
    shear: CycloElem
    c: Tuple[CycloElem, ...]
    h: Tuple[CycloElem, ...]
    s: CycloElem
    twists: Tuple[Fraction, ...]

    def surface(self) -> ChainSurface:
        return chain_surface(self.c, self.h, self.s, self.twists[0], self.twists[2])


def build_veech_14gon(start_bits: int = PREC_BITS) -> VeechPolygon:
    """Opposite sides of the regular 14-gon glued, one side horizontal"""
    n = VEECH_MODULUS
    i = CycloElem.zeta(n, 7)
    vertices = []
    for j in range(14):
        w, w_bar = CycloElem.zeta(n, 20 + 2 * j), CycloElem.zeta(n, -(20 + 2 * j))
        vertices.append(((w + w_bar) / 2, (w - w_bar) * (-i) / 2))
    by_height = cmp_to_key(lambda a, b: compare(a[1], b[1], start_bits) or compare(a[0], b[0], start_bits))
    ordered = sorted(vertices, key=by_height)
    levels = []
    for x, y in ordered:
        if levels and levels[-1][0] == y:
            levels[-1][1].append(x)
        else:
            levels.append((y, [x]))
    # the bottom and top sides are horizontal, so every level holds a mirror pair
    if len(levels) != 7 or any(len(xs) != 2 for _, xs in levels):
        raise InvariantBreachError("unexpected level structure of the 14-gon")
    ys = [y for y, _ in levels]
    left = [xs[0] for _, xs in levels]
    right = [xs[-1] for _, xs in levels]
    widths = [r - l for l, r in zip(left, right)]
    strips = len(levels) - 1
    raw_c, raw_h, raw_twists = [], [], []
    for k in range(strips // 2):
        partner = strips - 1 - k
        if ys[k + 1] - ys[k] != ys[partner + 1] - ys[partner]:
            raise InvariantBreachError(f"strips {k} and {partner} differ in height")
        c = widths[k] + widths[k + 1]
        raw_c.append(c)
        raw_h.append(ys[k + 1] - ys[k])
        raw_twists.append(_mod(left[k + 1] - right[k], c))
    raw_s = widths[0]
    shear = -raw_twists[1] / raw_h[1]
    sheared = [_mod(t + shear * h, c) for t, h, c in zip(raw_twists, raw_h, raw_c)]
    twists = []
    for t, c in zip(sheared, raw_c):
        ratio = t / c
        if not ratio.is_rational():
            raise InvariantBreachError("sheared twist is not a rational fraction of its circumference")
        twists.append(ratio.rational_value())
    c0, h0 = raw_c[0], raw_h[0]
    return VeechPolygon(
        vertices=tuple(vertices),
        raw_c=tuple(raw_c),
        raw_h=tuple(raw_h),
        raw_s=raw_s,
        raw_twists=tuple(raw_twists),
        shear=shear,
        c=tuple(x / c0 for x in raw_c),
        h=tuple(x / h0 for x in raw_h),
        s=raw_s / c0,
        twists=tuple(twists),
    )
