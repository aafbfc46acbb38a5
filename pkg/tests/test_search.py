from __future__ import annotations

from fractions import Fraction

import pytest

from veech.errors import InvalidQueryError, InvariantBreachError
from veech.exactnum import CycloElem, dual_basis, expand_in_cubic_basis, trace_K
from veech.search import (
    Reason,
    RootTuple,
    asymmetric_verdict,
    build_candidate,
    check_asymmetric,
    check_symmetric,
    circumference_ratios,
    compute_s,
    enumerate_candidates,
    run_order_scan,
    residue_sums,
    symmetric_verdict,
)

SYMMETRIC_18 = [
    (1, 5, 14), (1, 6, 15), (1, 8, 11), (1, 8, 16), (2, 6, 15), (2, 7, 13),
    (2, 7, 14), (3, 6, 13), (3, 6, 14), (3, 7, 12), (3, 8, 12), (4, 8, 13),
]

ASYMMETRIC_18 = [
    (1, 5, 14), (1, 11, 8), (1, 14, 5), (1, 15, 6), (1, 16, 8), (2, 7, 13), (2, 13, 7), (2, 14, 7),
    (2, 15, 6), (3, 6, 13), (3, 7, 12), (3, 12, 7), (3, 12, 8), (3, 13, 6), (3, 14, 6), (4, 8, 13),
    (4, 13, 8), (5, 1, 14), (5, 14, 1), (6, 3, 14), (6, 13, 3), (6, 14, 3), (7, 2, 14), (7, 13, 2),
    (7, 14, 2), (8, 13, 4), (12, 7, 3), (13, 7, 2), (14, 1, 5), (14, 2, 7), (14, 5, 1), (15, 6, 1),
]


def rt(n, *exponents):
    return RootTuple(n, tuple(exponents))


@pytest.fixture(scope="module")
def case1():
    cand, verdict = build_candidate(rt(7, 1, 5, 3))
    assert verdict.passed
    return cand


@pytest.fixture(scope="module")
def case3():
    cand, verdict = build_candidate(rt(14, 1, 11, 5))
    assert verdict.passed
    return cand


def test_circumferences_solve_residue_equations():
    t = rt(7, 1, 5, 3)
    c = circumference_ratios(t)
    assert c[0] == 1
    assert all(cj.degree() == 3 for cj in c[1:])
    assert all(r.is_zero() for r in residue_sums(c, t.roots()))


def test_circumferences_follow_permutations():
    c = circumference_ratios(rt(7, 1, 3, 5))
    d = circumference_ratios(rt(7, 3, 1, 5))
    # (3,1,5) swaps the first two roots, so its ratios are c_2/c_1 scaled by 1/c_2
    assert d == (1, c[0] / c[1], c[2] / c[1])


def test_circumferences_reject_repeated_root():
    with pytest.raises(InvariantBreachError):
        circumference_ratios(rt(7, 1, 1, 3))


def test_case1_circumferences_and_heights(case1):
    t = case1.K.generator_t
    assert case1.c == (1, t * t + t - 1, 1 + t)
    assert case1.h == case1.c
    assert case1.K.label == "Q(cos(pi/7))"


@pytest.mark.parametrize("n, exponents, expected", [
    (7, (1, 5, 3), (Fraction(9, 7), Fraction(-2, 7), Fraction(-3, 7))),
    (14, (1, 11, 5), (Fraction(8, 7), Fraction(-6, 7), Fraction(2, 7))),
])
def test_saddle_length_expansions(n, exponents, expected):
    cand, _ = build_candidate(RootTuple(n, exponents))
    assert expand_in_cubic_basis(cand.s, cand.K) == expected


def test_compute_s_formula_only():
    ones = (CycloElem.rational(1),) * 3
    theta = (Fraction(1, 4), Fraction(-1, 4), Fraction(1, 4))
    assert compute_s(ones, theta) == Fraction(1, 2)
    with pytest.raises(InvariantBreachError):
        compute_s(ones, (Fraction(0), Fraction(1, 4), Fraction(1, 4)))


def test_heights_are_normalized_trace_dual(case3):
    c, K = case3.c, case3.K
    d = dual_basis(c, K)
    for i in range(3):
        for j in range(3):
            assert trace_K(c[i] * d[j], K) == (1 if i == j else 0)
    assert case3.h == tuple(dj / d[0] for dj in d)
    assert all(ratio > 0 for ratio in case3.moduli_ratios().values())


@pytest.mark.parametrize("n, exponents, expected", [
    (7, (1, 3, 5), True),
    (18, (1, 5, 14), True),
    (8, (1, 3, 5), False),
    (8, (1, 2, 3), False),
])
def test_check_symmetric(n, exponents, expected):
    assert check_symmetric(RootTuple(n, exponents)) is expected


def test_symmetric_reason_codes():
    assert symmetric_verdict(rt(8, 1, 3, 5)).reason in (Reason.NOT_CUBIC, Reason.DISTINCTNESS)
    assert symmetric_verdict(rt(7, 1, 6, 3)).reason is Reason.DISTINCTNESS
    assert symmetric_verdict(rt(14, 2, 4, 6)).reason is Reason.GCD


@pytest.mark.parametrize("n, exponents, expected", [
    (7, (1, 5, 3), True),
    (7, (3, 5, 1), False),
    (14, (1, 11, 5), True),
])
def test_check_asymmetric(n, exponents, expected):
    assert check_asymmetric(RootTuple(n, exponents)) is expected


def test_asymmetric_failure_names_the_inequality():
    cand, _ = build_candidate(rt(7, 3, 5, 1))
    verdict = asymmetric_verdict(cand)
    assert verdict.reason is Reason.SIGN_FAILURE
    assert verdict.detail.startswith("l2")


def test_symmetries_preserve_symmetric_pass():
    for exponents in SYMMETRIC_18[:4]:
        for image in RootTuple(18, exponents).symmetry_orbit():
            assert check_symmetric(image)


def test_enumerate_seven():
    result = enumerate_candidates(7)
    assert result.symmetric == [rt(7, 1, 3, 5)]
    assert result.asymmetric == [rt(7, 1, 3, 5), rt(7, 1, 5, 3), rt(7, 5, 3, 1)]
    assert result.field_labels == ["Q(cos(pi/7))"]
    assert sum(result.reasons.values()) == 7 ** 3


def test_enumerate_fourteen():
    result = enumerate_candidates(14)
    assert result.symmetric == [rt(14, 1, 5, 11)]
    assert result.asymmetric == [rt(14, 1, 11, 5), rt(14, 11, 5, 1)]


def test_enumerate_eighteen():
    result = enumerate_candidates(18)
    assert result.symmetric == [RootTuple(18, e) for e in SYMMETRIC_18]
    assert result.asymmetric == [RootTuple(18, e) for e in ASYMMETRIC_18]
    assert result.field_labels == ["Q(cos(pi/9))"]
    for t in result.asymmetric:
        assert check_symmetric(t)


@pytest.mark.parametrize("n", [8, 9, 12, 24])
def test_enumerate_empty_moduli(n):
    result = enumerate_candidates(n)
    assert result.symmetric == []
    assert result.asymmetric == []


def test_enumerate_rejects_small_modulus():
    with pytest.raises(InvalidQueryError):
        enumerate_candidates(2)


def test_order_scan_finds_three_moduli():
    scan = run_order_scan(workers=2)
    assert sorted(scan.results) == [3, 4, 6, 7, 8, 9, 12, 14, 18, 24, 28, 36, 56, 72]
    assert scan.moduli_with_candidates == [7, 14, 18]
    assert not any(f.startswith("unexpected") for f in scan.flags)
    assert len(scan.candidates()) == sum(len(r.asymmetric) for r in scan.results.values())
    keys = [(c.root_tuple.n, c.root_tuple.exponents) for c in scan.candidates()]
    assert len(keys) == 3 + 2 + 32
    assert (7, (1, 5, 3)) in keys and (14, (1, 11, 5)) in keys
