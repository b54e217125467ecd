from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rpqverify.cases import FAIL, PASS, SKIPPED
from rpqverify.errors import DomainError
from rpqverify.rational import Q
from rpqverify.scalars import get_preset, rpq_number_at, tau_power
from rpqverify.series import (SeriesRing, TruncatedSeries, bell_by_exponential,
                              bell_expansion_check, bell_polynomials, bell_split_check,
                              h_weight, integrand_insertion, toy_constraint_operator,
                              toy_correspondence_check, verify_bell_split,
                              verify_toy_correspondence)

from conftest import PRESETS

JS = get_preset("js")


def test_low_bell_polynomials():
    ring = SeriesRing(3, 3)
    t1, t2, t3 = ring.times()
    B = bell_polynomials(3, ring.times())
    assert B[0] == 1
    assert B[1] == t1
    assert B[2] == t1 * t1 + t2
    assert B[3] == t1 * t1 * t1 + t1 * t2 * 3 + t3


def test_recurrence_matches_exponential():
    assert bell_expansion_check(8) is None
    ring = SeriesRing(5, 5)
    w = ring.times(lambda s: Q(s) / 3 - 1)
    assert bell_polynomials(5, w) == bell_by_exponential(5, w)


def test_bell_of_zero_times_vanishes():
    ring = SeriesRing(4, 4)
    B = bell_polynomials(4, [ring.zero()] * 4)
    assert B[0] == 1 and all(b.is_zero() for b in B[1:])


def series(ring):
    monos = st.lists(st.integers(0, 2), min_size=ring.nvars, max_size=ring.nvars).map(tuple)
    coefs = st.fractions(min_value=-5, max_value=5, max_denominator=4)
    return st.dictionaries(monos, coefs, max_size=5).map(
        lambda d: TruncatedSeries(ring, {e: Q(c) for e, c in d.items()}))


RING = SeriesRing(3, 4)


@settings(max_examples=60, deadline=None)
@given(series(RING), series(RING), series(RING))
def test_ring_laws_under_truncation(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


LOW = SeriesRing(5, 4, low=2)


@settings(max_examples=40, deadline=None)
@given(series(LOW), series(LOW), series(LOW))
def test_ring_laws_with_high_variable_ideal(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


def test_derivative_product_rule():
    ring = SeriesRing(3, 5)
    t1, t2, t3 = ring.times()
    f, g = t1 * t1 + t2 * 3, t1 * t3 + 2
    assert (f * g).derivative(1) == f.derivative(1) * g + f * g.derivative(1)
    with pytest.raises(DomainError):
        f.derivative(4)


def test_bell_split_small_cases(sp):
    assert bell_split_check(0, JS, sp, "printed") is None
    assert bell_split_check(0, JS, sp, "corrected") is None
    t1, t2 = tau_power("tau1", 1, JS, sp), tau_power("tau2", 1, JS, sp)
    wit = bell_split_check(1, JS, sp, "printed")
    # printed ordering gives (tau2 - tau1) t1 against (tau1 - tau2) t1
    assert wit["monomial"] == "t1"
    assert Fraction(wit["rhs"]) == t2 - t1 and Fraction(wit["lhs"]) == t1 - t2
    assert bell_split_check(1, JS, sp, "corrected") is None
    assert bell_split_check(2, JS, sp, "corrected") is None


@pytest.mark.parametrize("preset", PRESETS, ids=lambda p: p.name)
def test_bell_split_corrected_to_eight(preset, points):
    for l in range(9):
        assert verify_bell_split(l, preset, points).verdict == PASS
    for l in range(1, 9):
        assert verify_bell_split(l, preset, points, "printed").verdict == FAIL


def test_operator_head_at_zero_times(sp):
    op = toy_constraint_operator(1, 1, 2, 0, JS, sp, 4)
    ring = SeriesRing(4, 4)
    rows = op.listing()
    head = rows[0]
    assert head[1] == (1,) and head[2] is None
    assert head[0] == rpq_number_at(4, JS, sp) * tau_power("tau1", 1, JS, sp)
    for coef, derivs, factor in rows[1:]:
        assert factor.coeff((0,) * ring.nvars) == 0


def test_operator_term_table(sp):
    # m=1, a=1, Delta=2, gamma=0, K=4: Bell terms reach d/dt_2..d/dt_5
    op = toy_constraint_operator(1, 1, 2, 0, JS, sp, 4)
    assert [d for _, d, _ in op.listing()] == [(1,), (2,), (3,), (4,), (5,)]
    t1, t2 = tau_power("tau1", 1, JS, sp), tau_power("tau2", 1, JS, sp)
    pref = tau_power("tau2", 4, JS, sp) / (t1 - t2)
    assert op.listing()[1][0] == pref * 2
    assert op.listing()[1][2].coeff((1, 0, 0, 0)) == t1 - t2


def test_insertion_head_term(sp):
    ring = SeriesRing(2, 2)
    ins = integrand_insertion(0, 1, 1, 0, JS, sp, ring)
    assert ins[0].coeff((0, 0)) == rpq_number_at(1, JS, sp)
    ins = integrand_insertion(2, 1, 2, Q("1/2"), JS, sp, ring)
    want = rpq_number_at(Q("13/2"), JS, sp) * tau_power("tau1", 2, JS, sp)
    assert ins[2].coeff((0, 0)) == want


def test_h_weight_is_scalar_on_moments(sp):
    h = h_weight(1, 1, 2, 0, JS, sp)
    # for the JS preset [d] (p - q)/(p^d - q^d) = 1 on every monomial
    assert all(h(J) == 1 for J in range(1, 6))


@pytest.mark.parametrize("preset", PRESETS, ids=lambda p: p.name)
def test_toy_lemma_and_corrected_pass(preset, points):
    for m in (0, 2):
        for delta in (Fraction(1, 2), Fraction(1), Fraction(2)):
            for reading in ("lemma-display", "corrected-exact"):
                case = verify_toy_correspondence(m, 2, delta, Q("1/2"), preset, points, 3, reading)
                assert case.verdict == PASS, (m, delta, reading, case.witness)


def test_toy_exact_route_exposes_display_gap(points):
    case = verify_toy_correspondence(1, 1, 2, 0, JS, points, 2, "lemma-exact")
    assert case.verdict == FAIL
    assert set(case.witness) >= {"moment", "monomial", "lhs", "rhs", "point"}


def test_toy_hand_case(sp):
    # Delta=1, gamma=0, m=1 to t-degree 2
    assert toy_correspondence_check(1, 1, 1, 0, JS, sp, 2) is None


def test_variant_skipped_for_fractional_index(points):
    case = verify_toy_correspondence(0, 1, Fraction(1, 2), 0, JS, points, 2, "variant-exact")
    assert case.verdict == SKIPPED and "not an integer" in case.reason


def test_toy_verdicts_stable_under_deeper_truncation(points):
    for reading in ("lemma-display", "lemma-exact", "corrected-exact"):
        for m, delta in ((0, 1), (1, Fraction(1, 2))):
            a = verify_toy_correspondence(m, 1, delta, 0, JS, points[:1], 2, reading).verdict
            b = verify_toy_correspondence(m, 1, delta, 0, JS, points[:1], 4, reading).verdict
            assert a == b
