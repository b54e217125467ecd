from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rpqverify.errors import ConfigError, DomainError, FractionalPowerError, SingularError
from rpqverify.scalars import (DEFAULT_REGISTRY, SamplePoint, as_fraction, f_delta, get_preset,
                               load_presets, make_sample_point, plain_pq_number,
                               proportionality_constant, rpq_binomial, rpq_factorial,
                               rpq_number_at, tau_number, tau_power)

from conftest import PRESETS


def test_js_number_matches_hand_value(js_half_third):
    js = get_preset("js")
    assert rpq_number_at(3, js, js_half_third) == Fraction(19, 36)
    assert plain_pq_number(3, js_half_third) == Fraction(19, 36)


def test_bm_half_integer_number():
    sp = SamplePoint(2, Fraction(3, 4), Fraction(1, 2))
    v = sp.v
    assert rpq_number_at(Fraction(1, 2), get_preset("bm"), sp) == 1 / (v + 1 / v)


def test_half_integer_needs_even_rho(js_half_third):
    with pytest.raises(FractionalPowerError):
        rpq_number_at(Fraction(1, 2), get_preset("js"), js_half_third)


@pytest.mark.parametrize("preset", PRESETS, ids=lambda p: p.name)
def test_zero_and_one(preset, sp):
    assert rpq_number_at(0, preset, sp) == 0
    assert rpq_factorial(0, preset, sp) == 1


@pytest.mark.parametrize("preset", PRESETS, ids=lambda p: p.name)
def test_factorial_recurrence_and_binomial(preset, sp):
    for n in range(8):
        assert rpq_factorial(n + 1, preset, sp) == rpq_number_at(n + 1, preset, sp) * rpq_factorial(n, preset, sp)
    for m in range(1, 6):
        assert rpq_binomial(m, 0, preset, sp) == 1
        assert rpq_binomial(m, m, preset, sp) == 1


@pytest.mark.parametrize("preset", PRESETS, ids=lambda p: p.name)
def test_proportionality_constant_is_n_independent(preset, sp):
    vals = {proportionality_constant(n, preset, sp) for n in range(1, 9)}
    assert len(vals) == 1


@pytest.mark.parametrize("preset", PRESETS, ids=lambda p: p.name)
def test_tau_number_ratio(preset, sp):
    c = proportionality_constant(1, preset, sp)
    for n in range(-3, 5):
        assert rpq_number_at(n, preset, sp) == c * tau_number(n, preset, sp)


def test_tau_powers_compose(sp):
    for preset in PRESETS:
        for which in ("tau1", "tau2"):
            assert tau_power(which, 2, preset, sp) * tau_power(which, 3, preset, sp) == tau_power(which, 5, preset, sp)
            assert tau_power(which, -1, preset, sp) * tau_power(which, 1, preset, sp) == 1


def test_preset_taus_are_the_listed_monomials(js_half_third):
    sp = js_half_third
    assert tau_power("tau1", 1, get_preset("js"), sp) == sp.p
    assert tau_power("tau2", 1, get_preset("js"), sp) == sp.q
    assert tau_power("tau2", 1, get_preset("bm"), sp) == 1 / sp.q
    assert tau_power("tau1", 1, get_preset("cj"), sp) == 1 / sp.p


def test_f_delta(js_half_third):
    js = get_preset("js")
    for n in range(0, 4):
        assert f_delta(n, 2, js, js_half_third) == 1
    with pytest.raises(SingularError):
        f_delta(-1, 1, js, js_half_third)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 9), st.integers(-6, 6), st.integers(-6, 6),
       st.sampled_from(range(len(PRESETS))))
def test_addition_law(seed, u, v, k):
    preset = PRESETS[k]
    sp = make_sample_point(seed, 2)
    lhs = rpq_number_at(u + v, preset, sp)
    rhs = tau_power("tau1", v, preset, sp) * rpq_number_at(u, preset, sp) + \
        tau_power("tau2", u, preset, sp) * rpq_number_at(v, preset, sp)
    assert lhs == rhs


@settings(max_examples=40, deadline=None)
@given(st.integers(-4, 4), st.integers(0, 5), st.integers(1, 3))
def test_half_integer_addition_law(u2, seed, a):
    # arguments in Z/2 need rho = 2
    preset = get_preset("js")
    sp = make_sample_point(seed, 2)
    u, v = Fraction(u2, 2), Fraction(1, 2)
    lhs = rpq_number_at(u + v, preset, sp, a)
    rhs = tau_power("tau1", v, preset, sp, a) * rpq_number_at(u, preset, sp, a) + \
        tau_power("tau2", u, preset, sp, a) * rpq_number_at(v, preset, sp, a)
    assert lhs == rhs


def test_sample_point_validation():
    with pytest.raises(DomainError):
        SamplePoint(1, Fraction(1, 3), Fraction(1, 2))
    with pytest.raises(DomainError):
        SamplePoint(0, Fraction(1, 2), Fraction(1, 3))
    assert make_sample_point(5, 2) == make_sample_point(5, 2)


def test_as_fraction():
    assert as_fraction("3/2") == Fraction(3, 2)
    for bad in ("1/0", "x", True, 1.5):
        with pytest.raises(ConfigError):
            as_fraction(bad)


def test_registry_lookup_and_duplicates():
    assert len(DEFAULT_REGISTRY) == 5
    assert get_preset("quesne") is get_preset("q-quesne")
    with pytest.raises(ConfigError):
        get_preset("nope")
    doc = {"name": "custom", "R": "(s - t)/(p - q)", "tau1": "p", "tau2": "q"}
    reg = load_presets([doc])
    assert len(reg) == 6 and len(DEFAULT_REGISTRY) == 5
    with pytest.raises(ConfigError):
        load_presets([doc, doc])
    with pytest.raises(ConfigError):
        load_presets([dict(doc, name="jagannathan-srinivasa")])
