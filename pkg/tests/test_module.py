import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rpqverify.errors import MixedContextError
from rpqverify.module import (DiagPower, Identity, Product, Scaled, Shift, SuperLaurentPoly, Sum,
                              ThetaMultiply, Window, Zero, add, compose, deformed_bracket,
                              eps_bracket, gen_G, gen_L, gen_T, gen_TT, op_equal_on_window,
                              permutation_sign, scale, super_n_bracket, window_norm)
from rpqverify.scalars import get_preset, make_sample_point, rpq_number_at

from conftest import PRESETS

W = Window(-6, 6)


def test_L_action_on_both_parities(sp):
    for preset in PRESETS:
        for n, delta in itertools.product(range(-2, 3), (Fraction(2), Fraction(1, 2))):
            L = gen_L(n, delta, preset, sp)
            for k, par in W.basis():
                want = -rpq_number_at(k + delta * (n + 1) - n, preset, sp)
                assert L.apply_basis(k, par) == SuperLaurentPoly({(k + n, par): want})


def test_L_at_delta_zero_kills_z_n(sp):
    for preset in PRESETS:
        for n in range(-3, 4):
            assert gen_L(n, 0, preset, sp).apply_basis(n).is_zero()


def test_L_js_hand_value(sp):
    js = get_preset("js")
    img = gen_L(2, 1, js, sp).apply_basis(1)
    assert img.coeff(3) == -(sp.p + sp.q)


def test_G_raises_parity(sp):
    for preset in PRESETS:
        G = gen_G(1, 2, preset, sp)
        for k in range(-6, 7):
            assert G.apply_basis(k, 1).is_zero()
            want = -rpq_number_at(k + 2 * 2 - 1, preset, sp)
            assert G.apply_basis(k, 0) == SuperLaurentPoly({(k + 1, 1): want})


def test_T_and_TT_actions(sp):
    for preset in PRESETS:
        for m, a, delta in itertools.product(range(-2, 3), (1, 2), (Fraction(2), Fraction(1, 2))):
            c = rpq_number_at(delta * (m + 1), preset, sp, a)
            T = gen_T(m, a, delta, preset, sp)
            TT = gen_TT(m, a, delta, preset, sp)
            for k in range(-6, 7):
                assert T.apply_basis(k, 0) == SuperLaurentPoly({(k + m, 0): c})
                assert TT.apply_basis(k, 0) == SuperLaurentPoly({(k + m, 1): c})
                assert TT.apply_basis(k, 1).is_zero()


def test_T_hand_values(sp):
    js = get_preset("js")
    assert gen_T(1, 1, 1, js, sp).apply_basis(0).coeff(1) == sp.p + sp.q
    for preset in PRESETS:
        assert op_equal_on_window(gen_T(-1, 1, 2, preset, sp), Zero(), W)


def test_odd_compositions_vanish(sp):
    for preset in PRESETS:
        G1, G2 = gen_G(1, 2, preset, sp), gen_G(-2, 2, preset, sp)
        assert op_equal_on_window(compose(G1, G2), Zero(), W)
        T1, T2 = gen_TT(0, 1, 2, preset, sp), gen_TT(2, 2, 2, preset, sp)
        assert op_equal_on_window(compose(T1, T2), Zero(), W)


def test_operator_algebra(sp):
    js = get_preset("js")
    A = gen_L(1, 2, js, sp)
    assert op_equal_on_window(add(A, scale(-1, A)), Zero(), W)
    assert op_equal_on_window(compose(Shift(1), Shift(2)), Shift(3), W)
    Tm, Tn = gen_T(1, 1, 2, js, sp), gen_T(2, 2, 2, js, sp)
    img = compose(Tm, Tn).apply_basis(0)
    assert img == SuperLaurentPoly({(3, 0): rpq_number_at(4, js, sp) * rpq_number_at(6, js, sp, 2)})


def test_theta_and_diag_atoms(sp):
    th = ThetaMultiply()
    assert th.apply_basis(3, 0) == SuperLaurentPoly({(3, 1): 1})
    assert th.apply_basis(3, 1).is_zero()
    js = get_preset("js")
    D = DiagPower("q", 1, Fraction(1, 2), js, sp)
    for k in range(-3, 4):
        assert D.apply_basis(k, 1).coeff(k, 1) == sp.qpow(k + Fraction(1, 2))


def test_deformed_bracket():
    A, B = Shift(1), Shift(2)
    img = deformed_bracket(A, B, 2, 3).apply_basis(0)
    assert img == SuperLaurentPoly({(3, 0): -1})
    assert op_equal_on_window(deformed_bracket(A, A, 5, 5), Zero(), W)


def test_deformed_bracket_commutator(sp):
    js = get_preset("js")
    A, B = gen_L(1, 2, js, sp), gen_L(-1, 2, js, sp)
    comm = Sum([Product([A, B]), Scaled(-1, Product([B, A]))])
    assert op_equal_on_window(deformed_bracket(A, B, 1, 1), comm, W)


def test_eps_bracket_two_and_three(sp):
    js = get_preset("js")
    A, B = gen_L(1, 2, js, sp), gen_L(2, 2, js, sp)
    assert op_equal_on_window(eps_bracket([A, B]), deformed_bracket(A, B, 1, 1), W)
    Ts = [gen_T(m, 1, 2, js, sp, reading="defining") for m in (0, 1, 2)]
    oracle = Zero()
    for perm in itertools.permutations(range(3)):
        # inversion count gives the sign independently of the cycle-based helper
        inv = sum(1 for i in range(3) for j in range(i + 1, 3) if perm[i] > perm[j])
        oracle = oracle + Scaled((-1) ** inv, Product([Ts[i] for i in perm]))
    assert op_equal_on_window(eps_bracket(Ts), oracle, W)
    assert op_equal_on_window(eps_bracket([Ts[0], Ts[0], Ts[1]]), Zero(), W)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=3, max_size=3), st.integers(0, 1))
def test_eps_bracket_adjacent_swap(ml, i):
    sp = make_sample_point(1, 2)
    js = get_preset("js")
    ops = [gen_L(m, 2, js, sp, reading="ordered") for m in ml]
    sw = list(ops)
    sw[i], sw[i + 1] = sw[i + 1], sw[i]
    assert op_equal_on_window(eps_bracket(sw), Scaled(-1, eps_bracket(ops)), Window(-3, 3))


def test_permutation_sign():
    for perm in itertools.permutations(range(4)):
        inv = sum(1 for i in range(4) for j in range(i + 1, 4) if perm[i] > perm[j])
        assert permutation_sign(perm) == (-1) ** inv


def test_super_n_bracket(sp):
    js = get_preset("js")
    T = gen_T(1, 1, 2, js, sp, reading="defining")
    TT = gen_TT(2, 1, 2, js, sp, reading="defining")
    # n = 2: j=0 gives -TT*T, j=1 gives +T*TT
    want = Sum([Product([T, TT]), Scaled(-1, Product([TT, T]))])
    assert op_equal_on_window(super_n_bracket([T], TT), want, W)
    assert op_equal_on_window(super_n_bracket([T, gen_T(0, 1, 2, js, sp)], Zero()), Zero(), W)
    assert op_equal_on_window(super_n_bracket([T, T], TT), Zero(), W)


def test_window_equality_witness():
    res = op_equal_on_window(Shift(1), Shift(2), Window(-2, 2))
    assert not res
    assert res.basis == (-2, 0)
    assert op_equal_on_window(Identity(), Identity(), W)
    assert window_norm(Scaled(3, Shift(1)), W) == 3


def test_mixed_context_is_an_error():
    js = get_preset("js")
    a, b = make_sample_point(1, 2), make_sample_point(2, 2)
    with pytest.raises(MixedContextError):
        gen_L(1, 2, js, a) + gen_L(1, 2, js, b)


polys = st.dictionaries(st.tuples(st.integers(-4, 4), st.integers(0, 1)),
                        st.fractions(max_denominator=7), max_size=5).map(SuperLaurentPoly)


@settings(max_examples=40, deadline=None)
@given(polys, polys, st.fractions(max_denominator=5))
def test_linearity(f, g, c):
    sp = make_sample_point(3, 2)
    for preset in PRESETS[:3]:
        A = gen_L(1, Fraction(1, 2), preset, sp) + gen_TT(0, 2, 2, preset, sp)
        assert A(f + g.scale(c)) == A(f) + A(g).scale(c)


def test_memoization_is_pure(sp):
    A = gen_G(2, 2, get_preset("cj"), sp)
    assert A.apply_basis(1) == A.apply_basis(1)
