from fractions import Fraction

import numpy as np
import pytest

from rpqverify.cases import Skip
from rpqverify.errors import DomainError, UnsupportedPresetError
from rpqverify.matrix_model import (MultiSeries, QReduction, dN_check, dN_operator,
                                    formal_shift_analysis, matrix_model_operator, newton_check,
                                    newton_product_determinant, pochhammer, theta,
                                    theta_shift_check, useful_id_check)
from rpqverify.rational import Q
from rpqverify.scalars import get_preset
from rpqverify.series import SeriesRing

from conftest import PRESETS


def test_pochhammer():
    q = QReduction(Fraction(1, 3))
    assert pochhammer(Fraction(1, 2), 0, q) == 1
    assert pochhammer(1, 3, q) == 0
    assert pochhammer(Fraction(1, 2), 2, q) == Fraction(5, 12)


def test_deformation_presets_are_unsupported(sp):
    for preset in PRESETS:
        with pytest.raises(UnsupportedPresetError):
            pochhammer(Fraction(1, 2), 2, preset, sp)
        with pytest.raises(UnsupportedPresetError):
            theta(0.5, preset, 10)


def test_q_reduction_bounds():
    with pytest.raises(DomainError):
        QReduction(Fraction(3, 2))


def test_theta_zero_and_stability():
    q = QReduction(0.5)
    assert theta(1.0, q, 40) == 0
    a, b = theta(0.3, q, 50), theta(0.3, q, 60)
    assert np.isfinite(a) and abs(a - b) <= 1e-12 * abs(b)
    # at K = 40 the truncation error is a few 1e-12
    assert abs(theta(0.3, q, 40) - b) < 1e-11 * abs(b)


def test_theta_shift_float():
    for qv in (0.4, 0.5):
        assert theta_shift_check(QReduction(qv), 50, [0.7, 0.9, 1.3, 1.6, 0.6]) is None


def test_theta_shift_boundary_guard():
    with pytest.raises(Skip):
        theta_shift_check(QReduction(0.5), 10, [0.7])


def test_theta_formal_shift():
    assert theta_shift_check(QReduction(Fraction(1, 2)), 10, (), "formal") is None
    witness, report = formal_shift_analysis(Fraction(1, 2), 10)
    assert witness is None and report


def test_newton_determinant_forms():
    nu = SeriesRing(3, 3).times()
    assert newton_product_determinant(1) == SeriesRing(1, 1).var(1)
    r2 = SeriesRing(2, 2)
    n1, n2 = r2.times()
    assert newton_product_determinant(2) == (n1 * n1 - n2) * Q("1/2")
    n1, n2, n3 = nu
    want = (n1 * n1 * n1 - n1 * n2 * 3 + n3 * 2) * Q("1/6")
    assert newton_product_determinant(3) == want
    for N in range(1, 5):
        assert newton_check(N) is None
    with pytest.raises(DomainError):
        newton_product_determinant(5)


def test_dN_operator_small():
    rows = dN_operator(1).listing()
    assert rows == [(2, (2,), None)]
    with pytest.raises(DomainError):
        dN_operator(4)


def test_dN_on_exponential():
    ring = SeriesRing(2, 3)
    E = MultiSeries.exponential(ring, 1)
    out = E.apply(dN_operator(1)).truncate(2)
    assert out == E.times_monomial((2,)).truncate(2)
    for N, depth in ((1, 4), (2, 3), (2, 4)):
        assert dN_check(N, depth) is None
    assert dN_check(2, 0) is None


def test_matrix_operator_tail_and_head(sp):
    js = get_preset("js")
    pre = 1 / (sp.p - sp.q)
    tail = matrix_model_operator(2, 2, 1, 0, js, sp).listing()
    assert tail == [(-pre * sp.ppow(6) * 2, (2,), None)]
    # n = 2N at zero times: the l = 0 head D_N d_0 and the tail survive
    op = matrix_model_operator(2, 2, 1, 3, js, sp)
    plain = [(c, d) for c, d, f in op.listing() if f is None]
    head = pre * sp.qpow(5) / sp.ppow(5)
    assert plain == [(head * 2, (2, 0)), (-pre * sp.ppow(6) * 2, (2,))]


def test_matrix_operator_index_table(sp):
    # n=1, N=1, K=3: l + n - 2N < 0 drops l = 0; the rest pair d_2 with d_{l-1}
    op = matrix_model_operator(1, 2, 1, 3, get_preset("js"), sp)
    assert [d for _, d, _ in op.listing()] == [(2, 0), (2, 1), (1,)]


def test_useful_id():
    for n in range(4):
        for delta in (Fraction(2), Fraction(1, 2)):
            assert useful_id_check(n, delta, 1) is None
            assert useful_id_check(n, delta, 2, 0.4, 60) is None
    with pytest.raises(Skip):
        useful_id_check(1, 2, 2, 0.4, 10, zs=(0.5, 1.5))
