import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rncurves.curve import from_cubic, from_roots
from rncurves.errors import OrderTooLarge
from rncurves.periods import OddDifferential
from rncurves.rnd import quasimomentum
from rncurves.series import (
    Laurent,
    expand_at_infinity,
    expand_dE,
    expand_y,
    kdv_hamiltonians,
    power_series_pow,
    q_series,
    qde_coefficients,
)

LEMNISCATE_KDV = (0.4569465810444637, -0.16666666666666666, 0.04569465810444637)


def test_power_series_sqrt():
    f = power_series_pow([1.0, 1.0], 0.5, 8)
    want = [math.comb(1, 0)] + [np.prod([0.5 - i for i in range(k)]) / math.factorial(k) for k in range(1, 8)]
    assert np.allclose(f, want, atol=1e-15)


def test_dE_expansion_exact():
    cv = from_cubic((0.3, -1, 0.2))
    assert expand_dE(12).coefficients() == {-3: -2}
    # dE as the product Y * (dE / Y)
    s = expand_y(cv, 12) * expand_at_infinity(cv, OddDifferential([1.0]), 12)
    assert abs(s[-3] + 2) < 1e-15
    others = [v for j, v in s.coefficients().items() if j != -3]
    assert max(abs(v) for v in others) < 1e-14


def test_dQ_expansion_leading():
    for c in [(0, -1, 0), (0.3, -1 + 1j, 0.2), (0, 1, -0.35)]:
        cv = from_cubic(c)
        s = expand_at_infinity(cv, quasimomentum(cv), 10)
        assert abs(s[-2] + 1) < 1e-14
        assert abs(s[-1]) < 1e-14


def test_order_cap():
    with pytest.raises(OrderTooLarge):
        expand_y(from_cubic((0, -1, 0)), 41)
    with pytest.raises(OrderTooLarge):
        qde_coefficients(from_cubic((0, -1, 0)), 50)


def test_frozen_lemniscate_hamiltonians():
    h = kdv_hamiltonians(from_cubic((0, -1, 0)))
    assert np.allclose(h, LEMNISCATE_KDV, atol=1e-13)


def test_qde_leading_and_parity():
    sc = qde_coefficients(from_cubic((0, -1, -0.5)), 20)
    assert sc.T[3] == -2
    assert abs(sc.T[0]) < 1e-10
    assert abs(sc.T[2]) < 1e-10
    assert max(abs(sc.H[j]) for j in sc.H if j % 2 == 0) < 1e-10


@pytest.mark.parametrize("c", [(0, -1, 0), (0, -1, -0.5), (0.2 + 0.1j, 1 - 1j, 0.4)])
def test_convention_bridge(c):
    sc = qde_coefficients(from_cubic(c), 24)
    assert abs(sc.T[1] + 2 * sc.Hq[-1]) < 1e-12
    for j in sc.Hq:
        if j >= 1 and j in sc.H:
            assert abs(sc.H[j] + 2 * sc.Hq[j]) < 1e-12 * max(1.0, abs(sc.H[j]))


def test_two_extraction_routes():
    # Q dE = d(Q E) - E dQ
    cv = from_cubic((0.2, -1 + 0.3j, 0.5))
    _, sdq, Q = q_series(cv, 20)
    direct = Q * expand_dE(20)
    E = Laurent(-2, np.array([1.0 + 0j]), 40)
    QE = Q * E
    dQE = {j - 1: j * QE[j] for j in range(QE.lo, QE.top + 1) if j != 0}
    EdQ = E * sdq
    for j in range(direct.lo, min(direct.top, EdQ.top) + 1):
        assert abs(direct[j] - (dQE.get(j, 0) - EdQ[j])) < 1e-12


def test_depressed_h_minus1_is_minus_c():
    cv = from_cubic((0, -1, -0.5))
    sc = qde_coefficients(cv, 12)
    assert abs(sc.Hq[-1] + sc.c) < 1e-14


@pytest.mark.parametrize("lam", [0.5, 2.0, 3.0])
def test_scaling(lam):
    r = np.array([-1.3, 0.2, 2.1])
    a = np.array(kdv_hamiltonians(from_roots(r)))
    b = np.array(kdv_hamiltonians(from_roots(lam**2 * r)))
    assert np.allclose(b / a, [lam**2, lam**4, lam**6], rtol=1e-10)


def test_real_roots_real_hamiltonians():
    h = kdv_hamiltonians(from_roots([-2.0, 0.3, 1.1]))
    assert max(abs(x.imag) for x in h) < 1e-10


def test_truncation_monotone():
    cv = from_cubic((0.2, -1 + 0.3j, 0.5))
    a = expand_y(cv, 20).coefficients()
    b = expand_y(cv, 40).coefficients()
    assert max(abs(a[j] - b[j]) for j in a) < 1e-13


coef = st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)


@settings(max_examples=30, deadline=None)
@given(st.lists(coef, min_size=6, max_size=6), st.lists(coef, min_size=6, max_size=6), st.lists(coef, min_size=6, max_size=6))
def test_ring_axioms(a, b, c):
    A, B, C = (Laurent(-2, np.array(x), 3) for x in (a, b, c))
    lhs, rhs = (A * B) * C, A * (B * C)
    assert np.allclose(lhs.c, rhs.c, atol=1e-13 * 64)
    d1, d2 = A * (B + C), A * B + A * C
    top = min(d1.top, d2.top)
    for j in range(d1.lo, top + 1):
        assert abs(d1[j] - d2[j]) < 1e-13 * 16


def test_tail_bound_reported():
    s = expand_at_infinity(from_cubic((0, -1, 0)), OddDifferential([0.5]), 20)
    assert 0 < s.tail_bound < 1e-5
    assert s.radius > 0
