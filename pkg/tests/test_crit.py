import math

import numpy as np
import pytest
from scipy.integrate import quad

from rncurves import crit
from rncurves.curve import from_cubic, from_roots
from rncurves.errors import InputError, MultipleSignChanges, NoSolutionInBracket, RatioOutOfRange
from rncurves.series import expand_y, kdv_hamiltonians, qde_coefficients

# ratio p / g2^(3/2) of the Boutroux curve E^3 + g2 E - p
MONIC_PLUS_RATIO = 0.35226845920930727


@pytest.fixture(scope="module")
def solution():
    return crit.solve_boutroux("monic_plus", 1.0)


def test_residual_real_roots_is_gap_integral():
    cv = from_roots([-1.0, 0.3, 1.2])
    rA, rB = crit.boutroux_residual(cv)
    gap = quad(lambda E: math.sqrt(-cv.monic(E).real), 0.3, 1.2, epsabs=1e-13)[0]
    assert abs(abs(rA) - 2 * gap) < 1e-10
    assert abs(rB) < 1e-12
    assert abs(rA) > 1e-3 * crit.residual_scale(cv)


@pytest.mark.parametrize("lam", [0.5, 3.0])
def test_residual_scaling(lam):
    r = np.array(from_cubic((0.1, -1, -0.4)).roots)
    a = np.array(crit.boutroux_residual(from_roots(r)))
    b = np.array(crit.boutroux_residual(from_roots(lam * r)))
    assert np.allclose(b, lam**2.5 * a, rtol=1e-9, atol=1e-14)


@pytest.mark.parametrize("c", [(0, -1, -0.5), (0, 1, -0.2), (0, 1, -2.0)])
def test_symmetric_cycle_residual_vanishes(c):
    assert abs(crit.boutroux_residual(from_cubic(c))[0]) < 1e-9


def test_solution(solution):
    assert abs(solution.ratio - MONIC_PLUS_RATIO) < 1e-12
    assert max(abs(r) for r in solution.residuals) < 1e-9
    assert sum(r.imag == 0 for r in solution.curve.roots) == 1
    assert solution.curve.conj_symmetric


def test_tighter_bracket_same_root(solution):
    lo, hi = solution.bracket
    w = (hi - lo) / 20
    again = crit.solve_boutroux("monic_plus", 1.0, (solution.g3 - w, solution.g3 + w), scan=5)
    assert abs(again.g3 - solution.g3) < 1e-10


def test_scale_invariance(solution):
    big = crit.solve_boutroux("monic_plus", 16.0)
    assert abs(big.ratio - solution.ratio) < 1e-8


def test_weierstrass_plus_matches_h():
    r = crit.solve_boutroux("weierstrass_plus", 1.0)
    assert abs(r.ratio - MONIC_PLUS_RATIO / 2) < 1e-12
    assert abs(r.implied_h - crit.H_TARGET) < 1e-6


def test_no_solution_in_three_real_root_side():
    with pytest.raises(NoSolutionInBracket) as info:
        crit.solve_boutroux("monic_minus", 1.0)
    assert info.value.bracket is not None


def test_three_real_root_region_has_no_zero():
    # the gap integral only shrinks to zero where two roots collide
    vals = []
    for p in np.linspace(-0.38, 0.38, 9):
        cv = crit.FAMILIES["monic_minus"].curve(1.0, p)
        assert cv.real_roots
        vals.append(abs(crit.boutroux_residual(cv)[0]))
    assert min(vals[1:-1]) > 0.1
    assert min(vals) > 1e-3


def test_multiple_sign_changes():
    # a bracket straddling g3 = 0 picks up the jump where the layout changes
    with pytest.raises(MultipleSignChanges):
        crit.solve_boutroux("monic_plus", 1.0, (-0.5, 0.8), scan=26)


def test_jump_is_not_a_solution():
    with pytest.raises(NoSolutionInBracket):
        crit.solve_boutroux("monic_plus", 1.0, (-0.2, 0.2), scan=6)


def test_unknown_family():
    with pytest.raises(InputError):
        crit.solve_boutroux("nope")


def test_implied_h_known_value():
    assert abs(crit.implied_h(17 / 13**1.5) - 2) < 1e-10


def test_implied_h_round_trip():
    assert abs(crit.implied_h(crit.h_ratio(3.25)) - 3.25) < 1e-12
    for r in (1e-4, 0.1761, 0.5, 30.0):
        assert abs(crit.h_ratio(crit.implied_h(r)) - r) < 1e-12 * max(1, r)


@pytest.mark.parametrize("r", [0.0, -0.3, math.nan])
def test_implied_h_range(r):
    with pytest.raises(RatioOutOfRange):
        crit.implied_h(r)


def test_convention_scan():
    rows = crit.convention_scan(1.0)
    assert [r["family"] for r in rows][:2] == ["weierstrass_plus", "monic_plus"]
    assert sum(r["match"] for r in rows) == 1
    assert {r["status"] for r in rows[2:]} == {"NoSolutionInBracket"}
    assert rows == crit.convention_scan(1.0)


def test_hamiltonian_spec():
    cv = from_cubic((0, -1, -0.5))
    assert crit.hamiltonian(cv, crit.HamiltonianSpec()) == 0.0
    assert crit.hamiltonian(cv, crit.RE_H3) == kdv_hamiltonians(cv)[2].real
    s1 = crit.HamiltonianSpec(((1, 0.5, 0.2),))
    s2 = crit.HamiltonianSpec(((-1, 1.0, -1.0), (3, 2.0, 0.0)))
    lhs = crit.hamiltonian(cv, s1 + s2)
    rhs = crit.hamiltonian(cv, s1) + crit.hamiltonian(cv, s2)
    assert abs(lhs - rhs) < 1e-12
    with pytest.raises(InputError):
        crit.HamiltonianSpec(((2, 1.0, 0.0),))


def test_leaf_chart(solution):
    chart = crit.leaf_chart(crit.chart_point(solution.curve))
    J = chart.jacobian
    for t in chart.tangent:
        assert np.linalg.norm(J @ t) < 1e-6 * np.linalg.norm(J)
    assert np.allclose(chart.tangent @ chart.tangent.T, np.eye(2), atol=1e-10)


def test_chart_rank_at_real_curve():
    x = crit.chart_point(from_cubic((0, -1, 0)))
    chart = crit.leaf_chart(x)
    assert chart.singular_values[-1] > 1e-6
    h = qde_coefficients(from_cubic((0, -1, 0)), 12).Hq[-1]
    assert abs(h.imag) < 1e-12


def test_tangent_plane_step_halving():
    x = crit.chart_point(from_cubic((0, -1, -0.5)))
    a = crit.leaf_chart(x).tangent
    b = crit.leaf_chart(x, step=crit.FD_STEP / 2).tangent
    s = np.linalg.svd(a @ b.T, compute_uv=False)
    assert math.acos(min(1.0, s.min())) < 1e-3


def test_zero_spec_zero_gradient():
    g = crit.constrained_gradient(crit.chart_point(from_cubic((0, -1, -0.5))), crit.HamiltonianSpec(((3, 0.0, 0.0),)))
    assert g.raw_norm == 0 and g.projected_norm == 0


def test_critical_at_solution(solution):
    g = crit.constrained_gradient(crit.chart_point(solution.curve))
    assert g.projected_norm < 1e-5 * (g.raw_norm + 1e-8)


def test_not_critical_at_lemniscate():
    g = crit.constrained_gradient(crit.chart_point(from_cubic((0, -1, 0))))
    assert g.projected_norm > 1e-3 * g.raw_norm


def test_equivalence_on_sample(solution):
    # critical on the leaf exactly when both residuals vanish
    big = crit.solve_boutroux("monic_plus", 9.0)
    curves = [solution.curve, big.curve, from_cubic((0, -1, 0)), from_cubic((0, -1, -0.5)),
              from_cubic((0, 1 + 0.5j, -0.3)), from_cubic((0, 1, -0.2))]
    for cv in curves:
        g = crit.constrained_gradient(crit.chart_point(cv))
        res = max(abs(r) for r in crit.boutroux_residual(cv)) / crit.residual_scale(cv)
        assert (g.relative < 1e-5) == (res < 1e-7)


def test_y_exists_on_depressed_cubic():
    # Y = z^-3 + O(z): no z^-1 term once s1 = 0
    y = expand_y(from_cubic((0, 1, -0.35)), 6)
    assert y[-3] == 1
    assert abs(y[-1]) < 1e-15
