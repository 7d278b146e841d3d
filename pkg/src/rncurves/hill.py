"""One-gap Hill operator ``-psi'' + u psi = E psi`` as an independent oracle.

The potential solves ``u'' = 3u^2 - g2`` and oscillates between the turning
points ``2e3`` and ``2e2``, where ``e1 > e2 > e3`` are the roots of
``4t^3 - g2 t - g3``.  It is produced by direct integration, never through
an elliptic special function.  From it we compute the KdV densities by
quadrature, and the band edges and quasimomentum by Floquet theory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq
from scipy.special import roots_legendre

from .errors import ComplexBranchPoints, EdgeCountMismatch, FitIllConditioned, InputError, ODEFailure

ODE_RTOL = 1e-12
FLOQUET_RTOL = 1e-11
FIT_RTOL = 1e-13
SCAN_POINTS = 400


def weierstrass_roots(g2: float, g3: float) -> tuple[float, float, float]:
    """Roots ``e1 > e2 > e3`` of ``4t^3 - g2 t - g3``; all must be real."""
    disc = g2**3 - 27 * g3**2
    if disc < 0:
        raise ComplexBranchPoints(f"g2^3 - 27 g3^2 = {disc:.6g} < 0: complex turning points")
    r = np.roots([4.0, 0.0, -g2, -g3])
    e = np.sort(r.real)[::-1]
    return float(e[0]), float(e[1]), float(e[2])


def _period(g2, g3, e, n=64):
    """``T = 2 int_{2e3}^{2e2} du/|u'|``; with ``u = m + h cos(theta)`` the
    square-root endpoints cancel and the integrand is analytic."""
    e1, e2, e3 = e
    m, h = e2 + e3, e2 - e3
    x, w = roots_legendre(n)
    th = 0.5 * math.pi * (x + 1)
    u = m + h * np.cos(th)
    return float(2 * 0.5 * math.pi * np.sum(w / np.sqrt(2 * (2 * e1 - u))))


@dataclass(frozen=True)
class PotentialOracle:
    """Smooth real periodic potential with ``u(0) = 2e2``, ``u'(0) = 0``.

    ``constant`` marks the degenerate oracle ``u == c``, admitted for
    testing; its period is a free parameter.
    """

    g2: float
    g3: float
    period: float
    e: tuple
    constant: float | None = None
    _sol: object = field(default=None, repr=False, compare=False)

    @property
    def scale(self) -> float:
        return max(max(abs(x) for x in self.e), 1.0 if self.constant is None else abs(self.constant), 1e-300)

    def state(self, x):
        """``(u, u')`` at ``x``, periodic."""
        x = np.asarray(x, float)
        if self.constant is not None:
            return np.full_like(x, self.constant), np.zeros_like(x)
        y = self._sol.sol(np.mod(x, self.period))
        return y[0], y[1]

    def __call__(self, x):
        return self.state(x)[0]

    def energy_defect(self, x):
        """``u'^2 - 2u^3 + 2g2 u + 4g3``; zero along an exact trajectory."""
        u, up = self.state(x)
        return up**2 - 2 * u**3 + 2 * self.g2 * u + 4 * self.g3


def make_potential(g2: float, g3: float) -> PotentialOracle:
    e = weierstrass_roots(g2, g3)
    if min(e[0] - e[1], e[1] - e[2]) <= 1e-12 * max(1.0, abs(e[0])):
        raise InputError("repeated turning point: potential is not periodic with finite period")
    T = _period(g2, g3, e)
    scale = max(abs(x) for x in e)
    sol = solve_ivp(
        lambda x, y: [y[1], 3 * y[0] ** 2 - g2],
        (0.0, T),
        [2 * e[1], 0.0],
        method="DOP853",
        rtol=ODE_RTOL,
        atol=ODE_RTOL * scale,
        dense_output=True,
    )
    if not sol.success:
        raise ODEFailure(sol.message)
    return PotentialOracle(float(g2), float(g3), T, e, None, sol)


def constant_potential(c: float, period: float = 2 * math.pi) -> PotentialOracle:
    """``u == c``: the fixed point of ``u'' = 3u^2 - g2`` with ``g2 = 3c^2``."""
    if period <= 0:
        raise InputError("period must be positive")
    return PotentialOracle(3.0 * c * c, -float(c) ** 3, float(period), (c / 2, c / 2, -c), float(c))


def pn_integrals(pot: PotentialOracle, shift: float = 0.0, panels: int = 32, order: int = 24):
    """Period averages of ``P_-1 = -u/2``, ``P_1 = -u^2/8``, ``P_3 = -(u'^2 + 2u^3)/32``.

    Composite Gauss over ``[shift, shift + T]``; ``u'^2`` comes from the first
    integral so that only ``u`` is sampled.
    """
    x, w = roots_legendre(order)
    edges = shift + pot.period * np.arange(panels + 1) / panels
    a, b = edges[:-1, None], edges[1:, None]
    xs = (0.5 * (a + b) + 0.5 * (b - a) * x).ravel()
    ws = (0.5 * (b - a) * w).ravel()
    u = pot(xs)
    up2 = np.maximum(2 * u**3 - 2 * pot.g2 * u - 4 * pot.g3, 0.0)
    T = pot.period
    return (
        float(ws @ (-u / 2)) / T,
        float(ws @ (-(u**2) / 8)) / T,
        float(ws @ (-(up2 + 2 * u**3) / 32)) / T,
    )


def mean_u_prime_squared(pot: PotentialOracle, panels: int = 32, order: int = 24) -> float:
    """``(1/T) int u'^2 dx``; positive for every non-constant oracle."""
    x, w = roots_legendre(order)
    edges = pot.period * np.arange(panels + 1) / panels
    a, b = edges[:-1, None], edges[1:, None]
    xs = (0.5 * (a + b) + 0.5 * (b - a) * x).ravel()
    ws = (0.5 * (b - a) * w).ravel()
    return float(ws @ (pot.state(xs)[1] ** 2)) / pot.period


def monodromy(pot: PotentialOracle, E, shift: float = 0.0, rtol: float = FLOQUET_RTOL):
    """Period monodromy matrices, shape ``(len(E), 2, 2)``.

    One coupled solve carries ``u`` together with both fundamental solutions
    for every ``E``.
    """
    E = np.atleast_1d(np.asarray(E, float))
    n = len(E)
    u0, up0 = pot.state(shift)
    y0 = np.zeros(2 + 4 * n)
    y0[0], y0[1] = u0, up0
    y0[2::4] = 1.0  # psi1
    y0[5::4] = 1.0  # psi2'
    g2 = pot.g2
    c = pot.constant

    def rhs(x, y):
        u = y[0] if c is None else c
        d = np.empty_like(y)
        d[0] = y[1]
        d[1] = 3 * u * u - g2 if c is None else 0.0
        q = u - E
        d[2::4] = y[3::4]
        d[3::4] = q * y[2::4]
        d[4::4] = y[5::4]
        d[5::4] = q * y[4::4]
        return d

    sol = solve_ivp(rhs, (shift, shift + pot.period), y0, method="DOP853", rtol=rtol, atol=rtol * 1e-2)
    if not sol.success:
        raise ODEFailure(sol.message)
    yT = sol.y[:, -1]
    M = np.empty((n, 2, 2))
    M[:, 0, 0], M[:, 1, 0] = yT[2::4], yT[3::4]
    M[:, 0, 1], M[:, 1, 1] = yT[4::4], yT[5::4]
    return M


def discriminant(pot: PotentialOracle, E, shift: float = 0.0):
    """``Delta(E) = tr M(E)``; scalar in, scalar out."""
    M = monodromy(pot, E, shift)
    d = M[:, 0, 0] + M[:, 1, 1]
    return float(d[0]) if np.ndim(E) == 0 else d


@dataclass(frozen=True)
class FloquetData:
    potential: PotentialOracle
    edges: tuple

    def discriminant(self, E):
        return discriminant(self.potential, E)

    def quasimomentum(self, E):
        return quasimomentum(self.potential, E)


def _refine(pot, target, lo, hi, shift):
    f = lambda E: discriminant(pot, E, shift) - target
    return brentq(f, lo, hi, xtol=1e-14 * max(1.0, abs(lo)), rtol=1e-15)


def band_edges(pot: PotentialOracle, shift: float = 0.0, points: int = SCAN_POINTS) -> tuple:
    """Simple roots ``E0 < E1 < E2`` of ``Delta^2 = 4``.

    Sign changes of ``Delta -+ 2`` on a uniform scan are refined by Brent's
    method.  Touching roots (closed gaps) are dropped.
    """
    e1, e2, e3 = pot.e
    s = pot.scale
    lo, hi = 2 * e3 - 5 * s, 2 * e2 + 20 * s
    for widen in range(3):
        grid = np.linspace(lo, hi, points)
        d = discriminant(pot, grid, shift)
        found = []
        for target in (2.0, -2.0):
            g = d - target
            for k in np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0)[0]:
                r = _refine(pot, target, grid[k], grid[k + 1], shift)
                # a simple root crosses the level, a closed gap only touches it
                h = 1e-3 * (grid[1] - grid[0])
                side = discriminant(pot, np.array([r - h, r + h]), shift) - target
                if side[0] * side[1] < 0:
                    found.append(r)
        found.sort()
        if len(found) == 3:
            return tuple(found)
        lo, hi = lo - 5 * s, hi + 20 * s
    raise EdgeCountMismatch(f"found {len(found)} simple band edges, expected 3")


def floquet(pot: PotentialOracle) -> FloquetData:
    return FloquetData(pot, band_edges(pot))


def quasimomentum(pot: PotentialOracle, E, rtol: float = FLOQUET_RTOL):
    """``p(E) = theta/T`` with ``theta`` among ``2 pi k +- arccos(Delta/2)``
    chosen nearest to ``sqrt(E) T``; meaningful for large ``E`` on a band."""
    E = np.atleast_1d(np.asarray(E, float))
    M = monodromy(pot, E, rtol=rtol)
    d = M[:, 0, 0] + M[:, 1, 1]
    base = np.arccos(np.clip(d / 2, -1.0, 1.0))
    T = pot.period
    ref = np.sqrt(E) * T
    k = np.round(ref / (2 * math.pi))
    cands = np.stack([2 * math.pi * (k + j) + sgn * base for j in (-1, 0, 1) for sgn in (1, -1)])
    pick = cands[np.argmin(np.abs(cands - ref), axis=0), np.arange(len(E))]
    return pick / T


@dataclass(frozen=True)
class QuasimomentumFit:
    H: tuple
    coefficients: np.ndarray
    residual: float
    energies: np.ndarray


def _band_indices(points, lo, hi):
    """Increasing integers, roughly log-spaced on ``[lo, hi]``."""
    ms = np.round(np.geomspace(lo, hi, points))
    for i in range(1, points):
        ms[i] = max(ms[i], ms[i - 1] + 1)
    return ms


def quasimomentum_fit(pot: PotentialOracle, points: int = 12, terms: int = 6, bands=(2, 14)):
    """Least-squares fit of ``p(E) - sqrt(E)`` on ``E^-(2n+1)/2``.

    The energies sit at band centres ``sqrt(E) T = (m + 1/2) pi`` with the
    integers ``m`` log-spaced over ``bands``, where ``arccos`` is well
    conditioned.  Odd powers beyond the three reported ones absorb
    truncation.
    """
    T = pot.period
    E = ((_band_indices(points, *bands) + 0.5) * math.pi / T) ** 2
    p = quasimomentum(pot, E, rtol=FIT_RTOL)
    k = np.sqrt(E)
    A = np.stack([k ** -(2 * n + 1) for n in range(terms)], axis=1)
    col = np.linalg.norm(A, axis=0)
    As = A / col
    if np.linalg.cond(As) > 1e12:
        raise FitIllConditioned("quasimomentum fit design matrix is ill conditioned")
    coef, *_ = np.linalg.lstsq(As, p - k, rcond=None)
    coef = coef / col
    res = float(np.max(np.abs(A @ coef - (p - k))))
    return QuasimomentumFit(tuple(float(c) for c in coef[:3]), coef, res, E)
