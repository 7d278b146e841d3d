"""Expansions at the marked point ``E = infinity`` in ``z = E^(-1/2)``.

With ``E = z^-2`` exactly and ``Y = z^-(2g+1) * sqrt(1 + s1 z^2 + ... )`` on
the reference sheet, every quantity is a Laurent series in ``z`` whose
coefficients follow from the curve coefficients by exact series arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curve import SpectralCurve
from .errors import InputError, OrderTooLarge
from .periods import DEFAULT_TOL, OddDifferential
from .rnd import quasimomentum

MAX_ORDER = 40


@dataclass(frozen=True)
class Laurent:
    """Truncated Laurent series ``sum_{j=lo}^{top} c[j-lo] z^j``.

    Used both for functions and for differentials (as the coefficient of dz).
    """

    lo: int
    c: np.ndarray
    top: int
    tail_bound: float = 0.0
    radius: float = math.inf

    def __getitem__(self, j):
        if j < self.lo or j > self.top:
            if j > self.top:
                raise IndexError(f"z^{j} beyond truncation order {self.top}")
            return 0j
        return complex(self.c[j - self.lo])

    def coefficients(self) -> dict:
        return {self.lo + k: complex(v) for k, v in enumerate(self.c)}

    def __mul__(self, other):
        if isinstance(other, Laurent):
            lo = self.lo + other.lo
            top = min(self.top + other.lo, other.top + self.lo)
            full = np.convolve(self.c, other.c)
            return Laurent(lo, full[: top - lo + 1], top)
        return Laurent(self.lo, self.c * other, self.top, self.tail_bound * abs(other))

    __rmul__ = __mul__

    def __add__(self, other):
        lo = min(self.lo, other.lo)
        top = min(self.top, other.top)
        out = np.zeros(top - lo + 1, complex)
        for s in (self, other):
            k = np.arange(s.lo, min(s.top, top) + 1)
            out[k - lo] += s.c[: len(k)]
        return Laurent(lo, out, top)

    def integrate(self, constant=0.0):
        """Termwise antiderivative; the ``z^-1`` term must vanish."""
        if self.lo <= -1 <= self.top and abs(self[-1]) > 1e-10 * max(1.0, np.max(np.abs(self.c))):
            raise InputError("differential has a residue; integral is not single-valued")
        lo = min(self.lo + 1, 0)
        top = self.top + 1
        out = np.zeros(top - lo + 1, complex)
        for j in range(self.lo, self.top + 1):
            if j != -1:
                out[j + 1 - lo] = self[j] / (j + 1)
        out[-lo] = constant
        return Laurent(lo, out, top)


def power_series_pow(a, alpha, n):
    """First ``n`` coefficients of ``(a0 + a1 t + ...)^alpha`` with ``a0 = 1``."""
    a = np.asarray(a, complex)
    f = np.zeros(n, complex)
    f[0] = 1.0
    for m in range(1, n):
        k = np.arange(1, min(m, len(a) - 1) + 1)
        f[m] = np.sum(((alpha + 1) * k - m) * a[k] * f[m - k]) / m
    return f


def _check(curve, order):
    if order > MAX_ORDER:
        raise OrderTooLarge(f"order {order} exceeds {MAX_ORDER}")


def _radius(curve):
    """Largest rho with sum |s_k| rho^(2k) <= 1/2."""
    cs = [abs(c) for c in curve.coeffs]
    lo, hi = 0.0, 1.0
    while sum(c * hi ** (2 * (k + 1)) for k, c in enumerate(cs)) <= 0.5:
        hi *= 2
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if sum(c * mid ** (2 * (k + 1)) for k, c in enumerate(cs)) <= 0.5:
            lo = mid
        else:
            hi = mid
    return lo


def _sqrt_factor(curve, alpha, order, shift):
    """``z^shift * (1 + s1 z^2 + ...)^alpha`` up to ``z^order``."""
    nt = max(0, (order - shift) // 2) + 1
    ft = power_series_pow([1.0, *curve.coeffs], alpha, nt)
    c = np.zeros(2 * nt - 1, complex)
    c[::2] = ft
    top = shift + len(c) - 1
    # Cauchy tail of the (1+w)^alpha factor at |z| = rho/2, where |w| <= 1/2
    M = 2.0 ** abs(alpha)
    tail = M * 2.0 ** (-(top - shift + 1)) * 2
    return Laurent(shift, c, top, tail)


def expand_y(curve: SpectralCurve, order: int) -> Laurent:
    """The function ``Y`` on the reference sheet, up to ``z^order``."""
    _check(curve, order)
    return _sqrt_factor(curve, 0.5, order, -curve.degree)


def expand_dE(order: int) -> Laurent:
    """``dE = -2 z^-3 dz``."""
    return Laurent(-3, np.array([-2.0 + 0j]), order)


def expand_at_infinity(curve: SpectralCurve, diff: OddDifferential, order: int) -> Laurent:
    """Coefficients of ``z^j dz`` in ``N(E) dE / Y`` for ``j <= order``.

    The attribute ``tail_bound`` bounds the truncated remainder relative to
    the numerator size at ``|z| = rho/2``, where ``rho`` keeps the radicand
    within distance 1/2 of 1.
    """
    _check(curve, order)
    g = curve.genus
    num = np.asarray(diff.numerator, complex)
    d = len(num) - 1
    # N(z^-2) * (-2 z^(2g-2)) * (1 + w)^(-1/2)
    lo = 2 * g - 2 - 2 * d
    f = _sqrt_factor(curve, -0.5, order - lo, 0)
    pre = np.zeros(2 * d + 1, complex)
    pre[::2] = -2 * num[::-1]
    full = np.convolve(pre, f.c)
    top = min(order, lo + f.top)
    tail = f.tail_bound * 2 * float(np.max(np.abs(num)))
    return Laurent(lo, full[: top - lo + 1], top, tail, _radius(curve))


@dataclass(frozen=True)
class SeriesCoefficients:
    """Coefficients of ``Q dE`` and ``Q`` at infinity.

    ``T[k]``: coefficient of ``z^(-k-1) dz`` in ``Q dE`` (k = 0..3).
    ``H[j]``: coefficient of ``z^(j-1) dz`` in ``Q dE`` (j >= 1).
    ``Hq[j]``: coefficient of ``z^(j+2)`` in ``Q`` for odd ``j >= -1``, so that
    ``Q = z^-1 + sum_j Hq[j] z^(j+2)``.
    ``kdv``: ``(Hq[-1], Hq[1], Hq[3])``.
    """

    T: dict
    H: dict
    Hq: dict
    kdv: tuple
    order: int
    c: complex


def q_series(curve: SpectralCurve, order: int = 20, tol=DEFAULT_TOL):
    """``(dQ, Q)`` as Laurent series; ``Q`` has zero constant term."""
    dq = quasimomentum(curve, tol)
    s = expand_at_infinity(curve, dq, order)
    return dq, s, s.integrate(0.0)


def qde_coefficients(curve: SpectralCurve, order: int = 20, tol=DEFAULT_TOL) -> SeriesCoefficients:
    """Coefficients of ``Q dE`` in both the ``T_k, H_j`` and the ``Q``-series convention."""
    if curve.genus != 1:
        raise InputError("genus-1 curve required")
    _check(curve, order)
    if order < 6:
        raise InputError("order must be at least 6 to reach H_3")
    dq, sdq, Q = q_series(curve, order, tol)
    qde = Q * expand_dE(order)
    T = {k: qde[-k - 1] for k in range(4)}
    H = {j: qde[j - 1] for j in range(1, qde.top + 2)}
    Hq = {j: Q[j + 2] for j in range(-1, Q.top - 1, 2)}
    return SeriesCoefficients(T, H, Hq, (Hq[-1], Hq[1], Hq[3]), order, dq.numerator[0] * 2)


def kdv_hamiltonians(curve: SpectralCurve, order: int = 20, tol=DEFAULT_TOL):
    """``(H_-1, H_1, H_3)``: coefficients of ``z, z^3, z^5`` in ``Q``."""
    return qde_coefficients(curve, order, tol).kdv
