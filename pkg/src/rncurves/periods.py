"""Periods of odd differentials ``N(E) dE / Y`` over the canonical cycles.

Each cycle is a combination of segment lifts, and the period of a lift is
twice the integral along one side of the segment.  With
``E = mid + half*cos(theta)`` the square-root endpoint singularity cancels
and the integral becomes ``-i * int_0^pi N(E)/T(E) dtheta`` with ``T``
smooth, so Gauss-Legendre converges geometrically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre

from .curve import Cycle, Segment, SpectralCurve, canonical_homology_basis
from .errors import NoConvergence, NotRealBranchPoints

DEFAULT_TOL = 1e-12
MIN_NODES = 16
MAX_NODES = 2**14


@dataclass(frozen=True)
class OddDifferential:
    """``N(E) dE / Y`` with ``numerator`` given in ascending powers of E."""

    numerator: tuple

    def __init__(self, numerator):
        c = [complex(x) for x in numerator] or [0j]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "numerator", tuple(c))

    @property
    def degree(self) -> int:
        return len(self.numerator) - 1

    def is_holomorphic(self, genus: int) -> bool:
        return self.degree <= genus - 1

    def __call__(self, E):
        return np.polyval(np.array(self.numerator[::-1]), E)

    def __add__(self, other):
        n = max(len(self.numerator), len(other.numerator))
        a = np.zeros(n, complex)
        a[: len(self.numerator)] += self.numerator
        a[: len(other.numerator)] += other.numerator
        return OddDifferential(a)

    def __mul__(self, k):
        return OddDifferential([k * c for c in self.numerator])

    __rmul__ = __mul__

    def conjugate(self):
        return OddDifferential([c.conjugate() for c in self.numerator])


def holomorphic(curve: SpectralCurve, k: int = 0) -> OddDifferential:
    """``E^k dE / (2Y)``."""
    return OddDifferential([0.0] * k + [0.5])


def exact_dY(curve: SpectralCurve) -> OddDifferential:
    return OddDifferential(curve.numerator_dY())


@dataclass
class PeriodVector:
    values: dict
    nodes: int
    error: float
    labels: tuple = field(default=())

    def __getitem__(self, label):
        return self.values[label]

    def as_array(self) -> np.ndarray:
        return np.array([self.values[k] for k in self.labels])


@lru_cache(maxsize=None)
def _gauss_theta(n):
    x, w = roots_legendre(n)
    return 0.5 * math.pi * (x + 1), 0.5 * math.pi * w


def _tanh_sinh(f, tol, max_level=12):
    """Tanh-sinh rule on [0, pi] with step halving."""
    h = 1.0
    prev = None
    for _ in range(max_level):
        t = np.arange(-int(6 / h), int(6 / h) + 1) * h
        s = 0.5 * math.pi * np.sinh(t)
        x = 0.5 * math.pi * (1 + np.tanh(s))
        w = h * 0.25 * math.pi**2 * np.cosh(t) / np.cosh(s) ** 2
        keep = (x > 0) & (x < math.pi)
        vals = f(x[keep])
        cur = w[keep] @ vals
        l1 = w[keep] @ np.abs(vals)
        if prev is not None and np.max(np.abs(cur - prev)) <= tol * max(np.max(l1), 1e-300):
            return cur, int(keep.sum()), float(np.max(np.abs(cur - prev)))
        prev = cur
        h /= 2
    raise NoConvergence("tanh-sinh fallback did not converge")


def segment_integrals(curve: SpectralCurve, seg: Segment, numerators, tol=DEFAULT_TOL):
    """One-sided integrals ``int_a^b N dE / Y`` for several numerators at once.

    Returns ``(values, nodes, error_estimate)``.
    """
    coeffs = [np.asarray(n, complex)[::-1] for n in numerators]

    def integrand(theta):
        E, T = curve.segment_values(seg, theta)
        return np.array([np.polyval(c, E) / T for c in coeffs]).T

    prev = None
    n = MIN_NODES
    while n <= MAX_NODES:
        theta, w = _gauss_theta(n)
        vals = integrand(theta)
        cur = w @ vals
        l1 = w @ np.abs(vals)
        if prev is not None:
            err = np.max(np.abs(cur - prev))
            if err <= tol * max(np.max(l1), 1e-300):
                return -1j * cur, n, float(err)
        prev = cur
        n *= 2
    try:
        cur, n, err = _tanh_sinh(integrand, tol)
    except NoConvergence:
        raise NoConvergence(
            f"segment {seg.a:.6g} -> {seg.b:.6g}: tolerance {tol:g} not reached with {MAX_NODES} nodes"
        ) from None
    return -1j * cur, n, err


def lift_periods(curve: SpectralCurve, numerators, tol=DEFAULT_TOL):
    """Periods over every segment lift: array of shape (n_segments, n_numerators)."""
    rows, nodes, err = [], 0, 0.0
    for seg in curve.segments:
        v, n, e = segment_integrals(curve, seg, numerators, tol)
        rows.append(2 * v)
        nodes, err = max(nodes, n), max(err, 2 * e)
    return np.array(rows), nodes, err


def cycle_periods(curve: SpectralCurve, numerators, tol=DEFAULT_TOL):
    """Period matrix of shape (2g, n_numerators), rows ordered A1..Ag, B1..Bg."""
    lifts, nodes, err = lift_periods(curve, numerators, tol)
    V = np.array([c.vector(len(curve.segments)) for c in curve.cycles], dtype=float)
    return V @ lifts, nodes, err


def integrate_cycle(curve: SpectralCurve, diff: OddDifferential, cycle: Cycle, tol=DEFAULT_TOL) -> complex:
    """Period of ``diff`` over one basis cycle of ``curve``."""
    total = 0j
    for k, c in cycle.terms:
        v, _, _ = segment_integrals(curve, curve.segments[k], [diff.numerator], tol)
        total += 2 * c * v[0]
    return complex(total)


def period_vector(curve: SpectralCurve, diff: OddDifferential, tol=DEFAULT_TOL) -> PeriodVector:
    per, nodes, err = cycle_periods(curve, [diff.numerator], tol)
    labels = tuple(c.label for c in curve.cycles)
    return PeriodVector(dict(zip(labels, per[:, 0])), nodes, err, labels)


def integrate_path(curve: SpectralCurve, f, path, start_value, order=32):
    """``int f(E, Y) dE`` along a polyline, with ``Y`` continued from ``start_value``.

    Used to check homology invariance against :func:`integrate_cycle`.
    """
    x, w = roots_legendre(order)
    path = [complex(z) for z in path]
    y = complex(start_value)
    total = 0j
    for z0, z1 in zip(path[:-1], path[1:]):
        pts = 0.5 * (z0 + z1) + 0.5 * (z1 - z0) * x
        z = z0
        ys = []
        for p in pts:
            y = curve.continue_y(y, z, p)
            z = p
            ys.append(y)
        y = curve.continue_y(y, z, z1)
        ys = np.array(ys)
        total += 0.5 * (z1 - z0) * np.sum(w * f(pts, ys))
    return complex(total), y


def agm(a, b, tol=1e-16):
    a, b = float(a), float(b)
    while abs(a - b) > tol * abs(a):
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def agm_complete_elliptic(curve: SpectralCurve):
    """Half-periods of ``dE/(2Y)`` for three real branch points ``E0 < E1 < E2``.

    Returns ``(real, imaginary)`` magnitudes: ``int_{E0}^{E1} dE/(2|Y|)`` and
    ``int_{E1}^{E2} dE/(2|Y|)``, from the arithmetic-geometric mean.
    """
    if curve.genus != 1 or not curve.real_roots:
        raise NotRealBranchPoints("AGM oracle needs a genus-1 curve with three real branch points")
    e0, e1, e2 = (r.real for r in curve.roots)
    real = 0.5 * math.pi / agm(math.sqrt(e2 - e0), math.sqrt(e2 - e1))
    imag = 0.5 * math.pi / agm(math.sqrt(e2 - e0), math.sqrt(e1 - e0))
    return real, imag
