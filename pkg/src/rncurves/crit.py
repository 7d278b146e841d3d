"""Critical points of the extended Hamiltonian and the Boutroux condition.

A depressed cubic is critical for ``Re H_3`` on the leaf ``H_-1 = const``
exactly when ``Y dE`` has real periods.  This module solves the period
condition in one-parameter families, inverts the ``h`` parametrization of
the critical ratio, and checks the criticality by finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .curve import SpectralCurve, from_cubic
from .errors import (
    InputError,
    MultipleSignChanges,
    NoSolutionInBracket,
    NumericalError,
    PathTooCloseToBranchPoint,
    RankDeficientConstraint,
    RatioOutOfRange,
)
from .periods import DEFAULT_TOL, cycle_periods
from .rnd import y_differential
from .series import qde_coefficients

H_TARGET = 3.2463822253744278875676
RESIDUAL_TOL = 1e-9
FD_STEP = 1e-5
SCAN_POINTS = 24
_THRESHOLD = 2 / (3 * math.sqrt(3))


@dataclass(frozen=True)
class Family:
    """One-parameter family ``E^3 + a g2 E - b p``; ``p`` is the free parameter.

    ``bracket`` is the default search interval for ``p / g2^(3/2)``.
    """

    tag: str
    description: str
    a: float
    b: float
    bracket: tuple

    def coeffs(self, g2, p):
        return (0.0, self.a * g2, -self.b * p)

    def curve(self, g2, p) -> SpectralCurve:
        return from_cubic(self.coeffs(g2, p))


# frozen registry; the Weierstrass rows fold 4E^3 - g2 E -+ g3 into monic form
FAMILIES = {
    f.tag: f
    for f in (
        Family("monic_minus", "E^3 - g2 E - g3", -1.0, 1.0, (_THRESHOLD * 1.001, 4.0)),
        Family("monic_plus", "E^3 + g2 E - g3", 1.0, 1.0, (0.01, 4.0)),
        Family("weierstrass_minus", "4E^3 - g2 E - g3", -0.25, 0.25, (_THRESHOLD / 2 * 1.001, 4.0)),
        Family("weierstrass_plus", "4E^3 + g2 E - g3", 0.25, 0.25, (0.005, 2.0)),
    )
}


def _family(tag) -> Family:
    try:
        return FAMILIES[tag]
    except KeyError:
        raise InputError(f"unknown family {tag!r}; known: {', '.join(FAMILIES)}") from None


def boutroux_residual(curve: SpectralCurve, tol=DEFAULT_TOL) -> tuple[float, float]:
    """``(Im of A-period, Im of B-period)`` of ``Y dE``."""
    if curve.genus != 1:
        raise InputError("genus-1 curve required")
    per, _, _ = cycle_periods(curve, [y_differential(curve).numerator], tol)
    return float(per[0, 0].imag), float(per[1, 0].imag)


def residual_scale(curve: SpectralCurve) -> float:
    """Natural size of the periods of ``Y dE``: ``scale^(5/2)``."""
    return curve.scale**2.5


def implied_h(ratio: float) -> float:
    """Invert ``ratio = (4h^2 + 1)/(4h^2 - 3)^(3/2)`` on ``h > sqrt(3)/2``.

    With ``t = 4h^2 - 3`` the map is ``(t + 4)/t^(3/2)``, strictly decreasing
    from infinity to zero, so every positive ratio has one preimage.
    """
    ratio = float(ratio)
    if not ratio > 0 or not math.isfinite(ratio):
        raise RatioOutOfRange(f"ratio {ratio!r} outside (0, inf)")
    f = lambda lt: math.log((math.exp(lt) + 4) / math.exp(1.5 * lt)) - math.log(ratio)
    lo, hi = -1.0, 1.0
    while f(lo) < 0:
        lo *= 2
    while f(hi) > 0:
        hi *= 2
    lt = brentq(f, lo, hi, xtol=1e-15, rtol=1e-15)
    return math.sqrt((math.exp(lt) + 3) / 4)


def h_ratio(h: float) -> float:
    s = 4 * h * h
    if s <= 3:
        raise RatioOutOfRange("h must exceed sqrt(3)/2")
    return (s + 1) / (s - 3) ** 1.5


@dataclass(frozen=True)
class BoutrouxResult:
    curve: SpectralCurve
    residuals: tuple
    family: str
    g2: float
    g3: float
    ratio: float
    implied_h: float | None
    iterations: int
    bracket: tuple


def _one_real_root(curve: SpectralCurve) -> bool:
    real = [r for r in curve.roots if abs(r.imag) <= 1e-12 * max(1.0, curve.scale)]
    return len(real) == 1 and curve.conj_symmetric


def solve_boutroux(family: str, g2: float = 1.0, bracket=None, scan: int = SCAN_POINTS, tol=DEFAULT_TOL) -> BoutrouxResult:
    """Root of the B-residual of ``Y dE`` in the free parameter ``g3``.

    On a conjugation-symmetric curve the A-period of ``Y dE`` is real (or the
    two residuals are proportional), so one real equation remains.  The
    bracket is scanned at ``scan`` points; exactly one sign change is
    required, refined by Brent's method (bisection safeguarded with secant
    and inverse quadratic steps).
    """
    fam = _family(family)
    if not g2 > 0:
        raise InputError("g2 must be positive")
    s = g2**1.5
    lo, hi = (b * s for b in fam.bracket) if bracket is None else map(float, bracket)
    if not lo < hi:
        raise InputError("bracket must satisfy lo < hi")

    def rB(p):
        return boutroux_residual(fam.curve(g2, p), tol)[1]

    grid = np.linspace(lo, hi, scan)
    vals = np.array([rB(p) for p in grid])
    flips = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if len(flips) == 0:
        raise NoSolutionInBracket(f"{family}: no sign change on [{lo:.6g}, {hi:.6g}]", (lo, hi), (vals[0], vals[-1]))
    if len(flips) > 1:
        raise MultipleSignChanges(f"{family}: {len(flips)} sign changes on [{lo:.6g}, {hi:.6g}]; split the bracket")
    k = flips[0]
    try:
        p, info = brentq(rB, grid[k], grid[k + 1], xtol=1e-15 * max(1.0, s), rtol=1e-15, full_output=True)
    except (NumericalError, PathTooCloseToBranchPoint) as e:
        # refinement ran into the cut layout switch (real root crossing the A-cut)
        raise NoSolutionInBracket(
            f"{family}: sign change on [{grid[k]:.6g}, {grid[k + 1]:.6g}] is a layout jump ({e})",
            (grid[k], grid[k + 1]), (vals[k], vals[k + 1]),
        ) from None
    cv = fam.curve(g2, p)
    res = boutroux_residual(cv, tol)
    if not _one_real_root(cv):
        raise NumericalError(f"{family}: solution curve is not conjugation symmetric with one real root")
    if max(abs(r) for r in res) >= RESIDUAL_TOL * max(1.0, residual_scale(cv)):
        raise NoSolutionInBracket(
            f"{family}: sign change at g3 = {p:.12g} is a jump, residuals {res}", (grid[k], grid[k + 1]), res
        )
    ratio = p / s
    try:
        h = implied_h(ratio)
    except RatioOutOfRange:
        h = None
    return BoutrouxResult(cv, res, family, float(g2), float(p), ratio, h, info.iterations, (float(grid[k]), float(grid[k + 1])))


def convention_scan(g2: float = 1.0, h_target: float = H_TARGET, tol=DEFAULT_TOL) -> list[dict]:
    """Solve every registered family and compare its implied ``h`` to ``h_target``.

    Rows are sorted by ``h_error`` (families without a solution last, then by
    tag).  A row's ``match`` flag marks ``h_error < 1e-6``.
    """
    rows = []
    for tag in FAMILIES:
        row = {"family": tag, "status": "solved", "g3": None, "ratio": None, "implied_h": None,
               "h_error": None, "residuals": None, "match": False, "message": ""}
        try:
            r = solve_boutroux(tag, g2, tol=tol)
        except NumericalError as e:
            row["status"] = type(e).__name__
            row["message"] = str(e)
        else:
            row.update(g3=r.g3, ratio=r.ratio, implied_h=r.implied_h, residuals=list(r.residuals))
            if r.implied_h is not None:
                row["h_error"] = abs(r.implied_h - h_target)
                row["match"] = row["h_error"] < 1e-6
        rows.append(row)
    rows.sort(key=lambda r: (r["h_error"] is None, r["h_error"] or 0.0, r["family"]))
    return rows


@dataclass(frozen=True)
class HamiltonianSpec:
    """``sum c_j Re H_j + d_j Im H_j`` over ``terms = ((j, c_j, d_j), ...)``."""

    terms: tuple = ()

    def __post_init__(self):
        for j, _, _ in self.terms:
            if j < -1 or j % 2 == 0:
                raise InputError(f"index {j} must be odd and >= -1")

    def __add__(self, other):
        return HamiltonianSpec(tuple(self.terms) + tuple(other.terms))

    @property
    def is_zero(self) -> bool:
        return all(c == 0 and d == 0 for _, c, d in self.terms)


RE_H3 = HamiltonianSpec(((3, 1.0, 0.0),))


def hamiltonian(curve: SpectralCurve, spec: HamiltonianSpec, order: int = 20, tol=DEFAULT_TOL) -> float:
    if not spec.terms:
        return 0.0
    Hq = qde_coefficients(curve, order, tol).Hq
    total = 0.0
    for j, c, d in spec.terms:
        if j not in Hq:
            raise InputError(f"H_{j} needs a higher series order than {order}")
        total += c * Hq[j].real + d * Hq[j].imag
    return total


def chart_curve(x) -> SpectralCurve:
    """``E^3 - g2 E - g3`` from ``x = (Re g2, Im g2, Re g3, Im g3)``."""
    g2 = complex(x[0], x[1])
    g3 = complex(x[2], x[3])
    return from_cubic((0.0, -g2, -g3))


def chart_scale(x) -> float:
    g2 = abs(complex(x[0], x[1]))
    g3 = abs(complex(x[2], x[3]))
    return max(math.sqrt(g2), g3 ** (1 / 3))


def _unscale(x, L):
    return np.asarray(x) * np.array([L**2, L**2, L**3, L**3])


@dataclass(frozen=True)
class LeafChart:
    """Leaf ``H_-1 = const`` near ``base``, in scaled coordinates
    ``(g2/L^2, g3/L^3)`` with ``L = chart_scale(base)``."""

    base: np.ndarray
    scale: float
    jacobian: np.ndarray
    tangent: np.ndarray
    singular_values: np.ndarray
    step: float = field(default=FD_STEP)


def _central(f, x0, L, step):
    """Central differences of ``f`` in scaled coordinates; rows per output."""
    xs = np.asarray(x0, float) / _unscale(np.ones(4), L)
    cols = []
    for k in range(4):
        e = np.zeros(4)
        e[k] = step
        fp = np.atleast_1d(f(_unscale(xs + e, L)))
        fm = np.atleast_1d(f(_unscale(xs - e, L)))
        cols.append((fp - fm) / (2 * step))
    return np.array(cols).T


def _h_minus1(x, order, tol):
    h = qde_coefficients(chart_curve(x), order, tol).Hq[-1]
    return np.array([h.real, h.imag])


def leaf_chart(base, step: float = FD_STEP, order: int = 20, tol=DEFAULT_TOL) -> LeafChart:
    base = np.asarray(base, float)
    if base.shape != (4,):
        raise InputError("base must be 4 reals (Re g2, Im g2, Re g3, Im g3)")
    L = chart_scale(base)
    if L == 0:
        raise InputError("base curve is degenerate")
    J = _central(lambda x: _h_minus1(x, order, tol) / L, base, L, step)
    _, sv, Vt = np.linalg.svd(J)
    if sv[-1] <= 1e-6:
        raise RankDeficientConstraint(f"constraint Jacobian singular values {sv}")
    return LeafChart(base, L, J, Vt[2:], sv, step)


@dataclass(frozen=True)
class GradientReport:
    raw: np.ndarray
    projected: np.ndarray
    raw_norm: float
    projected_norm: float
    chart: LeafChart

    @property
    def relative(self) -> float:
        return self.projected_norm / (self.raw_norm + 1e-8)


def constrained_gradient(base, spec: HamiltonianSpec = RE_H3, step: float = FD_STEP, order: int = 20, tol=DEFAULT_TOL) -> GradientReport:
    """Gradient of the Hamiltonian in scaled chart coordinates, and its
    projection onto the leaf tangent plane."""
    chart = leaf_chart(base, step, order, tol)
    if spec.is_zero:
        raw = np.zeros(4)
    else:
        L = chart.scale
        w = max(abs(j) for j, _, _ in spec.terms)
        raw = _central(lambda x: hamiltonian(chart_curve(x), spec, order, tol) / L ** ((w + 3) / 2), chart.base, L, step)[0]
    proj = chart.tangent @ raw
    return GradientReport(raw, proj, float(np.linalg.norm(raw)), float(np.linalg.norm(proj)), chart)


def chart_point(curve: SpectralCurve) -> np.ndarray:
    """Chart coordinates of a depressed cubic ``E^3 + s1 E + s2``."""
    if curve.genus != 1 or abs(curve.coeffs[0]) > 1e-12 * max(1.0, curve.scale):
        raise InputError("depressed genus-1 curve required")
    g2, g3 = -complex(curve.coeffs[1]), -complex(curve.coeffs[2])
    return np.array([g2.real, g2.imag, g3.real, g3.imag])
