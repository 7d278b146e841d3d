"""Hyperelliptic spectral curves ``Y^2 = E^(2g+1) + s1 E^(2g) + ... + s_(2g+1)``.

Sheet convention
----------------
The marked point is ``E = infinity``.  ``Y`` is normalized there by
``Y / E^(g+1/2) -> 1`` as ``E -> +inf`` along the positive real axis (tag
:data:`BRANCH_REF`).  Continuing this branch along a large arc, the value far
out in any direction ``w`` is the one closest to the principal power
``w**(g+1/2)``.  The *reference branch* at a finite point ``E`` continues that
value straight down the vertical ray ``E + i t``.

Homology
--------
Basis cycles are integer combinations of segment lifts.  A segment lift runs
along the straight segment between two branch points ``a -> b`` on its left
side and returns ``b -> a`` on its right side; the sheet on the left side is
obtained by continuation from far out along the ray that leaves the segment
midpoint in the direction ``side``.  For three real roots ``E0 < E1 < E2`` the
A-cycle is the lift of ``[E1, E2]`` and the B-cycle the lift of ``[E0, E1]``;
for real coefficients with one real root the A-cycle is the lift of the
segment joining the conjugate pair.  Orientation of the B-cycles is fixed so
that the period matrix has positive definite imaginary part, which is
equivalent to ``A_i . B_j = delta_ij``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np

from .errors import DegenerateCurve, InputError, PathTooCloseToBranchPoint

BRANCH_REF = "E->+inf on the positive real axis"
ROOT_SEPARATION = 1e-8
PATH_CLEARANCE = 1e-6
_FAR = 64.0
_STEP = 0.25


@dataclass(frozen=True)
class Segment:
    """Straight segment between branch points ``roots[p] -> roots[q]``.

    ``side`` is the unit vector pointing to the left of ``a -> b``; ``sheet``
    (+1/-1) relates the boundary value of ``Y`` on that side to the local
    factorization used by :meth:`SpectralCurve.segment_values`.
    """

    p: int
    q: int
    a: complex
    b: complex
    side: complex
    sheet: int = 1

    @property
    def mid(self) -> complex:
        return 0.5 * (self.a + self.b)

    @property
    def half(self) -> complex:
        return 0.5 * (self.b - self.a)


@dataclass(frozen=True)
class Cycle:
    """A basis cycle as an integer combination of segment lifts.

    ``terms`` pairs an index into ``curve.segments`` with a coefficient.
    """

    kind: str
    index: int
    terms: tuple[tuple[int, int], ...]

    @property
    def label(self) -> str:
        return f"{self.kind}{self.index}"

    def vector(self, n: int) -> np.ndarray:
        v = np.zeros(n, dtype=int)
        for k, c in self.terms:
            v[k] += c
        return v


def _horner(c, x):
    y = 1.0
    for s in c:
        y = y * x + s
    return y


def _dist_to_segment(x, a, b):
    d = b - a
    t = ((x - a) * d.conjugate()).real / abs(d) ** 2
    t = min(1.0, max(0.0, t))
    return abs(x - (a + t * d))


def _dist_to_ray(x, m, v):
    t = max(0.0, ((x - m) * v.conjugate()).real)
    return abs(x - (m + t * v))


def _snap_real(roots, scale, real_coeffs):
    """Make the roots of a real polynomial exactly conjugation-closed."""
    if not real_coeffs:
        return list(roots)
    tol = 1e-9 * scale
    real = [complex(r.real, 0.0) for r in roots if abs(r.imag) <= tol]
    upper = sorted((r for r in roots if r.imag > tol), key=lambda z: (z.real, z.imag))
    lower = [r for r in roots if r.imag < -tol]
    out = list(real)
    for z in upper:
        if not lower:
            out.append(z)
            continue
        j = min(range(len(lower)), key=lambda k: abs(lower[k] - z.conjugate()))
        w = lower.pop(j)
        zs = 0.5 * (z + w.conjugate())
        out.extend([zs, zs.conjugate()])
    out.extend(lower)
    return out


def cubic_roots(s1, s2, s3):
    """Roots of ``E^3 + s1 E^2 + s2 E + s3`` by Cardano's formula."""
    s1, s2, s3 = complex(s1), complex(s2), complex(s3)
    shift = s1 / 3
    p = s2 - s1 * s1 / 3
    q = 2 * s1**3 / 27 - s1 * s2 / 3 + s3
    sd = cmath.sqrt((q / 2) ** 2 + (p / 3) ** 3)
    w = -q / 2 + sd
    if abs(-q / 2 - sd) > abs(w):
        w = -q / 2 - sd
    if w == 0:
        ts = [0j, 0j, 0j]
    else:
        u = w ** (1 / 3)
        om = cmath.exp(2j * math.pi / 3)
        ts = [u * om**k - p / (3 * u * om**k) for k in range(3)]
    return [t - shift for t in ts]


def _newton_polish(coeffs, roots, steps=1):
    c = [1.0, *coeffs]
    dc = np.polyder(np.array(c, dtype=complex))
    out = []
    for r in roots:
        for _ in range(steps):
            d = np.polyval(dc, r)
            if d == 0:
                break
            r = r - _horner(coeffs, r) / d
        out.append(complex(r))
    return out


class SpectralCurve:
    """The double cover ``Y^2 = monic(E)`` of genus 1 or 2.

    Instances are immutable once built.  Use :func:`from_cubic`,
    :func:`from_coeffs` or :func:`from_roots` rather than the constructor.
    """

    __slots__ = ("genus", "coeffs", "roots", "branch_ref", "__dict__")

    def __init__(self, coeffs, roots, branch_ref=BRANCH_REF):
        coeffs = tuple(complex(c) for c in coeffs)
        if len(coeffs) not in (3, 5):
            raise InputError("need 3 (genus 1) or 5 (genus 2) coefficients")
        self.genus = (len(coeffs) - 1) // 2
        self.coeffs = coeffs
        self.roots = tuple(sorted((complex(r) for r in roots), key=lambda z: (z.real, z.imag)))
        self.branch_ref = branch_ref
        if len(self.roots) != len(coeffs):
            raise InputError("root count does not match degree")
        self._validate()

    def __repr__(self):
        cs = ", ".join(f"{c:.6g}" for c in self.coeffs)
        return f"SpectralCurve(genus={self.genus}, coeffs=({cs}))"

    # -- basic data -------------------------------------------------------

    @property
    def degree(self) -> int:
        return 2 * self.genus + 1

    @cached_property
    def scale(self) -> float:
        return max(abs(r) for r in self.roots)

    @cached_property
    def is_real(self) -> bool:
        """True when all coefficients are real."""
        L = max(1.0, self.scale)
        return all(abs(c.imag) <= 1e-14 * L ** (k + 1) for k, c in enumerate(self.coeffs))

    @cached_property
    def conj_symmetric(self) -> bool:
        """True when the root set is closed under conjugation (to 1e-10)."""
        tol = 1e-10 * max(1.0, self.scale)
        rs = list(self.roots)
        for r in self.roots:
            j = min(range(len(rs)), key=lambda k: abs(rs[k] - r.conjugate()))
            if abs(rs[j] - r.conjugate()) > tol:
                return False
            rs.pop(j)
        return True

    @property
    def real_roots(self) -> bool:
        return all(r.imag == 0 for r in self.roots)

    @cached_property
    def discriminant(self) -> complex:
        d = 1.0 + 0j
        for r, s in combinations(self.roots, 2):
            d *= (r - s) ** 2
        return d

    def monic(self, E):
        """Evaluate the polynomial under the square root."""
        return _horner(self.coeffs, E)

    def numerator_dY(self):
        """Coefficients (ascending) of ``monic'(E)/2``, the numerator of ``dY``."""
        n = self.degree
        c = [1.0, *self.coeffs]
        asc = [c[n - k] for k in range(n + 1)]
        return [k * asc[k] / 2 for k in range(1, n + 1)]

    def _validate(self):
        L = self.scale
        pairs = [abs(r - s) for r, s in combinations(self.roots, 2)]
        if min(pairs) <= ROOT_SEPARATION * L:
            raise DegenerateCurve(
                f"branch points closer than {ROOT_SEPARATION:g} x scale: min distance {min(pairs):.3g}"
            )

    # -- Y branch ---------------------------------------------------------

    def _far_value(self, w):
        y = cmath.sqrt(self.monic(w))
        ref = w ** (self.genus + 0.5)
        return y if abs(y - ref) <= abs(y + ref) else -y

    def _check_leg(self, z0, z1):
        floor = PATH_CLEARANCE * self.scale
        for r in self.roots:
            if _dist_to_segment(r, z0, z1) <= floor:
                raise PathTooCloseToBranchPoint(
                    f"path segment {z0:.6g} -> {z1:.6g} passes within {floor:.3g} of branch point {r:.6g}"
                )

    def continue_y(self, y0, z0, z1):
        """Analytically continue ``Y`` from ``(z0, y0)`` along the segment to ``z1``."""
        z0, z1 = complex(z0), complex(z1)
        self._check_leg(z0, z1)
        roots = self.roots
        z, y, P = z0, complex(y0), self.monic(z0)
        while z != z1:
            rem = abs(z1 - z)
            step = _STEP * min(abs(z - r) for r in roots)
            z_new = z1 if step >= rem else z + (z1 - z) * (step / rem)
            P_new = self.monic(z_new)
            pred = y * cmath.sqrt(P_new / P)
            y_new = cmath.sqrt(P_new)
            if abs(y_new - pred) > abs(y_new + pred):
                y_new = -y_new
            z, y, P = z_new, y_new, P_new
        return y

    def ray_value(self, E, direction):
        """``Y`` at ``E`` continued from far out along the ray ``E + t*direction``."""
        E = complex(E)
        v = complex(direction) / abs(direction)
        far = E + _FAR * (self.scale + abs(E) + 1.0) * v
        return self.continue_y(self._far_value(far), far, E)

    def reference_y(self, E):
        """Reference branch of ``Y`` at ``E`` (continued down from ``E + i*inf``)."""
        return self.ray_value(E, 1j)

    # -- cuts and cycles --------------------------------------------------

    def _orient(self, p, q):
        """Orient ``p-q`` so the ray leaving the midpoint to the left is clearest."""
        r = self.roots
        best = None
        for a, b in ((p, q), (q, p)):
            v = 1j * (r[b] - r[a]) / abs(r[b] - r[a])
            m = 0.5 * (r[a] + r[b])
            others = [r[k] for k in range(len(r)) if k not in (p, q)]
            clear = min(_dist_to_ray(x, m, v) for x in others)
            if best is None or clear > best[0] * (1 + 1e-12):
                best = (clear, a, b, v)
        return best[1], best[2], best[3]

    def _make_segment(self, p, q, side=None):
        r = self.roots
        if side is None:
            p, q, side = self._orient(p, q)
        a, b = r[p], r[q]
        others = [r[k] for k in range(len(r)) if k not in (p, q)]
        gap = min(_dist_to_segment(x, a, b) for x in others)
        delta = 0.25 * min(abs(b - a) / 2, gap)
        x = 0.5 * (a + b) + delta * side
        y = self.ray_value(x, side)
        seg = Segment(p, q, a, b, side, 1)
        local = self._local_y(seg, np.array([x]))[0]
        ratio = y / local
        sheet = 1 if ratio.real > 0 else -1
        if abs(ratio - sheet) > 1e-6:
            raise PathTooCloseToBranchPoint(f"could not resolve the sheet on segment {a:.6g} -> {b:.6g}")
        return Segment(p, q, a, b, side, sheet)

    def _away_factors(self, seg):
        r = self.roots
        out = []
        for k in range(len(r)):
            if k in (seg.p, seg.q):
                continue
            d = seg.b - seg.a
            t = min(1.0, max(0.0, ((r[k] - seg.a) * d.conjugate()).real / abs(d) ** 2))
            foot = seg.a + t * d
            u = (r[k] - foot) / abs(r[k] - foot)
            out.append((r[k], u, cmath.sqrt(-u)))
        return out

    def _local_t(self, seg, E):
        t = np.ones_like(E, dtype=complex)
        for e, u, c in self._away_factors(seg):
            t = t * (c * np.sqrt(-(E - e) / u))
        return t

    def _local_y(self, seg, E):
        w = E - seg.mid
        s = w * np.sqrt(1 - seg.half**2 / w**2)
        return seg.sheet * s * self._local_t(seg, E)

    def segment_values(self, seg: Segment, theta):
        """Points ``E(theta) = mid + half*cos(theta)`` and the smooth factor ``T``.

        On the left side of the segment ``Y = i*half*sin(theta)*T``; ``T`` is
        analytic on a neighbourhood of the segment.
        """
        theta = np.asarray(theta, dtype=float)
        E = seg.mid + seg.half * np.cos(theta)
        return E, seg.sheet * self._local_t(seg, E)

    def _layout(self):
        r = self.roots
        n = len(r)
        if self.genus == 1:
            if self.real_roots:
                pa, pb = (1, 2), (0, 1)
            elif self.is_real and self.conj_symmetric:
                k = next(i for i in range(3) if r[i].imag == 0)
                lo = next(i for i in range(3) if r[i].imag < 0)
                up = next(i for i in range(3) if r[i].imag > 0)
                pa = (lo, up)
                pb = (k, up if abs(r[k] - r[up]) <= abs(r[k] - r[lo]) else lo)
            else:
                best = None
                for k in range(3):
                    i, j = (x for x in range(3) if x != k)
                    score = _dist_to_segment(r[k], r[i], r[j]) / abs(r[i] - r[j])
                    if best is None or score > best[0] * (1 + 1e-12):
                        best = (score, k, i, j)
                _, k, i, j = best
                pa = (i, j)
                pb = (k, i if abs(r[k] - r[i]) <= abs(r[k] - r[j]) else j)
            segs = [self._make_segment(*pb), self._make_segment(*pa)]
            cycles = [Cycle("A", 1, ((1, 1),)), Cycle("B", 1, ((0, 1),))]
            return segs, cycles

        best = None
        for phi in (0.0, 0.15, -0.15, 0.3, -0.3, 0.6, -0.6, 1.0, -1.0, 1.3, -1.3):
            u = cmath.exp(1j * phi)
            proj = [(x * u.conjugate()).real for x in r]
            chain = sorted(range(n), key=lambda k: proj[k])
            if any(proj[chain[k + 1]] - proj[chain[k]] <= 1e-9 * self.scale for k in range(n - 1)):
                continue
            v = 1j * u
            clear = math.inf
            for k in range(n - 1):
                a, b = r[chain[k]], r[chain[k + 1]]
                m = 0.5 * (a + b)
                for j in range(n):
                    if j in (chain[k], chain[k + 1]):
                        continue
                    clear = min(clear, _dist_to_segment(r[j], a, b), _dist_to_ray(r[j], m, v))
            if best is None or clear > best[0] * (1 + 1e-12):
                best = (clear, chain, v)
        if best is None:
            raise DegenerateCurve("could not lay out branch cuts")
        _, chain, v = best
        segs = [self._make_segment(chain[k], chain[k + 1], v) for k in range(n - 1)]
        cycles = [
            Cycle("A", 1, ((1, 1),)),
            Cycle("A", 2, ((3, 1),)),
            Cycle("B", 1, ((0, 1),)),
            Cycle("B", 2, ((0, 1), (2, 1))),
        ]
        return segs, cycles

    def _lift_periods(self, segs, numerators, n=64):
        """Rough fixed-order periods of the segment lifts (used for orientation)."""
        x, w = np.polynomial.legendre.leggauss(n)
        theta = 0.5 * math.pi * (x + 1)
        w = 0.5 * math.pi * w
        out = np.empty((len(segs), len(numerators)), dtype=complex)
        for i, s in enumerate(segs):
            E, T = self.segment_values(s, theta)
            for j, num in enumerate(numerators):
                out[i, j] = -2j * np.sum(w * np.polyval(num[::-1], E) / T)
        return out

    @cached_property
    def _basis(self):
        segs, cycles = self._layout()
        g = self.genus
        lifts = self._lift_periods(segs, [[0.0] * k + [1.0] for k in range(g)])
        vec = np.array([c.vector(len(segs)) for c in cycles], dtype=float)
        per = vec @ lifts
        OA, OB = per[:g], per[g:]
        tau = OB @ np.linalg.inv(OA)
        ev = np.linalg.eigvalsh(0.5 * (tau.imag + tau.imag.T))
        if np.all(ev < 0):
            cycles = cycles[:g] + [Cycle(c.kind, c.index, tuple((k, -s) for k, s in c.terms)) for c in cycles[g:]]
            flip = True
        elif np.all(ev > 0):
            flip = False
        else:
            raise DegenerateCurve("cycle layout is not a canonical basis")
        # relative orientation of adjacent lifts implied by A1.B1 = +1
        orient = -1 if not flip else 1
        return tuple(segs), tuple(cycles), orient

    @property
    def segments(self) -> tuple[Segment, ...]:
        return self._basis[0]

    @property
    def cycles(self) -> tuple[Cycle, ...]:
        return self._basis[1]


def intersection_matrix(curve: SpectralCurve) -> np.ndarray:
    """Intersection numbers of the basis cycles, computed from their lift chains.

    Adjacent segment lifts share one branch point and meet once; the sign of
    that meeting is the orientation fixed when the basis was built.
    """
    segs, cycles, orient = curve._basis
    n = len(segs)
    J = np.zeros((n, n), dtype=int)
    for k in range(n - 1):
        J[k, k + 1] = orient
        J[k + 1, k] = -orient
    V = np.array([c.vector(n) for c in cycles])
    return V @ J @ V.T


def canonical_homology_basis(curve: SpectralCurve) -> list[Cycle]:
    """A-cycles followed by B-cycles: ``[A1, .., Ag, B1, .., Bg]``."""
    return list(curve.cycles)


def _roots_for(coeffs):
    coeffs = [complex(c) for c in coeffs]
    scale_guess = max(1.0, max(abs(c) ** (1 / (k + 1)) for k, c in enumerate(coeffs)))
    if len(coeffs) == 3:
        roots = cubic_roots(*coeffs)
    elif len(coeffs) == 5:
        roots = list(np.roots([1.0, *coeffs]))
    else:
        raise InputError("need 3 (genus 1) or 5 (genus 2) coefficients")
    roots = _newton_polish(coeffs, roots)
    L = max(max(abs(r) for r in roots), 1e-300)
    real = all(abs(c.imag) <= 1e-15 * scale_guess ** (k + 1) for k, c in enumerate(coeffs))
    if real:
        coeffs = [complex(c.real, 0.0) for c in coeffs]
        roots = _snap_real(roots, L, True)
    return coeffs, roots


def from_coeffs(coeffs) -> SpectralCurve:
    """Curve from the non-leading coefficients ``(s1, .., s_(2g+1))``."""
    coeffs, roots = _roots_for(coeffs)
    return SpectralCurve(coeffs, roots)


def from_cubic(coeffs) -> SpectralCurve:
    if len(coeffs) != 3:
        raise InputError("from_cubic expects (s1, s2, s3)")
    return from_coeffs(coeffs)


def from_roots(roots) -> SpectralCurve:
    """Curve with the given branch points; coefficients by expansion."""
    roots = [complex(r) for r in roots]
    if len(roots) not in (3, 5):
        raise InputError("need 3 or 5 branch points")
    L = max(abs(r) for r in roots)
    for r, s in combinations(roots, 2):
        if abs(r - s) <= ROOT_SEPARATION * L:
            raise DegenerateCurve(f"coincident branch points {r} and {s}")
    c = np.poly(roots)[1:]
    rs = sorted(roots, key=lambda z: (z.real, z.imag))
    closed = all(min(abs(r.conjugate() - s) for s in rs) <= 1e-10 * max(1.0, L) for r in rs)
    if closed:
        c = c.real.astype(complex)
        roots = _snap_real(roots, L, True)
    return SpectralCurve(list(c), roots)


def y_along_path(curve: SpectralCurve, path, start_sheet: int = 1, start_value=None):
    """Values of ``Y`` continued along a polyline.

    The starting value is ``start_sheet`` times the reference branch at
    ``path[0]`` unless ``start_value`` is given explicitly.
    """
    path = [complex(z) for z in path]
    if start_value is None:
        y = start_sheet * curve.reference_y(path[0])
    else:
        y = complex(start_value)
    out = [y]
    for z0, z1 in zip(path[:-1], path[1:]):
        y = curve.continue_y(y, z0, z1)
        out.append(y)
    return out
