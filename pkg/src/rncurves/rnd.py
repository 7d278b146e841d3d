"""Real-normalized differentials in the odd class ``N(E) dE / Y``.

A differential is real-normalized when all its cycle periods are real.  Given
the pole part at infinity (the numerator coefficients of degree >= g), the
remaining g complex coefficients are fixed by the 2g real conditions
``Im(period) = 0``; the solution is unique because a real-normalized
holomorphic differential vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .curve import SpectralCurve
from .errors import InputError, SingularNormalizationSystem
from .periods import DEFAULT_TOL, OddDifferential, cycle_periods

MAX_CONDITION = 1e12


@dataclass(frozen=True)
class PrincipalPartSpec:
    """Pole part at infinity as numerator coefficients of degree ``genus`` and up.

    ``leading[k]`` multiplies ``E^(genus + k)``.  ``initial`` optionally seeds
    the free coefficients (degrees ``0..genus-1``); the result does not
    depend on it.
    """

    genus: int
    leading: tuple
    initial: tuple = field(default=())

    def numerator(self):
        low = list(self.initial) + [0j] * (self.genus - len(self.initial))
        return np.array(low[: self.genus] + list(self.leading), dtype=complex)

    def __add__(self, other):
        if other.genus != self.genus:
            raise InputError("genus mismatch")
        n = max(len(self.leading), len(other.leading))
        a = np.zeros(n, complex)
        a[: len(self.leading)] += self.leading
        a[: len(other.leading)] += other.leading
        return PrincipalPartSpec(self.genus, tuple(a))


def quasimomentum_spec(genus: int = 1) -> PrincipalPartSpec:
    """``dQ ~ -dz/z^2`` at infinity, ``z = E^(-1/2)``: numerator ``E^g/2 + ...``."""
    return PrincipalPartSpec(genus, (0.5,))


def _normalization_matrix(per):
    """Columns act on (Re c_k, Im c_k); rows are Im of each cycle period."""
    return np.hstack([per.imag, per.real])


def _solve(M, rhs):
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise SingularNormalizationSystem(f"normalization system condition number {cond:.3g}")
    return scipy.linalg.lu_solve(scipy.linalg.lu_factor(M), rhs)


def build_real_normalized(curve: SpectralCurve, spec: PrincipalPartSpec, tol=DEFAULT_TOL) -> OddDifferential:
    g = curve.genus
    if spec.genus != g:
        raise InputError("spec genus does not match curve")
    fixed = spec.numerator()
    basis = [np.eye(g, dtype=complex)[k] for k in range(g)]
    per, _, _ = cycle_periods(curve, [fixed] + basis, tol)
    M = _normalization_matrix(per[:, 1:])
    x = _solve(M, -per[:, 0].imag)
    c = x[:g] + 1j * x[g:]
    num = fixed.copy()
    num[:g] += c
    return OddDifferential(num)


def quasimomentum(curve: SpectralCurve, tol=DEFAULT_TOL) -> OddDifferential:
    """The real-normalized ``dQ`` with ``Q = z^{-1} + O(z)`` at infinity.

    At genus 1 this is ``(E + c) dE / (2Y)``.
    """
    return build_real_normalized(curve, quasimomentum_spec(curve.genus), tol)


def holomorphic_real_basis(curve: SpectralCurve, tol=DEFAULT_TOL) -> list[OddDifferential]:
    """``[Omega_A1..Omega_Ag, Omega_B1..Omega_Bg]`` with ``Im`` periods equal to the identity.

    Element ``i`` has imaginary period 1 on cycle ``i`` and 0 on all others
    (cycles ordered A1..Ag, B1..Bg).
    """
    g = curve.genus
    basis = [np.eye(g, dtype=complex)[k] for k in range(g)]
    per, _, _ = cycle_periods(curve, basis, tol)
    M = _normalization_matrix(per)
    X = _solve(M, np.eye(2 * g))
    return [OddDifferential(X[:g, i] + 1j * X[g:, i]) for i in range(2 * g)]


def y_differential(curve: SpectralCurve) -> OddDifferential:
    """``Y dE = monic(E) dE / Y``."""
    n = curve.degree
    c = [1.0, *curve.coeffs]
    return OddDifferential([c[n - k] for k in range(n + 1)])
