"""Real-normalized differentials on hyperelliptic spectral curves."""

from .curve import SpectralCurve, canonical_homology_basis, from_coeffs, from_cubic, from_roots, intersection_matrix
from .errors import InputError, NumericalError, RNCurvesError
from .periods import OddDifferential, agm_complete_elliptic, holomorphic, integrate_cycle, period_vector
from .rnd import PrincipalPartSpec, build_real_normalized, holomorphic_real_basis, quasimomentum, y_differential
from .series import expand_at_infinity, kdv_hamiltonians, qde_coefficients
from .crit import HamiltonianSpec, boutroux_residual, constrained_gradient, convention_scan, implied_h, solve_boutroux
from .hill import band_edges, constant_potential, discriminant, make_potential, pn_integrals, quasimomentum_fit

__version__ = "0.1.0"
