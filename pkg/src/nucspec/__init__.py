"""Discrete spectra of nuclear perturbations of the lattice Laplacian and of
multiplication operators, via perturbation determinants."""

from .conformal import band_distance_bounds, phi, phi_inverse
from .contour import Contour, adaptive_winding, jensen_residual, winding_zero_count
from .determinant import (
    det_lipschitz_gap,
    det_upper_bound_check,
    disc_determinant,
    eigenvalue_sq_sum_check,
    hs_embedding,
    perturbation_determinant,
    regularized_det,
)
from .operators import BandSpec, NuclearOperatorRep, build_laplacian, nuclear_norm_bound
from .resolvent import resolvent_entry, resolvent_norm_bound, small_root
from .spectrum import IntervalProblem, Spectrum, discrete_spectrum, interval_spectrum, laplacian_spectrum
from .sums import BGKParams, Region, asymptotics_sums, bgk_sum, lieb_thirring_sum, region_count_bound

__version__ = "0.1.0"
