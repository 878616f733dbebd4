"""Rotating vortex caps and bands of the Euler equations on the unit sphere.

Computes bifurcation spectra of flat zonal caps and bands, follows the
nonlinear branches by amplitude-pinned Newton continuation, and verifies the
solutions by time-integrating the contour dynamics equations.
"""

from .continuation import (
    Branch,
    BranchPoint,
    ContinuationStallError,
    branch_one,
    branch_two,
    kernel_vector_two,
    newton_correct,
    transversality_pairing,
)
from .evolution import (
    Trajectory,
    cap_area,
    evolve,
    rhs_one,
    rigid_rotation_error,
    step_rk4,
)
from .functional import (
    ContourFourier,
    ResidualField,
    functional_one,
    functional_two,
    jacobian_fd,
    stream_on_contour,
)
from .geometry import ColatLong, Point3, chart_c1, chordal_d, green_kernel, rotate_z
from .quadrature import (
    PeriodicGrid,
    gauss_legendre,
    in_closed,
    in_oracle,
    log_singular_multiplier,
    periodic_trapezoid,
)
from .spectral import (
    BandMatrix,
    NondegeneracyCase,
    SpectrumEntry,
    admissible_region_scan,
    band_det_coeffs,
    band_discriminant,
    band_matrix,
    band_speeds,
    burbea_shifted_speed,
    collision_scan,
    find_threshold_n,
    nondegeneracy_case,
    one_interface_symbol,
)
from .states import (
    BandState,
    FlatCapState,
    flat_stream_dtheta_one,
    flat_stream_dtheta_two,
    solve_gauss_one,
    solve_gauss_two,
)

__version__ = "0.1.0"
