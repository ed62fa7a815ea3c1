"""Floquet bands, gap opening and homogeneous Cantor spectrum constructions
for periodic and limit-periodic Jacobi operators."""

from .errors import (
    EdgeSingularity,
    InvalidArgument,
    NotElliptic,
    NumericFailure,
    SearchFailure,
)
from .floquet import (
    BandSpectrum,
    BreakPointSet,
    Metrics,
    band_spectrum,
    break_points,
    genericity_metrics,
)
from .gapopen import find_generic, perturb_last
from .homogenize import (
    ConstructionRun,
    ConstructionStep,
    ac_decay_certificate,
    cantor_certificate,
    construct,
    epsilon_bound,
    schedule_r,
    verify_step_homogeneity,
)
from .hull import HullSpec, SamplingFunction, ks_from_hull, lift_run, sample_sequence
from .ids import (
    anti_trace,
    band_length_check,
    conjugacy_to_rotation,
    elliptic_chain,
    elliptic_fixed_point,
    hs_lower_bound,
    ids_density,
    phase_increment,
)
from .intervals import IntervalSet, hausdorff_distance, homogeneity_profile
from .jacobi import (
    Mat2,
    PeriodicJacobi,
    PeriodicSequence,
    discriminant,
    discriminant_many,
    floquet_restriction,
    monodromy,
    transfer_matrix,
)
from .kernels import backend as kernel_backend

__version__ = "0.1.0"
