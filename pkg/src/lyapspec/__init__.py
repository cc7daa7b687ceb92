"""Pressure, slide functions and Lyapunov spectra of countable Markov interval maps."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .maps import (
    MRLMap,
    PartitionSequence,
    apply,
    birkhoff_log_deriv,
    branch_of,
    cylinder_interval,
    dyadic_luroth,
    dyadic_sequence,
    finite_sequence,
    gauss,
    inverse_branch,
    log_deriv,
    log_dirichlet_sequence,
    luroth,
    lyapunov_mc,
    manneville_pomeau,
    map_from_record,
    orbit,
    periodic_point,
    renyi,
)
from .oracle import enumerate_level_set, finite_legendre, finite_pressure_exact, oracle_vs_legendre
from .pressure import (
    PressureCurve,
    classify_type,
    detect_t_inf,
    find_root_d,
    partition_sum_bounds,
    pressure_curve,
    truncated_pressure,
)
from .slide import (
    CType,
    Kind,
    SlideFunction,
    SlideSpec,
    build_slide,
    legendre,
    newton_map,
    s_newton,
    support_line,
)
from .spectrum import SpectrumPoint, dom_L, spectrum_at_zero, spectrum_curve, spectrum_point
