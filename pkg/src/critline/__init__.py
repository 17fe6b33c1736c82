"""Numerical toolkit for the balanced quotient Delta6 and its critical-line structure."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AccuracyError,
    CritlineError,
    DivisionError,
    DomainError,
    FitError,
    IncompleteContour,
    NearPoleError,
    PoleError,
    SamplingError,
    SeedError,
)
from .special import (  # noqa: E402
    DEFAULT_CONFIG,
    PrecisionConfig,
    digamma,
    gamma,
    hardy_Z,
    log_gamma,
    profile_config,
    zeta,
)
from .delta6_core import (  # noqa: E402
    EvaluationResult,
    LocalExpansion,
    a_asymptotic,
    a_func,
    critical_phase_approx,
    d_func,
    delta6,
    delta6_leading,
    f6,
    f6_asymptotic,
    local_expansion,
    real_axis_scan,
    t_d,
    t_plus,
    xi1,
)
from .counting import (  # noqa: E402
    CountingReport,
    CriticalLineEvent,
    argument_winding,
    balance_report,
    distribution_comparison,
    find_poles_zeta,
    find_zeros_T_plus,
    n_zeta_main,
    scan_events,
)
from .topology import (  # noqa: E402
    FieldSample,
    LineSeed,
    TracedLine,
    export_field_grid,
    seed_amplitude_unity,
    seed_phase_zero,
    trace,
)
from .counterexample import (  # noqa: E402
    ModificationParams,
    d6_factor,
    modified_delta6,
    n6_factor,
    ratio_expansion_check,
)
