from .exponents import (
    DerivativeEnvelope,
    ExponentTrace,
    derivative_envelope,
    geometric_grid,
    lyapunov_trace,
    trace_agreement,
    truncated_orbit_average,
)
from .integrals import (
    ChiEstimate,
    IntegrabilityReport,
    IntegralRow,
    chi_mu_estimate,
    integrability_report,
    truncated_log_df_integral,
    truncated_observable_integral,
)
from .recurrence import (
    RecurrenceProfile,
    VisitAudit,
    deepest_cover,
    recurrence_bound,
    recurrence_profile,
    slow_recurrence,
    visit_audit,
    visit_count,
)

__all__ = [
    "ChiEstimate",
    "DerivativeEnvelope",
    "ExponentTrace",
    "IntegrabilityReport",
    "IntegralRow",
    "RecurrenceProfile",
    "VisitAudit",
    "chi_mu_estimate",
    "deepest_cover",
    "derivative_envelope",
    "geometric_grid",
    "integrability_report",
    "lyapunov_trace",
    "recurrence_bound",
    "recurrence_profile",
    "slow_recurrence",
    "trace_agreement",
    "truncated_log_df_integral",
    "truncated_observable_integral",
    "truncated_orbit_average",
    "visit_audit",
    "visit_count",
]
