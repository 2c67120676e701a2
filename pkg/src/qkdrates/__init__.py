"""Secret-key rates, error thresholds, and achievable distances for QKD
protocols under a dark-count-aware security analysis, with a Monte Carlo
pulse simulator for validation."""

__version__ = "0.1.0"

from .entropy import (
    InfeasibleRatesError,
    PauliDistribution,
    binary_entropy,
    conditional_phase_entropy,
    distribution_from_rates,
    joint_bit_phase_entropy,
    worst_case_conditional_phase_entropy,
)
from .keyrate import (
    RateBreakdown,
    max_distance,
    nonuniform_dark_bound,
    rate_alice,
    rate_bob,
    rate_gllp,
    rate_improved,
    rate_shor_preskill,
    threshold_bit_error,
)
from .protocols import (
    BB84,
    PBC00,
    SIX_STATE,
    ProtocolSpec,
    get_protocol,
    protocol_catalog,
)
from .scenario import (
    DecoyInversionError,
    DetectorModel,
    LinkModel,
    Scenario,
    SourceKind,
    SourceModel,
    breakdown,
    decoy_invert,
    distance_sweep,
    poisson_breakdown,
    single_photon_breakdown,
    transmittance,
    worst_case_no_decoy,
)
from .simulator import (
    Category,
    EmpiricalStats,
    EveKind,
    EveModel,
    PulseOutcome,
    empirical_breakdown,
    run_simulation,
    sample_outcomes,
    simulate_decoy_run,
)

__all__ = [
    "BB84",
    "Category",
    "DecoyInversionError",
    "DetectorModel",
    "EmpiricalStats",
    "EveKind",
    "EveModel",
    "InfeasibleRatesError",
    "LinkModel",
    "PBC00",
    "PauliDistribution",
    "ProtocolSpec",
    "PulseOutcome",
    "RateBreakdown",
    "SIX_STATE",
    "Scenario",
    "SourceKind",
    "SourceModel",
    "binary_entropy",
    "breakdown",
    "conditional_phase_entropy",
    "decoy_invert",
    "distance_sweep",
    "distribution_from_rates",
    "empirical_breakdown",
    "get_protocol",
    "joint_bit_phase_entropy",
    "max_distance",
    "nonuniform_dark_bound",
    "poisson_breakdown",
    "protocol_catalog",
    "rate_alice",
    "rate_bob",
    "rate_gllp",
    "rate_improved",
    "rate_shor_preskill",
    "run_simulation",
    "sample_outcomes",
    "simulate_decoy_run",
    "single_photon_breakdown",
    "threshold_bit_error",
    "transmittance",
    "worst_case_conditional_phase_entropy",
    "worst_case_no_decoy",
]
