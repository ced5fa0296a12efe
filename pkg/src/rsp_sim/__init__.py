"""State-vector simulation of remote preparation of m-qubit states over GHZ-type channels."""
from .engine import (
    AUX,
    MeasurementRecord,
    StateVector,
    apply_unitary,
    fidelity,
    measure_all,
    measure_in_basis,
    outcome_probabilities,
    product_state,
)
from .errors import (
    CapacityError,
    ConstructionError,
    DegenerateBranchError,
    RegisterError,
    RSPError,
    ShapeError,
    UnsupportedOrderError,
    ValidationError,
)
from .harness import EnumerationResult, SampleStats, SweepResult, enumerate_all, sample, sweep_tsp
from .metrics import MetricsReport, cic, intrinsic_efficiency, table2_report, tsp_formula
from .protocol import (
    BranchRecord,
    ChannelSpec,
    DesiredStateSpec,
    MeasurementBasis,
    Protocol,
    amplitude_equalizer,
    build_channel_state,
    build_desired_state,
    build_omega,
    pauli_recovery,
    phase_correction_unitary,
    recovery_label,
    run_branch,
    verify_intermediate_trace,
)
from .signs import SignPattern, cayley_dickson_signs, sign_pattern

__version__ = "0.1.0"

__all__ = [
    "AUX",
    "BranchRecord",
    "CapacityError",
    "ChannelSpec",
    "ConstructionError",
    "DegenerateBranchError",
    "DesiredStateSpec",
    "EnumerationResult",
    "MeasurementBasis",
    "MeasurementRecord",
    "MetricsReport",
    "Protocol",
    "RSPError",
    "RegisterError",
    "SampleStats",
    "ShapeError",
    "SignPattern",
    "StateVector",
    "SweepResult",
    "UnsupportedOrderError",
    "ValidationError",
    "amplitude_equalizer",
    "apply_unitary",
    "build_channel_state",
    "build_desired_state",
    "build_omega",
    "cayley_dickson_signs",
    "cic",
    "enumerate_all",
    "fidelity",
    "intrinsic_efficiency",
    "measure_all",
    "measure_in_basis",
    "outcome_probabilities",
    "pauli_recovery",
    "phase_correction_unitary",
    "product_state",
    "recovery_label",
    "run_branch",
    "sample",
    "sign_pattern",
    "sweep_tsp",
    "table2_report",
    "tsp_formula",
    "verify_intermediate_trace",
]
