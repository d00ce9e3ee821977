"""Noisy qudit teleportation: fidelity, deviation, and DE stabilization."""

from ._core import (
    BoundCheck,
    Channel,
    DEConfig,
    DeteriorationRow,
    FDReport,
    FidelityBounds,
    GenRecord,
    MeanStderr,
    Protocol,
    QubitDeviationReport,
    RecoverTrace,
    analytic_F,
    deterioration_experiment,
    entanglement_quantity_E,
    fidelity_bounds,
    input_fidelity,
    is_complete,
    load_protocol,
    make_channel,
    make_de_config,
    mc_estimate_FD,
    mc_schur_xi,
    optimal_protocol,
    perturb_protocol,
    qubit_D_analytic,
    qubit_F,
    random_protocol,
    realtime_stabilization,
    recover_experiment,
    save_protocol,
    schur_mean_xi,
    tight_bound_check,
)

__version__ = "0.1.0"

__all__ = [
    "BoundCheck",
    "Channel",
    "DEConfig",
    "DeteriorationRow",
    "FDReport",
    "FidelityBounds",
    "GenRecord",
    "MeanStderr",
    "Protocol",
    "QubitDeviationReport",
    "RecoverTrace",
    "analytic_F",
    "deterioration_experiment",
    "entanglement_quantity_E",
    "fidelity_bounds",
    "input_fidelity",
    "is_complete",
    "load_protocol",
    "make_channel",
    "make_de_config",
    "mc_estimate_FD",
    "mc_schur_xi",
    "optimal_protocol",
    "perturb_protocol",
    "qubit_D_analytic",
    "qubit_F",
    "random_protocol",
    "realtime_stabilization",
    "recover_experiment",
    "save_protocol",
    "schur_mean_xi",
    "tight_bound_check",
]
