"""vqa-lab: statevector laboratory for VQE trainability studies.

Trains a hardware-efficient ansatz on the periodic TLFIM chain with
sequential-minimal (ERNFT) and gradient-descent optimizers, and computes the
diagnostics that explain the observed convergence regions: QFIM rank and the
overparametrization threshold, gradient variance and the barren-plateau
threshold, and the second-order frame potential.
"""

__version__ = "0.1.0"

from .ansatz import ParamCircuit, build_hea, cost, derivative_state, prepare_state
from .diagnostics import (
    FramePotential,
    Qfim,
    Thresholds,
    VarianceCurve,
    bp_threshold,
    frame_potential_2,
    gradient_variance,
    haar_frame_potential,
    loss_difference_variance,
    max_qfim_rank,
    numeric_rank,
    op_threshold,
    qfim,
)
from .hamiltonian import (
    DegenerateSpectrumError,
    Spectrum,
    TlfimParams,
    build_tlfim,
    extremal_eigenvalues,
    relative_residual_energy,
)
from .harness import (
    ExperimentConfig,
    GridDataset,
    aggregate,
    compute_thresholds,
    desk_profile,
    export,
    load_grid,
    mu_value,
    paper_profile,
    run_grid,
)
from .optimize import (
    DivergenceError,
    RunHistory,
    SinusoidFit,
    ernft_epoch,
    fit_sinusoid,
    nft_step,
    parameter_shift_gradient,
    run_ernft,
    run_gd,
)
from .statevector import (
    Gate,
    GateKind,
    PauliSum,
    StateVector,
    apply_gate,
    expectation,
    inner_product,
    zero_state,
)

__all__ = [
    "__version__",
    "ParamCircuit",
    "build_hea",
    "cost",
    "derivative_state",
    "prepare_state",
    "FramePotential",
    "Qfim",
    "Thresholds",
    "VarianceCurve",
    "bp_threshold",
    "frame_potential_2",
    "gradient_variance",
    "haar_frame_potential",
    "loss_difference_variance",
    "max_qfim_rank",
    "numeric_rank",
    "op_threshold",
    "qfim",
    "DegenerateSpectrumError",
    "Spectrum",
    "TlfimParams",
    "build_tlfim",
    "extremal_eigenvalues",
    "relative_residual_energy",
    "ExperimentConfig",
    "GridDataset",
    "aggregate",
    "compute_thresholds",
    "desk_profile",
    "export",
    "load_grid",
    "mu_value",
    "paper_profile",
    "run_grid",
    "DivergenceError",
    "RunHistory",
    "SinusoidFit",
    "ernft_epoch",
    "fit_sinusoid",
    "nft_step",
    "parameter_shift_gradient",
    "run_ernft",
    "run_gd",
    "Gate",
    "GateKind",
    "PauliSum",
    "StateVector",
    "apply_gate",
    "expectation",
    "inner_product",
    "zero_state",
]
