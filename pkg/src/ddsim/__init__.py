"""Dynamical decoupling simulation toolkit.

Exact propagation of a qubit coupled to a small bath under pulse
sequences at arbitrary precision, Magnus-series error estimates and
an experiment harness for decoupling comparisons.
"""

from . import kernels
from .errors import (
    BadParams,
    BadState,
    BranchAmbiguity,
    DDSimError,
    DimMismatch,
    IoError,
    NegativeInterval,
    NotHermitian,
    NotUnitary,
    PrecisionEscalationFailed,
    PrecisionMismatch,
    Unsupported,
    WidthTooLarge,
)
from .hamiltonians import (
    BathDecomposition,
    CouplingStrengths,
    SpinChainParams,
    ThermalParams,
    build_spin_chain,
    coupling_strengths,
    decompose,
    random_model,
    thermal_bath_state,
)
from .magnus import (
    ConvergenceReport,
    ErrorPhaseEstimate,
    RenormalizationTrace,
    bound_cdd,
    bound_pdd,
    bound_ratio,
    bound_tsds,
    convergence_check,
    error_phase_from_hamiltonian,
    magnus_a1_a2,
    renormalize_finite_width,
    renormalize_ideal,
)
from .operators import OperatorMatrix, PrecisionPolicy, op_norm
from .sequences import (
    Free,
    IdealPulse,
    PulseSequence,
    RectPulse,
    adjust_for_width,
    gen_cdd,
    gen_concat_cpmg,
    gen_cpmg,
    gen_pdd,
    gen_tsds,
    gen_universal_cycle,
    simplify_pauli,
)
from .simulate import (
    EvolutionResult,
    effective_error_hamiltonian,
    evolve,
    purity_loss,
    run_sequence,
    thompson_check,
)

__version__ = "0.1.0"
BACKEND = kernels.BACKEND
