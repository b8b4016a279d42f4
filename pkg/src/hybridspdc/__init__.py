"""Numerical simulation of pair generation with a quantised, depleting pump.

The package integrates the exact few-mode dynamics block by block, expresses
the pump over displaced number states, builds products of several sources,
mixes their pumps with passive unitaries and heralds entangled signal/idler
states with on/off detectors.
"""

from .conditioning import (
    HeraldResult,
    apd_project,
    herald_three_source,
    herald_two_source,
    probability_scaling,
)
from .errors import (
    CutoffTooSmall,
    DimensionTooLarge,
    DivisionByZeroEntry,
    FrameMismatch,
    MissingGEntry,
    NonZeroFrame,
    RescaleUndefined,
    SimulationError,
    UnknownLabel,
)
from .fock_algebra import (
    DensityOperator,
    DisplacedLabel,
    StateVector,
    change_frame,
    displacement_matrix,
    displacement_matrix_element,
    partial_trace,
    reduced_density,
)
from .gmatrix import GMatrix, compare_series, gmatrix_numeric, gmatrix_series, neighbor_ratio
from .metrics import BipartitionSpec, hybrid_witness, negativity
from .mode_transforms import ModeUnitary, apply_mode_unitary, bs2, dft3, pump_identities
from .multisource import (
    BlockAmplitudes,
    EntangledBasis,
    block_amplitudes,
    build_basis,
    joint_state,
    verify_block_decomposition,
)
from .pump_dynamics import FBlock, PhiState, build_phi, expm_oracle, solve_f, total_output_norm
from .spdc_state import (
    CorrelationJ,
    HybridOutput,
    assemble_output,
    reduced_rho12,
    tmsv_reference,
    undepleted_output,
)

__version__ = "0.1.0"
