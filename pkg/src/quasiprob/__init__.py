"""Minimal-negativity quasiprobability representations of quantum circuits.

The package builds overcomplete frame representations of states, channels,
and measurements, finds the representation of each circuit element with
the least negativity by linear programming, optimizes the frame itself for
a given circuit, and validates representations by Monte Carlo trajectory
sampling against a dense simulator.
"""

__version__ = "0.1.0"

from .validation import (  # noqa: F401
    InfeasibleError,
    QuasiprobError,
    SizeCapError,
    ValidationError,
)
from .operators import (  # noqa: F401
    KrausChannel,
    POVM,
    apply_channel,
    expand,
    gate_unitary,
    hermitian_basis,
    ket_density,
    noise_channel,
    noisy_gate,
    reconstruct,
    tensor,
    trivial_povm,
    unitary_channel,
    zbasis_povm,
)
from .frames import (  # noqa: F401
    AnalysisMap,
    SynthesisMap,
    analyze,
    catalog_frame,
    check_ic,
    expansion_matrix,
    measurement_matrix,
    mic_channel_matrix,
    product_frame,
    synthesize,
)
from .lp import L1Solver, LPProblem, lp_solve, solve_l1  # noqa: F401
from .negativity import (  # noqa: F401
    NegativityResult,
    channel_negativity,
    matrix_negativity,
    measurement_negativity,
    min_l1_by_enumeration,
    observable_negativity,
    state_negativity,
    vector_negativity,
)
from .circuits import (  # noqa: F401
    CircuitDescription,
    CircuitElement,
    CircuitLedger,
    GateSpec,
    LedgerReport,
    block,
    circuit_to_ledger,
    ledger_negativity,
    variational_gateset,
)
from .optimize import (  # noqa: F401
    FrameOptimizer,
    frame_from_params,
    ledger_objective,
    optimize,
    padded_params,
    params_from_frame,
)
from .sampling import (  # noqa: F401
    EstimateReport,
    SamplingPlan,
    build_plan,
    circuit_plan,
    enumerate_expectation,
    estimate,
    exact_probability,
    hoeffding_samples,
)
