"""Bit-level simulation and threshold synthesis for stochastic multivariate
radix-coded FSM function generators.

The package simulates comparator-gate bitstream machines whose saturating
chain FSMs select entries of a threshold table through a radix codeword, and
synthesizes those thresholds for arbitrary multivariate targets by solving a
box-constrained least-squares problem over the chains' stationary basis.
"""

from .core import (
    DEFAULT_SEED,
    AffineMap,
    RngSource,
    ThetaGate,
    bitstream_mean,
    check_probability,
    derive_seed,
    generate_bitstream,
    map_from_unit,
    map_to_unit,
    rng_next,
    sc_multiply,
    sc_scaled_add,
    theta_sample,
)
from .errors import (
    CoefficientFileError,
    ConfigError,
    ExpressionError,
    SmurfError,
    SolverError,
)
from .evaluate import (
    EvalReport,
    SweepReport,
    evaluate_table,
    reconstruct_target,
    sweep_target,
    write_eval_csv,
    write_sweep_csv,
)
from .expr import expression_target, parse_expression, to_text
from .fsm import (
    ChainFsm,
    chain_steady_probs,
    fsm_step,
    simulate_occupancy,
    steady_probs_oracle,
    tanh_fsm_output,
    transition_matrix,
)
from .machine import (
    SmurfMachine,
    WeightTable,
    codeword_digits,
    codeword_index,
    joint_steady_probs,
    smurf_expected_output,
    smurf_run,
    smurf_step,
)
from .synthesis import (
    QuadratureGrid,
    SynthesisProblem,
    assemble_H,
    assemble_c,
    build_problem,
    fit_l2_error,
    solve_box_qp,
    solve_weights,
    synthesize,
)
from .targets import (
    TargetFunction,
    available_builtins,
    builtin,
    cas,
    constant_target,
    normalize_target,
    sigmoid,
)
from .weightio import (
    dumps_coefficients,
    loads_coefficients,
    read_coefficients,
    write_coefficients,
)

__version__ = "0.1.0"
