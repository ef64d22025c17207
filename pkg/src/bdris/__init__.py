"""Joint transmit beamforming and beyond-diagonal RIS reflection design.

Weighted sum-rate maximization for multi-cell MU-MIMO downlinks aided by
unitary (fully or block connected) reflecting surfaces, solved by
alternating closed-form WMMSE updates with a projected manifold step for
the reflection matrix.  Includes benchmark schemes, Monte-Carlo
experiment drivers with deterministic CSV output, and a scikit-learn
style estimator facade.
"""

from .benchmarks import (SchemeId, SchemeRun, best_of_random, diagonal_ris,
                         no_ris, non_cooperative, random_unitary_qr, run_scheme)
from .channel import (ChannelSet, draw_scenario, effective_channel,
                      effective_channels, gen_rayleigh, gen_rician,
                      los_steering, path_loss_db)
from .config import ScenarioConfig, dbm_to_mw, load_scenario, scenario_from_dict
from .estimator import BdRisWmmse
from .exceptions import ConfigError, GeometryError, NumericalError
from .experiments import (AGG_HEADER, RAW_HEADER, AggregateRow, ExperimentResult,
                          ExperimentSpec, ResultRow, derive_seed, run_convergence,
                          run_deployment, run_experiment, run_sweep_elements,
                          run_sweep_power)
from .manifold import (ManifoldOptions, QuadraticReflectionObjective,
                       ReflectionResult, assemble_objective, euclidean_gradient,
                       expm_skew_hermitian, lifted_gradient, optimize_reflection,
                       riemannian_gradient)
from .solver import (IterationTrace, SolverOptions, reflection_blocks, run_ao,
                     solve_dual_mu, update_beamformers, update_decoders,
                     update_weights, wmmse_objective)
from .system_model import (FeasibilityReport, SolverVariables, check_feasibility,
                           interference_covariance, mse_matrix, user_rate,
                           weighted_sum_rate)

__version__ = "0.1.0"

__all__ = [
    "AGG_HEADER", "AggregateRow", "BdRisWmmse", "ChannelSet", "ConfigError",
    "ExperimentResult", "ExperimentSpec", "FeasibilityReport", "GeometryError",
    "IterationTrace", "ManifoldOptions", "NumericalError",
    "QuadraticReflectionObjective", "RAW_HEADER", "ReflectionResult", "ResultRow",
    "ScenarioConfig", "SchemeId", "SchemeRun", "SolverOptions", "SolverVariables",
    "assemble_objective", "best_of_random", "check_feasibility", "dbm_to_mw",
    "derive_seed", "diagonal_ris", "draw_scenario", "effective_channel",
    "effective_channels", "euclidean_gradient", "expm_skew_hermitian",
    "gen_rayleigh", "gen_rician", "interference_covariance", "lifted_gradient",
    "load_scenario", "los_steering", "mse_matrix", "no_ris", "non_cooperative",
    "optimize_reflection", "path_loss_db", "random_unitary_qr",
    "reflection_blocks", "riemannian_gradient", "run_ao", "run_convergence",
    "run_deployment", "run_experiment", "run_scheme", "run_sweep_elements",
    "run_sweep_power", "scenario_from_dict", "solve_dual_mu",
    "update_beamformers", "update_decoders", "update_weights", "user_rate",
    "weighted_sum_rate", "wmmse_objective",
]
