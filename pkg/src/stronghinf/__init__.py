"""Strong H-infinity norms of delay differential algebraic systems and
fixed-structure controller synthesis.

The strong norm is the smallest upper bound on the H-infinity norm that is
insensitive to arbitrarily small delay perturbations; it splits into a
frequency branch (the plain supremum over the imaginary axis) and an
asymptotic branch carried by the algebraic part of the system.
"""
from .asymptotic import AsymNormResult, strong_norm_Ta
from .ddae import (DdaeSystem, DelayVector, NullspaceBases, check_causality,
                   compute_nullspaces, require_causality)
from .discretize import (DiscretizedSystem, StabilityReport, discretize,
                         eval_TN, spectral_abscissa, strong_stability_check)
from .errors import (CausalityError, NoStabilizingStart, NumericalFailure,
                     StrongHinfError, StrongStabilityViolation)
from .fixtures import (neutral1, random_stable_ode, random_stable_retarded,
                       scalar_lag, benchmark_closed_loop, benchmark_controller,
                       benchmark_plant)
from .gradients import GradientResult, finite_diff_check, grad_strong_hinf
from .interconnect import (ClosedLoopTemplate, ControllerStructure,
                           PlantModel, build_template, interconnect,
                           substitute_parameters)
from .levelset import (NormCertificate, correct_peaks, crossing_frequencies,
                       predict, strong_hinf)
from .oracle import DenseSweepSpec, bb_bisection, dense_hinf, dense_ta
from .synthesis import (OptimizerOptions, SynthesisProblem, SynthesisResult,
                        multistart_report, objective, optimize)
from .transfer import (FrequencyResponse, SweepTable, eval_T, eval_Ta,
                       eval_Ta_theta, sweep)

__version__ = "0.1.0"

__all__ = [
    "AsymNormResult", "CausalityError", "ClosedLoopTemplate",
    "ControllerStructure", "DdaeSystem", "DelayVector", "DenseSweepSpec",
    "DiscretizedSystem", "FrequencyResponse", "GradientResult",
    "NoStabilizingStart", "NormCertificate", "NullspaceBases",
    "NumericalFailure", "OptimizerOptions", "PlantModel", "StabilityReport",
    "StrongHinfError", "StrongStabilityViolation", "SweepTable",
    "SynthesisProblem", "SynthesisResult", "bb_bisection", "build_template",
    "check_causality", "compute_nullspaces", "correct_peaks",
    "crossing_frequencies", "dense_hinf", "dense_ta", "discretize", "eval_T",
    "eval_TN", "eval_Ta", "eval_Ta_theta", "finite_diff_check",
    "grad_strong_hinf", "interconnect", "multistart_report", "neutral1",
    "objective", "optimize", "predict", "random_stable_ode",
    "random_stable_retarded", "require_causality", "scalar_lag",
    "spectral_abscissa", "strong_hinf", "strong_norm_Ta",
    "strong_stability_check", "substitute_parameters", "sweep",
    "benchmark_closed_loop", "benchmark_controller", "benchmark_plant",
    "__version__",
]
