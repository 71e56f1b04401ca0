"""Linear feasibility via projection methods.

Solvers for "Ax = b, Cx <= d": a ball-shrinking divide-and-conquer search
with certified separating hyperplanes, feasibility drivers built on top of
it (strict standard-form systems, bounded/totally-unimodular systems,
general integer systems, and the iterative implied-equality driver), and
the classical over-projection relaxation method for comparison.
"""

from ._kernels import NUMBA_ENABLED, backend
from .classical import RelaxConfig, relax_random_stats, relax_solve
from .dnc import (BudgetExceeded, Combined, ComplexityEstimate, DnCCounters,
                  DnCParams, Failure, Opposite, combine_separators,
                  complexity_estimate, dnc)
from .ep import ApproxSolution, Separator, elementary_procedure, ep_threshold
from .inference import (Conclusion, ExactSolution, ImpliedEqualityExists,
                        Infeasible, IntegerImpliedEqualityExists,
                        StrengthenedFeasible, StrengthenedInfeasible,
                        check_equality_forcing, interpret)
from .linalg import (AffineProjector, build_projector, project_affine,
                     project_hyperplane, signed_distance)
from .model import (Ball, Certificate, Hyperplane, Instance, LinearSystem,
                    gen_random01, gen_wedge, homogenize, read_instance,
                    standardize_bounded, strengthen, validate_certificate,
                    write_instance)
from .oracle import (OracleVerdict, max_subdeterminant, oracle_feasible,
                     oracle_integer01, oracle_strict)
from .solvers import (Decision, LFSInput, SolveReport, chubanov_relaxation,
                      dnc_solve, facet_complexity, lfg, lfs, lfs_bounded,
                      lfs_tu, max_subdeterminant_bound, round_strict_solution)

__version__ = "0.1.0"

__all__ = [
    "AffineProjector", "ApproxSolution", "Ball", "BudgetExceeded",
    "Certificate", "Combined", "ComplexityEstimate", "Conclusion",
    "Decision", "DnCCounters", "DnCParams", "ExactSolution", "Failure",
    "Hyperplane", "ImpliedEqualityExists", "Infeasible", "Instance",
    "IntegerImpliedEqualityExists", "LFSInput", "LinearSystem",
    "NUMBA_ENABLED", "Opposite", "OracleVerdict", "RelaxConfig",
    "Separator", "SolveReport", "StrengthenedFeasible",
    "StrengthenedInfeasible", "backend", "build_projector",
    "check_equality_forcing", "chubanov_relaxation", "combine_separators",
    "complexity_estimate", "dnc", "dnc_solve", "elementary_procedure",
    "ep_threshold", "facet_complexity", "gen_random01", "gen_wedge",
    "homogenize", "interpret", "lfg", "lfs", "lfs_bounded", "lfs_tu",
    "max_subdeterminant", "max_subdeterminant_bound", "oracle_feasible",
    "oracle_integer01", "oracle_strict", "project_affine",
    "project_hyperplane", "read_instance", "relax_random_stats",
    "relax_solve", "round_strict_solution", "signed_distance",
    "standardize_bounded", "strengthen", "validate_certificate",
    "write_instance",
]
