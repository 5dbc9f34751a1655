"""Discrete Orlicz-space calculus on finitely generated groups: N-functions
and their conjugates, gauge/Orlicz norms, the nonlinear graph Laplacian on
Cayley balls, harmonic-plus-interior decompositions, cocycle machinery and
capacity experiments."""

from .cohomology import (CapacityResult, Cocycle, CoboundaryResult,
                         ExperimentReport, alpha, capacity, coboundary_distance,
                         cocycle_check, cocycle_value, run_experiment)
from .errors import (DomainError, ExpressionError, PhiharmError, RangeError,
                     ResourceError, SolverError, ValidationError)
from .groups import (CayleyBall, act, act_generator, ball_from_json_dict,
                     build_ball, parse_group_spec)
from .phi_laplacian import (DirichletForm, dirichlet_modular, dirichlet_seminorm,
                        gateaux_check, indicator_pairing_check, laplacian,
                        laplacian_interior, pairing, pairing_with_indicators)
from .nfunction import (NFunction, RegularityCertificate, builtin,
                        certify_delta2, certify_nabla2, check_derivative_growth,
                        complementary, cosh_nf, eval_dphi, eval_phi,
                        numerical_complementary, parse_nfunction, plog, power,
                        power_norm, validate_nfunction, young_gap)
from .orlicz import (FiniteFunction, dual_pairing, finite_function,
                     luxemburg_norm, modular, orlicz_norm, sandwich_check)
from .rng import Lcg64
from .solver import (Decomposition, SolverConfig, compiled_available,
                     decompose, decompose_via_extension,
                     decompose_via_residual_min, harmonic_extension,
                     kernel_backend, minimize_free, verify_uniqueness)

__version__ = "0.1.0"
