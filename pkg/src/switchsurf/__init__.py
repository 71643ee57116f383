"""Stabilization of two-mode switched systems to a switched equilibrium by
linear or quadratic state-feedback switching rules."""

from .errors import (ContractViolation, CQLFError, DegenerateError, Divergence, NoConvergence,
                     NoSwitchedEquilibrium, NotASwitchedEquilibrium, NoUniqueSolution,
                     SwitchSurfError)
from .filippov import (DescentReport, SimOptions, Trajectory, descent_monitor, simulate,
                       sliding_lambda)
from .geometry import (RegionReport, SphereRegion, omega_alpha_membership, omega_alpha_sphere,
                       omega_membership, verify_lemmas)
from .linalg import is_hurwitz, is_positive_definite, min_symmetric_eigenvalue, solve_lyapunov
from .lyapunov import (QuadraticLyapunov, SamplingSpec, demidovich_check, synthesize_cqlf,
                       verify_cqlf)
from .model import (AffineField, SwitchedEquilibrium, SwitchedSystem, VectorField,
                    affine_field, convex_combination, find_switched_equilibrium)
from .rules import SwitchingRule, linear_rule, quadratic_rule, reduced_rule

__version__ = "0.1.0"
