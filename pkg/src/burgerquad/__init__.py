"""The main public API of burgerquad."""

from __future__ import annotations

from burgerquad._errors import BurgerQuadError as BurgerQuadError
from burgerquad._errors import DifferentiationError as DifferentiationError
from burgerquad._errors import EllNotCoveredError as EllNotCoveredError
from burgerquad._errors import EmptyReportError as EmptyReportError
from burgerquad._errors import EvaluationDomainError as EvaluationDomainError
from burgerquad._errors import ExprSyntaxError as ExprSyntaxError
from burgerquad._errors import InvalidBracketError as InvalidBracketError
from burgerquad._errors import NonConvergenceError as NonConvergenceError
from burgerquad._errors import ProblemFileError as ProblemFileError
from burgerquad._errors import RangeError as RangeError
from burgerquad._errors import SignChangeError as SignChangeError
from burgerquad._errors import (
    UnbalancedParenthesesError as UnbalancedParenthesesError,
)
from burgerquad._errors import UnboundNameError as UnboundNameError
from burgerquad._errors import UnknownFunctionError as UnknownFunctionError
from burgerquad._interval import Interval as Interval
from burgerquad.examples import EXAMPLES as EXAMPLES
from burgerquad.examples import REGISTRY as REGISTRY
from burgerquad.examples import Example as Example
from burgerquad.examples import ExampleResult as ExampleResult
from burgerquad.examples import run_example as run_example
from burgerquad.expr import Expr as Expr
from burgerquad.expr import compile_array as compile_array
from burgerquad.expr import compile_scalar as compile_scalar
from burgerquad.expr import differentiate as differentiate
from burgerquad.expr import evaluate as evaluate
from burgerquad.expr import parse as parse
from burgerquad.expr import substitute as substitute
from burgerquad.quad import ComposedSpeed as ComposedSpeed
from burgerquad.quad import EllMap as EllMap
from burgerquad.quad import PhiMap as PhiMap
from burgerquad.quad import build_ell as build_ell
from burgerquad.quad import build_phi_map as build_phi_map
from burgerquad.quad import ell_closed_form as ell_closed_form
from burgerquad.quad import integrate as integrate
from burgerquad.quad import phi_inverse as phi_inverse
from burgerquad.rootfind import BranchSet as BranchSet
from burgerquad.rootfind import Root as Root
from burgerquad.rootfind import find_all_roots as find_all_roots
from burgerquad.rootfind import find_root as find_root
from burgerquad.solver import CharPath as CharPath
from burgerquad.solver import Problem as Problem
from burgerquad.solver import breaking_time as breaking_time
from burgerquad.solver import canonicalize as canonicalize
from burgerquad.solver import characteristic_trace as characteristic_trace
from burgerquad.solver import solve as solve
from burgerquad.solver import solve_canonical as solve_canonical
from burgerquad.solver import solve_homogeneous as solve_homogeneous
from burgerquad.solver import solve_nonhomogeneous as solve_nonhomogeneous
from burgerquad.solver import solve_via_canonical as solve_via_canonical
from burgerquad.solver import sweep as sweep
from burgerquad.special import LambertWDomainError as LambertWDomainError
from burgerquad.special import WBranch as WBranch
from burgerquad.special import lambert_w as lambert_w
from burgerquad.special import lambert_w_array as lambert_w_array
from burgerquad.verify import Field as Field
from burgerquad.verify import ResidualReport as ResidualReport
from burgerquad.verify import Stencil as Stencil
from burgerquad.verify import Verdict as Verdict
from burgerquad.verify import closed_form_field as closed_form_field
from burgerquad.verify import residual_field as residual_field
from burgerquad.verify import solved_field as solved_field
from burgerquad.verify import symbolic_residual as symbolic_residual
from burgerquad.verify import verify_canonical as verify_canonical
