"""Optimal experimental designs for functional linear and generalised linear models.

Profile factors are functions of time expanded in B-spline bases; designs are
found by multi-start coordinate exchange on the basis coefficients under
A- or D-optimality, optionally with a roughness penalty and, for GLMs, a
prior expectation by quadrature or Monte Carlo.
"""

from .basis import BasisSpec, basis_dimension, eval_basis, eval_basis_deriv
from .calculus import cross_gram, product_gram, roughness_matrix
from .config import RunConfig, load_config, parse_config, read_design
from .criteria import (CriterionSpec, GlmFamily, NigState, fisher_information, glm_weight,
                       information_criterion, nig_posterior_update, objective_glm_at_theta,
                       objective_lm)
from .errors import (ConfigError, DomainError, FormulaSyntaxError, InfeasibleSearchError,
                     OutputError, ProfDesignError)
from .formula import FormulaAst, TermList, expand_terms, parse_formula
from .model import Design, ModelAssembly, assemble, model_matrix, profile_function_eval
from .objectives import GlmObjective, LinearModelObjective
from .optimizer import SearchConfig, SearchResult, coordinate_exchange, multi_start, random_start
from .priors import (NormalPrior, UniformPrior, expected_objective, gauss_hermite_grid,
                     gauss_legendre_grid, mc_sample)
from .runner import print_summary, run_design_search, write_outputs

__version__ = "0.1.0"

__all__ = [
    "BasisSpec", "basis_dimension", "eval_basis", "eval_basis_deriv",
    "cross_gram", "product_gram", "roughness_matrix",
    "RunConfig", "load_config", "parse_config", "read_design",
    "CriterionSpec", "GlmFamily", "NigState", "fisher_information", "glm_weight",
    "information_criterion", "nig_posterior_update", "objective_glm_at_theta", "objective_lm",
    "ConfigError", "DomainError", "FormulaSyntaxError", "InfeasibleSearchError", "OutputError",
    "ProfDesignError",
    "FormulaAst", "TermList", "expand_terms", "parse_formula",
    "Design", "ModelAssembly", "assemble", "model_matrix", "profile_function_eval",
    "GlmObjective", "LinearModelObjective",
    "SearchConfig", "SearchResult", "coordinate_exchange", "multi_start", "random_start",
    "NormalPrior", "UniformPrior", "expected_objective", "gauss_hermite_grid",
    "gauss_legendre_grid", "mc_sample",
    "print_summary", "run_design_search", "write_outputs",
]
