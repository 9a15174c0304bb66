import math

import numpy as np
import numpy.testing as npt
import pytest

from profdesign.basis import BasisSpec
from profdesign.criteria import CriterionSpec, GlmFamily, objective_glm_at_theta, objective_lm
from profdesign.formula import expand_terms, parse_formula
from profdesign.model import Design, assemble
from profdesign.objectives import GlmObjective, LinearModelObjective
from profdesign.priors import NormalPrior, expected_objective, gauss_legendre_grid, mc_grid


def two_factor_assembly():
    factors = {"x1": BasisSpec("bspline", 1, (0.5,)), "x2": BasisSpec("bspline", 0, (0.5,))}
    tl = expand_terms(parse_formula("~ x1 + x2"), factors, [("power", 2, ()), ("power", 1, ())])
    return assemble(tl, list(factors.values()))


def random_design(rng, asm, n):
    return Design(asm.factor_names, [rng.uniform(-1, 1, (n, d)) for d in asm.factor_dims])


@pytest.mark.parametrize("kind", ["A", "D"])
def test_linear_objective_matches_kernel_and_row_function(kind):
    asm = two_factor_assembly()
    spec = CriterionSpec(kind, 2.0)
    obj = LinearModelObjective(asm, spec)
    rng = np.random.default_rng(0)
    d = random_design(rng, asm, 8)
    z = asm.model_matrix(d)
    assert obj(d) == pytest.approx(objective_lm(z, asm.roughness, spec), rel=1e-12)
    f = obj.row_function(d, 0, 3)
    row = rng.uniform(-1, 1, 3)
    d2 = d.copy()
    d2.coefs[0][3] = row
    assert f(row) == pytest.approx(obj(d2), rel=1e-10)


@pytest.mark.parametrize("family, kind", [("binomial", "D"), ("binomial", "A"), ("poisson", "A"),
                                          ("poisson", "D")])
def test_glm_objective_matches_node_loop(family, kind):
    asm = two_factor_assembly()
    spec = CriterionSpec(kind, 1.0)
    fam = GlmFamily(family)
    grid = gauss_legendre_grid(2, (-0.5, 0.5), asm.n_params)
    obj = GlmObjective(asm, spec, fam, grid.nodes, grid.weights)
    rng = np.random.default_rng(1)
    d = random_design(rng, asm, 10)
    z = asm.model_matrix(d)
    oracle = expected_objective(lambda th: objective_glm_at_theta(z, th, fam, asm.roughness, spec),
                                grid.nodes, grid.weights, worst=spec.worst)
    assert obj(d) == pytest.approx(oracle, rel=1e-10)
    # rank-one probe against a full re-evaluation
    for factor, run in [(0, 2), (1, 7)]:
        f = obj.row_function(d, factor, run)
        row = rng.uniform(-1, 1, asm.factor_dims[factor])
        d2 = d.copy()
        d2.coefs[factor][run] = row
        assert f(row) == pytest.approx(obj(d2), rel=1e-8)


def test_glm_probe_on_ill_conditioned_remainder():
    # with two runs the leave-one-out information is singular, forcing the direct path
    asm = two_factor_assembly()
    spec = CriterionSpec("D", 0.0)
    g = mc_grid(NormalPrior(0.0, 0.5), 20, asm.n_params, seed=0)
    obj = GlmObjective(asm, spec, GlmFamily("poisson"), g.nodes, g.weights)
    d = random_design(np.random.default_rng(2), asm, 2)
    f = obj.row_function(d, 0, 0)
    assert f(d.coefs[0][0]) == obj(d) == -math.inf


def test_singular_design_is_worst():
    asm = two_factor_assembly()
    d = Design(asm.factor_names, [np.zeros((6, 3)), np.zeros((6, 2))])
    assert LinearModelObjective(asm, CriterionSpec("A")).evaluate(d) == math.inf
    assert LinearModelObjective(asm, CriterionSpec("D")).evaluate(d) == -math.inf


def test_glm_node_information_shape():
    asm = two_factor_assembly()
    grid = gauss_legendre_grid(2, (-1, 1), asm.n_params)
    obj = GlmObjective(asm, CriterionSpec("D"), GlmFamily("binomial"), grid.nodes, grid.weights)
    z = asm.model_matrix(random_design(np.random.default_rng(3), asm, 5))
    m = obj.node_information(z)
    assert m.shape == (grid.size, asm.n_params, asm.n_params)
    npt.assert_allclose(m, np.swapaxes(m, 1, 2), atol=1e-14)
