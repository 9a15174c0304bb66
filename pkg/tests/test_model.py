import numpy as np
import numpy.testing as npt
import pytest

from oracles import model_matrix_oracle
from profdesign.basis import BasisSpec
from profdesign.calculus import cross_gram
from profdesign.errors import ConfigError, DomainError
from profdesign.formula import expand_terms, parse_formula
from profdesign.model import Design, assemble, model_matrix, profile_function_eval

QUAD_KNOTS = (0.2, 0.4, 0.6, 0.8)


def build(formula, factors, params):
    tl = expand_terms(parse_formula(formula), factors, params)
    return tl, assemble(tl, list(factors.values()))


def interaction_model():
    factors = {"x1": BasisSpec("bspline", 2, QUAD_KNOTS), "x2": BasisSpec("bspline", 2, QUAD_KNOTS)}
    return factors, build("~ x1 + x2 + x1:x2", factors,
                          [("bspline", 2, (0.5,)), ("bspline", 1, (0.5,)), ("bspline", 2, (0.5,))])


def random_design(rng, factors, n):
    return Design(list(factors), [rng.uniform(-1, 1, (n, s.dimension)) for s in factors.values()])


def test_ramp_assembly_blocks():
    factors = {"x1": BasisSpec("bspline", 1, (0.333, 0.666))}
    tl, asm = build("~ x1", factors, [("power", 2, ())])
    assert asm.grams[0] is None
    assert asm.grams[1].shape == (4, 3)
    npt.assert_allclose(asm.grams[1], cross_gram(factors["x1"], BasisSpec("power", 2)))
    npt.assert_allclose(asm.roughness, np.diag([0, 0, 0, 4.0]), atol=1e-13)
    z = model_matrix(asm, Design(["x1"], [np.ones((3, 4))]))
    npt.assert_allclose(z[:, 0], 1.0)
    # all-one coefficients give x(t) = 1, so the main block holds the moments of t^k
    npt.assert_allclose(z[:, 1:], np.tile([1, 1 / 2, 1 / 3], (3, 1)), atol=1e-14)


def test_scalar_factor_blocks():
    factors = {"x1": BasisSpec("bspline", 0, (0.25, 0.5, 0.75)), "x2": BasisSpec("bspline", 0),
               "x3": BasisSpec("bspline", 0), "x4": BasisSpec("bspline", 0)}
    tl, asm = build("~ x1 + x2 + x3 + x4", factors,
                    [("power", 1, ()), ("power", 0, ()), ("power", 0, ()), ("power", 0, ())])
    assert [g.shape for g in asm.grams[2:]] == [(1, 1)] * 3
    assert tl.sizes == (1, 2, 1, 1, 1)
    assert not np.any(asm.roughness)
    d = Design(list(factors), [np.ones((2, 4)), np.ones((2, 1)), -np.ones((2, 1)), np.ones((2, 1))])
    npt.assert_allclose(model_matrix(asm, d)[:, 3:], [[1, -1, 1], [1, -1, 1]])


def test_zero_design_gives_zero_columns():
    factors, (tl, asm) = interaction_model()
    d = Design(list(factors), [np.zeros((5, 7)), np.zeros((5, 7))])
    z = model_matrix(asm, d)
    npt.assert_array_equal(z[:, 1:], 0.0)
    npt.assert_array_equal(z[:, 0], 1.0)


def test_model_matrix_matches_quadrature_oracle():
    factors, (tl, asm) = interaction_model()
    rng = np.random.default_rng(5)
    d = random_design(rng, factors, 3)
    npt.assert_allclose(model_matrix(asm, d), model_matrix_oracle(tl, list(factors.values()), d),
                        rtol=0, atol=1e-9)


def test_polynomial_block_is_homogeneous():
    factors = {"x1": BasisSpec("bspline", 1, (0.5,))}
    tl, asm = build("~ x1 + P(x1, 3)", factors, [("power", 1, ()), ("power", 2, ())])
    rng = np.random.default_rng(2)
    d = random_design(rng, factors, 4)
    z = model_matrix(asm, d)
    scaled = model_matrix(asm, Design(["x1"], [0.5 * d.coefs[0]]))
    npt.assert_allclose(scaled[:, 1:3], 0.5 * z[:, 1:3], atol=1e-15)
    npt.assert_allclose(scaled[:, 3:], 0.125 * z[:, 3:], atol=1e-15)
    npt.assert_allclose(z, model_matrix_oracle(tl, [factors["x1"]], d), atol=1e-9)


def test_block_structure_locality():
    factors = {"x1": BasisSpec("bspline", 1, (0.5,)), "x2": BasisSpec("bspline", 2)}
    tl, asm = build("~ x1 + x2", factors, [("power", 1, ()), ("power", 2, ())])
    rng = np.random.default_rng(4)
    d = random_design(rng, factors, 4)
    z = model_matrix(asm, d)
    d2 = d.copy()
    d2.coefs[1][:] = rng.uniform(-1, 1, d2.coefs[1].shape)
    z2 = model_matrix(asm, d2)
    npt.assert_array_equal(z[:, :3], z2[:, :3])


def test_model_row_matches_matrix():
    factors, (tl, asm) = interaction_model()
    d = random_design(np.random.default_rng(8), factors, 6)
    z = model_matrix(asm, d)
    for i in range(6):
        npt.assert_allclose(asm.model_row([c[i] for c in d.coefs]), z[i], atol=1e-14)


def test_shape_mismatch():
    factors, (tl, asm) = interaction_model()
    with pytest.raises(ConfigError):
        model_matrix(asm, Design(["x1", "x2"], [np.zeros((2, 7)), np.zeros((2, 6))]))
    with pytest.raises(ConfigError):
        model_matrix(asm, Design(["x2", "x1"], [np.zeros((2, 7)), np.zeros((2, 7))]))
    with pytest.raises(ConfigError):
        Design(["x1", "x2"], [np.zeros((2, 7)), np.zeros((3, 7))])


def test_profile_function_examples():
    spec = BasisSpec("bspline", 0, (0.25, 0.5, 0.75))
    d = Design(["x1"], [[[1, 1, 1, 1], [-1, 1, -1, 1]]])
    grid = np.array([0.1, 0.3, 0.6, 0.9, 1.0])
    v = profile_function_eval(d, [spec], "x1", grid)
    npt.assert_allclose(v[0], 1.0)
    npt.assert_allclose(v[1], [-1, 1, -1, 1, 1])
    with pytest.raises(DomainError):
        profile_function_eval(d, [spec], 0, [1.5])


def test_profile_values_stay_in_bounds():
    spec = BasisSpec("bspline", 3, QUAD_KNOTS)
    d = Design(["x1"], [np.random.default_rng(1).uniform(-1, 1, (10, spec.dimension))])
    v = profile_function_eval(d, [spec], 0, np.linspace(0, 1, 101))
    assert np.all(np.abs(v) <= 1 + 1e-12)


def test_design_helpers():
    d = Design.from_mapping({"a": np.zeros((2, 3)), "b": np.ones((2, 1))})
    assert d.names == ("a", "b")
    assert d.n_runs == 2
    assert d.shapes == ((2, 3), (2, 1))
    c = d.copy()
    c["a"][0, 0] = 5
    assert d["a"][0, 0] == 0
    assert c != d
    assert d.within(-1, 1) and not c.within(-1, 1)
    with pytest.raises(ConfigError):
        Design.from_mapping({"a": np.zeros((2, 3))}, names=["a", "b"])
