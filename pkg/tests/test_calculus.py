import numpy as np
import numpy.testing as npt
import pytest

from oracles import gram_oracle, random_spec, roughness_oracle
from profdesign.basis import BasisSpec
from profdesign.calculus import cross_gram, product_gram, roughness_matrix
from profdesign.errors import ConfigError

CONST = BasisSpec.constant()


def test_cross_gram_examples():
    npt.assert_allclose(cross_gram(CONST, CONST), [[1.0]])
    step = BasisSpec("bspline", 0, (0.5,))
    npt.assert_allclose(cross_gram(step, BasisSpec("power", 1)), [[0.5, 0.125], [0.5, 0.375]], atol=1e-15)
    lin = BasisSpec("power", 1)
    npt.assert_allclose(cross_gram(lin, lin), [[1, 1 / 2], [1 / 2, 1 / 3]], atol=1e-15)


def test_product_gram_examples():
    npt.assert_allclose(product_gram([CONST, CONST], CONST), [[1.0]])
    step = BasisSpec("bspline", 0, (0.5,))
    npt.assert_allclose(product_gram([step, step], CONST), [[0.5], [0], [0], [0.5]], atol=1e-15)
    lin = BasisSpec("power", 1)
    npt.assert_allclose(product_gram([lin, lin], CONST), [[1], [1 / 2], [1 / 2], [1 / 3]], atol=1e-15)


def test_kronecker_order_left_slowest():
    a = BasisSpec("power", 1)
    b = BasisSpec("power", 2)
    g = product_gram([a, b], CONST)
    # row (u, v) -> u * 3 + v holds the integral of t^(u + v)
    expected = [1 / (u + v + 1) for u in range(2) for v in range(3)]
    npt.assert_allclose(g[:, 0], expected, atol=1e-15)


def test_roughness_examples():
    npt.assert_array_equal(roughness_matrix(BasisSpec("power", 1)), np.zeros((2, 2)))
    npt.assert_allclose(roughness_matrix(BasisSpec("power", 2)), np.diag([0, 0, 4.0]), atol=1e-14)
    spec = BasisSpec("bspline", 2, (0.5,))
    r = roughness_matrix(spec)
    npt.assert_allclose(r, roughness_oracle(spec), rtol=1e-10, atol=1e-10)
    assert np.linalg.eigvalsh(r).min() >= -1e-10


def test_linear_roughness_is_exactly_zero():
    for spec in [BasisSpec("power", 1), BasisSpec("bspline", 1, (0.3, 0.6)), BasisSpec("power", 0),
                 BasisSpec("bspline", 0, (0.5,))]:
        assert not np.any(roughness_matrix(spec))


def test_random_grams_match_quadrature():
    rng = np.random.default_rng(7)
    for _ in range(8):
        f, p = random_spec(rng), random_spec(rng)
        g = cross_gram(f, p)
        ref = gram_oracle([f], p)
        npt.assert_allclose(g, ref, rtol=1e-10, atol=1e-12)


def test_random_interaction_grams_match_quadrature():
    rng = np.random.default_rng(11)
    for _ in range(3):
        f1, f2 = random_spec(rng, max_degree=2, max_knots=2), random_spec(rng, max_degree=2, max_knots=2)
        p = random_spec(rng, max_degree=2, max_knots=1)
        npt.assert_allclose(product_gram([f1, f2], p), gram_oracle([f1, f2], p), rtol=1e-10, atol=1e-12)


def test_symmetry_and_single_factor_consistency():
    rng = np.random.default_rng(3)
    for _ in range(10):
        s = random_spec(rng)
        g = cross_gram(s, s)
        npt.assert_allclose(g, g.T, atol=1e-12)
        assert np.linalg.eigvalsh(g).min() >= -1e-10
        p = random_spec(rng)
        npt.assert_array_equal(product_gram([s], p), cross_gram(s, p))
        r = roughness_matrix(s)
        npt.assert_allclose(r, r.T, atol=1e-12)
        assert np.linalg.eigvalsh(r).min() >= -1e-10 * max(1.0, np.abs(r).max())


def test_scaling_with_interval_length():
    short = cross_gram(BasisSpec.constant((0.0, 1.0)), BasisSpec.constant((0.0, 1.0)))
    long = cross_gram(BasisSpec.constant((0.0, 2.0)), BasisSpec.constant((0.0, 2.0)))
    assert long[0, 0] == 2 * short[0, 0]


def test_errors():
    with pytest.raises(ConfigError):
        cross_gram(BasisSpec("power", 1, (), (0.0, 2.0)), CONST)
    with pytest.raises(ConfigError):
        product_gram([], CONST)
