"""Prior distributions over model parameters and their quadrature/Monte Carlo rules.

Every rule returns probability weights that sum to one, so an expectation is
the weighted sum of the integrand over the nodes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

DEFAULT_LEVEL = 5
DEFAULT_MC_SIZE = 10000


@dataclass(frozen=True)
class NormalPrior:
    """Independent or correlated normal prior.

    ``mu`` is a scalar or length-P vector; ``sigma2`` a scalar, a length-P
    vector of variances or a PxP covariance matrix.
    """

    mu: object = 0.0
    sigma2: object = 1.0

    def mean(self, n_params):
        mu = np.asarray(self.mu, dtype=float)
        if mu.ndim == 0:
            return np.full(n_params, float(mu))
        if mu.shape != (n_params,):
            raise ConfigError(f"prior mean must be a scalar or have length {n_params}, got shape {mu.shape}")
        return mu.copy()

    def covariance(self, n_params):
        s = np.asarray(self.sigma2, dtype=float)
        if s.ndim == 0:
            cov = np.eye(n_params) * float(s)
        elif s.ndim == 1 and s.shape == (n_params,):
            cov = np.diag(s)
        elif s.shape == (n_params, n_params):
            cov = s.copy()
        else:
            raise ConfigError(
                f"prior variance must be a scalar, a length-{n_params} vector or a "
                f"{n_params}x{n_params} matrix, got shape {s.shape}")
        if not np.allclose(cov, cov.T):
            raise ConfigError("prior covariance must be symmetric")
        if np.linalg.eigvalsh(cov).min() <= 0:
            raise ConfigError("prior covariance must be positive definite")
        return cov


@dataclass(frozen=True)
class UniformPrior:
    """Independent uniform prior; ``bounds`` is one ``(lo, hi)`` pair or a 2xP matrix."""

    bounds: object = (-1.0, 1.0)

    def limits(self, n_params):
        b = np.asarray(self.bounds, dtype=float)
        if b.shape == (2,):
            lo, hi = np.full(n_params, b[0]), np.full(n_params, b[1])
        elif b.shape == (2, n_params):
            lo, hi = b[0].copy(), b[1].copy()
        else:
            raise ConfigError(
                f"uniform bounds must be a pair or a 2x{n_params} matrix, got shape {b.shape}")
        if np.any(lo >= hi):
            raise ConfigError("uniform prior needs lower < upper bound in every dimension")
        return lo, hi


@dataclass(frozen=True)
class QuadratureGrid:
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self):
        return self.weights.size


def _tensor(x1d, w1d, n_params):
    idx = np.indices((x1d.size,) * n_params).reshape(n_params, -1).T
    weights = np.prod(w1d[idx], axis=1)
    return x1d[idx], weights / weights.sum()


def _symmetric_sqrt(cov):
    vals, vecs = np.linalg.eigh(cov)
    return (vecs * np.sqrt(vals)) @ vecs.T


def gauss_hermite_grid(level, mu, sigma2, n_params):
    """Tensor Gauss-Hermite grid with ``level**n_params`` nodes for ``N(mu, sigma2)``."""
    level = int(level)
    if level < 1:
        raise ConfigError("quadrature level must be at least 1")
    prior = NormalPrior(mu, sigma2)
    mean, cov = prior.mean(n_params), prior.covariance(n_params)
    x, w = np.polynomial.hermite_e.hermegauss(level)
    z, weights = _tensor(x, w, n_params)
    return QuadratureGrid(mean + z @ _symmetric_sqrt(cov).T, weights)


def gauss_legendre_grid(level, bounds, n_params):
    """Tensor Gauss-Legendre grid with ``level**n_params`` nodes for a uniform prior."""
    level = int(level)
    if level < 1:
        raise ConfigError("quadrature level must be at least 1")
    lo, hi = UniformPrior(bounds).limits(n_params)
    x, w = np.polynomial.legendre.leggauss(level)
    z, weights = _tensor(x, w, n_params)
    return QuadratureGrid(lo + (z + 1.0) * (hi - lo) / 2.0, weights)


def quadrature_grid(prior, level, n_params):
    if isinstance(prior, NormalPrior):
        return gauss_hermite_grid(level, prior.mu, prior.sigma2, n_params)
    if isinstance(prior, UniformPrior):
        return gauss_legendre_grid(level, prior.bounds, n_params)
    raise ConfigError("quadrature needs a normal or uniform prior")


def mc_sample(prior, size, n_params, seed=None):
    """``size`` independent draws from ``prior`` as a ``(size, n_params)`` matrix."""
    size = int(size)
    if size < 1:
        raise ConfigError("Monte Carlo sample size must be at least 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if isinstance(prior, NormalPrior):
        mean, cov = prior.mean(n_params), prior.covariance(n_params)
        z = rng.standard_normal((size, n_params))
        return mean + z @ np.linalg.cholesky(cov).T
    if isinstance(prior, UniformPrior):
        lo, hi = prior.limits(n_params)
        return lo + rng.random((size, n_params)) * (hi - lo)
    raise ConfigError(f"no sampler for prior {prior!r}")


def mc_grid(prior, size, n_params, seed=None):
    """Monte Carlo sample wrapped as an equal-weight grid."""
    points = mc_sample(prior, size, n_params, seed)
    return QuadratureGrid(points, np.full(points.shape[0], 1.0 / points.shape[0]))


def expected_objective(eval_at_theta, points, weights, worst=None):
    """Weighted prior expectation of ``eval_at_theta`` over the nodes.

    A non-finite value at any node makes the whole expectation ``worst``
    (when given) so infeasibility propagates.
    """
    values = np.array([eval_at_theta(theta) for theta in np.atleast_2d(points)], dtype=float)
    if not np.all(np.isfinite(values)):
        if worst is not None:
            return worst
        bad = values[~np.isfinite(values)]
        return float(bad[0])
    return float(np.dot(np.asarray(weights, dtype=float), values))


def prior_from_config(entry):
    """Build a prior from its config mapping (``distribution`` plus parameters)."""
    if not isinstance(entry, dict):
        raise ConfigError("prior must be a mapping")
    kind = str(entry.get("distribution", "normal" if "mu" in entry else "uniform")).lower()
    if kind == "normal":
        if "mu" not in entry or "sigma2" not in entry:
            raise ConfigError("a normal prior needs entries 'mu' and 'sigma2'")
        return NormalPrior(entry["mu"], entry["sigma2"])
    if kind == "uniform":
        if "unifbound" not in entry:
            raise ConfigError("a uniform prior needs an entry 'unifbound'")
        return UniformPrior(entry["unifbound"])
    raise ConfigError(f"unknown prior distribution {kind!r}; use 'normal' or 'uniform'")
