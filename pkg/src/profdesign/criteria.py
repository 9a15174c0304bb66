"""A- and D-optimality kernels, GLM weights and the conjugate posterior update.

The A-objective is the trace of the inverse (penalised) information matrix
and is minimised; the D-objective is its log-determinant and is maximised.
A singular information matrix is not an error inside a design search: the
objective evaluates to the worst value for its direction (``+inf`` for A,
``-inf`` for D) so the optimiser can move away from it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

# eigenvalues at or below this fraction of the largest one count as singular
SINGULAR_RTOL = 1e-12


@dataclass(frozen=True)
class CriterionSpec:
    kind: str
    lam: float = 0.0

    def __post_init__(self):
        kind = str(self.kind).upper()
        if kind not in ("A", "D"):
            raise ConfigError(f"criterion must be 'A' or 'D', got {self.kind!r}")
        lam = float(self.lam)
        if not np.isfinite(lam) or lam < 0:
            raise ConfigError(f"lambda must be a non-negative number, got {self.lam!r}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "lam", lam)

    @property
    def maximize(self):
        return self.kind == "D"

    @property
    def worst(self):
        return -np.inf if self.maximize else np.inf

    @property
    def label(self):
        return f"{self.kind}-optimality"


_FAMILY_ALIASES = {
    "binomial": "binomial_logit",
    "binomial_logit": "binomial_logit",
    "logit": "binomial_logit",
    "poisson": "poisson_log",
    "poisson_log": "poisson_log",
}


@dataclass(frozen=True)
class GlmFamily:
    """Response family with its canonical link.

    Only ``binomial_logit`` and ``poisson_log`` exist. The dispersion and
    prior weights are carried for completeness; they do not enter the design
    objectives.
    """

    name: str
    dispersion: float = 1.0

    def __post_init__(self):
        key = str(self.name).lower().replace("-", "_").replace("/", "_")
        if key not in _FAMILY_ALIASES:
            raise ConfigError(
                f"unsupported family {self.name!r}: only binomial with the logit link "
                "and poisson with the log link are implemented")
        object.__setattr__(self, "name", _FAMILY_ALIASES[key])

    @classmethod
    def from_names(cls, family, link=None):
        family = str(family).lower()
        if link is not None:
            expected = {"binomial": "logit", "poisson": "log"}.get(family)
            if expected is None or str(link).lower() != expected:
                raise ConfigError(
                    f"unsupported family/link {family}/{link}: use binomial/logit or poisson/log")
        return cls(family)

    @property
    def family(self):
        return self.name.split("_")[0]

    @property
    def link(self):
        return self.name.split("_")[1]

    def weight(self, eta):
        """Working weights ``1 / (g'(mu)^2 Var(y))`` for linear predictor values ``eta``."""
        eta = np.asarray(eta, dtype=float)
        if self.name == "binomial_logit":
            e = np.exp(-np.abs(eta))
            return e / (1.0 + e) ** 2
        with np.errstate(over="ignore"):
            return np.exp(eta)


def glm_weight(family, eta):
    if not np.all(np.isfinite(eta)):
        raise ValueError("linear predictor must be finite")
    w = family.weight(eta)
    return float(w) if np.ndim(w) == 0 else w


def _checked(m):
    m = np.asarray(m, dtype=float)
    if not np.all(np.isfinite(m)):
        raise ValueError("information matrix has non-finite entries")
    return m


def information_criterion(m, kind):
    """Trace of the inverse (``"A"``) or log-determinant (``"D"``) of a symmetric matrix.

    Returns the direction's worst value when ``m`` is numerically singular.
    """
    worst = -np.inf if kind == "D" else np.inf
    try:
        chol = np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        return float(_eig_criterion(m[None, :, :], kind, worst)[0])
    diag = chol.diagonal()
    # a tiny pivot means numerically singular or close to it: let the eigenvalue rule decide
    if not diag.min() ** 2 > SINGULAR_RTOL * m.diagonal().max():
        return float(_eig_criterion(m[None, :, :], kind, worst)[0])
    if kind == "D":
        value = 2.0 * float(np.log(diag).sum())
    else:
        linv = np.linalg.inv(chol)
        value = float((linv * linv).sum())
    if value != value:
        return worst
    return value


def batch_information_criterion(ms, kind):
    """Vectorised :func:`information_criterion` over a stack of matrices ``(B, P, P)``."""
    worst = -np.inf if kind == "D" else np.inf
    try:
        chol = np.linalg.cholesky(ms)
    except np.linalg.LinAlgError:
        return _eig_criterion(ms, kind, worst)
    diag = np.diagonal(chol, axis1=-2, axis2=-1)
    scale = np.diagonal(ms, axis1=-2, axis2=-1).max(axis=-1)
    if not np.all(diag.min(axis=-1) ** 2 > SINGULAR_RTOL * scale):
        return _eig_criterion(ms, kind, worst)
    if kind == "D":
        return 2.0 * np.log(diag).sum(axis=-1)
    linv = np.linalg.inv(chol)
    return np.einsum("bij,bij->b", linv, linv)


def _eig_criterion(ms, kind, worst):
    out = np.full(ms.shape[0], worst)
    finite = np.all(np.isfinite(ms), axis=(-2, -1))
    if not np.any(finite):
        return out
    ev = np.linalg.eigvalsh(ms[finite])
    top = np.max(np.abs(ev), axis=-1)
    ok = ev.min(axis=-1) > SINGULAR_RTOL * top
    vals = np.full(ev.shape[0], worst)
    good = ev[ok]
    if kind == "D":
        vals[ok] = np.log(good).sum(axis=-1)
    else:
        vals[ok] = (1.0 / good).sum(axis=-1)
    out[finite] = vals
    return out


def objective_lm(z, r0, spec):
    """A or D objective of ``Z'Z + lambda R0`` for the linear model."""
    z = _checked(z)
    m = z.T @ z
    if spec.lam:
        m = m + spec.lam * np.asarray(r0, dtype=float)
    return information_criterion(m, spec.kind)


def fisher_information(z, theta, family, lam, r0):
    """``Z' W Z + lambda R0`` with GLM weights evaluated at ``Z theta``."""
    z = np.asarray(z, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (z.shape[1],):
        raise ValueError(f"theta must have length {z.shape[1]}, got shape {theta.shape}")
    w = glm_weight(family, z @ theta)
    m = (z * np.atleast_1d(w)[:, None]).T @ z
    if lam:
        m = m + lam * np.asarray(r0, dtype=float)
    return 0.5 * (m + m.T)


def objective_glm_at_theta(z, theta, family, r0, spec):
    """Pseudo-Bayesian A or D objective at a single parameter value."""
    m = fisher_information(z, theta, family, spec.lam, r0)
    if not np.all(np.isfinite(m)):
        return spec.worst
    return information_criterion(m, spec.kind)


@dataclass(frozen=True)
class NigState:
    """Normal-inverse-gamma hyperparameters ``(mu, V, a, b)``."""

    mu: np.ndarray
    V: np.ndarray
    a: float
    b: float

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        v = np.atleast_2d(np.asarray(self.V, dtype=float))
        if v.shape != (mu.size, mu.size):
            raise ValueError(f"V must be {mu.size}x{mu.size}, got {v.shape}")
        if not np.allclose(v, v.T):
            raise ValueError("V must be symmetric")
        if self.a <= 0 or self.b <= 0:
            raise ValueError("a and b must be positive")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "V", v)


def nig_posterior_update(state, z, y):
    """Conjugate update of a NIG prior after observing ``y`` at model matrix ``z``."""
    p = state.mu.size
    z = np.asarray(z, dtype=float).reshape(-1, p)
    y = np.asarray(y, dtype=float).ravel()
    if y.size != z.shape[0]:
        raise ValueError("y must have one entry per row of Z")
    try:
        prec = np.linalg.inv(state.V)
        vn = np.linalg.inv(z.T @ z + prec)
    except np.linalg.LinAlgError as exc:
        raise ValueError("prior covariance V is singular") from exc
    vn = 0.5 * (vn + vn.T)
    theta = vn @ (prec @ state.mu + z.T @ y)
    quad = state.mu @ prec @ state.mu + y @ y - theta @ np.linalg.solve(vn, theta)
    return NigState(theta, vn, state.a + y.size, state.b + quad)
