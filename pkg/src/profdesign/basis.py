"""B-spline and power-series bases on a time interval.

Profile factors and parameter functions are both expanded in one of two
families:

* ``bspline`` -- clamped (open-uniform) B-splines of a given degree with simple
  interior knots. Degree 0 with no knots is the constant basis used for scalar
  factors, scalar parameters and the intercept.
* ``power`` -- monomials ``1, t, ..., t**degree``.

Evaluation is right-closed at the upper time bound, so the last B-spline is 1
there and every basis is defined on the closed interval.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import ConfigError, DomainError

FAMILIES = ("bspline", "power")

# relative slack when checking that evaluation times lie in the time bounds
_TIME_SLACK = 1e-12


@dataclass(frozen=True)
class BasisSpec:
    """A basis family on ``[tbounds[0], tbounds[1]]``.

    Instances are immutable and validated on construction.
    """

    family: str
    degree: int
    interior_knots: tuple = ()
    tbounds: tuple = (0.0, 1.0)

    def __post_init__(self):
        family = str(self.family).lower()
        if family not in FAMILIES:
            raise ConfigError(f"unknown basis family {self.family!r}; expected 'bspline' or 'power'")
        degree = int(self.degree)
        if degree != self.degree or degree < 0:
            raise ConfigError(f"basis degree must be a non-negative integer, got {self.degree!r}")
        lo, hi = (float(v) for v in self.tbounds)
        if not lo < hi:
            raise ConfigError(f"time bounds must satisfy lower < upper, got {tuple(self.tbounds)}")
        knots = tuple(float(k) for k in (self.interior_knots or ()))
        if family == "power" and knots:
            raise ConfigError("a power basis takes no knots: the knot vector should be empty")
        for k in knots:
            if not lo < k < hi:
                raise ConfigError(f"interior knot {k} is not strictly inside ({lo}, {hi})")
        if any(b <= a for a, b in zip(knots, knots[1:])):
            raise ConfigError(f"interior knots must be strictly increasing, got {knots}")
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "interior_knots", knots)
        object.__setattr__(self, "tbounds", (lo, hi))

    @classmethod
    def constant(cls, tbounds=(0.0, 1.0)):
        """Single basis function equal to one (intercept, scalar factor or scalar parameter)."""
        return cls("bspline", 0, (), tbounds)

    @property
    def dimension(self):
        if self.family == "power":
            return self.degree + 1
        return self.degree + len(self.interior_knots) + 1

    @property
    def is_constant(self):
        return self.dimension == 1 and self.degree == 0

    @property
    def knot_vector(self):
        """Full clamped knot vector: each boundary repeated ``degree + 1`` times."""
        lo, hi = self.tbounds
        p = self.degree
        return np.array([lo] * (p + 1) + list(self.interior_knots) + [hi] * (p + 1))


def basis_dimension(spec):
    return spec.dimension


def breakpoints(spec):
    """Span boundaries on which every basis function is a single polynomial."""
    lo, hi = spec.tbounds
    if spec.family == "power":
        return np.array([lo, hi])
    return np.array([lo, *spec.interior_knots, hi])


def _check_times(spec, t):
    t = np.asarray(t, dtype=float)
    lo, hi = spec.tbounds
    slack = _TIME_SLACK * (hi - lo)
    if not np.all(np.isfinite(t)):
        raise DomainError("evaluation times must be finite")
    if np.any(t < lo - slack) or np.any(t > hi + slack):
        raise DomainError(f"evaluation time outside [{lo}, {hi}]")
    return np.clip(t, lo, hi)


def _safe_ratio(num, den):
    # 0/0 terms of the Cox-de Boor recurrence vanish
    out = np.zeros(np.broadcast_shapes(np.shape(num), np.shape(den)))
    mask = np.broadcast_to(den != 0, out.shape)
    np.divide(num, den, out=out, where=mask)
    return out


def _bspline_values(knots, degree, t):
    """Degree-``degree`` B-splines on ``knots`` at times ``t`` (1-D); shape (len(t), n)."""
    n_knots = knots.size
    # non-empty spans of a clamped vector lie between the repeated end knots
    first = int(np.sum(knots == knots[0])) - 1
    last = n_knots - int(np.sum(knots == knots[-1])) - 1
    span = np.clip(np.searchsorted(knots, t, side="right") - 1, first, last)
    values = np.zeros((t.size, n_knots - 1))
    values[np.arange(t.size), span] = 1.0
    tt = t[:, None]
    for p in range(1, degree + 1):
        nb = n_knots - p - 1
        left = _safe_ratio(tt - knots[:nb], knots[p:p + nb] - knots[:nb])
        right = _safe_ratio(knots[p + 1:p + 1 + nb] - tt, knots[p + 1:p + 1 + nb] - knots[1:1 + nb])
        values = left * values[:, :nb] + right * values[:, 1:nb + 1]
    return values


def _bspline_derivative(knots, degree, t, order):
    nb = knots.size - degree - 1
    if order == 0:
        return _bspline_values(knots, degree, t)
    if order > degree:
        return np.zeros((t.size, nb))
    lower = _bspline_derivative(knots, degree - 1, t, order - 1)
    left = _safe_ratio(lower[:, :nb], knots[degree:degree + nb] - knots[:nb])
    right = _safe_ratio(lower[:, 1:nb + 1], knots[degree + 1:degree + 1 + nb] - knots[1:1 + nb])
    return degree * (left - right)


def _power_derivative(degree, t, order):
    out = np.zeros((t.size, degree + 1))
    for k in range(order, degree + 1):
        out[:, k] = factorial(k) // factorial(k - order) * t ** (k - order)
    return out


def eval_basis_deriv(spec, t, order=0):
    """Order-``order`` derivative of every basis function at ``t``.

    Scalar ``t`` gives a vector of length ``spec.dimension``; array-like ``t``
    gives a ``(len(t), spec.dimension)`` matrix.
    """
    order = int(order)
    if order < 0:
        raise ValueError("derivative order must be non-negative")
    scalar = np.ndim(t) == 0
    times = np.atleast_1d(_check_times(spec, t)).ravel()
    if spec.family == "power":
        values = _power_derivative(spec.degree, times, order)
    else:
        values = _bspline_derivative(spec.knot_vector, spec.degree, times, order)
    return values[0] if scalar else values


def eval_basis(spec, t):
    """Basis values at ``t``; see :func:`eval_basis_deriv` for shapes."""
    return eval_basis_deriv(spec, t, 0)
