"""Design objectives consumed by the coordinate-exchange optimiser.

An objective exposes ``maximize``, ``evaluate(design)`` and
``row_function(design, factor, run)``. The latter returns a function of the
coefficient vector of one factor in one run, holding the rest of the design
fixed; coordinate exchange only ever changes one run at a time, so objectives
can cache everything that does not depend on that run.
"""

from __future__ import annotations

import numpy as np

from .criteria import batch_information_criterion, information_criterion

# relative eigenvalue floor below which the leave-one-run-out information is
# treated as too ill-conditioned for rank-one updates
_RANK_ONE_RCOND = 1e-8


class DesignObjective:
    maximize = True

    def evaluate(self, design):
        raise NotImplementedError

    def __call__(self, design):
        return self.evaluate(design)

    @property
    def worst(self):
        return -np.inf if self.maximize else np.inf

    def row_function(self, design, factor, run):
        base = design.copy()

        def f(row):
            base.coefs[factor][run] = row
            return self.evaluate(base)

        return f


class FunctionObjective(DesignObjective):
    """Wrap a plain ``design -> float`` callable."""

    def __init__(self, fn, maximize=True):
        self.fn = fn
        self.maximize = maximize

    def evaluate(self, design):
        return float(self.fn(design))


class LinearModelObjective(DesignObjective):
    """A/D objective of ``Z'Z + lambda R0`` for the functional linear model."""

    def __init__(self, assembly, criterion):
        self.assembly = assembly
        self.criterion = criterion
        self.maximize = criterion.maximize
        self.penalty = criterion.lam * assembly.roughness

    def information(self, design):
        z = self.assembly.model_matrix(design)
        return z.T @ z + self.penalty

    def evaluate(self, design):
        return information_criterion(self.information(design), self.criterion.kind)

    def row_function(self, design, factor, run):
        z = self.assembly.model_matrix(design)
        rest = np.delete(z, run, axis=0)
        base = rest.T @ rest + self.penalty
        rows = [c[run].copy() for c in design.coefs]
        kind = self.criterion.kind
        model_row = self.assembly.model_row

        def f(row):
            rows[factor] = row
            zi = model_row(rows)
            return information_criterion(base + np.outer(zi, zi), kind)

        return f


class GlmObjective(DesignObjective):
    """Prior expectation of the pseudo-Bayesian A/D objective of a functional GLM.

    ``nodes`` (B x P) and ``weights`` (B, summing to one) come from a
    quadrature rule or a Monte Carlo sample. Any node with a singular or
    non-finite information matrix makes the design infeasible.
    """

    def __init__(self, assembly, criterion, family, nodes, weights):
        self.assembly = assembly
        self.criterion = criterion
        self.family = family
        self.maximize = criterion.maximize
        self.nodes = np.asarray(nodes, dtype=float)
        self.weights = np.asarray(weights, dtype=float)
        self.penalty = criterion.lam * assembly.roughness

    def _expect(self, values):
        if not np.all(np.isfinite(values)):
            return self.worst
        return float(self.weights @ values)

    def node_information(self, z):
        """Stack of information matrices, one per prior node: shape (B, P, P)."""
        with np.errstate(over="ignore", invalid="ignore"):
            w = self.family.weight(z @ self.nodes.T)
            return np.einsum("ib,ip,iq->bpq", w, z, z, optimize=True) + self.penalty

    def node_values(self, design):
        z = self.assembly.model_matrix(design)
        return batch_information_criterion(self.node_information(z), self.criterion.kind)

    def evaluate(self, design):
        return self._expect(self.node_values(design))

    def row_function(self, design, factor, run):
        z = self.assembly.model_matrix(design)
        rest = np.delete(z, run, axis=0)
        base = self.node_information(rest)
        rows = [c[run].copy() for c in design.coefs]
        kind = self.criterion.kind
        model_row = self.assembly.model_row
        nodes, weight = self.nodes, self.family.weight

        inv = None
        if np.all(np.isfinite(base)):
            ev = np.linalg.eigvalsh(base)
            if np.all(ev[:, 0] > _RANK_ONE_RCOND * np.abs(ev[:, -1])):
                inv = np.linalg.inv(base)
                inv = 0.5 * (inv + np.swapaxes(inv, 1, 2))
                # quadratic forms z'Mz for every node as one matrix-vector product
                inv_flat = inv.reshape(inv.shape[0], -1)
                if kind == "D":
                    base_value = np.log(ev).sum(axis=1)
                else:
                    base_value = np.trace(inv, axis1=1, axis2=2)
                    inv_sq_flat = (inv @ inv).reshape(inv.shape[0], -1)

        def direct(row):
            rows[factor] = row
            zi = model_row(rows)
            with np.errstate(over="ignore", invalid="ignore"):
                w = weight(nodes @ zi)
            m = base + w[:, None, None] * np.outer(zi, zi)
            return self._expect(batch_information_criterion(m, kind))

        if inv is None:
            return direct

        def rank_one(row):
            # matrix determinant lemma / Sherman-Morrison on the run being changed
            rows[factor] = row
            zi = model_row(rows)
            with np.errstate(over="ignore", invalid="ignore"):
                w = weight(nodes @ zi)
                zz = np.outer(zi, zi).ravel()
                s = 1.0 + w * (inv_flat @ zz)
                if kind == "D":
                    values = base_value + np.log(s)
                else:
                    values = base_value - w * (inv_sq_flat @ zz) / s
            return self._expect(values)

        return rank_one
