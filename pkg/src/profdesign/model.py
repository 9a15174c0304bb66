"""Designs and the map from basis coefficients to the model matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import eval_basis
from .calculus import product_gram, roughness_matrix
from .errors import ConfigError


class Design:
    """Basis-coefficient matrices, one ``(n_runs, n_x_j)`` array per profile factor."""

    def __init__(self, names, coefs):
        names = tuple(names)
        coefs = [np.array(c, dtype=float, ndmin=2) for c in coefs]
        if len(names) != len(coefs):
            raise ConfigError("a design needs one coefficient matrix per factor")
        if len({c.shape[0] for c in coefs}) > 1:
            raise ConfigError("all factor coefficient matrices must have the same number of runs")
        self.names = names
        self.coefs = coefs

    @classmethod
    def from_mapping(cls, mapping, names=None):
        names = tuple(mapping) if names is None else tuple(names)
        missing = [n for n in names if n not in mapping]
        if missing:
            raise ConfigError(f"design is missing factors {missing}")
        return cls(names, [mapping[n] for n in names])

    @property
    def n_runs(self):
        return self.coefs[0].shape[0]

    @property
    def shapes(self):
        return tuple(c.shape for c in self.coefs)

    def __getitem__(self, name):
        return self.coefs[self.names.index(name)]

    def copy(self):
        return Design(self.names, [c.copy() for c in self.coefs])

    def as_dict(self):
        return {n: c for n, c in zip(self.names, self.coefs)}

    def within(self, lower, upper, atol=0.0):
        return all(np.all(c >= lower - atol) and np.all(c <= upper + atol) for c in self.coefs)

    def __eq__(self, other):
        if not isinstance(other, Design):
            return NotImplemented
        return self.names == other.names and all(
            a.shape == b.shape and np.array_equal(a, b) for a, b in zip(self.coefs, other.coefs))

    def __repr__(self):
        dims = ", ".join(f"{n}: {c.shape[0]}x{c.shape[1]}" for n, c in zip(self.names, self.coefs))
        return f"Design({dims})"


@dataclass(frozen=True)
class ModelAssembly:
    """Design-independent integrals for a term list.

    ``grams[q]`` is the Gram matrix of term ``q`` (``None`` for the
    intercept, whose column is the interval length). ``roughness`` is the
    block-diagonal penalty matrix with a zero block for the intercept.
    """

    term_list: object
    factor_specs: tuple
    grams: tuple
    roughness: np.ndarray

    @property
    def n_params(self):
        return self.term_list.n_params

    @property
    def factor_names(self):
        return self.term_list.factor_names

    @property
    def factor_dims(self):
        return tuple(s.dimension for s in self.factor_specs)

    @property
    def tbounds(self):
        return self.factor_specs[0].tbounds

    def check_design(self, design):
        if tuple(design.names) != tuple(self.factor_names):
            raise ConfigError(f"design factors {design.names} do not match model factors {self.factor_names}")
        for name, c, dim in zip(design.names, design.coefs, self.factor_dims):
            if c.ndim != 2 or c.shape[1] != dim:
                raise ConfigError(f"factor {name} needs {dim} coefficient columns, got shape {c.shape}")

    def model_matrix(self, design):
        """Model matrix ``Z`` with one row per run and one column per parameter."""
        self.check_design(design)
        return self._rows(design.coefs)

    def model_row(self, rows):
        """Row of ``Z`` for a single run, given that run's coefficient vector per factor."""
        out = np.empty(self.n_params)
        k = 0
        for term, gram in zip(self.term_list.terms, self.grams):
            if gram is None:
                out[k] = self.tbounds[1] - self.tbounds[0]
                k += 1
                continue
            t = gram
            for j in term.factors:
                r = rows[j]
                t = r @ t.reshape(r.shape[0], -1)
            out[k:k + t.size] = t
            k += t.size
        return out

    def _rows(self, coefs):
        n = coefs[0].shape[0]
        blocks = []
        length = self.tbounds[1] - self.tbounds[0]
        for term, gram in zip(self.term_list.terms, self.grams):
            if term.kind == "intercept":
                blocks.append(np.full((n, 1), length))
                continue
            first = coefs[term.factors[0]]
            t = first @ gram.reshape(first.shape[1], -1)
            for j in term.factors[1:]:
                c = coefs[j]
                t = np.einsum("ia,iab->ib", c, t.reshape(n, c.shape[1], -1))
            blocks.append(t.reshape(n, -1))
        return np.hstack(blocks)


def assemble(term_list, factor_specs):
    """Precompute Gram matrices and the roughness matrix for ``term_list``.

    ``factor_specs`` is a sequence (or name-keyed mapping) of ``BasisSpec``
    in factor order.
    """
    if isinstance(factor_specs, dict):
        factor_specs = [factor_specs[n] for n in term_list.factor_names]
    factor_specs = tuple(factor_specs)
    if len(factor_specs) != len(term_list.factor_names):
        raise ConfigError("one basis is needed per factor")
    grams = []
    penalty_blocks = []
    for term in term_list.terms:
        if term.kind == "intercept":
            grams.append(None)
            penalty_blocks.append(np.zeros((1, 1)))
        else:
            grams.append(product_gram([factor_specs[j] for j in term.factors], term.param))
            penalty_blocks.append(roughness_matrix(term.param))
    size = sum(b.shape[0] for b in penalty_blocks)
    r0 = np.zeros((size, size))
    k = 0
    for b in penalty_blocks:
        m = b.shape[0]
        r0[k:k + m, k:k + m] = b
        k += m
    return ModelAssembly(term_list, factor_specs, tuple(grams), r0)


def model_matrix(assembly, design):
    return assembly.model_matrix(design)


def profile_function_eval(design, factor_specs, factor, time_grid):
    """Evaluate ``x_ij(t) = Gamma_j[i, :] . c_j(t)`` for every run on ``time_grid``.

    ``factor`` is a factor name or index. Returns an ``(n_runs, len(grid))`` array.
    """
    j = design.names.index(factor) if isinstance(factor, str) else int(factor)
    spec = factor_specs[j]
    values = eval_basis(spec, np.atleast_1d(np.asarray(time_grid, dtype=float)))
    return design.coefs[j] @ values.T
