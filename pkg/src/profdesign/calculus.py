"""Exact integrals of products of basis functions over the time interval.

All basis functions are piecewise polynomials, so a Gauss-Legendre rule with
enough nodes on every span between merged breakpoints integrates the products
exactly (up to rounding).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .basis import breakpoints, eval_basis, eval_basis_deriv
from .errors import ConfigError


@lru_cache(maxsize=None)
def _legendre_rule(n_nodes):
    return np.polynomial.legendre.leggauss(n_nodes)


def _check_bounds(specs):
    tb = specs[0].tbounds
    for s in specs[1:]:
        if s.tbounds != tb:
            raise ConfigError(f"basis time bounds differ: {tb} vs {s.tbounds}")
    return tb


def span_nodes(specs, poly_degree):
    """Quadrature nodes and weights exact for piecewise polynomials of ``poly_degree``.

    Spans are delimited by the union of the breakpoints of ``specs``.
    """
    _check_bounds(specs)
    edges = np.unique(np.concatenate([breakpoints(s) for s in specs]))
    x, w = _legendre_rule(-(-max(poly_degree, 0) // 2) + 1)
    a, b = edges[:-1, None], edges[1:, None]
    half = (b - a) / 2.0
    nodes = (a + half * (1.0 + x)).ravel()
    weights = (half * w).ravel()
    # nodes are interior to their spans, but rounding may step just outside
    nodes = np.clip(nodes, edges[0], edges[-1])
    return nodes, weights


def _kron_rows(blocks):
    """Row-wise Kronecker product, left block's index varying slowest."""
    out = blocks[0]
    for b in blocks[1:]:
        out = (out[:, :, None] * b[:, None, :]).reshape(out.shape[0], -1)
    return out


def product_gram(factor_specs, param_spec):
    """Entries ``int prod_m c^(m)_{u_m}(t) b_v(t) dt``; rows run over the Kronecker index."""
    factor_specs = list(factor_specs)
    if not factor_specs:
        raise ConfigError("product_gram needs at least one factor basis")
    specs = factor_specs + [param_spec]
    nodes, weights = span_nodes(specs, sum(s.degree for s in specs))
    rows = _kron_rows([eval_basis(s, nodes) for s in factor_specs])
    cols = eval_basis(param_spec, nodes)
    return (rows * weights[:, None]).T @ cols


def cross_gram(factor_spec, param_spec):
    """Entries ``int c_u(t) b_v(t) dt`` over the time interval."""
    return product_gram([factor_spec], param_spec)


def roughness_matrix(param_spec):
    """Curvature penalty ``int b_u''(t) b_v''(t) dt``; all zero when degree < 2."""
    dim = param_spec.dimension
    if param_spec.degree < 2:
        return np.zeros((dim, dim))
    nodes, weights = span_nodes([param_spec], 2 * (param_spec.degree - 2))
    d2 = eval_basis_deriv(param_spec, nodes, 2)
    r = (d2 * weights[:, None]).T @ d2
    return 0.5 * (r + r.T)
