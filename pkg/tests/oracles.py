"""Independent numerical oracles shared by the tests (adaptive quadrature via scipy)."""

import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from profdesign.basis import BasisSpec, breakpoints, eval_basis, eval_basis_deriv


def random_spec(rng, family=None, max_degree=3, max_knots=4, tbounds=(0.0, 1.0)):
    family = family or rng.choice(["bspline", "power"])
    degree = int(rng.integers(0, max_degree + 1))
    knots = ()
    if family == "bspline":
        n = int(rng.integers(0, max_knots + 1))
        lo, hi = tbounds
        cand = np.sort(rng.uniform(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo), n))
        if n and np.all(np.diff(cand) > 1e-2 * (hi - lo)):
            knots = tuple(cand)
    return BasisSpec(str(family), degree, knots, tbounds)


def quad_integral(f, specs):
    """Integral of ``f`` over the common interval, split at every breakpoint."""
    points = np.unique(np.concatenate([breakpoints(s) for s in specs]))
    total = 0.0
    with warnings.catch_warnings():
        # round-off notices on near-zero polynomial pieces; accuracy is checked by the callers
        warnings.simplefilter("ignore", IntegrationWarning)
        for a, b in zip(points[:-1], points[1:]):
            val, _ = quad(f, a, b, epsabs=1e-14, epsrel=1e-12, limit=200)
            total += val
    return total


def gram_oracle(factor_specs, param_spec):
    dims = [s.dimension for s in factor_specs]
    rows = int(np.prod(dims))
    out = np.empty((rows, param_spec.dimension))
    specs = list(factor_specs) + [param_spec]
    for r, idx in enumerate(np.ndindex(*dims)):
        for v in range(param_spec.dimension):
            def f(t, idx=idx, v=v):
                val = eval_basis(param_spec, t)[v]
                for s, u in zip(factor_specs, idx):
                    val *= eval_basis(s, t)[u]
                return val
            out[r, v] = quad_integral(f, specs)
    return out


def roughness_oracle(spec):
    p = spec.dimension
    out = np.empty((p, p))
    for u in range(p):
        for v in range(p):
            out[u, v] = quad_integral(
                lambda t: eval_basis_deriv(spec, t, 2)[u] * eval_basis_deriv(spec, t, 2)[v], [spec])
    return out


def model_matrix_oracle(term_list, factor_specs, design):
    """Z by integrating f_q(x_i(t)) * b(t) with x_i(t) rebuilt pointwise from the coefficients."""
    n = design.n_runs
    lo, hi = factor_specs[0].tbounds
    cols = []
    for term in term_list.terms:
        block = np.empty((n, term.param.dimension))
        specs = [factor_specs[j] for j in term.factors] + [term.param]
        for i in range(n):
            for v in range(term.param.dimension):
                def f(t, i=i, v=v):
                    val = eval_basis(term.param, t)[v]
                    for j in term.factors:
                        val *= design.coefs[j][i] @ eval_basis(factor_specs[j], t)
                    return val
                block[i, v] = quad_integral(f, specs) if term.factors else (hi - lo)
        cols.append(block)
    return np.hstack(cols)
