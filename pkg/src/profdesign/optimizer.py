"""Coordinate-exchange design search with multiple random starts.

Every coefficient ``Gamma_j[i, l]`` is optimised in turn over
``[dlbound, dubound]`` by a golden-section search (plus both end points)
while the rest of the design is held fixed. A move is accepted only if it
strictly improves the objective. Sweeps over all coefficients repeat until a
sweep improves the objective by less than ``tol``.

Starts are independent; start ``s`` draws its random design from a stream
seeded by ``(seed, s)``, so results do not depend on the number of workers.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InfeasibleSearchError
from .model import Design
from .objectives import DesignObjective, FunctionObjective

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
INNER_WIDTH = 1e-6


@dataclass(frozen=True)
class SearchConfig:
    nsd: int = 1
    tol: float = 1e-4
    dlbound: float = -1.0
    dubound: float = 1.0
    max_sweeps: int = 200
    seed: int | None = None
    workers: int = 1

    def __post_init__(self):
        if int(self.nsd) < 1:
            raise ConfigError("nsd must be at least 1")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")
        if not self.dlbound < self.dubound:
            raise ConfigError("dlbound must be smaller than dubound")
        if int(self.max_sweeps) < 1:
            raise ConfigError("max_sweeps must be at least 1")
        if int(self.workers) < 1:
            raise ConfigError("workers must be at least 1")


@dataclass
class ExchangeResult:
    design: Design
    objective: float
    sweeps: int
    trace: list = field(default_factory=list)


@dataclass
class SearchResult:
    """Outcome of a multi-start search; ``bestrep`` counts starts from 1."""

    design: Design
    objval: float
    nits: int
    elapsed: float
    bestrep: int
    startd: Design
    allstartd: list
    alldesigns: list
    allobjvals: list
    allnits: list
    traces: list
    maximize: bool
    seed: int | None = None

    @property
    def best_index(self):
        return self.bestrep - 1


def _score(value, maximize):
    # larger is better; NaN counts as infeasible
    if value != value:
        return -math.inf
    return value if maximize else -value


def golden_section(f, lo, hi, maximize=True, width=INNER_WIDTH):
    """Best point of ``f`` on ``[lo, hi]`` found by golden-section search and the end points.

    Returns ``(x, f(x))`` for the best probe; ties keep the earliest probe.
    """
    best_x, best_v, best_s = None, None, -math.inf

    def probe(x):
        nonlocal best_x, best_v, best_s
        v = f(x)
        s = _score(v, maximize)
        if best_x is None or s > best_s:
            best_x, best_v, best_s = x, v, s
        return s

    probe(lo)
    probe(hi)
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    sc, sd = probe(c), probe(d)
    while b - a > width:
        if sc >= sd:
            b, d, sd = d, c, sc
            c = b - _GOLDEN * (b - a)
            sc = probe(c)
        else:
            a, c, sc = c, d, sd
            d = a + _GOLDEN * (b - a)
            sd = probe(d)
    return best_x, best_v


def _as_objective(objective, maximize):
    if isinstance(objective, DesignObjective):
        if maximize is not None and maximize != objective.maximize:
            raise ValueError("maximize disagrees with the objective's direction")
        return objective
    if maximize is None:
        raise ValueError("maximize must be given for a plain callable objective")
    return FunctionObjective(objective, maximize)


def coordinate_exchange(objective, start, config, maximize=None, progress=None, start_index=0):
    """Improve ``start`` one coefficient at a time until a sweep gains less than ``config.tol``.

    ``objective`` is a :class:`DesignObjective` or a plain callable (then
    ``maximize`` is required). Sweep order: factors, then runs, then
    coefficients, all ascending. ``progress(start_index, sweep, value)`` is
    called after every sweep.
    """
    objective = _as_objective(objective, maximize)
    maximize = objective.maximize
    lo, hi = float(config.dlbound), float(config.dubound)
    design = start.copy()
    current = objective.evaluate(design)
    trace = [current]
    sweeps = 0
    while sweeps < config.max_sweeps:
        sweeps += 1
        before = current
        for j, coefs in enumerate(design.coefs):
            for i in range(coefs.shape[0]):
                f = objective.row_function(design, j, i)
                row = coefs[i].copy()
                for l in range(coefs.shape[1]):
                    def g(x, l=l):
                        r = row.copy()
                        r[l] = x
                        return f(r)

                    x, v = golden_section(g, lo, hi, maximize)
                    if _score(v, maximize) > _score(current, maximize):
                        row[l] = x
                        coefs[i, l] = x
                        current = v
                        trace.append(v)
        if progress is not None:
            progress(start_index, sweeps, current)
        if not math.isfinite(current):
            raise InfeasibleSearchError(
                f"start {start_index + 1}: no feasible design found after the first sweep",
                start_index)
        if abs(current - before) < config.tol:
            break
    return ExchangeResult(design, objective.evaluate(design), sweeps, trace)


def random_start(factor_dims, n_runs, bounds, rng, names=None):
    """Design with every coefficient uniform on ``bounds``.

    ``factor_dims`` lists the number of basis functions per factor (or the
    factors' ``BasisSpec`` objects).
    """
    dims = [d if isinstance(d, (int, np.integer)) else d.dimension for d in factor_dims]
    if names is None:
        names = [f"x{j + 1}" for j in range(len(dims))]
    lo, hi = bounds
    return Design(names, [rng.uniform(lo, hi, size=(n_runs, d)) for d in dims])


def start_rng(seed, index):
    return np.random.default_rng([int(seed), int(index)])


def _run_start(args):
    objective, start, config, index = args
    try:
        return coordinate_exchange(objective, start, config, start_index=index)
    except InfeasibleSearchError as exc:
        return exc


def multi_start(objective, config, factor_dims, n_runs, starts=None, names=None, progress=None,
                maximize=None):
    """Run coordinate exchange from ``config.nsd`` starts and keep the best.

    Random starts are drawn when ``starts`` is None. With ``config.workers > 1``
    starts run in a process pool, so ``objective`` must be picklable; the
    result is identical to a serial run.
    """
    objective = _as_objective(objective, maximize)
    t0 = time.perf_counter()
    dims = [d if isinstance(d, (int, np.integer)) else d.dimension for d in factor_dims]
    if names is None:
        names = [f"x{j + 1}" for j in range(len(dims))]
    names = tuple(names)
    seed = config.seed
    if seed is None:
        seed = int(np.random.SeedSequence().generate_state(1)[0])
    if starts is None:
        starts = [random_start(dims, n_runs, (config.dlbound, config.dubound), start_rng(seed, s), names)
                  for s in range(config.nsd)]
    else:
        starts = list(starts)
        _validate_starts(starts, config, dims, n_runs, names)

    tasks = [(objective, s, config, k) for k, s in enumerate(starts)]
    if config.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(config.workers, len(tasks))) as pool:
            outcomes = []
            for k, out in enumerate(pool.map(_run_start, tasks)):
                outcomes.append(out)
                if progress is not None and not isinstance(out, Exception):
                    progress(k, out.sweeps, out.objective)
    else:
        outcomes = []
        for objective_, start, cfg, k in tasks:
            try:
                outcomes.append(coordinate_exchange(objective_, start, cfg, progress=progress, start_index=k))
            except InfeasibleSearchError as exc:
                outcomes.append(exc)

    failures = [o for o in outcomes if isinstance(o, Exception)]
    if len(failures) == len(outcomes):
        raise InfeasibleSearchError(
            f"all {len(outcomes)} starts were infeasible: " + "; ".join(str(f) for f in failures))
    maximize = objective.maximize
    worst = -math.inf if maximize else math.inf
    allobjvals, alldesigns, allnits, traces = [], [], [], []
    for start, out in zip(starts, outcomes):
        if isinstance(out, Exception):
            allobjvals.append(worst)
            alldesigns.append(start.copy())
            allnits.append(1)
            traces.append([])
        else:
            allobjvals.append(out.objective)
            alldesigns.append(out.design)
            allnits.append(out.sweeps)
            traces.append(out.trace)
    scores = [_score(v, maximize) for v in allobjvals]
    best = int(np.argmax(scores))
    return SearchResult(
        design=alldesigns[best],
        objval=allobjvals[best],
        nits=allnits[best],
        elapsed=time.perf_counter() - t0,
        bestrep=best + 1,
        startd=starts[best],
        allstartd=starts,
        alldesigns=alldesigns,
        allobjvals=allobjvals,
        allnits=allnits,
        traces=traces,
        maximize=maximize,
        seed=seed,
    )


def _validate_starts(starts, config, dims, n_runs, names):
    if len(starts) != config.nsd:
        raise ConfigError(f"{len(starts)} starting designs given but nsd = {config.nsd}")
    for k, s in enumerate(starts):
        if tuple(s.names) != names:
            raise ConfigError(f"starting design {k + 1} has factors {s.names}, expected {names}")
        for name, c, d in zip(s.names, s.coefs, dims):
            if c.shape != (n_runs, d):
                raise ConfigError(
                    f"starting design {k + 1}: factor {name} has shape {c.shape}, expected {(n_runs, d)}")
        if not s.within(config.dlbound, config.dubound):
            raise ConfigError(f"starting design {k + 1} has coefficients outside [dlbound, dubound]")
