"""Run a configured design search, write its artifacts and print the summary."""

from __future__ import annotations

import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, OutputError
from .model import profile_function_eval
from .objectives import GlmObjective, LinearModelObjective
from .optimizer import multi_start
from .plotting import plot_profiles
from .priors import mc_grid, quadrature_grid

# quadrature grids grow as level**P; beyond this the Monte Carlo method is the sensible choice
MAX_QUADRATURE_NODES = 2_000_000
# spawn key separating the Monte Carlo prior sample from the per-start streams
_MC_STREAM = 1


def mc_rng(seed):
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(_MC_STREAM,)))


def prior_grid(config, n_params, seed):
    """Nodes and weights approximating the prior expectation for a GLM config."""
    glm = config.glm
    if glm.method == "quadrature":
        size = glm.level ** n_params
        if size > MAX_QUADRATURE_NODES:
            raise ConfigError(
                f"quadrature with level {glm.level} needs {glm.level}^{n_params} = {size} nodes; "
                "lower the level or use method 'MC'")
        return quadrature_grid(glm.prior, glm.level, n_params)
    mc_seed = glm.mc_seed if glm.mc_seed is not None else seed
    return mc_grid(glm.prior, glm.B, n_params, mc_rng(mc_seed))


def build_objective(config, seed=None):
    """Objective for ``config``; ``seed`` fixes the shared Monte Carlo sample."""
    assembly = config.model.assembly()
    if config.glm is None:
        return LinearModelObjective(assembly, config.criterion)
    if seed is None:
        seed = config.search.seed
    if seed is None and config.glm.method == "MC" and config.glm.mc_seed is None:
        raise ConfigError("a Monte Carlo objective needs search.seed or glm.mc_seed")
    grid = prior_grid(config, assembly.n_params, seed)
    return GlmObjective(assembly, config.criterion, config.glm.family, grid.nodes, grid.weights)


def _progress_printer(stream):
    def report(start, sweep, value):
        print(f"start {start + 1}: sweep {sweep}, objective {value:.7g}", file=stream, flush=True)

    return report


def run_design_search(config, write=True, stream=None, progress_stream=None):
    """Search for the optimal design described by ``config``.

    Writes the artifacts when ``write`` is true and an output directory is
    configured, and prints the summary block to ``stream`` (``None`` for
    silence). Returns the :class:`SearchResult`.
    """
    if config.search.seed is None:
        config = config.with_overrides(seed=int(np.random.SeedSequence().generate_state(1)[0]))
    search = config.search
    objective = build_objective(config, search.seed)
    progress = None
    if config.progress:
        progress = _progress_printer(progress_stream if progress_stream is not None else sys.stderr)
    result = multi_start(objective, search, config.model.factor_specs, config.nruns,
                         starts=config.startd, names=config.model.factor_names, progress=progress)
    if write and config.output.directory is not None:
        write_outputs(result, config)
    if stream is not None:
        print(print_summary(result, config), file=stream)
    return result


def format_elapsed(seconds):
    """Whole seconds as ``HH:MM:SS`` (truncated)."""
    total = int(max(seconds, 0.0))
    return f"{total // 3600:02d}:{total % 3600 // 60:02d}:{total % 60:02d}"


def print_summary(result, config):
    lines = [
        f"The number of profile factors is: {config.model.npf}",
        f"The number of runs is: {result.design.n_runs}",
        f"The objective criterion is: {config.criterion.label}",
        f"The objective value is: {result.objval:.7g}",
        f"The number of iterations is: {result.nits}",
    ]
    if config.glm is not None:
        fam = config.glm.family
        lines.append(f"The method of approximation is: {config.glm.method}")
        lines.append(f"The family distribution and the link function are: {fam.family} and {fam.link}")
    lines.append(f"The computing elapsed time is: {format_elapsed(result.elapsed)}")
    return "\n".join(lines)


def _json_number(v):
    v = float(v)
    return v if math.isfinite(v) else None


def _write_matrix(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if not isinstance(v, str) else v for v in row])


def time_grid(tbounds, size):
    return np.linspace(tbounds[0], tbounds[1], int(size))


def write_outputs(result, config, directory=None):
    """Write the result manifest, coefficient CSVs, profile CSVs and SVG plots.

    Returns the list of written paths.
    """
    if result is None or not result.design.coefs or result.design.n_runs == 0:
        raise OutputError("there is no design to write")
    directory = Path(directory if directory is not None else config.output.directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create output directory {directory}: {exc}") from None

    model = config.model
    grid = time_grid(model.tbounds, config.output.grid_size)
    files = []
    try:
        for j, name in enumerate(model.factor_names):
            coefs = result.design.coefs[j]
            path = directory / f"design_{name}.csv"
            _write_matrix(path, [f"b{l + 1}" for l in range(coefs.shape[1])], coefs)
            files.append(path)

            values = profile_function_eval(result.design, model.factor_specs, j, grid)
            path = directory / f"profile_{name}.csv"
            _write_matrix(path, ["run"] + [repr(float(t)) for t in grid],
                          [[str(i + 1)] + list(row) for i, row in enumerate(values)])
            files.append(path)

            path = directory / f"profile_{name}.svg"
            plot_profiles(grid, values, path, name, model.tbounds,
                          (config.search.dlbound, config.search.dubound))
            files.append(path)

        manifest = {
            "formula": model.formula,
            "factor_names": list(model.factor_names),
            "criterion": config.criterion.label,
            "lambda": config.criterion.lam,
            "nruns": result.design.n_runs,
            "objval": _json_number(result.objval),
            "nits": result.nits,
            "bestrep": result.bestrep,
            "allobjvals": [_json_number(v) for v in result.allobjvals],
            "allnits": list(result.allnits),
            "elapsed": result.elapsed,
            "seed": result.seed,
            "files": [p.name for p in files],
        }
        if config.glm is not None:
            manifest["method"] = config.glm.method
            manifest["family"] = config.glm.family.family
            manifest["link"] = config.glm.family.link
        path = directory / "result.json"
        path.write_text(json.dumps(manifest, indent=2) + "\n")
        files.append(path)
    except OSError as exc:
        raise OutputError(f"cannot write results to {directory}: {exc}") from None
    return files
