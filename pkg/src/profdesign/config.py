"""Declarative run configuration: JSON in, validated objects out.

A configuration document has the sections ``model``, ``criterion``,
``search``, ``output`` and, for generalised linear models, ``glm``::

    {
      "model": {"formula": "~ x1", "npf": 1, "tbounds": [0, 1],
                "dx": [1], "knotsx": [[0.333, 0.666]],
                "pars": ["power"], "db": [2], "knotsb": [[]]},
      "criterion": {"kind": "D", "lambda": 10},
      "search": {"nruns": 4, "nsd": 100, "seed": 0},
      "output": {"directory": "out"}
    }

Every constraint is checked here so that a bad configuration fails before
any numerical work starts.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .basis import BasisSpec
from .criteria import CriterionSpec, GlmFamily
from .errors import ConfigError
from .formula import Interaction, Main, Polynomial, expand_terms, parse_formula
from .model import Design, assemble
from .optimizer import SearchConfig
from .priors import DEFAULT_LEVEL, DEFAULT_MC_SIZE, prior_from_config

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_.]*$")

_SECTIONS = {"model", "criterion", "glm", "search", "output"}
_MODEL_KEYS = {"formula", "npf", "tbounds", "dx", "knotsx", "pars", "db", "knotsb",
               "factor_names", "scalars"}
_CRITERION_KEYS = {"kind", "lambda"}
_GLM_KEYS = {"family", "link", "method", "level", "B", "prior", "mc_seed"}
_SEARCH_KEYS = {"nruns", "nsd", "seed", "tol", "dlbound", "dubound", "workers", "progress",
                "max_sweeps", "startd"}
_OUTPUT_KEYS = {"directory", "grid_size"}


@dataclass(frozen=True)
class ModelConfig:
    formula: str
    factor_names: tuple
    factor_specs: tuple
    param_specs: tuple
    tbounds: tuple

    @property
    def npf(self):
        return len(self.factor_names)

    def term_list(self):
        return expand_terms(parse_formula(self.formula),
                            dict(zip(self.factor_names, self.factor_specs)),
                            self.param_specs)

    def assembly(self):
        return assemble(self.term_list(), self.factor_specs)


@dataclass(frozen=True)
class GlmConfig:
    family: GlmFamily
    method: str
    prior: object
    level: int = DEFAULT_LEVEL
    B: int = DEFAULT_MC_SIZE
    mc_seed: int | None = None


@dataclass(frozen=True)
class OutputConfig:
    directory: Path | None = None
    grid_size: int = 201


@dataclass(frozen=True)
class RunConfig:
    model: ModelConfig
    criterion: CriterionSpec
    search: SearchConfig
    nruns: int
    glm: GlmConfig | None = None
    output: OutputConfig = field(default_factory=OutputConfig)
    progress: bool = False
    startd: tuple | None = None

    @property
    def is_glm(self):
        return self.glm is not None

    def with_overrides(self, out=None, seed=None, workers=None, progress=None):
        """Copy with command-line overrides applied (``None`` keeps the file value)."""
        cfg = self
        if out is not None:
            cfg = replace(cfg, output=replace(cfg.output, directory=Path(out)))
        if seed is not None or workers is not None:
            search = cfg.search
            if seed is not None:
                search = replace(search, seed=int(seed))
            if workers is not None:
                search = replace(search, workers=int(workers))
            cfg = replace(cfg, search=search)
        if progress is not None:
            cfg = replace(cfg, progress=bool(progress))
        return cfg


def _check_keys(section, allowed, where):
    if not isinstance(section, dict):
        raise ConfigError(f"{where} must be a mapping")
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigError(f"unknown {where} entries: {', '.join(unknown)}")


def _require(section, key, where):
    if key not in section or section[key] is None:
        raise ConfigError(f"{where}.{key} is required")
    return section[key]


def _as_int(value, name, minimum=None):
    if isinstance(value, bool) or not isinstance(value, (int, float, np.integer)) or int(value) != value:
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise ConfigError(f"{name} must be at least {minimum}, got {value}")
    return value


def _as_float(value, name):
    if isinstance(value, bool):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number, got {value!r}") from None
    if not np.isfinite(out):
        raise ConfigError(f"{name} must be finite, got {value!r}")
    return out


def _as_list(value, name, length):
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"{name} must be a list")
    if len(value) != length:
        raise ConfigError(f"{name} must have {length} entries, got {len(value)}")
    return list(value)


def _knots(value, name):
    if value is None:
        return ()
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        value = [value]
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"{name} must be a list of knots")
    return tuple(_as_float(k, name) for k in value)


def _formula_factors(ast):
    used = set()
    for t in ast.terms:
        if isinstance(t, Main):
            used.add(t.factor)
        elif isinstance(t, Interaction):
            used.update((t.left, t.right))
        elif isinstance(t, Polynomial):
            used.add(t.factor)
    return used


def parse_model(section):
    _check_keys(section, _MODEL_KEYS, "model")
    formula = _require(section, "formula", "model")
    if not isinstance(formula, str):
        raise ConfigError("model.formula must be a string such as '~ x1 + x2'")
    ast = parse_formula(formula)
    npf = _as_int(_require(section, "npf", "model"), "model.npf", 1)
    tb = _require(section, "tbounds", "model")
    if not isinstance(tb, (list, tuple)) or len(tb) != 2:
        raise ConfigError("model.tbounds must be a pair [0, T]")
    tbounds = (_as_float(tb[0], "model.tbounds"), _as_float(tb[1], "model.tbounds"))
    if not tbounds[0] < tbounds[1]:
        raise ConfigError(f"model.tbounds must be increasing, got {list(tbounds)}")

    names = section.get("factor_names")
    if names is None:
        names = [f"x{j + 1}" for j in range(npf)]
    names = _as_list(names, "model.factor_names", npf)
    for n in names:
        if not isinstance(n, str) or not _IDENT.match(n):
            raise ConfigError(f"factor name {n!r} is not a valid identifier")
    if len(set(names)) != npf:
        raise ConfigError("model.factor_names must be unique")

    dx = [_as_int(d, "model.dx", 0) for d in _as_list(_require(section, "dx", "model"), "model.dx", npf)]
    knotsx = _as_list(_require(section, "knotsx", "model"), "model.knotsx", npf)
    knotsx = [_knots(k, f"model.knotsx[{j}]") for j, k in enumerate(knotsx)]

    scalars = section.get("scalars") or []
    if not isinstance(scalars, (list, tuple)):
        raise ConfigError("model.scalars must be a list of factor names")
    for s in scalars:
        if s not in names:
            raise ConfigError(f"scalar factor {s!r} is not one of the factors {names}")
        j = names.index(s)
        if dx[j] != 0:
            raise ConfigError(f"factor {s}: a scalar factor must have a zero degree entry (dx = {dx[j]})")
        if knotsx[j]:
            raise ConfigError(f"factor {s}: a scalar factor must have no interior knots")

    factor_specs = []
    for j, name in enumerate(names):
        try:
            factor_specs.append(BasisSpec("bspline", dx[j], knotsx[j], tbounds))
        except ConfigError as exc:
            raise ConfigError(f"factor {name}: {exc}") from None

    used = _formula_factors(ast)
    unknown = sorted(used - set(names))
    if unknown:
        raise ConfigError(f"formula uses undeclared factors {unknown}; factors are {names}")
    unused = [n for n in names if n not in used]
    if unused:
        raise ConfigError(f"declared factors {unused} do not appear in the formula")

    n_terms = len(ast.terms)
    pars = _as_list(_require(section, "pars", "model"), "model.pars", n_terms)
    db = _as_list(_require(section, "db", "model"), "model.db", n_terms)
    knotsb = section.get("knotsb")
    knotsb = [()] * n_terms if knotsb is None else _as_list(knotsb, "model.knotsb", n_terms)
    params = []
    for q, (fam, deg, kn) in enumerate(zip(pars, db, knotsb)):
        label = ast.terms[q].render()
        if not isinstance(fam, str) or fam.lower() not in ("power", "bspline"):
            raise ConfigError(f"term {label}: pars entries should be 'power' or 'bspline', got {fam!r}")
        deg = _as_int(deg, f"model.db[{q}]", 0)
        kn = _knots(kn, f"model.knotsb[{q}]")
        if fam.lower() == "power" and kn:
            raise ConfigError(f"term {label}: for a power basis the knot vector should be empty")
        try:
            params.append(BasisSpec(fam, deg, kn, tbounds))
        except ConfigError as exc:
            raise ConfigError(f"term {label}: {exc}") from None
    return ModelConfig(formula, tuple(names), tuple(factor_specs), tuple(params), tbounds)


def parse_criterion(section):
    _check_keys(section, _CRITERION_KEYS, "criterion")
    kind = _require(section, "kind", "criterion")
    lam = _as_float(section.get("lambda", 0.0), "criterion.lambda")
    return CriterionSpec(kind, lam)


def parse_glm(section):
    _check_keys(section, _GLM_KEYS, "glm")
    family = GlmFamily.from_names(_require(section, "family", "glm"), section.get("link"))
    method = str(_require(section, "method", "glm"))
    lookup = {"quadrature": "quadrature", "mc": "MC"}
    if method.lower() not in lookup:
        raise ConfigError(f"glm.method must be 'quadrature' or 'MC', got {method!r}")
    method = lookup[method.lower()]
    level = section.get("level")
    level = DEFAULT_LEVEL if level is None else _as_int(level, "glm.level", 1)
    size = section.get("B")
    size = DEFAULT_MC_SIZE if size is None else _as_int(size, "glm.B", 1)
    prior = prior_from_config(_require(section, "prior", "glm"))
    mc_seed = section.get("mc_seed")
    if mc_seed is not None:
        mc_seed = _as_int(mc_seed, "glm.mc_seed", 0)
    return GlmConfig(family, method, prior, level, size, mc_seed)


def parse_search(section):
    _check_keys(section, _SEARCH_KEYS, "search")
    nruns = _as_int(_require(section, "nruns", "search"), "search.nruns", 1)
    seed = section.get("seed")
    if seed is not None:
        seed = _as_int(seed, "search.seed", 0)
    search = SearchConfig(
        nsd=_as_int(section.get("nsd", 1), "search.nsd", 1),
        tol=_as_float(section.get("tol", 1e-4), "search.tol"),
        dlbound=_as_float(section.get("dlbound", -1.0), "search.dlbound"),
        dubound=_as_float(section.get("dubound", 1.0), "search.dubound"),
        max_sweeps=_as_int(section.get("max_sweeps", 200), "search.max_sweeps", 1),
        seed=seed,
        workers=_as_int(section.get("workers", 1), "search.workers", 1),
    )
    progress = section.get("progress", False)
    if not isinstance(progress, bool):
        raise ConfigError("search.progress must be true or false")
    return search, nruns, progress, section.get("startd")


def parse_output(section, base_dir):
    _check_keys(section, _OUTPUT_KEYS, "output")
    directory = section.get("directory")
    if directory is not None:
        directory = Path(directory)
        if not directory.is_absolute():
            directory = base_dir / directory
    grid = _as_int(section.get("grid_size", 201), "output.grid_size", 2)
    return OutputConfig(directory, grid)


def read_design(directory, names):
    """Load ``design_<name>.csv`` coefficient files written by :func:`write_outputs`."""
    directory = Path(directory)
    return Design(names, [_read_matrix(directory / f"design_{n}.csv") for n in names])


def _read_matrix(path):
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except OSError as exc:
        raise ConfigError(f"cannot read coefficient file {path}: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"malformed coefficient file {path}: {exc}") from None
    return data


def _parse_starts(raw, model, nruns, nsd, base_dir):
    """Explicit starting designs: a list of ``nsd`` entries, each a directory of
    coefficient CSVs or a mapping from factor name to a matrix or CSV path."""
    if not isinstance(raw, (list, tuple)):
        raise ConfigError("search.startd must be a list with one starting design per start")
    if len(raw) != nsd:
        raise ConfigError(f"search.startd has {len(raw)} designs but nsd = {nsd}")
    starts = []
    for k, entry in enumerate(raw):
        where = f"search.startd[{k}]"
        if isinstance(entry, str):
            path = Path(entry) if Path(entry).is_absolute() else base_dir / entry
            design = read_design(path, model.factor_names)
        elif isinstance(entry, dict):
            missing = [n for n in model.factor_names if n not in entry]
            extra = [n for n in entry if n not in model.factor_names]
            if missing or extra:
                raise ConfigError(f"{where} must name exactly the factors {list(model.factor_names)}")
            coefs = []
            for n in model.factor_names:
                v = entry[n]
                if isinstance(v, str):
                    p = Path(v) if Path(v).is_absolute() else base_dir / v
                    coefs.append(_read_matrix(p))
                else:
                    try:
                        coefs.append(np.array(v, dtype=float, ndmin=2))
                    except (TypeError, ValueError):
                        raise ConfigError(f"{where}.{n} is not a numeric matrix") from None
            design = Design(model.factor_names, coefs)
        else:
            raise ConfigError(f"{where} must be a directory path or a mapping of factor matrices")
        for n, c, spec in zip(design.names, design.coefs, model.factor_specs):
            if c.shape != (nruns, spec.dimension):
                raise ConfigError(
                    f"{where}: factor {n} has shape {c.shape}, expected {(nruns, spec.dimension)}")
        starts.append(design)
    return tuple(starts)


def parse_config(doc, base_dir="."):
    """Validate a configuration mapping; relative paths resolve against ``base_dir``."""
    base_dir = Path(base_dir)
    _check_keys(doc, _SECTIONS, "configuration")
    model = parse_model(_require(doc, "model", "configuration"))
    criterion = parse_criterion(_require(doc, "criterion", "configuration"))
    glm = parse_glm(doc["glm"]) if doc.get("glm") is not None else None
    search, nruns, progress, raw_starts = parse_search(_require(doc, "search", "configuration"))
    output = parse_output(doc.get("output") or {}, base_dir)
    starts = None
    if raw_starts is not None:
        starts = _parse_starts(raw_starts, model, nruns, search.nsd, base_dir)
        for k, s in enumerate(starts):
            if not s.within(search.dlbound, search.dubound):
                raise ConfigError(f"search.startd[{k}] has coefficients outside [dlbound, dubound]")
    cfg = RunConfig(model, criterion, search, nruns, glm, output, progress, starts)
    if glm is not None:
        # resolve prior shapes now so mismatches surface as configuration errors
        p = model.term_list().n_params
        prior = glm.prior
        if hasattr(prior, "covariance"):
            prior.mean(p)
            prior.covariance(p)
        else:
            prior.limits(p)
    return cfg


def load_config(path):
    """Read and validate a JSON configuration file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from None
    return parse_config(doc, path.parent)
