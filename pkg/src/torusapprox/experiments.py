"""Experiment orchestration: configs, deterministic data files, and the
kernel / bounds / simulate / scaling / seqspace studies.

Every experiment is a pure function of (config, seed): reruns produce
byte-identical output files.  Randomized experiments derive one generator
per (experiment label, row index) through `derive_rng`, so row-level
parallelism cannot change any number.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .field import default_truncation, dudley_bound, estimate_sup_norm
from .kernels import KernelSpec, decay_profile_korobov, kernel_at_distance
from .mc import MCConfig, empirical_error, mc_approximate, mc_complexity_bound, mc_error_bound
from .projection import curse_bound, det_lower_bound, det_worst_case_error, korobov_beta, top_n_indices
from .sketch import SketchConfig, gauss_norm_expectation, gaussian_sketch, sequence_det_lower_bound
from .space import (
    FrequencyWeights,
    SparseFunction,
    evaluate_at_points,
    hilbert_norm,
    normalize_korobov,
    random_unit_function,
)
from .util import derive_rng, ensure_finite, replication_rngs

__all__ = [
    "EXPERIMENTS",
    "THREADS_ENV_VAR",
    "ExperimentConfig",
    "DataSeries",
    "parse_config",
    "parse_config_text",
    "emit_config",
    "write_dat",
    "write_csv",
    "run_experiment",
    "run_kernel",
    "run_simulate",
    "run_bounds",
    "run_scaling",
    "run_seqspace",
]

EXPERIMENTS = ("kernel", "bounds", "simulate", "scaling", "seqspace")
THREADS_ENV_VAR = "TORUSAPPROX_THREADS"

# experiments that draw randomness and therefore require a seed
_RANDOMIZED = ("bounds", "simulate", "scaling", "seqspace")


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV_VAR, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class ExperimentConfig:
    """Flat experiment description; every field maps to one config-file key
    and one CLI flag of the same name."""

    experiment: str
    r: float = 1.25
    beta0: float = 0.4
    lambda_values: tuple[float, ...] = ()
    dims: tuple[int, ...] = (1,)
    eps: tuple[float, ...] = (0.5,)
    n: tuple[int, ...] = (16, 256)
    mass_tol: float = 1e-6
    grid_points_per_dim: int = 512
    replications: int = 200
    battery: int = 1
    seed: int | None = None
    out_dir: str = "out"
    threads: int = field(default_factory=_default_threads)
    input_coefs: str = ""

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; pick one of {EXPERIMENTS}")
        if not self.dims or not self.eps or not self.n:
            raise ValueError("dims, eps and n lists must be nonempty")
        if self.mass_tol <= 0 or self.grid_points_per_dim < 2:
            raise ValueError("tolerances and resolutions must be positive")
        if self.replications < 2 or self.battery < 1 or self.threads < 1:
            raise ValueError("replications >= 2, battery >= 1, threads >= 1")
        if self.experiment in _RANDOMIZED and self.seed is None:
            raise ValueError(f"experiment {self.experiment!r} is randomized and requires a seed")

    def weights(self) -> FrequencyWeights:
        if self.lambda_values:
            return FrequencyWeights.explicit(self.lambda_values)
        return normalize_korobov(self.r, self.beta0)


@dataclass(frozen=True)
class DataSeries:
    """Labeled numeric table; construction rejects non-finite entries."""

    name: str
    labels: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]
    comments: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        for row in self.rows:
            if len(row) != len(self.labels):
                raise ValueError(f"row length {len(row)} != {len(self.labels)} labels in {self.name}")
            ensure_finite(self.name, row)


# --- config file round-trip -------------------------------------------------

_LIST_KEYS = {"lambda_values", "dims", "eps", "n"}
_INT_KEYS = {"grid_points_per_dim", "replications", "battery", "seed", "threads"}
_FLOAT_KEYS = {"r", "beta0", "mass_tol"}
_KEY_ORDER = (
    "experiment", "r", "beta0", "lambda_values", "dims", "eps", "n", "mass_tol",
    "grid_points_per_dim", "replications", "battery", "seed", "out_dir",
    "threads", "input_coefs",
)


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key in _LIST_KEYS:
        if not raw:
            return ()
        items = [item.strip() for item in raw.split(",") if item.strip()]
        if key == "lambda_values" or key == "eps":
            return tuple(float(v) for v in items)
        return tuple(int(v) for v in items)
    if key in _INT_KEYS:
        if not raw:  # e.g. "seed =" for a deterministic experiment
            return None
        return int(raw)
    if key in _FLOAT_KEYS:
        return float(raw)
    return raw


def parse_config_text(text: str, overrides: dict | None = None) -> ExperimentConfig:
    """Parse `key = value` lines (# comments, lists comma-separated)."""
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValueError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in _KEY_ORDER:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
        values[key] = _parse_value(key, raw)
    if overrides:
        values.update(overrides)
    values = {k: v for k, v in values.items() if v is not None or k == "seed"}
    if "experiment" not in values:
        raise ValueError("config must name an experiment")
    return ExperimentConfig(**values)


def parse_config(path: str | Path, overrides: dict | None = None) -> ExperimentConfig:
    return parse_config_text(Path(path).read_text(encoding="utf-8"), overrides)


def _format_value(key: str, value) -> str:
    if key in _LIST_KEYS:
        return ",".join(repr(v) if isinstance(v, float) else str(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def emit_config(cfg: ExperimentConfig) -> str:
    lines = [f"{key} = {_format_value(key, getattr(cfg, key))}" for key in _KEY_ORDER]
    return "\n".join(lines) + "\n"


# --- output files -------------------------------------------------------------

def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


def write_dat(path: str | Path, series: DataSeries) -> Path:
    """Whitespace-separated plot data with a # header naming the columns."""
    path = Path(path)
    lines = [f"# {comment}" for comment in series.comments]
    lines.append("# " + " ".join(series.labels))
    lines.extend(" ".join(_fmt(v) for v in row) for row in series.rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def write_csv(path: str | Path, series: DataSeries) -> Path:
    """Comma-separated table with one header row (comments as # lines)."""
    path = Path(path)
    lines = [f"# {comment}" for comment in series.comments]
    lines.append(",".join(series.labels))
    lines.extend(",".join(_fmt(v) for v in row) for row in series.rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def _map_indexed(fn, count: int, threads: int) -> list:
    """Evaluate fn(i) for i < count, optionally on a thread pool.

    Results are collected by index, so the schedule cannot affect output.
    """
    if threads <= 1 or count <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count)))


# --- experiments ----------------------------------------------------------------

def run_kernel(cfg: ExperimentConfig) -> list[DataSeries]:
    """One-dimensional kernel section K(x, 0) on a grid (deterministic)."""
    w = cfg.weights()
    spec = KernelSpec(w)
    g = cfg.grid_points_per_dim
    xs = np.arange(g, dtype=float) / g
    dists = np.minimum(xs, 1.0 - xs)
    vals = np.asarray(kernel_at_distance(spec, dists))
    comments = [f"kernel section at 0, sum of squared weights = {_fmt(w.sum_sq())}"]
    if w.kind == "korobov":
        profile = decay_profile_korobov(w)
        comments.append(
            f"decay profile p={_fmt(profile.p)} alpha={_fmt(profile.alpha)} "
            f"r0={_fmt(profile.r0)} (floor certified for distances <= r0)"
        )
    rows = tuple((float(x), float(v)) for x, v in zip(xs, vals))
    return [DataSeries(name="kernel", labels=("x", "kernel"), rows=rows, comments=tuple(comments))]


def _load_or_sample_input(cfg: ExperimentConfig, w, trunc) -> SparseFunction:
    if cfg.input_coefs:
        coefs = {}
        for line in Path(cfg.input_coefs).read_text(encoding="utf-8").splitlines():
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            k_raw, c_raw = stripped.split()
            coefs[(int(k_raw),)] = float(c_raw)
        f = SparseFunction(d=1, coefs=coefs, weights=w)
        norm = hilbert_norm(f)
        if norm == 0.0:
            raise ValueError("input coefficient file describes the zero function")
        coefs = {idx: c / norm for idx, c in coefs.items()}
        return SparseFunction(d=1, coefs=coefs, weights=w)
    return random_unit_function(
        1, trunc.indices, derive_rng(cfg.seed, "simulate-input"), weights=w
    )


def run_simulate(cfg: ExperimentConfig) -> list[DataSeries]:
    """Input curve plus one randomized approximation curve per trial count.

    One-dimensional by construction (the output is a plot); the input is a
    seeded random unit-norm function on the truncation set unless a
    coefficient file is supplied.
    """
    if tuple(cfg.dims) != (1,):
        raise ValueError("simulate draws curves and is defined for dims = 1 only")
    w = cfg.weights()
    if w.kind != "korobov":
        raise ValueError("simulate expects korobov weights")
    trunc = default_truncation(w, 1, cfg.mass_tol, max_indices=200_000)
    f = _load_or_sample_input(cfg, w, trunc)
    g = cfg.grid_points_per_dim
    xs = (np.arange(g, dtype=float) / g).reshape(-1, 1)
    header = (
        f"r={_fmt(cfg.r)} beta0={_fmt(cfg.beta0)} seed={cfg.seed} "
        f"truncation={len(trunc.indices)} dropped_mass<={_fmt(trunc.dropped_mass)}"
    )
    out = [
        DataSeries(
            name="originalfcn",
            labels=("x", "f"),
            rows=tuple(zip(xs[:, 0].tolist(), evaluate_at_points(f, xs).tolist())),
            comments=(header,),
        )
    ]
    for n in cfg.n:
        approx = mc_approximate(
            f, MCConfig(n=n, trunc=trunc, seed=cfg.seed), derive_rng(cfg.seed, "simulate-approx", n)
        )
        out.append(
            DataSeries(
                name=f"approx{n}",
                labels=("x", "approximation"),
                rows=tuple(zip(xs[:, 0].tolist(), evaluate_at_points(approx, xs).tolist())),
                comments=(header, f"trials n={n}"),
            )
        )
    return out


def run_bounds(cfg: ExperimentConfig) -> list[DataSeries]:
    """Per dimension: spectral lower bound, projection error, and the
    randomized upper bound over the configured information counts."""
    w = cfg.weights()
    point_budget = 1 << 21

    def one_dim(i: int) -> DataSeries:
        d = cfg.dims[i]
        grid = min(cfg.grid_points_per_dim, int(point_budget ** (1.0 / d)))
        trunc = default_truncation(w, d, cfg.mass_tol, max_indices=200_000)
        sup = estimate_sup_norm(
            w, trunc, max(grid, 16), cfg.replications, derive_rng(cfg.seed, "bounds-sup", i)
        )
        rows = []
        for n in cfg.n:
            lower = det_lower_bound(w, d, n)
            proj = det_worst_case_error(w, d, top_n_indices(w, d, n), grid)
            mc_col = mc_error_bound(sup.mean, n) if n >= 1 else w.sum_sq() ** (d / 2.0)
            rows.append((float(n), lower, proj, mc_col))
        return DataSeries(
            name=f"bounds_d{d}",
            labels=("n", "det_lower_bound", "det_projection_error", "mc_upper_bound"),
            rows=tuple(rows),
            comments=(
                f"d={d} sup_norm_estimate={_fmt(sup.mean)} se={_fmt(sup.std_error)} "
                f"replications={sup.replications} grid={grid}",
            ),
        )

    return _map_indexed(one_dim, len(cfg.dims), cfg.threads)


def run_scaling(cfg: ExperimentConfig) -> list[DataSeries]:
    """Information counts over (d, eps): measured, randomized bound, and the
    exponential deterministic lower bound.

    n_emp is the smallest configured trial count whose measured mean error
    plus two standard errors is <= eps, taken over a declared battery of
    seeded unit-norm inputs supported on the truncation set; -1 marks a
    ladder that never reached eps.
    """
    w = cfg.weights()
    if w.kind != "korobov":
        raise ValueError("scaling study expects korobov weights")
    profile = decay_profile_korobov(w)
    beta = korobov_beta(w)
    ladder = sorted(n for n in cfg.n if n >= 1)
    point_budget = 1 << 21
    pairs = [(d, e) for d in cfg.dims for e in cfg.eps]

    def one_pair(i: int) -> tuple[float, ...]:
        d, eps = pairs[i]
        trunc = default_truncation(w, d, cfg.mass_tol, max_indices=200_000)
        grid = min(cfg.grid_points_per_dim, int(point_budget ** (1.0 / d)))
        n_emp = -1.0
        for n in ladder:
            worst = 0.0
            for b in range(cfg.battery):
                f = random_unit_function(
                    d, trunc.indices, derive_rng(cfg.seed, "scaling-input", i * cfg.battery + b), weights=w
                )
                report = empirical_error(
                    f,
                    MCConfig(n=n, trunc=trunc, seed=cfg.seed),
                    grid,
                    cfg.replications,
                    derive_rng(cfg.seed, "scaling-mc", (i * cfg.battery + b) * 100_000 + n),
                )
                worst = max(worst, report.mean_error + 2.0 * report.std_error)
            if worst <= eps:
                n_emp = float(n)
                break
        n_mc = float(mc_complexity_bound(dudley_bound(profile, d), eps))
        n_det = curse_bound(beta, d, eps)
        return (float(d), float(eps), n_emp, n_mc, n_det)

    rows = _map_indexed(one_pair, len(pairs), cfg.threads)
    return [
        DataSeries(
            name="scaling",
            labels=("d", "eps", "n_emp", "n_mc_bound", "n_det_lower"),
            rows=tuple(rows),
            comments=(
                f"battery={cfg.battery} replications={cfg.replications} "
                f"mass_tol={_fmt(cfg.mass_tol)} n_emp=-1 means the ladder never reached eps",
            ),
        )
    ]


def run_seqspace(cfg: ExperimentConfig) -> list[DataSeries]:
    """Sequence-space crossover table: m = 2^d, deterministic lower bound,
    randomized complexity bound, and the measured error of the sketch run
    with exactly that many trials."""
    eps = cfg.eps[0]

    def one_dim(i: int) -> tuple[float, ...]:
        d = cfg.dims[i]
        m = 2**d
        det = sequence_det_lower_bound(m, eps)
        expectation, _ = gauss_norm_expectation(m, math.inf)
        n_rand = mc_complexity_bound(expectation, eps)
        rng = derive_rng(cfg.seed, "seqspace", i)
        x = rng.standard_normal(m)
        x /= np.linalg.norm(x)
        sketch_cfg = SketchConfig(m=m, n=n_rand, seed=cfg.seed)
        errs = np.empty(cfg.replications)
        for j, child in enumerate(replication_rngs(rng, cfg.replications)):
            errs[j] = np.max(np.abs(x - gaussian_sketch(x, sketch_cfg, child)))
        return (float(d), float(m), det, float(n_rand), float(errs.mean()))

    rows = _map_indexed(one_dim, len(cfg.dims), cfg.threads)
    crossover = next(
        (int(row[0]) for row in rows if row[3] < row[2]),
        None,
    )
    note = (
        f"crossover at d0={crossover}: randomized bound below deterministic bound from there on"
        if crossover is not None
        else "no crossover within the configured dimensions"
    )
    return [
        DataSeries(
            name="seqspace",
            labels=("d", "m", "det_lower_bound", "n_randomized", "empirical_error"),
            rows=tuple(rows),
            comments=(f"eps={_fmt(eps)} replications={cfg.replications}", note),
        )
    ]


_RUNNERS = {
    "kernel": run_kernel,
    "simulate": run_simulate,
    "bounds": run_bounds,
    "scaling": run_scaling,
    "seqspace": run_seqspace,
}


def run_experiment(cfg: ExperimentConfig) -> list[Path]:
    """Run the configured experiment and write its data files.

    Plot-style experiments (kernel, simulate) emit .dat files; tables emit
    .csv.  Returns the written paths.
    """
    series = _RUNNERS[cfg.experiment](cfg)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for s in series:
        if cfg.experiment in ("kernel", "simulate"):
            written.append(write_dat(out_dir / f"{s.name}.dat", s))
        else:
            written.append(write_csv(out_dir / f"{s.name}.csv", s))
    return written
