"""Monte-Carlo experiment drivers with deterministic CSV output.

Each run's RNG seed is a pure function of (master seed, scheme tag,
sweep value, trial index), so reruns of the same spec give byte
identical files no matter how many workers execute the trials.  Raw
rows carry one line per trial; a companion ``*_agg.csv`` file holds
per-point means and standard errors that are recomputable from the raw
rows.
"""

from __future__ import annotations

import csv
import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .benchmarks import SchemeId, _without_reflection_paths, run_scheme
from .channel import draw_scenario
from .config import ScenarioConfig
from .exceptions import ConfigError
from .solver import SolverOptions, run_ao

__all__ = [
    "ExperimentSpec", "ExperimentResult", "ResultRow", "AggregateRow",
    "derive_seed", "run_convergence", "run_sweep_elements", "run_sweep_power",
    "run_deployment", "run_experiment", "RAW_HEADER", "AGG_HEADER",
]

RAW_HEADER = ("experiment", "scheme", "sweep_value", "trial",
              "rate_bps_hz", "iterations", "wall_ms")
AGG_HEADER = ("scheme", "sweep_value", "mean_rate", "stderr", "n")

# stable ordinals feeding the seed derivation; never reorder
_SCHEME_ORDINAL = {
    "proposed": 0, "diag_ris": 1, "random_bdris": 2, "no_ris": 3, "non_coop": 4,
    "centralized": 5, "distributed": 6,
}

_KINDS = ("convergence", "sweep_elements", "sweep_power", "deployment")
_TRACEABLE = ("proposed", "diag_ris", "no_ris")
_DEPLOYMENT_TAGS = ("centralized", "distributed")
_ALL_SCHEMES = tuple(s.value for s in SchemeId)

_DEFAULT_VALUES = {
    "convergence": (),
    "sweep_elements": (8.0, 12.0, 16.0, 20.0, 24.0),
    "sweep_power": (10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0),
    "deployment": (20.0, 40.0),
}


def derive_seed(master_seed, scheme, sweep_value, trial):
    """Seed material for one run as a numpy SeedSequence.

    Documented derivation: entries are the master seed, the scheme
    ordinal, the sweep value rounded to three decimals and shifted by
    2^31 (so negative dBm values stay admissible), and the trial index.
    """
    if scheme not in _SCHEME_ORDINAL:
        raise ConfigError(f"unknown scheme tag {scheme!r}")
    return np.random.SeedSequence([
        int(master_seed),
        _SCHEME_ORDINAL[scheme],
        int(round(float(sweep_value) * 1000.0)) + 2**31,
        int(trial),
    ])


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    scheme: str
    sweep_value: float
    trial: int
    rate_bps_hz: float
    iterations: int
    wall_ms: float


@dataclass(frozen=True)
class AggregateRow:
    scheme: str
    sweep_value: float
    mean_rate: float
    stderr: float
    n: int


@dataclass
class ExperimentResult:
    rows: tuple
    aggregates: tuple
    csv_path: str = None
    agg_path: str = None


@dataclass(frozen=True)
class ExperimentSpec:
    """What to run: experiment kind, base scenario, sweep grid, schemes."""

    kind: str
    config: ScenarioConfig = field(default_factory=ScenarioConfig)
    sweep_values: tuple = ()
    n_trials: int = 50
    schemes: tuple = ()
    out: str = None
    master_seed: int = None
    n_draws: int = 100
    include_timing: bool = False
    n_workers: int = 1
    distributed_positions: tuple = ((5.0, 0.0), (595.0, 0.0))

    def __post_init__(self):
        set_ = lambda k, v: object.__setattr__(self, k, v)
        if self.kind not in _KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}; pick one of {_KINDS}")
        if int(self.n_trials) < 1:
            raise ConfigError("n_trials must be >= 1")
        set_("n_trials", int(self.n_trials))
        if int(self.n_draws) < 1:
            raise ConfigError("n_draws must be >= 1")
        set_("n_draws", int(self.n_draws))
        if int(self.n_workers) < 1:
            raise ConfigError("n_workers must be >= 1")
        set_("n_workers", int(self.n_workers))
        set_("master_seed",
             self.config.rng_seed if self.master_seed is None else int(self.master_seed))
        if self.master_seed < 0:
            raise ConfigError("master_seed must be nonnegative")

        allowed = {"convergence": _TRACEABLE,
                   "deployment": _DEPLOYMENT_TAGS}.get(self.kind, _ALL_SCHEMES)
        schemes = tuple(str(getattr(s, "value", s)) for s in self.schemes)
        if not schemes:
            schemes = ("proposed",) if self.kind == "convergence" else tuple(allowed)
        for tag in schemes:
            if tag not in allowed:
                raise ConfigError(
                    f"scheme {tag!r} is not valid for {self.kind}; allowed: {allowed}")
        if len(set(schemes)) != len(schemes):
            raise ConfigError("schemes must not repeat")
        set_("schemes", schemes)

        values = tuple(float(v) for v in self.sweep_values)
        if not values:
            values = _DEFAULT_VALUES[self.kind]
        if self.kind == "convergence":
            values = ()
        else:
            if not values:
                raise ConfigError(f"{self.kind} needs a non-empty sweep grid")
            if any(b <= a for a, b in zip(values, values[1:])):
                raise ConfigError(f"sweep values must be strictly increasing, got {values}")
            if self.kind in ("sweep_elements", "deployment"):
                for v in values:
                    if not float(v).is_integer() or v < 1:
                        raise ConfigError(f"element counts must be positive integers, got {v}")
        set_("sweep_values", values)
        set_("distributed_positions",
             tuple((float(x), float(y)) for x, y in self.distributed_positions))
        if self.out is not None:
            set_("out", str(self.out))


def _canon(x):
    """Round-trip a float through the CSV format so aggregates match the file."""
    return float(format(float(x), ".12g"))


def _fmt(x):
    return format(float(x), ".12g")


def _aggregate(rows):
    aggregates = []
    for (scheme, value), group in itertools.groupby(
            rows, key=lambda r: (r.scheme, r.sweep_value)):
        rates = np.array([r.rate_bps_hz for r in group])
        n = len(rates)
        stderr = float(np.std(rates, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
        aggregates.append(AggregateRow(scheme, value, _canon(rates.mean()),
                                       _canon(stderr), n))
    return aggregates


def _result_paths(out):
    path = Path(out)
    suffix = path.suffix if path.suffix else ".csv"
    return path, path.with_name(path.stem + "_agg" + suffix)


def _write_files(out, rows, aggregates):
    raw_path, agg_path = _result_paths(out)
    raw_path.parent.mkdir(parents=True, exist_ok=True)
    with open(raw_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RAW_HEADER)
        for r in rows:
            writer.writerow([r.experiment, r.scheme, _fmt(r.sweep_value), r.trial,
                             _fmt(r.rate_bps_hz), r.iterations, _fmt(r.wall_ms)])
    with open(agg_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(AGG_HEADER)
        for a in aggregates:
            writer.writerow([a.scheme, _fmt(a.sweep_value), _fmt(a.mean_rate),
                             _fmt(a.stderr), a.n])
    return str(raw_path), str(agg_path)


def _finalize(spec, rows):
    rows.sort(key=lambda r: (r.scheme, r.sweep_value, r.trial))
    aggregates = _aggregate(rows)
    csv_path = agg_path = None
    if spec.out is not None:
        csv_path, agg_path = _write_files(spec.out, rows, aggregates)
    return ExperimentResult(tuple(rows), tuple(aggregates), csv_path, agg_path)


def _map_tasks(fn, payloads, n_workers):
    """Run payloads serially or on a process pool.

    Completion order never matters: rows are sorted canonically by the
    single writer in _finalize.
    """
    if n_workers == 1 or len(payloads) <= 1:
        return [fn(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(fn, payloads))


def _scheme_task(payload):
    (experiment, row_tag, scheme, value, cfg, opts, trial,
     master_seed, n_draws, include_timing) = payload
    rng = np.random.default_rng(derive_seed(master_seed, row_tag, value, trial))
    channels = draw_scenario(cfg, rng)
    start = time.perf_counter()
    outcome = run_scheme(scheme, channels, cfg, opts, rng=rng, n_draws=n_draws)
    wall_ms = (time.perf_counter() - start) * 1e3 if include_timing else 0.0
    return ResultRow(experiment, row_tag, _canon(value), trial,
                     _canon(outcome.rate), int(outcome.iterations), _canon(wall_ms))


def _run_scheme_jobs(spec, experiment, jobs):
    """Fan (row_tag, scheme, sweep_value, config, options) jobs out over trials."""
    payloads = [(experiment,) + job +
                (trial, spec.master_seed, spec.n_draws, spec.include_timing)
                for job in jobs for trial in range(spec.n_trials)]
    rows = _map_tasks(_scheme_task, payloads, spec.n_workers)
    return _finalize(spec, rows)


def _convergence_task(payload):
    tag, trial, cfg, master_seed, include_timing = payload
    rng = np.random.default_rng(derive_seed(master_seed, tag, 0.0, trial))
    channels = draw_scenario(cfg, rng)
    start = time.perf_counter()
    if tag == "proposed":
        _, trace = run_ao(channels, cfg, SolverOptions(), rng=rng)
    elif tag == "diag_ris":
        _, trace = run_ao(channels, cfg,
                          SolverOptions(reflection_mode="diagonal"), rng=rng)
    else:
        _, trace = run_ao(_without_reflection_paths(channels), cfg,
                          SolverOptions(optimize_reflection=False), rng=rng)
    wall_ms = (time.perf_counter() - start) * 1e3 if include_timing else 0.0
    return [ResultRow("convergence", tag, float(i), trial, _canon(rate), i,
                      _canon(wall_ms))
            for i, rate in enumerate(trace.weighted_sum_rate)]


def run_convergence(spec):
    """Iteration traces of the AO loop; sweep_value is the iteration index."""
    if spec.kind != "convergence":
        raise ConfigError(f"spec kind {spec.kind!r} is not 'convergence'")
    payloads = [(tag, trial, spec.config, spec.master_seed, spec.include_timing)
                for tag in spec.schemes for trial in range(spec.n_trials)]
    per_trial = _map_tasks(_convergence_task, payloads, spec.n_workers)
    return _finalize(spec, [row for rows in per_trial for row in rows])


def run_sweep_elements(spec):
    """Weighted sum rate versus the number of reflecting elements."""
    if spec.kind != "sweep_elements":
        raise ConfigError(f"spec kind {spec.kind!r} is not 'sweep_elements'")
    jobs = []
    for tag in spec.schemes:
        for value in spec.sweep_values:
            cfg = replace(spec.config, ris_elements=int(value), surface_elements=None)
            jobs.append((tag, tag, value, cfg, None))
    return _run_scheme_jobs(spec, "sweep_elements", jobs)


def run_sweep_power(spec):
    """Weighted sum rate versus per-BS transmit power in dBm."""
    if spec.kind != "sweep_power":
        raise ConfigError(f"spec kind {spec.kind!r} is not 'sweep_power'")
    jobs = []
    for tag in spec.schemes:
        for value in spec.sweep_values:
            cfg = replace(spec.config, tx_power_dbm=float(value))
            jobs.append((tag, tag, value, cfg, None))
    return _run_scheme_jobs(spec, "sweep_power", jobs)


def run_deployment(spec):
    """One central surface versus two half-size surfaces near the BSs.

    Both arms run the joint design; the distributed arm constrains the
    reflection to one unitary block per surface.
    """
    if spec.kind != "deployment":
        raise ConfigError(f"spec kind {spec.kind!r} is not 'deployment'")
    if len(spec.config.ris_positions) != 1:
        raise ConfigError("deployment sweeps need a single-surface base configuration")
    jobs = []
    for tag in spec.schemes:
        for value in spec.sweep_values:
            m = int(value)
            if tag == "centralized":
                cfg = replace(spec.config, ris_elements=m, surface_elements=None)
                opts = SolverOptions(reflection_mode="full")
            else:
                cfg = replace(spec.config, ris_elements=m,
                              ris_positions=spec.distributed_positions,
                              surface_elements=None)
                opts = SolverOptions(reflection_mode="per_surface")
            jobs.append((tag, "proposed", value, cfg, opts))
    return _run_scheme_jobs(spec, "deployment", jobs)


def run_experiment(spec):
    """Dispatch a spec to its runner."""
    runner = {
        "convergence": run_convergence,
        "sweep_elements": run_sweep_elements,
        "sweep_power": run_sweep_power,
        "deployment": run_deployment,
    }[spec.kind]
    return runner(spec)
