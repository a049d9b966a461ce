"""Monte-Carlo benchmark runner.

Sweeps every configured method over a pilot-budget grid and many random
scenario instances, reporting the deployment SNR each method reaches at
equal training cost. Within a trial all methods share one channel
realization, one pilot-noise stream and one probe-randomness stream
(common random numbers), so per-trial differences are paired. Output is a
flat result table plus per-(method, budget) aggregates, both emitted as
CSV or JSON.
"""

import copy
import csv
import hashlib
import io
import json
import math
import os
import time
from dataclasses import asdict, dataclass, field, fields

import numpy as np
import yaml

from . import kernels
from .baselines import (AngleGrid, DiscretePhaseBook, csm, dft_probe_book,
                        ls_estimate_then_pbf, ma_region_sampler, omp_estimate,
                        pbf_perfect, po_grid, ris_book_sampler, rms)
from .channels import (CascadedChannel, PathSet, Position, RisPhases,
                       gen_cascaded_channel, gen_path_set, ma_channel,
                       ris_end_to_end)
from .errors import ConfigError
from .oracle import COHERENT, POWER, PilotOracle
from .zo import CENTRAL, FORWARD, PHASE_WRAP, Box, ZoParams, quantize_phases, run_zo

RESULT_COLUMNS = ("scenario", "method", "budget", "trial", "achieved_power",
                  "snr_db", "queries_used", "wall_time_ms")
SUMMARY_COLUMNS = ("scenario", "method", "budget", "mean_snr_db",
                   "stderr_snr_db", "trials")

RIS_METHODS = ("pbf_perfect", "ls_pbf", "csm", "rms", "zo")
MA_METHODS = ("po_perfect", "omp_po", "rms", "zo")

# Deployment on 2-bit hardware applies to the methods that tune the live
# surface (the coherent estimator and the closed-form bound deploy
# continuous phases; see the repository design notes).
QUANTIZED_METHODS = ("zo", "rms", "csm")

_ZO_RIS_DEFAULTS = dict(mu=1e-3, eta=1.1, block_size=None, gradient_mode=FORWARD,
                        block_scheme="cycle", value_transform="sqrt", deploy="best")
_ZO_MA_DEFAULTS = dict(mu=0.25, eta=0.05, block_size=2, gradient_mode=CENTRAL,
                       block_scheme="cycle", value_transform="sqrt", deploy="final",
                       start_fraction=0.7)
_OMP_DEFAULTS = dict(grid_el=32, grid_az=32, k_max=None, residual_tol=1e-3,
                     coarse_step=None, refine_levels=3)
_PO_DEFAULTS = dict(coarse_step=None, refine_levels=3)

_ALLOWED_METHOD_PARAMS = {
    "zo": set(_ZO_RIS_DEFAULTS) | set(_ZO_MA_DEFAULTS),
    "omp_po": set(_OMP_DEFAULTS),
    "po_perfect": set(_PO_DEFAULTS),
    "pbf_perfect": set(),
    "ls_pbf": set(),
    "csm": set(),
    "rms": set(),
}


@dataclass
class ExperimentConfig:
    """Everything a sweep needs; fully determines the output."""

    scenario: str
    budgets: list
    methods: list
    trials: int = 50
    base_seed: int = 0
    tx_power: float = 1.0
    pilot_noise_var: float = 0.0
    report_noise_var: float = 1.0
    # reflecting-surface scenario
    n_elements: int = 512
    fading: float = 1.0
    include_direct: bool = False
    direct_fading: float = None
    quantizer_bits: int = None
    # movable-antenna scenario
    n_paths: int = 5
    wavelength: float = 1.0
    region: tuple = (2.0, 2.0)
    # per-method hyperparameter overrides: {method: {param: value}}
    method_params: dict = field(default_factory=dict)
    collect_timing: bool = False

    def __post_init__(self):
        if self.scenario not in ("ris", "ma"):
            raise ConfigError(f"scenario must be 'ris' or 'ma', got {self.scenario!r}")
        self.budgets = [int(b) for b in self.budgets]
        if not self.budgets:
            raise ConfigError("budgets must be nonempty")
        if any(b < 1 for b in self.budgets):
            raise ConfigError("budgets must be positive")
        if any(b2 <= b1 for b1, b2 in zip(self.budgets, self.budgets[1:])):
            raise ConfigError("budgets must be strictly increasing")
        self.methods = list(self.methods)
        known = RIS_METHODS if self.scenario == "ris" else MA_METHODS
        for name in self.methods:
            if name not in known:
                raise ConfigError(f"unknown method {name!r} for scenario {self.scenario!r} "
                                  f"(expected one of {', '.join(known)})")
        if not self.methods:
            raise ConfigError("methods must be nonempty")
        if len(set(self.methods)) != len(self.methods):
            raise ConfigError("duplicate method names")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.base_seed < 0:
            raise ConfigError("base_seed must be >= 0")
        if not self.tx_power > 0:
            raise ConfigError("tx_power must be positive")
        if self.pilot_noise_var < 0:
            raise ConfigError("pilot_noise_var must be >= 0")
        if not self.report_noise_var > 0:
            raise ConfigError("report_noise_var must be positive")
        self.region = tuple(float(v) for v in self.region)
        if self.scenario == "ris":
            if self.n_elements < 1:
                raise ConfigError("n_elements must be >= 1")
            if self.quantizer_bits is not None and self.quantizer_bits < 1:
                raise ConfigError("quantizer_bits must be >= 1")
        else:
            if self.n_paths < 1:
                raise ConfigError("n_paths must be >= 1")
            if not self.wavelength > 0:
                raise ConfigError("wavelength must be positive")
            if len(self.region) != 2 or any(not v > 0 for v in self.region):
                raise ConfigError("region must be two positive extents (Lx, Ly)")
        if not isinstance(self.method_params, dict):
            raise ConfigError("method_params must be a mapping")
        for name, params in self.method_params.items():
            if name not in known:
                raise ConfigError(f"method_params for unknown method {name!r}")
            if not isinstance(params, dict):
                raise ConfigError(f"method_params[{name!r}] must be a mapping")
            bad = set(params) - _ALLOWED_METHOD_PARAMS[name]
            if bad:
                raise ConfigError(f"unknown parameter(s) {sorted(bad)} for method {name!r}")

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError("config root must be a mapping")
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
        missing = {"scenario", "budgets", "methods"} - set(data)
        if missing:
            raise ConfigError(f"missing required config key(s): {sorted(missing)}")
        return cls(**data)

    def to_dict(self):
        d = asdict(self)
        d["region"] = list(self.region)
        return d

    def replace(self, **overrides):
        d = self.to_dict()
        d.update(overrides)
        d["method_params"] = copy.deepcopy(d["method_params"])
        return ExperimentConfig.from_dict(d)


def load_config(path):
    """Parse a YAML experiment config file."""
    try:
        with open(path, "r") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    if data is None:
        raise ConfigError(f"empty config file: {path}")
    return ExperimentConfig.from_dict(data)


@dataclass
class ResultRow:
    scenario: str
    method: str
    budget: int
    trial: int
    achieved_power: float
    snr_db: float
    queries_used: int
    wall_time_ms: float


@dataclass
class ResultTable:
    """Flat per-(method, budget, trial) results, sorted by that key."""

    rows: list = field(default_factory=list)

    def __post_init__(self):
        for r in self.rows:
            if r.queries_used > r.budget:
                raise ValueError(f"row {r} used more queries than its budget")

    def __len__(self):
        return len(self.rows)

    def sorted(self):
        return ResultTable(sorted(self.rows, key=lambda r: (r.method, r.budget, r.trial)))

    def select(self, **eq):
        """Rows matching all given field equalities, e.g. select(method='zo')."""
        out = self.rows
        for k, v in eq.items():
            out = [r for r in out if getattr(r, k) == v]
        return out

    def snrs(self, method, budget):
        """Per-trial SNR vector for one (method, budget), ordered by trial."""
        rows = sorted(self.select(method=method, budget=budget), key=lambda r: r.trial)
        return np.array([r.snr_db for r in rows])

    def to_csv(self, path_or_file):
        own = isinstance(path_or_file, (str, bytes, os.PathLike))
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh)
            w.writerow(RESULT_COLUMNS)
            for r in self.rows:
                w.writerow([r.scenario, r.method, r.budget, r.trial,
                            repr(r.achieved_power), repr(r.snr_db),
                            r.queries_used, repr(r.wall_time_ms)])
        finally:
            if own:
                fh.close()

    def to_csv_string(self):
        buf = io.StringIO()
        self.to_csv(buf)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, path_or_file):
        own = isinstance(path_or_file, (str, bytes, os.PathLike))
        fh = open(path_or_file, "r", newline="") if own else path_or_file
        try:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != list(RESULT_COLUMNS):
                raise ValueError(f"unexpected result CSV header: {header}")
            rows = [ResultRow(sc, me, int(bu), int(tr), float(ap), float(sn),
                              int(qu), float(wt))
                    for sc, me, bu, tr, ap, sn, qu, wt in reader]
        finally:
            if own:
                fh.close()
        return cls(rows)

    def to_records(self):
        return [asdict(r) for r in self.rows]

    @classmethod
    def from_records(cls, records):
        return cls([ResultRow(**r) for r in records])


@dataclass
class SummaryRow:
    scenario: str
    method: str
    budget: int
    mean_snr_db: float
    stderr_snr_db: float
    trials: int


def summarize(table):
    """Per-(method, budget) mean and standard error (sample std / sqrt(R))
    of the SNR column. A single-trial group reports standard error 0."""
    if not table.rows:
        raise ValueError("cannot summarize an empty result table")
    groups = {}
    for r in table.rows:
        groups.setdefault((r.scenario, r.method, r.budget), []).append(r.snr_db)
    out = []
    for (sc, me, bu) in sorted(groups, key=lambda k: (k[1], k[2])):
        vals = np.array(groups[(sc, me, bu)])
        n = vals.size
        stderr = float(np.std(vals, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
        out.append(SummaryRow(sc, me, bu, float(np.mean(vals)), stderr, n))
    return out


def summary_csv_string(summary):
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(SUMMARY_COLUMNS)
    for s in summary:
        w.writerow([s.scenario, s.method, s.budget, repr(s.mean_snr_db),
                    repr(s.stderr_snr_db), s.trials])
    return buf.getvalue()


def emit(table, summary, out_dir, fmt="csv"):
    """Write the result table and its summary under out_dir.

    fmt 'csv' writes results.csv + summary.csv (columns exactly as in
    RESULT_COLUMNS / SUMMARY_COLUMNS); fmt 'json' writes results.json +
    summary.json with the same fields. Returns the written paths.
    """
    if fmt not in ("csv", "json"):
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out_dir}: {exc}") from exc
    paths = []

    def write(name, text):
        p = os.path.join(out_dir, name)
        try:
            with open(p, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write {p}: {exc}") from exc
        paths.append(p)

    if fmt == "csv":
        write("results.csv", table.to_csv_string())
        write("summary.csv", summary_csv_string(summary))
    else:
        write("results.json", json.dumps(table.to_records(), indent=2) + "\n")
        write("summary.json", json.dumps([asdict(s) for s in summary], indent=2) + "\n")
    return paths


def scenario_digest(obj):
    """Stable hex digest of a scenario's ground truth, for paired-trial
    fairness checks."""
    h = hashlib.sha256()
    if isinstance(obj, CascadedChannel):
        h.update(obj.coeffs.tobytes())
        h.update(np.complex128(obj.direct).tobytes())
    elif isinstance(obj, PathSet):
        for a in (obj.gains, obj.elevations, obj.azimuths):
            h.update(np.ascontiguousarray(a).tobytes())
        h.update(np.float64(obj.wavelength).tobytes())
    else:
        raise TypeError("scenario must be a CascadedChannel or a PathSet")
    return h.hexdigest()


def build_scenario(cfg, trial):
    """Ground truth for one trial: seed = base_seed XOR trial, shared by
    every method in the trial."""
    seed = cfg.base_seed ^ trial
    if cfg.scenario == "ris":
        return gen_cascaded_channel(cfg.n_elements, seed, fading=cfg.fading,
                                    include_direct=cfg.include_direct,
                                    direct_fading=cfg.direct_fading)
    return gen_path_set(cfg.n_paths, seed, wavelength=cfg.wavelength)


def _trial_seeds(cfg, trial):
    """One pilot-noise stream and one probe-randomness stream per trial,
    shared across methods (common random numbers). The extra word keeps
    them disjoint from every channel seed."""
    chan_seed = cfg.base_seed ^ trial
    return [chan_seed, 1], [chan_seed, 2]


def _method_params(cfg, name, defaults):
    merged = dict(defaults)
    merged.update(cfg.method_params.get(name, {}))
    return merged


def _zo_deploy(deploy, best_x, traj):
    if deploy not in ("best", "final"):
        raise ConfigError("zo deploy must be 'best' or 'final'")
    if deploy == "final" and len(traj):
        return traj.final_variable()
    return best_x


def _run_ris_method(cfg, name, chan, budget, noise_seed, probe_seed):
    """Returns (deployed phase vector, oracle or None)."""

    def make_oracle(mode):
        return PilotOracle(chan, tx_power=cfg.tx_power, noise_var=cfg.pilot_noise_var,
                           budget=budget, mode=mode, noise_seed=noise_seed)

    book = DiscretePhaseBook(cfg.quantizer_bits if cfg.quantizer_bits else 2)
    if name == "pbf_perfect":
        return pbf_perfect(chan).phases, None
    if name == "ls_pbf":
        oracle = make_oracle(COHERENT)
        phases = ls_estimate_then_pbf(oracle, budget, dft_probe_book(budget, chan.m))
        return phases.phases, oracle
    if name == "rms":
        oracle = make_oracle(POWER)
        sampler = ris_book_sampler(np.random.default_rng(probe_seed), book, chan.m)
        return rms(oracle, budget, sampler).phases, oracle
    if name == "csm":
        oracle = make_oracle(POWER)
        return csm(oracle, budget, book, np.random.default_rng(probe_seed)).phases, oracle
    if name == "zo":
        oracle = make_oracle(POWER)
        mp = _method_params(cfg, "zo", _ZO_RIS_DEFAULTS)
        deploy = mp.pop("deploy")
        mp.pop("start_fraction", None)
        params = ZoParams(seed=probe_seed, **mp)
        best_x, traj = run_zo(oracle, np.zeros(chan.m), params, PHASE_WRAP)
        return _zo_deploy(deploy, best_x, traj), oracle
    raise ConfigError(f"unknown method {name!r}")


def _run_ma_method(cfg, name, paths, budget, noise_seed, probe_seed):
    """Returns (deployed position, oracle or None)."""
    lam = cfg.wavelength

    def make_oracle(mode):
        return PilotOracle(paths, tx_power=cfg.tx_power, noise_var=cfg.pilot_noise_var,
                           budget=budget, mode=mode, noise_seed=noise_seed)

    def batched(path_set):
        if path_set.k == 0:
            return lambda pts: np.zeros(len(pts), dtype=np.complex128)
        return lambda pts: kernels.ma_response_batch(
            path_set.gains, path_set.directions, path_set.wavelength,
            np.asarray(pts, dtype=np.float64))

    if name == "po_perfect":
        mp = _method_params(cfg, "po_perfect", _PO_DEFAULTS)
        step = mp["coarse_step"] if mp["coarse_step"] else lam / 50.0
        pos = po_grid(batched(paths), cfg.region, step,
                      refine_levels=mp["refine_levels"], vectorized=True)
        return pos.xy, None
    if name == "rms":
        oracle = make_oracle(POWER)
        sampler = ma_region_sampler(np.random.default_rng(probe_seed), cfg.region)
        return rms(oracle, budget, sampler).xy, oracle
    if name == "omp_po":
        oracle = make_oracle(COHERENT)
        mp = _method_params(cfg, "omp_po", _OMP_DEFAULTS)
        pts = ma_region_sampler(np.random.default_rng(probe_seed), cfg.region)(budget)
        y = oracle.query_many(pts)
        grid = AngleGrid(mp["grid_el"], mp["grid_az"])
        k_max = mp["k_max"] if mp["k_max"] else 2 * cfg.n_paths
        est = omp_estimate(pts, y, grid, lam, k_max, mp["residual_tol"],
                           tx_power=cfg.tx_power, noise_var=cfg.pilot_noise_var)
        step = mp["coarse_step"] if mp["coarse_step"] else lam / 50.0
        pos = po_grid(batched(est), cfg.region, step,
                      refine_levels=mp["refine_levels"], vectorized=True)
        return pos.xy, oracle
    if name == "zo":
        oracle = make_oracle(POWER)
        mp = _method_params(cfg, "zo", _ZO_MA_DEFAULTS)
        deploy = mp.pop("deploy")
        start_fraction = mp.pop("start_fraction")
        if not 0.0 <= start_fraction < 1.0:
            raise ConfigError("zo start_fraction must lie in [0, 1)")
        mp = dict(mp, mu=mp["mu"] * lam, eta=mp["eta"] * lam)
        params = ZoParams(seed=probe_seed, **mp)
        cost = params.queries_per_iteration()
        iters = max(1, int(round(budget * (1.0 - start_fraction) / cost)))
        while cost * iters > budget and iters > 1:
            iters -= 1
        if cost * iters > budget:
            raise ConfigError(f"budget {budget} cannot pay for one gradient step ({cost} queries)")
        n_starts = budget - cost * iters
        rng = np.random.default_rng(probe_seed)
        sampler = ma_region_sampler(rng, cfg.region)
        if n_starts > 0:
            starts = sampler(n_starts)
            vals = oracle.query_many(starts)
            x0 = starts[int(np.argmax(vals))]
        else:
            x0 = 0.5 * np.asarray(cfg.region)
        params.max_queries = cost * iters
        best_x, traj = run_zo(oracle, x0, params,
                              Box(np.zeros(2), np.asarray(cfg.region)))
        return _zo_deploy(deploy, best_x, traj), oracle
    raise ConfigError(f"unknown method {name!r}")


def _deploy_and_score(cfg, scenario_obj, name, var):
    """Noiseless deployment power and reporting SNR of a method's output."""
    if cfg.scenario == "ris":
        phases = RisPhases(np.mod(var, 2.0 * np.pi))
        if cfg.quantizer_bits and name in QUANTIZED_METHODS:
            phases = quantize_phases(phases, cfg.quantizer_bits)
        gain = ris_end_to_end(scenario_obj, phases)
    else:
        xy = np.clip(var, 0.0, np.asarray(cfg.region))
        gain = ma_channel(scenario_obj, Position(xy))
    power = cfg.tx_power * abs(gain) ** 2
    snr = 10.0 * math.log10(power / cfg.report_noise_var) if power > 0 else -math.inf
    return float(power), float(snr)


def run_single(cfg, method, budget, trial=0):
    """One (method, budget, trial) cell; returns (ResultRow, ledger)."""
    scenario_obj = build_scenario(cfg, trial)
    noise_seed, probe_seed = _trial_seeds(cfg, trial)
    runner = _run_ris_method if cfg.scenario == "ris" else _run_ma_method
    t0 = time.perf_counter()
    var, oracle = runner(cfg, method, scenario_obj, budget, noise_seed, probe_seed)
    elapsed_ms = (time.perf_counter() - t0) * 1000.0
    power, snr = _deploy_and_score(cfg, scenario_obj, method, var)
    row = ResultRow(scenario=cfg.scenario, method=method, budget=budget, trial=trial,
                    achieved_power=power, snr_db=snr,
                    queries_used=0 if oracle is None else oracle.used,
                    wall_time_ms=elapsed_ms if cfg.collect_timing else 0.0)
    return row, (oracle.ledger if oracle is not None else None)


def run_experiment(cfg):
    """Full sweep: every (method, budget, trial) cell, deterministic given
    cfg. Rows come back sorted by (method, budget, trial)."""
    rows = []
    for trial in range(cfg.trials):
        scenario_obj = build_scenario(cfg, trial)
        noise_seed, probe_seed = _trial_seeds(cfg, trial)
        runner = _run_ris_method if cfg.scenario == "ris" else _run_ma_method
        for method in cfg.methods:
            for budget in cfg.budgets:
                t0 = time.perf_counter()
                var, oracle = runner(cfg, method, scenario_obj, budget,
                                     noise_seed, probe_seed)
                elapsed_ms = (time.perf_counter() - t0) * 1000.0
                power, snr = _deploy_and_score(cfg, scenario_obj, method, var)
                rows.append(ResultRow(
                    scenario=cfg.scenario, method=method, budget=budget, trial=trial,
                    achieved_power=power, snr_db=snr,
                    queries_used=0 if oracle is None else oracle.used,
                    wall_time_ms=elapsed_ms if cfg.collect_timing else 0.0))
    return ResultTable(rows).sorted()
