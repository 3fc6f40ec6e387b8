"""Batch experiment harness: figure-style sweeps, summaries, CSV emission.

Five canned experiments mirror the package's headline studies:

* fig1 -- recovery error of the l1 decoder versus measurement count for
  three sensing ensembles, with and without a noise-matched threshold.
* fig2 -- Monte-Carlo cross-coherence versus its m^2/N scaling for
  independently subsampled DFT rows.
* fig3 -- recovery error and minimum scaled singular value versus sparsity
  for nonharmonic Fourier measurements at m = ceil(s ln N).
* fig4 -- Chebyshev distortion over an (m/N ratio, N) grid.
* fig5 -- weighted L2 approximation error of the built-in target function
  over a logarithmic threshold grid at two noise levels.

`custom` runs a fig1-style recovery sweep over caller-chosen grids.

Every row of output is produced by a pure function of (master_seed, value
path), so reruns are byte-identical and thread scheduling cannot change
results.  Decode failures never abort a sweep; each row carries a status.
"""

import concurrent.futures
import csv
import json
import math

import numpy as np

from . import analysis
from . import polyapprox
from .ensembles import EnsembleSpec, build_matrix, noise_vector, sparse_signal
from .solver import DecodeOptions, qcbp_decode
from .streams import RandomStream

EXPERIMENTS = ("fig1", "fig2", "fig3", "fig4", "fig5", "custom")

# Decode budgets per experiment, chosen so full sweeps finish on one core:
# error statistics settle one to two orders of magnitude before the duality
# gap certifies, so capped rows are still accurate and are marked by status.
_RECOVERY_OPTS_EXACT = DecodeOptions(max_iter=40000, step_ratio=0.002)
_RECOVERY_OPTS_NOISY = DecodeOptions(max_iter=12000, step_ratio=0.002)
_FIG3_OPTS = DecodeOptions(max_iter=10000, step_ratio=0.03)
_FIG5_OPTS = DecodeOptions(max_iter=30000, step_ratio=0.03)

_CONFIG_FIELDS = ("experiment", "N", "m_rule", "s", "eta", "noise_magnitude",
                  "trials", "master_seed", "ensemble", "output_path")


class ExperimentConfig:
    """Declarative description of one experiment sweep.

    Grid-bearing fields accept scalars or lists; `m_rule` is either an
    explicit list of measurement counts or one of the named rules
    "tenths" (ceil(k N / 10), k = 1..10), "pow2" (powers of two up to N),
    "s_log_n" (ceil(s ln N) per sparsity), "ratio_tenths"
    (ceil(k N / 10) per N, reported with the ratio k/10).
    """

    def __init__(self, experiment, N, m_rule, s=None, eta=(), noise_magnitude=0.0,
                 trials=1, master_seed=0, ensemble=(), output_path=None):
        if experiment not in EXPERIMENTS:
            raise ValueError("experiment must be one of %s" % (EXPERIMENTS,))
        self.experiment = experiment
        self.N = N
        self.m_rule = m_rule
        self.s = s
        self.eta = eta
        self.noise_magnitude = noise_magnitude
        self.trials = int(trials)
        self.master_seed = int(master_seed)
        self.ensemble = ensemble
        self.output_path = output_path
        if self.trials < 1:
            raise ValueError("trials must be at least 1")

    def to_json(self):
        return {name: getattr(self, name) for name in _CONFIG_FIELDS}

    @classmethod
    def from_json(cls, payload):
        unknown = set(payload) - set(_CONFIG_FIELDS)
        if unknown:
            raise ValueError("unknown config fields: %s" % sorted(unknown))
        if "experiment" not in payload:
            raise ValueError("config needs an 'experiment' field")
        base = default_config(payload["experiment"]).to_json()
        base.update(payload)
        return cls(**base)

    def __repr__(self):
        return "ExperimentConfig(%s)" % ", ".join(
            "%s=%r" % (k, getattr(self, k)) for k in _CONFIG_FIELDS)


def default_config(experiment):
    """The shipped configuration for each canned experiment."""
    if experiment == "fig1":
        return ExperimentConfig(
            "fig1", N=512, m_rule="tenths", s=15, eta=[0.0, 1e-3],
            noise_magnitude=1e-3, trials=25, master_seed=0,
            ensemble=["partial_dft_subset", "gaussian", "nonharmonic_fourier"])
    if experiment == "fig2":
        return ExperimentConfig(
            "fig2", N=[4, 8, 16, 32, 64, 128], m_rule="pow2", trials=500,
            master_seed=0, ensemble=["partial_dft_independent"])
    if experiment == "fig3":
        return ExperimentConfig(
            "fig3", N=1024, m_rule="s_log_n", s=[5, 10, 20, 40], eta=[0.0],
            noise_magnitude=1e-3, trials=50, master_seed=0,
            ensemble=["nonharmonic_fourier"])
    if experiment == "fig4":
        # trials reduced from the 10000 used for the reference study; the
        # larger value remains selectable through --trials / config files
        return ExperimentConfig(
            "fig4", N=list(range(10, 101, 10)), m_rule="ratio_tenths",
            trials=2000, master_seed=0, ensemble=["chebyshev_bos"])
    if experiment == "fig5":
        k = np.linspace(-8.0, 1.0, 12)
        return ExperimentConfig(
            "fig5", N=500, m_rule=[100], eta=[float(10.0 ** v) for v in k],
            noise_magnitude=[0.0, 1e-3], trials=50, master_seed=0,
            ensemble=["chebyshev_bos"])
    if experiment == "custom":
        return ExperimentConfig(
            "custom", N=128, m_rule=[32, 64], s=8, eta=[0.0],
            noise_magnitude=0.0, trials=10, master_seed=0,
            ensemble=["gaussian"])
    raise ValueError("experiment must be one of %s" % (EXPERIMENTS,))


def _as_list(value):
    if value is None:
        return []
    if isinstance(value, (list, tuple, np.ndarray)):
        return list(value)
    return [value]


def _m_grid(config, N, s=None):
    """Resolve the measurement-count rule for one N (and optionally one s)."""
    rule = config.m_rule
    if isinstance(rule, (list, tuple)):
        return [(int(m), None) for m in rule]
    if rule == "tenths":
        return [(math.ceil(k * N / 10.0), None) for k in range(1, 11)]
    if rule == "pow2":
        return [(2 ** k, None) for k in range(1, int(math.log2(N)) + 1)]
    if rule == "s_log_n":
        if s is None:
            raise ValueError("m_rule 's_log_n' needs a sparsity grid")
        return [(math.ceil(s * math.log(N)), None)]
    if rule == "ratio_tenths":
        return [(math.ceil(k * N / 10.0), k / 10.0) for k in range(1, 11)]
    raise ValueError("unknown m_rule %r" % (rule,))


def _recovery_row(config, ensemble, N, m, s, eta_values, noise, trial):
    """Decode one sparse-recovery instance at each threshold in eta_values.

    The matrix, signal, and noise are shared across the thresholds, so
    rows with the same (ensemble, N, m, trial) are directly comparable.
    """
    root = RandomStream(config.master_seed)
    inst = root.child(ensemble, N, m, trial)
    spec = EnsembleSpec(ensemble)
    A = build_matrix(spec, m, N, inst.child("matrix"))
    x0 = sparse_signal(N, s, inst.child("signal"))
    # signal and noise values are real by construction (complex storage with
    # zero imaginary part), so real-entried ensembles keep real arithmetic
    x_mult = x0.real if np.isrealobj(A.entries) else x0
    y = A.entries @ x_mult
    if noise > 0.0:
        e = noise_vector(m, noise, inst.child("noise"))
        y = y + (e.real if np.isrealobj(y) else e)
    rows = []
    for eta in eta_values:
        base = _RECOVERY_OPTS_EXACT if eta == 0.0 else _RECOVERY_OPTS_NOISY
        if config.experiment == "fig3":
            base = _FIG3_OPTS
        opts = base
        if eta == 0.0:
            # exact-fit decodes dominate the sweeps' runtime; solve the
            # feasibility to 1e-5 of the data scale, two orders below the
            # error statistics the sweeps report
            opts = DecodeOptions(
                tol_feas=1e-5 * max(1.0, float(np.linalg.norm(y))),
                max_iter=base.max_iter, step_ratio=base.step_ratio)
        res = qcbp_decode(A.entries, y, eta, opts)
        row = {
            "experiment": config.experiment, "ensemble": ensemble,
            "trial": trial, "N": N, "m": m, "s": s, "eta": eta,
            "noise": noise,
            "recovery_error": float(np.linalg.norm(res.solution - x0)),
        }
        if config.experiment == "fig3":
            row["sigma_min"] = analysis.sigma_min_scaled(A)
        row["status"] = res.status
        row["seed"] = inst.stream_id
        rows.append(row)
    return rows


def _moment_row(config, ensemble, N, m, ratio, trial):
    """One fresh-matrix moment statistic (fig2 coherence, fig4 distortion)."""
    root = RandomStream(config.master_seed)
    inst = root.child(ensemble, N, m, trial)
    mat = build_matrix(EnsembleSpec(ensemble), m, N, inst.child("matrix"))
    row = {"experiment": config.experiment, "ensemble": ensemble,
           "trial": trial, "N": N, "m": m}
    if config.experiment == "fig2":
        row["mu_hat"] = analysis.coherence_statistic(mat)
    else:
        row["ratio"] = ratio
        row["xi_hat"] = analysis.distortion_statistic(mat)
    row["status"] = "ok"
    row["seed"] = inst.stream_id
    return [row]


def _approx_row(config, ensemble, N, m, eta_values, noise_values, trial):
    """Fig5: one sampling instance evaluated over the whole threshold grid.

    The sample points and the noise direction are drawn once per trial, so
    every (eta, noise) cell sees the same data apart from the noise scale.
    """
    root = RandomStream(config.master_seed)
    inst = root.child(ensemble, N, m, trial)
    mat = build_matrix(EnsembleSpec(ensemble), m, N, inst.child("matrix"))
    pts = np.asarray(mat.sample_points)
    y_clean = polyapprox._sample_values(polyapprox.target_function, pts) \
        / math.sqrt(m)
    # unit direction is real by construction; keep the data real
    direction = noise_vector(m, 1.0, inst.child("noise")).real
    rows = []
    for noise in noise_values:
        y = y_clean + noise * direction if noise > 0.0 else y_clean
        for eta in eta_values:
            res = qcbp_decode(mat.entries, y, eta, _FIG5_OPTS)
            approx = polyapprox.ExpansionApproximation(
                res.solution, eta, pts, noise, status=res.status)
            rows.append({
                "experiment": "fig5", "ensemble": ensemble, "trial": trial,
                "N": N, "m": m, "eta": eta, "noise": noise,
                "l2_error": polyapprox.l2_error(
                    approx, polyapprox.target_function),
                "status": res.status, "seed": inst.stream_id,
            })
    return rows


def _build_tasks(config):
    """Expand a config into [(key, thunk)] with deterministic keys."""
    tasks = []
    experiment = config.experiment
    ensembles = _as_list(config.ensemble)
    if not ensembles:
        raise ValueError("config needs at least one ensemble")
    n_values = _as_list(config.N)
    if not n_values:
        raise ValueError("config needs at least one N")

    if experiment in ("fig1", "custom", "fig3"):
        eta_values = [float(v) for v in _as_list(config.eta)]
        if not eta_values:
            raise ValueError("recovery experiments need an eta grid")
        noise = float(_as_list(config.noise_magnitude)[0]
                      if _as_list(config.noise_magnitude) else 0.0)
        s_values = _as_list(config.s)
        if not s_values:
            raise ValueError("recovery experiments need a sparsity")
        grid = []
        for ensemble in ensembles:
            for N in n_values:
                for s in s_values:
                    for m, _ in _m_grid(config, N, s):
                        grid.append((ensemble, N, int(s), m))
        for gi, (ensemble, N, s, m) in enumerate(grid):
            for trial in range(config.trials):
                tasks.append(((gi, trial), _recovery_row,
                              (config, ensemble, N, m, s, eta_values,
                               noise, trial)))
    elif experiment in ("fig2", "fig4"):
        grid = []
        for ensemble in ensembles:
            for N in n_values:
                for m, ratio in _m_grid(config, N):
                    grid.append((ensemble, N, m, ratio))
        for gi, (ensemble, N, m, ratio) in enumerate(grid):
            for trial in range(config.trials):
                tasks.append(((gi, trial), _moment_row,
                              (config, ensemble, N, m, ratio, trial)))
    elif experiment == "fig5":
        eta_values = [float(v) for v in _as_list(config.eta)]
        noise_values = [float(v) for v in _as_list(config.noise_magnitude)]
        if not eta_values or not noise_values:
            raise ValueError("fig5 needs eta and noise grids")
        grid = []
        for ensemble in ensembles:
            for N in n_values:
                for m, _ in _m_grid(config, N):
                    grid.append((ensemble, N, m))
        for gi, (ensemble, N, m) in enumerate(grid):
            for trial in range(config.trials):
                tasks.append(((gi, trial), _approx_row,
                              (config, ensemble, N, m, eta_values,
                               noise_values, trial)))
    else:
        raise ValueError("experiment must be one of %s" % (EXPERIMENTS,))
    return tasks


def run_experiment(config, threads=1):
    """Execute a config and return its rows in deterministic order.

    Rows come back sorted by (grid index, trial index) regardless of the
    thread count; if config.output_path is set the rows are also written
    there as CSV.
    """
    tasks = _build_tasks(config)
    results = {}
    if threads and int(threads) > 1:
        with concurrent.futures.ThreadPoolExecutor(int(threads)) as pool:
            futures = {pool.submit(fn, *args): key for key, fn, args in tasks}
            for fut, key in futures.items():
                results[key] = fut.result()
    else:
        for key, fn, args in tasks:
            results[key] = fn(*args)
    records = []
    for key in sorted(results):
        records.extend(results[key])
    if config.output_path:
        write_csv(records, config.output_path)
    return records


def _quantile(sorted_vals, q):
    """Quantile by linear interpolation of order statistics."""
    n = len(sorted_vals)
    if n == 1:
        return float(sorted_vals[0])
    h = (n - 1) * q
    lo = int(math.floor(h))
    hi = min(lo + 1, n - 1)
    w = h - lo
    return float((1.0 - w) * sorted_vals[lo] + w * sorted_vals[hi])


def summarize(records, group_by, stat="median"):
    """Aggregate numeric columns of records over groups, in key order.

    stat is "mean", "median", or a float q in [0, 1] (the q-quantile with
    linearly interpolated order statistics; "median" is q = 0.5).  Returns
    one dict per group: the grouping columns plus every numeric,
    non-grouping column aggregated.
    """
    if not records:
        raise ValueError("no records to summarize")
    group_by = list(group_by)
    for col in group_by:
        if col not in records[0]:
            raise ValueError("unknown grouping column %r" % col)
    if stat == "mean":
        agg = lambda vals: float(np.mean(vals))
    else:
        q = 0.5 if stat == "median" else float(stat)
        if not 0.0 <= q <= 1.0:
            raise ValueError("quantile must lie in [0, 1]")
        agg = lambda vals: _quantile(sorted(vals), q)

    numeric = [c for c in records[0]
               if c not in group_by and c not in ("trial", "seed")
               and isinstance(records[0][c], (int, float))
               and not isinstance(records[0][c], bool)]
    groups = {}
    for rec in records:
        key = tuple(rec[c] for c in group_by)
        groups.setdefault(key, []).append(rec)
    out = []
    for key in sorted(groups):
        chunk = groups[key]
        row = dict(zip(group_by, key))
        for col in numeric:
            row[col] = agg([r[col] for r in chunk])
        row["count"] = len(chunk)
        out.append(row)
    return out


def write_csv(records, path):
    """Write records as UTF-8 CSV: fixed header, %.17g floats, LF endings."""
    if records:
        header = list(records[0].keys())
    else:
        header = []
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n",
                                quoting=csv.QUOTE_MINIMAL)
            writer.writerow(header)
            for rec in records:
                writer.writerow([_format_cell(rec.get(col)) for col in header])
    except OSError as exc:
        raise OSError("cannot write CSV to %r: %s" % (path, exc)) from exc


def _format_cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % float(value)
    return str(value)


def read_csv(path):
    """Parse a CSV written by write_csv back into typed records."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows:
        return []
    header = rows[0]
    records = []
    for raw in rows[1:]:
        rec = {}
        for col, cell in zip(header, raw):
            rec[col] = _parse_cell(cell)
        records.append(rec)
    return records


def _parse_cell(cell):
    if cell == "":
        return None
    if cell == "True":
        return True
    if cell == "False":
        return False
    try:
        return int(cell)
    except ValueError:
        pass
    try:
        return float(cell)
    except ValueError:
        return cell


def load_config(path):
    """Read an ExperimentConfig from a UTF-8 JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    return ExperimentConfig.from_json(payload)
