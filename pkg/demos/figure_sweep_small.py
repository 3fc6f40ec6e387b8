"""A reduced-scale run of the canned experiment sweeps.

The shipped configurations reproduce the full desk-scale study; this demo
shrinks the grids so the whole thing finishes in about a minute and prints
median tables instead of writing CSV.  The full-size runs are available
through the CLI, e.g.

    qcbp experiment fig1 --out fig1.csv --svg

Run:  python3 demos/figure_sweep_small.py
"""

from qcbp.harness import ExperimentConfig, run_experiment, summarize

# ---------------------------------------------------------------------------
# 1. recovery error vs measurement count (one ensemble, a few cells)

cfg = ExperimentConfig.from_json({
    "experiment": "fig1",
    "N": 128,
    "m_rule": [32, 64, 96, 128],
    "s": 5,
    "eta": [0.0, 1e-3],
    "noise_magnitude": 1e-3,
    "trials": 5,
    "ensemble": ["partial_dft_subset"],
})
records = run_experiment(cfg)
print("sparse recovery, distinct-row DFT, N=128, s=5, ||e||=1e-3, 5 trials")
print("%-6s %-10s %-14s" % ("m", "eta", "median rel err"))
for row in summarize(records, ["m", "eta"], stat="median"):
    print("%-6d %-10.0e %-14.4e" % (row["m"], row["eta"],
                                    row["recovery_error"]))
print("the error tracks the noise level once m clears the transition\n")

# ---------------------------------------------------------------------------
# 2. cross-coherence sharpness against the m^2/N expectation

cfg2 = ExperimentConfig.from_json({
    "experiment": "fig2",
    "N": [16, 32],
    "m_rule": [2, 4, 8],
    "trials": 200,
})
records2 = run_experiment(cfg2)
print("cross coherence, iid DFT rows, 200 trials per cell")
print("%-6s %-6s %-12s" % ("N", "m", "N mu / m^2"))
for row in summarize(records2, ["N", "m"], stat="mean"):
    print("%-6d %-6d %-12.3f"
          % (row["N"], row["m"], row["N"] * row["mu_hat"] / row["m"] ** 2))
print("values cluster near 1 - 1/m: the m^2/N coherence rate is sharp\n")

# ---------------------------------------------------------------------------
# 3. distortion vs the sampling ratio for the Chebyshev system

cfg3 = ExperimentConfig.from_json({
    "experiment": "fig4",
    "N": [20, 40],
    "trials": 200,
})
records3 = run_experiment(cfg3)
print("Chebyshev distortion by sampling ratio m/N, 200 trials per cell")
print("%-8s %-6s %-6s %-10s" % ("ratio", "N", "m", "mean xi"))
rows = summarize(records3, ["ratio", "N"], stat="mean")
for row in rows:
    print("%-8.1f %-6d %-6d %-10.4f" % (row["ratio"], row["N"], row["m"],
                                        row["xi_hat"]))
print("xi depends on the ratio m/N, not on N alone, and grows with it")
