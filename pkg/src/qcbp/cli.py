"""Command-line frontend.

Subcommands expose the library end to end: `gen-matrix` writes a sensing
matrix to the binary container, `decode` runs the l1 decoder on stored
data, `certify` computes matrix certificates (RIP, quotients, coherence,
distortion, singular-value deviation, Christoffel values), `bound`
evaluates the closed-form constant formulas, `approx` recovers a Chebyshev
expansion of the built-in target function, and `experiment` runs the
canned figure-style sweeps to CSV (optionally with a minimal SVG chart).

Exit codes: 0 on success, 1 on configuration/usage errors, 2 on I/O
errors.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import analysis, harness, polyapprox
from .ensembles import EnsembleSpec, KINDS, build_matrix, load_matrix, save_matrix
from .solver import DecodeOptions, qcbp_decode
from .streams import RandomStream


def _emit(payload, out_path):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _load_vector(path):
    """Read a measurement vector from JSON: floats or [re, im] pairs."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    arr = np.asarray(raw, dtype=float)
    if arr.ndim == 1:
        return arr
    if arr.ndim == 2 and arr.shape[1] == 2:
        return arr[:, 0] + 1j * arr[:, 1]
    raise ValueError("vector file must hold a list of numbers or [re, im] "
                     "pairs")


def _complex_pairs(vec):
    v = np.asarray(vec, dtype=complex)
    return [[float(z.real), float(z.imag)] for z in v]


def _seed_of(args):
    return 0 if args.seed is None else args.seed


def _trials_of(args, fallback):
    return fallback if args.trials is None else args.trials


def _matrix_from_args(args):
    if getattr(args, "matrix", None):
        return load_matrix(args.matrix)
    if getattr(args, "kind", None):
        if args.m is None or args.N is None:
            raise ValueError("--kind needs --m and --N")
        return build_matrix(EnsembleSpec(args.kind), args.m, args.N,
                            RandomStream(_seed_of(args)))
    raise ValueError("provide either --matrix FILE or --kind/--m/--N")


def _cmd_gen_matrix(args):
    if not args.out:
        raise ValueError("gen-matrix needs --out")
    seed = _seed_of(args)
    mat = build_matrix(EnsembleSpec(args.kind), args.m, args.N,
                       RandomStream(seed))
    save_matrix(mat, args.out)
    print("wrote %s (%s, m=%d, N=%d, seed=%d)"
          % (args.out, args.kind, args.m, args.N, seed))
    return 0


def _cmd_decode(args):
    mat = load_matrix(args.matrix)
    y = _load_vector(args.data)
    opts = DecodeOptions(max_iter=args.max_iter, step_ratio=args.step_ratio)
    res = qcbp_decode(mat.entries, y, args.eta, opts)
    _emit({
        "solution": _complex_pairs(res.solution),
        "residual": res.residual_norm,
        "objective": res.objective,
        "status": res.status,
        "iterations": res.iterations,
    }, args.out)
    return 0


def _cmd_certify(args):
    what = args.what
    trials = _trials_of(args, 500)
    if what == "christoffel":
        if args.t is None or args.N is None:
            raise ValueError("christoffel needs --t and --N")
        value = analysis.christoffel_chebyshev(args.t, args.N)
        _emit({"t": args.t, "N": args.N, "value": value}, args.out)
        return 0
    if what in ("mu", "xi", "sv-deviation"):
        if not args.kind or args.m is None or args.N is None:
            raise ValueError("%s needs --kind, --m and --N" % what)
        spec = EnsembleSpec(args.kind)
        stream = RandomStream(_seed_of(args))
        if what == "mu":
            est = analysis.cross_coherence(spec, args.m, args.N,
                                           trials=trials, seed=stream)
            _emit(est.to_json(), args.out)
        elif what == "xi":
            est = analysis.distortion(spec, args.m, args.N,
                                      trials=trials, seed=stream)
            _emit(est.to_json(), args.out)
        else:
            rec = analysis.sv_deviation_empirical(spec, args.m, args.N,
                                                  trials=trials, seed=stream)
            _emit(rec, args.out)
        return 0
    mat = _matrix_from_args(args)
    if what == "rip":
        if args.s is None:
            raise ValueError("rip needs --s")
        rep = analysis.rip_constant(mat.entries, args.s, mode=args.mode,
                                    trials=trials,
                                    stream=RandomStream(_seed_of(args)))
        _emit({"s": rep.s, "delta": rep.delta, "mode": rep.mode,
               "supports_examined": rep.supports_examined}, args.out)
        return 0
    if what == "quotient":
        if args.order is None:
            raise ValueError("quotient needs --order")
        bounds = analysis.quotient_bounds(mat, args.order)
        bounds.empirical = analysis.quotient_empirical(
            mat, args.order, n_directions=args.directions,
            stream=RandomStream(_seed_of(args)))
        payload = bounds.to_json()
        payload["trials"] = args.directions + mat.measurement_rows().shape[0]
        _emit(payload, args.out)
        return 0
    raise ValueError("unknown certificate %r" % what)


def _cmd_bound(args):
    what = args.what
    if what == "nsp":
        if args.delta is None:
            raise ValueError("nsp needs --delta")
        consts = analysis.nsp_from_rip(args.delta)
        _emit({"rho": consts.rho, "tau": consts.tau}, args.out)
        return 0
    if what == "budget":
        consts = analysis.budget_constants(args.rho, args.tau, args.quotient)
        _emit({"tail_factor": consts.tail_factor,
               "noise_factor": consts.noise_factor,
               "excess_factor": consts.excess_factor}, args.out)
        return 0
    if what == "error-budget":
        consts = analysis.budget_constants(args.rho, args.tau, args.quotient)
        value = analysis.error_budget(consts, args.tail, args.s, args.p,
                                      args.eta, args.err)
        _emit({"value": value}, args.out)
        return 0
    if what == "measurement-count":
        if args.N is None or args.s is None:
            raise ValueError("measurement-count needs --N and --s")
        L, m = analysis.bos_measurement_bound(
            args.N, args.s, args.eps, args.delta if args.delta is not None
            else 0.5, K=args.entry_bound, variant=args.variant, c=args.scale)
        _emit({"L": L, "m": m}, args.out)
        return 0
    if what == "cheb-distortion":
        if args.m is None or args.N is None:
            raise ValueError("cheb-distortion needs --m and --N")
        _emit({"bound": analysis.chebyshev_distortion_bound(args.m, args.N)},
              args.out)
        return 0
    if what == "s-star":
        if args.m is None or args.N is None:
            raise ValueError("s-star needs --m and --N")
        _emit({"value": analysis.s_star(args.m, args.N)}, args.out)
        return 0
    raise ValueError("unknown bound %r" % what)


def _cmd_approx(args):
    approx = polyapprox.approximate(polyapprox.target_function, args.N,
                                    args.m, args.eta,
                                    noise_magnitude=args.noise,
                                    seed=RandomStream(_seed_of(args)))
    payload = approx.to_json()
    payload["l2_error_weighted"] = polyapprox.l2_error(
        approx, polyapprox.target_function, "weighted")
    _emit(payload, args.out)
    return 0


def _svg_chart(rows, x_col, y_col, series_col, path, logx=False, logy=True):
    """A minimal static SVG polyline chart of summarized rows."""
    width, height, pad = 640, 420, 54
    series = {}
    for row in rows:
        if row.get(y_col) is None:
            continue
        series.setdefault(row.get(series_col), []).append(
            (float(row[x_col]), float(row[y_col])))
    tx = (lambda v: math.log10(v)) if logx else (lambda v: v)
    ty = (lambda v: math.log10(max(v, 1e-300))) if logy else (lambda v: v)
    pts = [(tx(x), ty(y)) for vals in series.values() for x, y in vals
           if (not logx or x > 0)]
    if not pts:
        raise ValueError("nothing to plot")
    xs, ys = zip(*pts)
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    x1 = x1 if x1 > x0 else x0 + 1.0
    y1 = y1 if y1 > y0 else y0 + 1.0
    sx = lambda v: pad + (tx(v) - x0) / (x1 - x0) * (width - 2 * pad)
    sy = lambda v: height - pad - (ty(v) - y0) / (y1 - y0) * (height - 2 * pad)
    palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
               "#8c564b", "#17becf", "#e377c2", "#7f7f7f", "#bcbd22"]
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
        'font-family="sans-serif" font-size="12">' % (width, height),
        '<rect width="100%" height="100%" fill="white"/>',
        '<line x1="%d" y1="%d" x2="%d" y2="%d" stroke="black"/>'
        % (pad, height - pad, width - pad, height - pad),
        '<line x1="%d" y1="%d" x2="%d" y2="%d" stroke="black"/>'
        % (pad, pad, pad, height - pad),
        '<text x="%d" y="%d">%s%s</text>'
        % (width // 2, height - 12, x_col, " (log10)" if logx else ""),
        '<text x="14" y="%d" transform="rotate(-90 14 %d)">%s%s</text>'
        % (height // 2, height // 2, y_col, " (log10)" if logy else ""),
    ]
    for idx, (name, vals) in enumerate(sorted(series.items(), key=str)):
        vals = sorted(vals)
        if logx:
            vals = [(x, y) for x, y in vals if x > 0]
        color = palette[idx % len(palette)]
        coords = " ".join("%.1f,%.1f" % (sx(x), sy(y)) for x, y in vals)
        parts.append('<polyline points="%s" fill="none" stroke="%s" '
                     'stroke-width="1.5"/>' % (coords, color))
        parts.append('<text x="%d" y="%d" fill="%s">%s</text>'
                     % (width - pad - 150, pad + 16 * idx + 4, color, name))
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")


_CHART_SPECS = {
    "fig1": ("m", "recovery_error", "ensemble", False, True),
    "fig2": ("m", "mu_hat", "N", True, True),
    "fig3": ("s", "recovery_error", "ensemble", False, True),
    "fig4": ("ratio", "xi_hat", "N", False, False),
    "fig5": ("eta", "l2_error", "noise", True, True),
    "custom": ("m", "recovery_error", "ensemble", False, True),
}


def _cmd_experiment(args):
    if args.config:
        config = harness.load_config(args.config)
        if args.name and config.experiment != args.name:
            raise ValueError("config is for %r, command line says %r"
                             % (config.experiment, args.name))
    else:
        if not args.name:
            raise ValueError("experiment needs a name or --config")
        config = harness.default_config(args.name)
    if args.trials is not None:
        config.trials = int(args.trials)
    if args.seed is not None:
        config.master_seed = int(args.seed)
    if args.out:
        config.output_path = args.out
    records = harness.run_experiment(config, threads=args.threads)
    out = config.output_path
    if not out:
        out = "%s.csv" % config.experiment
        harness.write_csv(records, out)
    print("%s: %d records -> %s" % (config.experiment, len(records), out))
    if args.svg:
        x_col, y_col, series, logx, logy = _CHART_SPECS[config.experiment]
        group = [c for c in (series, x_col) if c in records[0]]
        rows = harness.summarize(records, group, "median")
        svg_path = args.svg if isinstance(args.svg, str) else out + ".svg"
        _svg_chart(rows, x_col, y_col, series, svg_path, logx, logy)
        print("chart -> %s" % svg_path)
    return 0


def build_parser():
    # parents=[] shares action objects between subparsers, so keep all
    # defaults command-neutral (None) and resolve them per command
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="master seed (default 0)")
    common.add_argument("--out", help="output path (JSON or CSV)")
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--trials", type=int, default=None,
                        help="Monte-Carlo trial count")
    common.add_argument("--threads", type=int, default=1,
                        help="worker threads (default 1)")

    parser = argparse.ArgumentParser(
        prog="qcbp",
        description="l1 decoding, recovery certificates, and experiment "
                    "sweeps for compressed sensing")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-matrix", parents=[common],
                       help="draw a sensing matrix and store it")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.set_defaults(func=_cmd_gen_matrix)

    p = sub.add_parser("decode", parents=[common],
                       help="run the l1 decoder on stored data")
    p.add_argument("--matrix", required=True, help="matrix container file")
    p.add_argument("--data", required=True,
                   help="JSON file with the measurement vector")
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--max-iter", type=int, default=50000)
    p.add_argument("--step-ratio", type=float, default=0.1)
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("certify", parents=[common],
                       help="matrix certificates and moment estimates")
    p.add_argument("--what", required=True,
                   choices=["rip", "quotient", "mu", "xi", "sv-deviation",
                            "christoffel"])
    p.add_argument("--matrix", help="matrix container file")
    p.add_argument("--kind", choices=KINDS)
    p.add_argument("--m", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--order", type=float, help="quotient order")
    p.add_argument("--directions", type=int, default=32)
    p.add_argument("--mode", choices=["exhaustive", "sampled"],
                   default="exhaustive")
    p.add_argument("--t", type=float, help="evaluation point")
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("bound", parents=[common],
                       help="closed-form constants and budgets")
    p.add_argument("--what", required=True,
                   choices=["nsp", "budget", "error-budget",
                            "measurement-count", "cheb-distortion", "s-star"])
    p.add_argument("--delta", type=float)
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--quotient", type=float, default=0.0)
    p.add_argument("--tail", type=float, default=0.0,
                   help="best s-term approximation error")
    p.add_argument("--s", type=int)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--eta", type=float, default=0.0)
    p.add_argument("--err", type=float, default=0.0)
    p.add_argument("--m", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--entry-bound", type=float, default=1.0)
    p.add_argument("--variant", choices=["primary", "alternative"],
                   default="primary")
    p.add_argument("--scale", type=float, default=1.0,
                   help="frontend constant multiplying s*L")
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("approx", parents=[common],
                       help="sparse Chebyshev approximation of the builtin "
                            "target")
    p.add_argument("--N", type=int, default=500)
    p.add_argument("--m", type=int, default=100)
    p.add_argument("--eta", type=float, default=1e-3)
    p.add_argument("--noise", type=float, default=0.0)
    p.set_defaults(func=_cmd_approx)

    p = sub.add_parser("experiment", parents=[common],
                       help="run a canned experiment sweep to CSV")
    p.add_argument("name", nargs="?", choices=harness.EXPERIMENTS,
                   help="experiment id (optional with --config)")
    p.add_argument("--svg", nargs="?", const=True, default=False,
                   help="also emit a minimal SVG chart (optional path)")
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses exit code 2 for usage problems; those are
        # configuration errors in this tool's contract
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except (ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except OSError as exc:
        print("i/o error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
