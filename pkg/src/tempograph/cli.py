"""Command-line front end for the experiment suite.

Subcommands: ``gen`` (emit a sampled graph in the text format), ``sweep``
(Monte Carlo threshold sweep of a reachability property), ``gossip``
(milestone call counts under the co/any schedulers), ``spanner``
(pivot-square spanner construction), ``trajectory`` (foremost-tree growth
curves), and ``verify`` (check a claimed spanner against a graph file).

Every run embeds its resolved configuration in the output: a ``#``-prefixed
comment line in CSV/text mode, a ``config`` object in JSON mode.  Given the
same seed, a run reproduces its data rows byte for byte.  The env var
``TT_SEED`` supplies the default seed.

Exit codes: 0 success; 1 runtime failure (e.g. no good square under
``--require-success``, failed verification); 2 flag or contract errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

from . import __version__
from .core import read_graph, verify_spanner, write_graph
from .gen import (COMPLETE_VERTEX_CAP, RngStream, sample_complete, sample_fnp,
                  sample_poisson)
from .gossip import any_milestones, co_milestones
from .harness import (PropertyId, SweepGrid, crossing_factor,
                      estimate_probability, threshold_sweep,
                      trajectory_experiment)
from .spanner import NoGoodSquareError, build_optimal_spanner

SWEEP_HEADER = "property,model,n,p,factor,trials,successes,estimate,seed"
GOSSIP_HEADER = ("trial,pair_exchange,first_expert,fixed_expert,"
                 "all_experts,pair_exchange_oneway")
SPANNER_HEADER = "trial,found,square_w,square_x,square_y,square_z,size,verified"
TRAJECTORY_HEADER = "trial,k,y,y_hat,ref"


def _default_seed() -> int:
    return int(os.environ.get("TT_SEED", "0"))


def _add_common(sub, *, trials=True):
    sub.add_argument("--seed", type=int, default=None,
                     help="master seed (default: env TT_SEED, else 0)")
    if trials:
        sub.add_argument("--trials", type=int, default=10,
                         help="number of independent trials")
    sub.add_argument("--out", default=None,
                     help="output file (default: stdout)")
    sub.add_argument("--format", choices=("csv", "json"), default="csv",
                     help="output format")
    sub.add_argument("--plot", nargs="?", const="", default=None,
                     metavar="PNG",
                     help="also render a figure (default path: --out with "
                          ".png suffix)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tempograph",
        description="Random temporal graph experiments: generation, "
                    "reachability threshold sweeps, gossip milestones, "
                    "optimal spanners, and foremost-tree trajectories.")
    ap.add_argument("--version", action="version", version=__version__)
    sp = ap.add_subparsers(dest="subcommand", required=True)

    g = sp.add_parser("gen", help="sample one graph and emit the text format")
    g.add_argument("--model", choices=("fnp", "complete", "poisson"),
                   required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=float, default=None,
                   help="edge probability / time horizon (not used by "
                        "--model complete)")
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--stream", type=int, default=0,
                   help="stream id within the seed (default 0)")
    g.add_argument("--max-complete-n", type=int, default=COMPLETE_VERTEX_CAP,
                   help="override the complete-graph vertex cap")
    g.add_argument("--out", default=None)
    g.set_defaults(func=_cmd_gen)

    s = sp.add_parser("sweep", help="Monte Carlo sweep of one property over p")
    s.add_argument("--property", required=True,
                   help="p2p | first-source | source | connectivity | "
                        "optimal-spanner | two-hop-source")
    s.add_argument("--model", choices=("fnp", "poisson"), default="fnp")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--factors", default=None,
                   help="comma-separated multiples of ln(n)/n")
    s.add_argument("--p-abs", default=None,
                   help="comma-separated absolute p values (alternative "
                        "to --factors)")
    s.add_argument("--coupled", action="store_true",
                   help="restrict one complete sample per trial across the "
                        "grid (small n only)")
    s.add_argument("--threads", type=int, default=1,
                   help="worker threads across trials")
    _add_common(s)
    s.set_defaults(func=_cmd_sweep)

    go = sp.add_parser("gossip", help="simulate rumor spreading milestones")
    go.add_argument("--model", choices=("co", "any"), required=True)
    go.add_argument("--n", type=int, required=True)
    go.add_argument("--call-cap", type=int, default=None,
                    help="max calls for the any model "
                         "(default: ceil(10 n ln n))")
    _add_common(go)
    go.set_defaults(func=_cmd_gossip)

    spn = sp.add_parser("spanner", help="build 2n-4 spanner certificates")
    spn.add_argument("--n", type=int, default=None)
    spn.add_argument("--p", type=float, default=None,
                     help="time horizon (default with --input: window end)")
    spn.add_argument("--input", default=None,
                     help="run on a graph file instead of sampling")
    spn.add_argument("--candidate-cap", type=int, default=200,
                     help="max goodness-tested square candidates")
    spn.add_argument("--require-success", action="store_true",
                     help="exit 1 if any trial finds no good square")
    _add_common(spn)
    spn.set_defaults(func=_cmd_spanner)

    tr = sp.add_parser("trajectory",
                       help="foremost-tree growth curves on complete graphs")
    tr.add_argument("--n", type=int, required=True)
    tr.add_argument("--stride", type=int, default=1,
                    help="emit every stride-th k (the last k always)")
    _add_common(tr)
    tr.set_defaults(func=_cmd_trajectory)

    v = sp.add_parser("verify",
                      help="check that a spanner file spans a graph file")
    v.add_argument("--input", required=True, help="graph in text format")
    v.add_argument("--spanner", required=True,
                   help="appearance list in the same text format")
    v.set_defaults(func=_cmd_verify)
    return ap


# -- output helpers -----------------------------------------------------------


def _config_dict(args, keys):
    cfg = {"subcommand": args.subcommand}
    for k in keys:
        cfg[k] = getattr(args, k.replace("-", "_"))
    return cfg


def _config_line(cfg) -> str:
    return "# config " + json.dumps(cfg, sort_keys=True)


def _resolve_seed(args) -> int:
    return _default_seed() if args.seed is None else args.seed


def _plot_path(args):
    if getattr(args, "plot", None) is None:
        return None
    if args.plot:
        return args.plot
    if args.out:
        return os.path.splitext(args.out)[0] + ".png"
    raise ValueError("--plot without a path requires --out to derive one")


def _emit(args, cfg, header, rows, json_rows):
    """Write CSV (config comment + header + rows) or the JSON mirror."""
    text = io.StringIO()
    if args.format == "csv":
        text.write(_config_line(cfg) + "\n")
        text.write(header + "\n")
        for r in rows:
            text.write(r + "\n")
    else:
        json.dump({"config": cfg, "rows": json_rows}, text, indent=2,
                  sort_keys=True)
        text.write("\n")
    payload = text.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _fmt_opt(x) -> str:
    return "" if x is None else str(x)


# -- subcommands ---------------------------------------------------------------


def _cmd_gen(args) -> int:
    seed = _resolve_seed(args)
    stream = RngStream(seed, args.stream)
    if args.model == "complete":
        g = sample_complete(args.n, stream, vertex_cap=args.max_complete_n)
    else:
        if args.p is None:
            raise ValueError(f"--model {args.model} requires --p")
        if args.model == "fnp":
            g = sample_fnp(args.n, args.p, stream)
        else:
            g = sample_poisson(args.n, args.p, stream)
    cfg = {"subcommand": "gen", "model": args.model, "n": args.n,
           "p": args.p, "seed": seed, "stream": args.stream}
    header = _config_line(cfg)[2:]  # write_graph prefixes '# ' itself
    if args.out:
        write_graph(g, args.out, header=header)
    else:
        write_graph(g, sys.stdout, header=header)
    return 0


def _parse_float_list(text, flag):
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ValueError(f"{flag} expects a comma-separated list of numbers")
    if not vals:
        raise ValueError(f"{flag} is empty")
    return vals


def _cmd_sweep(args) -> int:
    seed = _resolve_seed(args)
    prop = PropertyId.parse(args.property)
    if (args.factors is None) == (args.p_abs is None):
        raise ValueError("give exactly one of --factors and --p-abs")
    if args.factors is not None:
        factors = _parse_float_list(args.factors, "--factors")
    else:
        unit = math.log(args.n) / args.n
        factors = [p / unit for p in _parse_float_list(args.p_abs, "--p-abs")]
    grid = SweepGrid(tuple(factors))
    rows = threshold_sweep(prop, args.model, args.n, grid, args.trials, seed,
                           coupled=args.coupled, threads=args.threads)
    cfg = {"subcommand": "sweep", "property": prop.value, "model": args.model,
           "n": args.n, "factors": list(grid.factors), "trials": args.trials,
           "seed": seed, "coupled": args.coupled}
    csv_rows = [f"{r.property.value},{r.model},{r.n},{r.p!r},{r.factor!r},"
                f"{r.trials},{r.successes},{r.estimate!r},{r.seed}"
                for r in rows]
    json_rows = [{"property": r.property.value, "model": r.model, "n": r.n,
                  "p": r.p, "factor": r.factor, "trials": r.trials,
                  "successes": r.successes, "estimate": r.estimate,
                  "seed": r.seed} for r in rows]
    _emit(args, cfg, SWEEP_HEADER, csv_rows, json_rows)
    path = _plot_path(args)
    if path:
        from .plotting import plot_sweep
        plot_sweep(rows, path)
    grid_cross, interp = crossing_factor(rows)
    if grid_cross is not None:
        print(f"0.5-crossing: grid factor {grid_cross:g} "
              f"(interpolated {interp:.3f})", file=sys.stderr)
    return 0


def _cmd_gossip(args) -> int:
    seed = _resolve_seed(args)
    results = []
    for t in range(args.trials):
        stream = RngStream(seed, t)
        if args.model == "co":
            results.append(co_milestones(args.n, stream))
        else:
            results.append(any_milestones(args.n, stream,
                                          call_cap=args.call_cap))
    cfg = {"subcommand": "gossip", "model": args.model, "n": args.n,
           "trials": args.trials, "seed": seed, "call_cap": args.call_cap}
    names = ("pair_exchange", "first_expert", "fixed_expert", "all_experts",
             "pair_exchange_oneway")
    csv_rows = []
    for t, m in enumerate(results):
        cells = ",".join(_fmt_opt(getattr(m, k)) for k in names)
        csv_rows.append(f"{t},{cells}")
    means = []
    for k in names:
        vals = [getattr(m, k) for m in results if getattr(m, k) is not None]
        means.append(sum(vals) / len(vals) if vals else None)
    unit = args.n * math.log(args.n)
    refs = [0.5 * unit, 1.0 * unit, 1.0 * unit, 1.5 * unit, 0.5 * unit]
    csv_rows.append("mean," + ",".join(
        "" if m is None else f"{m:.3f}" for m in means))
    csv_rows.append("reference," + ",".join(f"{r:.3f}" for r in refs))
    json_rows = [{"trial": t, **{k: getattr(m, k) for k in names}}
                 for t, m in enumerate(results)]
    json_rows.append({"trial": "mean",
                      **{k: means[i] for i, k in enumerate(names)}})
    json_rows.append({"trial": "reference",
                      **{k: refs[i] for i, k in enumerate(names)}})
    _emit(args, cfg, GOSSIP_HEADER, csv_rows, json_rows)
    path = _plot_path(args)
    if path:
        from .plotting import plot_gossip
        plot_gossip(results, args.n, args.model, path)
    return 0


def _cmd_spanner(args) -> int:
    seed = _resolve_seed(args)
    records = []
    failures = 0
    if args.input:
        g = read_graph(args.input)
        p = args.p if args.p is not None else g.window[1]
        records.append(_spanner_trial(0, g, p, args.candidate_cap))
        trials = 1
        n = g.n
    else:
        if args.n is None or args.p is None:
            raise ValueError("spanner needs --n and --p (or --input)")
        n, trials = args.n, args.trials
        for t in range(trials):
            g = sample_fnp(args.n, args.p, RngStream(seed, t))
            records.append(_spanner_trial(t, g, args.p, args.candidate_cap))
    failures = sum(1 for r in records if not r["found"])
    cfg = {"subcommand": "spanner", "n": n, "p": args.p,
           "input": args.input, "trials": trials, "seed": seed,
           "candidate_cap": args.candidate_cap}
    csv_rows = [
        "{trial},{found},{w},{x},{y},{z},{size},{verified}".format(
            trial=r["trial"], found=int(r["found"]),
            w=_fmt_opt(r["square_w"]), x=_fmt_opt(r["square_x"]),
            y=_fmt_opt(r["square_y"]), z=_fmt_opt(r["square_z"]),
            size=_fmt_opt(r["size"]), verified=int(r["verified"]))
        for r in records]
    _emit(args, cfg, SPANNER_HEADER, csv_rows, records)
    path = _plot_path(args)
    if path:
        from .plotting import plot_spanner
        plot_spanner([int(r["found"]) for r in records],
                     [r["size"] for r in records if r["found"]], n, path)
    if failures and args.require_success:
        raise NoGoodSquareError(
            f"{failures} of {trials} trials found no good square")
    return 0


def _spanner_trial(t, g, p, cap) -> dict:
    try:
        cert = build_optimal_spanner(g, p, candidate_cap=cap)
        w, x, y, z = cert.square.vertices
        return {"trial": t, "found": True, "square_w": w, "square_x": x,
                "square_y": y, "square_z": z, "size": cert.size,
                "verified": True}
    except NoGoodSquareError:
        return {"trial": t, "found": False, "square_w": None,
                "square_x": None, "square_y": None, "square_z": None,
                "size": None, "verified": False}


def _cmd_trajectory(args) -> int:
    seed = _resolve_seed(args)
    if args.stride < 1:
        raise ValueError("--stride must be >= 1")
    exp = trajectory_experiment(args.n, args.trials, seed)
    cfg = {"subcommand": "trajectory", "n": args.n, "trials": args.trials,
           "seed": seed, "stride": args.stride}
    ks = [k for k in range(1, args.n)
          if k % args.stride == 0 or k == args.n - 1]
    csv_rows = []
    json_rows = []
    for t in range(args.trials):
        for k in ks:
            y = float(exp.y[t, k - 1])
            yh = float(exp.y_hat[t, k - 1])
            ref = float(exp.reference[k - 1])
            csv_rows.append(f"{t},{k},{y!r},{yh!r},{ref!r}")
            json_rows.append({"trial": t, "k": k, "y": y, "y_hat": yh,
                              "ref": ref})
    _emit(args, cfg, TRAJECTORY_HEADER, csv_rows, json_rows)
    path = _plot_path(args)
    if path:
        from .plotting import plot_trajectory
        plot_trajectory(exp, path)
    return 0


def _cmd_verify(args) -> int:
    g = read_graph(args.input)
    s = read_graph(args.spanner, window=g.window)
    if s.n != g.n:
        raise ValueError(
            f"vertex count mismatch: graph has {g.n}, spanner file has {s.n}")
    su, sv, st = s.appearances()
    apps = list(zip(su.tolist(), sv.tolist(), st.tolist()))
    if verify_spanner(g, apps):
        print(f"ok: {len(apps)} appearances temporally span n={g.n}")
        return 0
    print("not a spanner: the appearance set is not temporally connected",
          file=sys.stderr)
    return 1


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else int(e.code)
    try:
        return args.func(args)
    except NoGoodSquareError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
