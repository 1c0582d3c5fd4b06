"""``colas`` command line.

Exit status: 0 success, 2 config/usage, 3 parse or I/O, 4 parameter or
regime, 5 numeric (see :mod:`colas.errors`).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import report
from ._accel import set_threads
from .calibration import calibrate
from .config import ExperimentConfig
from .copula import CopulaFamily, WeightMarginal, read_marks_csv, write_marks_csv
from .errors import ColasError
from .generator import GenConfig, generate
from .graph import read_edge_list, write_edge_list, write_metadata
from .limits import (
    LimitModel,
    fgm_limit_C,
    fgm_limit_r,
    ht_intensity,
    ht_tail_constant,
    kappa2_ht,
    lambda_c_curve,
    r_along_curve,
)
from .rewiring import rewire_to_target_r
from .stats import auxiliary_metrics, degree_ccdf, degree_clustering_curve, summarize


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _marginal(args):
    if args.marginal == "pareto":
        return WeightMarginal.pareto(args.alpha, args.x_min)
    return WeightMarginal.uniform()


def _family(theta, d):
    return CopulaFamily.fgm(theta, d) if theta > 0 else CopulaFamily.product(d)


def _load_graph(args):
    marks = read_marks_csv(args.marks) if getattr(args, "marks", None) else None
    return read_edge_list(args.edges, marks=marks, n_nodes=getattr(args, "n_nodes", None))


def _theta_grid(spec):
    """'0.5' or 'start:stop:count'."""
    if ":" in spec:
        a, b, k = spec.split(":")
        return list(np.linspace(float(a), float(b), int(k)))
    return [float(v) for v in spec.split(",")]


# ---------------------------------------------------------------- commands


def cmd_generate(args):
    cfg = GenConfig(n=args.n, rho=args.rho, lam=args.lam, regime=args.regime, family=_family(args.theta, args.d),
                    marginal=_marginal(args), seed=args.seed, ht_radius_cap=args.ht_cap)
    g = generate(cfg)
    prefix = args.out or "graph"
    write_edge_list(g, prefix + ".edges")
    write_metadata(g, prefix + ".meta")
    if args.write_marks:
        write_marks_csv(g.marks, prefix + ".marks.csv")
    sys.stdout.write(f"n={g.n}\nedges={g.n_edges}\nepsilon={g.epsilon!r}\n"
                     f"truncation_warnings={g.meta['truncation_warnings']}\ncap_warnings={g.meta['cap_warnings']}\n")
    return 0


def cmd_stats(args):
    rep = _load_graph(args)
    g = rep.graph
    st = summarize(g)
    row = st.flat()
    if args.aux:
        aux = auxiliary_metrics(g, args.aux, args.seed)
        row.update(spectral_radius=aux.spectral_radius, lcc_size=aux.lcc_size,
                   mean_path_length=float(aux.path_lengths.mean()) if len(aux.path_lengths) else float("nan"))
    _emit(report.export_report(row, args.format), args.out)
    if args.ccdf:
        report.write_curve(args.ccdf, degree_ccdf(g), ("k", "ccdf"))
    if args.ck:
        report.write_curve(args.ck, degree_clustering_curve(g), ("k", "clustering"))
    return 0


def cmd_limits(args):
    rows = []
    for th in _theta_grid(args.theta):
        row = {"theta": th}
        if args.quantity in ("C", "r", "all"):
            m = LimitModel(args.lam, args.rho, th)
            row["C"] = fgm_limit_C(m)
            row["r"] = fgm_limit_r(m)
        if args.quantity in ("curve", "all") and args.c is not None:
            row["lambda_c"] = lambda_c_curve(args.c, th, args.rho)
            row["r_along_curve"] = r_along_curve(args.c, th, args.rho)
        if args.quantity == "ht":
            m = LimitModel(args.lam, args.rho, th, dim=args.d, marginal=WeightMarginal.pareto(args.alpha),
                           regime="heavy_tail")
            row["kappa2_lambda"] = kappa2_ht(m)
            row["intensity_w1_x_half"] = float(ht_intensity(m, 1.0, 0.5))
            row["tail_constant"] = ht_tail_constant(m, seed=args.seed)
        rows.append(row)
    if args.format == "csv":
        _emit(report.rows_to_csv(rows), args.out)
    else:
        _emit("".join(report.to_text(r) + ("\n" if len(rows) > 1 else "") for r in rows), args.out)
    return 0


def cmd_calibrate(args):
    g = _load_graph(args).graph
    model = LimitModel(args.rho, args.rho, 0.0, regime="fixed_linear")
    fit = calibrate(g, model, grid=args.grid, bootstrap_reps=args.bootstrap, seed=args.seed)
    row = fit.flat()
    # fit error E = |dC| + |dr| between the graph and the fitted limits
    row["fit_error"] = abs(row["c_obs"] - row["c_pred"]) + abs(row["r_obs"] - row["r_pred"])
    _emit(report.export_report(row, args.format), args.out)
    return 0


def cmd_rewire(args):
    g = _load_graph(args).graph
    res = rewire_to_target_r(g, args.target, args.max_swaps, args.tolerance, args.seed)
    if args.out:
        write_edge_list(res.graph, args.out)
    sys.stdout.write(report.to_text({
        "swaps_attempted": res.swaps_attempted, "swaps_accepted": res.swaps_accepted,
        "reached_target": res.reached_target, "final_r": res.final_r,
    }))
    return 0


def cmd_experiment(args):
    from .experiments import run_experiment

    cfg = ExperimentConfig.load(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    paths = run_experiment(cfg, args.out)
    for name, p in paths.items():
        if not name.startswith("_"):
            sys.stdout.write(f"{name}={p}\n")
    return 0


def cmd_ingest(args):
    rep = _load_graph(args)
    prefix = args.out or "ingested"
    write_edge_list(rep.graph, prefix + ".edges")
    report.write_rows(prefix + ".idmap.csv", [{"id": i, "label": int(l)} for i, l in enumerate(rep.id_map)])
    sys.stdout.write(report.to_text({
        "n": rep.graph.n, "edges": rep.graph.n_edges, "lines": rep.lines,
        "self_loops": rep.self_loops, "duplicates": rep.duplicates,
    }))
    return 0


# ---------------------------------------------------------------- parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="output path or prefix")
    common.add_argument("--format", choices=("text", "csv"), default="text")
    common.add_argument("--threads", type=int, default=None, help="numba worker threads")

    p = argparse.ArgumentParser(prog="colas", description="Copula-seeded local latent-space graphs")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="sample a graph")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--rho", type=float, required=True)
    g.add_argument("--lam", type=float, required=True)
    g.add_argument("--regime", choices=("fixed_exp", "fixed_linear", "heavy_tail"), default="fixed_exp")
    g.add_argument("--d", type=int, default=1)
    g.add_argument("--theta", type=float, default=0.0)
    g.add_argument("--marginal", choices=("uniform", "pareto"), default="uniform")
    g.add_argument("--alpha", type=float, default=2.5)
    g.add_argument("--x-min", type=float, default=1.0)
    g.add_argument("--ht-cap", type=float, default=0.49)
    g.add_argument("--write-marks", action="store_true")
    g.set_defaults(func=cmd_generate)

    def graph_input(sp):
        sp.add_argument("edges", help="edge list: one 'u v' pair per line")
        sp.add_argument("--marks", default=None, help="marks CSV (ids 0..n-1)")
        sp.add_argument("--n-nodes", type=int, default=None, help="keep labels as ids 0..n-1")

    s = sub.add_parser("stats", parents=[common], help="graph statistics")
    graph_input(s)
    s.add_argument("--ccdf", default=None, help="write degree CCDF CSV here")
    s.add_argument("--ck", default=None, help="write C(k) curve CSV here")
    s.add_argument("--aux", type=int, default=0, help="path samples for auxiliary metrics (0 = skip)")
    s.set_defaults(func=cmd_stats)

    lm = sub.add_parser("limits", parents=[common], help="closed-form limits")
    lm.add_argument("--lam", type=float, default=1.0)
    lm.add_argument("--rho", type=float, default=1.0)
    lm.add_argument("--theta", default="0", help="value, comma list or start:stop:count")
    lm.add_argument("--c", type=float, default=None, help="target clustering for the lambda_c curve")
    lm.add_argument("--quantity", choices=("C", "r", "curve", "ht", "all"), default="all")
    lm.add_argument("--d", type=int, default=1)
    lm.add_argument("--alpha", type=float, default=2.5)
    lm.set_defaults(func=cmd_limits)

    c = sub.add_parser("calibrate", parents=[common], help="fit (lambda, theta) to one graph")
    graph_input(c)
    c.add_argument("--rho", type=float, required=True)
    c.add_argument("--grid", type=int, default=201)
    c.add_argument("--bootstrap", type=int, default=0, help="bootstrap replicates for the Wald CI (>= 50)")
    c.set_defaults(func=cmd_calibrate)

    r = sub.add_parser("rewire", parents=[common], help="greedy degree-preserving rewiring toward r")
    graph_input(r)
    r.add_argument("--target", type=float, required=True)
    r.add_argument("--max-swaps", type=int, default=250_000)
    r.add_argument("--tolerance", type=float, default=0.01)
    r.set_defaults(func=cmd_rewire)

    e = sub.add_parser("experiment", help="run a YAML experiment config")
    e.add_argument("config")
    e.add_argument("--out", default=None)
    e.add_argument("--seed", type=int, default=None, help="override the config seed")
    e.add_argument("--threads", type=int, default=None)
    e.set_defaults(func=cmd_experiment)

    i = sub.add_parser("ingest", parents=[common], help="clean an edge list and compact node ids")
    graph_input(i)
    i.set_defaults(func=cmd_ingest)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", None):
        set_threads(args.threads)
    try:
        return args.func(args)
    except ColasError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.exit_code
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
