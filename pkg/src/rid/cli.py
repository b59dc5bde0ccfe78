"""Command-line front end: ``rid <subcommand> [flags]``.

Exit status is 0 on success, 1 when a check or acceptance criterion fails and
2 on usage errors. Reports go to ``--output`` or standard output; timing and
other diagnostics go to standard error only.
"""
from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import attractor as at
from . import selftest as stt
from . import stats as st
from ._validation import DomainError, check_c, check_open_unit, check_seed
from .base_process import SeededSampler, sample_window
from .fiber_maps import PLFamily
from .report import ExperimentReport, RunConfig
from .skew_product import forward_orbit

COMMANDS = ("simulate", "attractor", "lyapunov", "invariance", "sync", "phidist",
            "vanish", "dense", "selftest")


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--c", type=float, default=0.25)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--n", type=int, default=None, help="steps (default 10**6; 200 for vanish)")
    common.add_argument("--tol-d", type=float, default=1e-8)
    common.add_argument("--num-samples", type=int, default=10_000)
    common.add_argument("--max-depth", type=int, default=2**20)
    common.add_argument("--burn-in", type=int, default=1000)
    common.add_argument("--format", dest="output_format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", dest="output_path", default=None)

    p = argparse.ArgumentParser(prog="rid", description="Random piecewise-linear interval homeomorphisms.")
    sub = p.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("simulate", parents=[common], help="forward orbit trace")
    sp.add_argument("--x0", type=float, default=0.5)
    sub.add_parser("attractor", parents=[common], help="pullback estimates and graph invariance")
    sub.add_parser("lyapunov", parents=[common], help="fiber and level exponents vs closed forms")
    sp = sub.add_parser("invariance", parents=[common], help="Lebesgue transfer sweep")
    sp.add_argument("--intervals", type=int, default=1000)
    sp = sub.add_parser("sync", parents=[common], help="synchronization of two orbits")
    sp.add_argument("--x0", type=float, default=0.1)
    sp.add_argument("--y0", type=float, default=0.9)
    sub.add_parser("phidist", parents=[common], help="law of phi over i.i.d. pasts")
    sub.add_parser("vanish", parents=[common], help="vanishing attractor experiment")
    sp = sub.add_parser("dense", parents=[common], help="phi histogram on a cylinder")
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--bins", type=int, default=20)
    sub.add_parser("selftest", parents=[common], help="run every acceptance criterion")
    return p


_EXTRA = {"simulate": ("x0",), "invariance": ("intervals",), "sync": ("x0", "y0"), "dense": ("k", "bins")}


def _config(args):
    n = args.n if args.n is not None else (stt.VANISH_TIME if args.command == "vanish" else 1_000_000)
    cfg = RunConfig(args.command, args.c, args.seed, n, args.tol_d, args.num_samples, args.max_depth,
                    args.burn_in, args.output_format, args.output_path,
                    {k: getattr(args, k) for k in _EXTRA.get(args.command, ())})
    check_c(cfg.c)
    check_seed(cfg.seed)
    if cfg.n < 1 or cfg.num_samples < 1 or cfg.max_depth < 1 or cfg.burn_in < 0:
        raise DomainError("n, num_samples and max_depth must be >= 1 and burn_in >= 0")
    if not cfg.tol_d > 0:
        raise DomainError("tol-d must be positive")
    if cfg.command == "sync":
        check_open_unit(cfg.extra["x0"], "x0")
        check_open_unit(cfg.extra["y0"], "y0")
    if cfg.command == "simulate" and not 0.0 <= cfg.extra["x0"] <= 1.0:
        raise DomainError("x0 must lie in [0, 1]")
    if cfg.command == "dense" and (cfg.extra["bins"] < 10 or cfg.extra["k"] < 0):
        raise DomainError("dense needs bins >= 10 and k >= 0")
    if cfg.command == "invariance" and cfg.extra["intervals"] < 1:
        raise DomainError("intervals must be >= 1")
    return cfg


def _simulate(cfg, fam, sampler):
    w = sample_window(sampler, 0, cfg.n)
    tr = forward_orbit(fam, w, cfg.extra["x0"], cfg.n, store=True, keep_open=True)
    rows = [(k, int(tr.branches[k]), float(tr.states[k]), float(tr.log_derivs[k])) for k in range(cfg.n)]
    rows.append((cfg.n, None, float(tr.states[-1]), None))
    summary = {"final": tr.final, "mean_log_derivative": tr.log_deriv_sum / cfg.n}
    return ["k", "symbol", "x", "log_derivative"], rows, summary, tr.clamp_count


def _phi_rows(ests, extra=None):
    rows = []
    for i, e in enumerate(ests):
        row = (i, e.value, e.depth, e.d_width, e.converged)
        rows.append(row + ((extra[i],) if extra is not None else ()))
    return rows


def _attractor(cfg, fam, sampler):
    sources = [sampler.child(i) for i in range(cfg.num_samples)]
    defects, ests, _ = at.graph_invariance_defects(fam, sources, cfg.tol_d, cfg.max_depth)
    conv = int(sum(e.converged for e in ests))
    worst = float(np.nanmax(defects)) if conv else float("nan")
    summary = {"converged": conv, "max_invariance_defect": worst,
               "passed": conv == len(ests) and worst <= stt.GRAPH_TOL}
    cols = ["sample_index", "phi_value", "depth", "d_width", "converged", "invariance_defect"]
    return cols, _phi_rows(ests, [float(d) for d in defects]), summary, 0


def _lyapunov(cfg, fam, sampler):
    fiber = st.fiber_lyapunov(fam, sampler, n=cfg.n)
    lv = [st.level_exponent_mc(fam, sampler.child(2 + lvl), lvl, cfg.n) for lvl in (0, 1)]
    rows = [(fam.c, kind, e.estimate, e.closed_form, e.std_error, e.n)
            for kind, e in zip(("fiber", "level0", "level1"), [fiber] + lv)]
    summary = {"closed_form": fiber.closed_form, "estimate": fiber.estimate, "std_error": fiber.std_error,
               "breakpoint_hits": fiber.breakpoint_hits,
               "passed": all(e.within_3se for e in [fiber] + lv)}
    return ["c", "kind", "estimate", "closed_form", "std_error", "n"], rows, summary, 0


def _invariance(cfg, fam, sampler):
    rng = np.random.default_rng(sampler.seed)
    intervals = st.random_admissible_intervals(rng, cfg.extra["intervals"])
    rows = [(lo, hi, st.lebesgue_invariance_defect(fam, [(lo, hi)])) for lo, hi in intervals]
    worst = max(r[2] for r in rows)
    return ["lo", "hi", "defect"], rows, {"max_defect": worst, "passed": worst <= stt.INVARIANCE_TOL}, 0


def _sync(cfg, fam, sampler):
    tr = st.synchronization_run(fam, sampler, cfg.extra["x0"], cfg.extra["y0"], cfg.n)
    rows = list(enumerate(tr.distances.tolist()))
    hit = tr.first_below(stt.SYNC_LEVEL)
    summary = {"final_d": float(tr.distances[-1]), "first_below_1e-6": hit,
               "max_increase": tr.max_increase,
               "passed": hit >= 0 and tr.max_increase <= stt.SYNC_SLACK}
    return ["k", "d_distance"], rows, summary, tr.clamp_count


def _phidist(cfg, fam, sampler):
    fa = sample_window(sampler.child(0), 0, 64)
    fb = sample_window(sampler.child(1), 0, 64)
    a = at.sample_phi_given_future(fam, fa, cfg.num_samples, sampler.child(2), cfg.tol_d, cfg.max_depth)
    b = at.sample_phi_given_future(fam, fb, cfg.num_samples, sampler.child(3), cfg.tol_d, cfg.max_depth)
    ks = a.ks()
    two = st.ks_two_sample(a.values, b.values)
    summary = {"ks": ks.statistic, "ks_critical_001": ks.critical_001, "ks_two_sample": two.statistic,
               "ks_two_sample_critical_001": two.critical_001, "excluded": a.excluded,
               "passed": ks.passed and two.passed}
    return ["sample_index", "phi_value", "depth", "d_width", "converged"], _phi_rows(a.estimates), summary, 0


def _vanish(cfg, fam, sampler):
    rep = at.vanishing_attractor_experiment(fam, sampler.child(0).seed, cfg.n, cfg.num_samples, sampler.child(1))
    rows = [(i, float(v), float(s)) for i, (v, s) in enumerate(zip(rep.values, rep.spreads))]
    summary = {"min": rep.min, "max": rep.max, "ks_vs_uniform": rep.ks.statistic,
               "ks_critical_001": rep.ks.critical_001, "fixed_prefix_spread": rep.fixed_prefix_spread,
               "median_spread": rep.median_spread,
               "passed": rep.ks.passed and rep.fixed_prefix_spread <= stt.SPREAD_TOL}
    return ["prefix_index", "x_n", "x0_spread"], rows, summary, 0


def _dense(cfg, fam, sampler):
    k = cfg.extra["k"]
    cyl = sample_window(sampler.child(0), -k, 2 * k + 1)
    hist = at.dense_graph_demo(fam, cyl, cfg.num_samples, sampler.child(1), cfg.extra["bins"],
                               cfg.tol_d, cfg.max_depth)
    rows = [(float(hist.edges[i]), float(hist.edges[i + 1]), int(hist.counts[i]))
            for i in range(len(hist.counts))]
    summary = {"cylinder": "".join(map(str, cyl.symbols.tolist())), "empty_bins": hist.empty_bins,
               "passed": hist.empty_bins == 0}
    return ["bin_lo", "bin_hi", "count"], rows, summary, 0


def _selftest(cfg, fam, sampler):
    rows, timings = stt.run_selftest(cfg.seed, log=lambda m: print(m, file=sys.stderr))
    for k, t in timings.items():
        if t > stt.RUNTIME_LIMITS[k]:
            print(f"criterion {k} exceeded its runtime limit: {t:.2f}s > {stt.RUNTIME_LIMITS[k]}s",
                  file=sys.stderr)
    summary = {"passed": all(r[4] for r in rows)}
    return ["criterion", "check", "value", "threshold", "passed"], rows, summary, 0


HANDLERS = {"simulate": _simulate, "attractor": _attractor, "lyapunov": _lyapunov,
            "invariance": _invariance, "sync": _sync, "phidist": _phidist, "vanish": _vanish,
            "dense": _dense, "selftest": _selftest}


def run(argv=None):
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(args)
    except DomainError as exc:
        print(f"rid: error: {exc}", file=sys.stderr)
        return 2
    start = time.perf_counter()
    fam = PLFamily(cfg.c)
    sampler = SeededSampler(cfg.seed)
    cols, rows, summary, clamps = HANDLERS[cfg.command](cfg, fam, sampler)
    report = ExperimentReport(cfg, cols, rows, summary, clamps, time.perf_counter() - start)
    text = report.render()
    if cfg.output_path:
        with open(cfg.output_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"rid {cfg.command}: {'ok' if report.passed else 'FAILED'} in {report.wall_time:.2f}s",
          file=sys.stderr)
    return 0 if report.passed else 1


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
