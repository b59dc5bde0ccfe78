"""The acceptance suite, shared by ``rid selftest`` and the test-suite.

Every criterion draws its randomness from ``derive_seed(seed, criterion, ...)``
and returns rows ``(criterion, check, value, threshold, passed)``.
"""
from __future__ import annotations

import math
import time

import numpy as np

from . import attractor as at
from . import metric as mt
from . import stats as st
from .base_process import SeededSampler, derive_seed, sample_window
from .fiber_maps import PLFamily

C_VALUES = (0.1, 0.25, 0.4)
C_REF = 0.25
CLOSED_FORM_REF = -0.130812
CLOSED_FORM_TOL = 1e-6
LYAP_STEPS = 10**6
N_INTERVALS = 1000
INVARIANCE_TOL = 1e-12
N_PAIRS = 10**5
CHI_CONTINUITY_TOL = 1e-14
N_SEEDS = 100
SYNC_STEPS = 10**5
SYNC_LEVEL = 1e-6
SYNC_SLACK = 1e-12
SYNC_MIN_OK = 99
TOL_D = 1e-8
PULLBACK_MAX_DEPTH = 2**14
PULLBACK_MIN_OK = 99
GRAPH_TOL = 1e-6
BASIN_STEPS = 10**4
BASIN_OFFSET = 10.0
BASIN_MIN_OK = 95
N_PHI = 10**4
KS_ONE_SAMPLE = 0.0163
VANISH_TIME = 200
N_PREFIXES = 10**4
SPREAD_TOL = 1e-6
N_FREQ_SEEDS = 10
FREQ_STEPS = 10**6
FREQ_TOL = 0.005

# runtime limits in seconds, keyed by criterion (1 is per value of c);
# 0 is the supplementary symbol-frequency check
RUNTIME_LIMITS = {0: 5.0, 1: 5.0, 2: 1.0, 3: 10.0, 4: 20.0, 5: 30.0, 6: 20.0, 7: 60.0, 8: 60.0}

NAMES = {
    0: "symbol frequency",
    1: "fiber Lyapunov exponent",
    2: "Lebesgue invariance",
    3: "contraction certificates",
    4: "synchronization",
    5: "pullback attractor",
    6: "basin dichotomy",
    7: "conditional uniformity of phi",
    8: "vanishing attractor",
    9: "determinism",
}


def _row(k, check, value, threshold, passed):
    return (k, check, value, threshold, bool(passed))


def criterion_0(seed):
    worst = max(abs(float(np.mean(SeededSampler(derive_seed(seed, 0, i)).symbols_at(0, FREQ_STEPS) == 0)) - 0.5)
                for i in range(N_FREQ_SEEDS))
    return [_row(0, "max |frequency of 0 - 1/2| over 10 seeds", worst, FREQ_TOL, worst < FREQ_TOL)]


def criterion_1(seed):
    rows, times = [], []
    for i, c in enumerate(C_VALUES):
        t = time.perf_counter()
        e = st.fiber_lyapunov(PLFamily(c), SeededSampler(derive_seed(seed, 1, i)), n=LYAP_STEPS)
        times.append(time.perf_counter() - t)
        gap = abs(e.estimate - e.closed_form)
        rows.append(_row(1, f"|estimate-closed_form| c={c}", gap, 3.0 * e.std_error, e.within_3se))
        rows.append(_row(1, f"breakpoint_hits c={c}", e.breakpoint_hits, 0, e.breakpoint_hits == 0))
    cf = st.fiber_exponent_closed_form(PLFamily(C_REF))
    rows.append(_row(1, "closed_form c=0.25 vs -0.130812", abs(cf - CLOSED_FORM_REF), CLOSED_FORM_TOL,
                     abs(cf - CLOSED_FORM_REF) <= CLOSED_FORM_TOL))
    return rows, max(times)


def criterion_2(seed):
    rows = []
    for i, c in enumerate(C_VALUES):
        rng = np.random.default_rng(derive_seed(seed, 2, i))
        defect = st.lebesgue_invariance_defect(PLFamily(c), st.random_admissible_intervals(rng, N_INTERVALS))
        rows.append(_row(2, f"max transfer defect c={c}", defect, INVARIANCE_TOL, defect <= INVARIANCE_TOL))
    return rows


def criterion_3(seed):
    rows = []
    for i, c in enumerate(C_VALUES):
        ctx = mt.MetricContext(PLFamily(c))
        rng = np.random.default_rng(derive_seed(seed, 3, i))
        for res in mt.certificate_suite(ctx, N_PAIRS, rng):
            rows.append(_row(3, f"{res.name} violations c={c}", res.violations, 0, res.passed))
        gap = mt.chi_continuity_gap(ctx)
        rows.append(_row(3, f"chi continuity gap c={c}", gap, CHI_CONTINUITY_TOL, gap <= CHI_CONTINUITY_TOL))
    return rows


def criterion_4(seed):
    fam = PLFamily(C_REF)
    worst_rise, ok = -math.inf, 0
    for i in range(N_SEEDS):
        tr = st.synchronization_run(fam, SeededSampler(derive_seed(seed, 4, i)), 0.1, 0.9, SYNC_STEPS)
        worst_rise = max(worst_rise, tr.max_increase)
        ok += tr.first_below(SYNC_LEVEL) >= 0
    return [
        _row(4, "max per-step increase of d", worst_rise, SYNC_SLACK, worst_rise <= SYNC_SLACK),
        _row(4, "seeds with d < 1e-6 within 1e5 steps", ok, SYNC_MIN_OK, ok >= SYNC_MIN_OK),
    ]


def criterion_5(seed):
    fam = PLFamily(C_REF)
    sources = [SeededSampler(derive_seed(seed, 5, i)) for i in range(N_SEEDS)]
    defects, here, _ = at.graph_invariance_defects(fam, sources, TOL_D, PULLBACK_MAX_DEPTH)
    conv = sum(e.converged for e in here)
    worst = float(np.nanmax(defects)) if np.isfinite(defects).any() else math.inf
    return [
        _row(5, "estimates converged within depth 2^14", conv, PULLBACK_MIN_OK, conv >= PULLBACK_MIN_OK),
        _row(5, "max graph-invariance defect", worst, GRAPH_TOL, worst <= GRAPH_TOL),
    ]


def criterion_6(seed):
    fam = PLFamily(C_REF)
    sources = [SeededSampler(derive_seed(seed, 6, i)) for i in range(N_SEEDS)]
    ests = at.estimate_phi_batch(fam, sources, TOL_D, PULLBACK_MAX_DEPTH)
    ok = 0
    for src, e in zip(sources, ests):
        if not e.converged:
            continue
        # images usually merge exactly in floating point (d_width == 0); the
        # certified width of a converged bracket is tol_d
        off = BASIN_OFFSET * max(e.d_width, TOL_D)
        below = at.basin_dichotomy_lifted(fam, src, e.h_value - off, BASIN_STEPS)
        above = at.basin_dichotomy_lifted(fam, src, e.h_value + off, BASIN_STEPS)
        ok += below == "to_zero" and above == "to_one"
    return [_row(6, "seeds classified correctly", ok, BASIN_MIN_OK, ok >= BASIN_MIN_OK)]


def criterion_7(seed):
    fam = PLFamily(C_REF)
    future_a = sample_window(SeededSampler(derive_seed(seed, 7, 0)), 0, 64)
    future_b = sample_window(SeededSampler(derive_seed(seed, 7, 1)), 0, 64)
    first = at.sample_phi_given_future(fam, future_a, N_PHI, SeededSampler(derive_seed(seed, 7, 2)), TOL_D)
    second = at.sample_phi_given_future(fam, future_b, N_PHI, SeededSampler(derive_seed(seed, 7, 3)), TOL_D)
    one = first.ks()
    two = st.ks_two_sample(first.values, second.values)
    return [
        _row(7, "KS vs uniform", one.statistic, KS_ONE_SAMPLE, one.statistic <= KS_ONE_SAMPLE),
        _row(7, "two-sample KS across futures", two.statistic, two.critical_001, two.passed),
        _row(7, "unconverged estimates", first.excluded + second.excluded, 0,
             first.excluded + second.excluded == 0),
    ]


def criterion_8(seed):
    fam = PLFamily(C_REF)
    rep = at.vanishing_attractor_experiment(fam, derive_seed(seed, 8, 0), VANISH_TIME, N_PREFIXES,
                                            SeededSampler(derive_seed(seed, 8, 1)))
    return [
        _row(8, "x0-spread at the fixed prefix", rep.fixed_prefix_spread, SPREAD_TOL,
             rep.fixed_prefix_spread <= SPREAD_TOL),
        _row(8, "KS of x_n vs uniform over prefixes", rep.ks.statistic, KS_ONE_SAMPLE,
             rep.ks.statistic <= KS_ONE_SAMPLE),
        _row(8, "median x0-spread over prefixes (info)", rep.median_spread, SPREAD_TOL, True),
        _row(8, "fraction of prefixes with spread <= 1e-6 (info)",
             float(np.mean(rep.spreads <= SPREAD_TOL)), 0.0, True),
    ]


CRITERIA = {0: criterion_0, 1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
            5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8}


def run_criterion(k, seed):
    """Rows and elapsed seconds (per value of c for criterion 1)."""
    t = time.perf_counter()
    out = CRITERIA[k](seed)
    elapsed = time.perf_counter() - t
    if k == 1:
        out, elapsed = out
    return out, elapsed


def run_suite(seed, log=None):
    rows, timings = [], {}
    for k in CRITERIA:
        r, elapsed = run_criterion(k, seed)
        timings[k] = elapsed
        rows.extend(r)
        if log:
            log(f"criterion {k} ({NAMES[k]}): {'PASS' if all(x[4] for x in r) else 'FAIL'} in {elapsed:.2f}s")
    return rows, timings


def _render(rows):
    from .report import _fmt
    return "\n".join(",".join(_fmt(v) for v in row) for row in rows).encode()


def run_selftest(seed, log=None, check_determinism=True):
    """Run checks 0-8, then (optionally) rerun them and compare the bytes."""
    rows, timings = run_suite(seed, log)
    if check_determinism:
        again, _ = run_suite(seed)
        same = _render(rows) == _render(again)
        rows.append(_row(9, "rerun produces byte-identical rows", int(same), 1, same))
        if log:
            log(f"criterion 9 ({NAMES[9]}): {'PASS' if same else 'FAIL'}")
    return rows, timings
