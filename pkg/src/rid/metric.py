"""The logarithmic metric in which both fiber maps are weak contractions.

``d(x, y) = |h(x) - h(y)|`` with ``h(x) = log(2x)`` on ``(0, 1/2]`` and
``-log(2(1-x))`` on ``(1/2, 1)``. Besides the metric itself this module holds
the crossing threshold ``eta``, the contraction envelope ``chi`` and vectorised
sweeps that check every contraction inequality on random pairs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fiber_maps as fm
from ._validation import DomainError, check_nonnegative, check_open_unit, check_symbol

IDENTITY_TOL = 1e-14
INEQUALITY_SLACK = 1e-12
_LOG2 = math.log(2.0)


def h(x):
    x = check_open_unit(x)
    return lift(x)


def lift(x):
    """``h`` extended to the closed interval, with ``h(0) = -inf`` and ``h(1) = +inf``."""
    if x <= 0.5:
        return math.log(2.0 * x) if x > 0.0 else -math.inf
    return -_LOG2 - math.log1p(-x) if x < 1.0 else math.inf


def unlift(H):
    """Inverse of :func:`lift`."""
    if H <= 0.0:
        return 0.5 * math.exp(H)
    return 1.0 - 0.5 * math.exp(-H)


def lift_array(x):
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(divide="ignore"):
        lo = np.log(2.0 * np.minimum(x, 0.5))
        hi = -_LOG2 - np.log1p(-np.maximum(x, 0.5))
    return np.where(x <= 0.5, lo, hi)


def unlift_array(H):
    H = np.asarray(H, dtype=np.float64)
    return np.where(H <= 0.0, 0.5 * np.exp(np.minimum(H, 0.0)),
                    1.0 - 0.5 * np.exp(-np.maximum(H, 0.0)))


def dist(x, y):
    return abs(h(x) - h(y))


@dataclass(frozen=True)
class MetricContext:
    fam: fm.PLFamily

    @property
    def eta(self):
        return self.fam.log_b

    @property
    def chi_slope(self):
        ce = self.fam.c * self.eta
        return (2.0 + ce / 6.0) / (2.0 + ce / 3.0)


def eta(ctx):
    """Crossing threshold ``log(1/(2c))``.

    If ``x <= 1/2 <= y`` are closer than this in ``d`` then ``y < 1-c`` and
    ``x > c``, so ``f0`` keeps both below 1/2 and ``f1`` keeps both above it.
    """
    return ctx.eta


def _chi_quadratic(c, t):
    return (2.0 + c * t / 3.0) / (2.0 + 2.0 * c * t / 3.0) * t


def chi(ctx, t):
    t = check_nonnegative(t)
    if t <= ctx.eta / 2.0:
        return _chi_quadratic(ctx.fam.c, t)
    return ctx.chi_slope * t


def chi_inverse(ctx, s):
    s = check_nonnegative(s, "s")
    if s <= _chi_quadratic(ctx.fam.c, ctx.eta / 2.0):
        # root of alpha*t^2 + (2 - 2*alpha*s)*t - 2*s = 0, cancellation-free form
        alpha = ctx.fam.c / 3.0
        B = 2.0 - 2.0 * alpha * s
        return 4.0 * s / (B + math.sqrt(B * B + 8.0 * alpha * s))
    return s / ctx.chi_slope


def chi_continuity_gap(ctx):
    half = ctx.eta / 2.0
    return abs(_chi_quadratic(ctx.fam.c, half) - ctx.chi_slope * half)


@dataclass(frozen=True)
class Certificate:
    kind: str  # "isometry" or "contracting"
    bound: float
    defect: float

    @property
    def ok(self):
        return self.defect >= -INEQUALITY_SLACK


def _piece(fam, symbol, x, y):
    lo, hi = min(x, y), max(x, y)
    if symbol == 0:
        if hi <= 0.5 or lo >= 1.0 - fam.c:
            return "isometry"
        if lo >= 0.5 and hi <= 1.0 - fam.c:
            return "contracting"
    else:
        if hi <= fam.c or lo >= 0.5:
            return "isometry"
        if lo >= fam.c and hi <= 0.5:
            return "contracting"
    raise DomainError(
        f"pair ({x}, {y}) straddles pieces of f{symbol}; split it at 1/2 and the breakpoint"
    )


def check_step_contraction(ctx, symbol, x, y):
    """Certify one step of a fiber map on a pair lying in a single piece.

    Isometric pieces must preserve ``d``; on the middle piece the image
    distance is at most ``(1 - (2c/3) d) d``.
    """
    symbol = check_symbol(symbol)
    x, y = check_open_unit(x), check_open_unit(y, "y")
    kind = _piece(ctx.fam, symbol, x, y)
    Hx, Hy = lift(x), lift(y)
    t = abs(Hx - Hy)
    image = abs(fm.lift_apply(ctx.fam, symbol, Hx) - fm.lift_apply(ctx.fam, symbol, Hy))
    bound = t if kind == "isometry" else (1.0 - 2.0 * ctx.fam.c / 3.0 * t) * t
    return Certificate(kind, bound, bound - image)


def _deriv_defect(x, y):
    gap = y - x  # exact: both lie in [1/2, 1)
    ratio = np.log1p(gap / x) / np.log1p(gap / (1.0 - y))
    return (4.0 - 2.0 * y) / 3.0 - ratio


def check_deriv_inequality(x, y):
    """Slack in ``(log y - log x) / (log(1-x) - log(1-y)) <= (4 - 2y)/3``."""
    x, y = float(x), float(y)
    if not (0.5 <= x < y < 1.0):
        raise DomainError(f"need 1/2 <= x < y < 1, got x={x}, y={y}")
    return float(_deriv_defect(x, y))


# --- sweeps ----------------------------------------------------------------

@dataclass(frozen=True)
class SweepResult:
    name: str
    n: int
    violations: int
    worst: float  # smallest slack seen (negative means violated)
    tolerance: float

    @property
    def passed(self):
        return self.violations == 0


def _result(name, slack, tol):
    slack = np.asarray(slack, dtype=np.float64)
    return SweepResult(name, int(slack.size), int((slack < -tol).sum()),
                       float(slack.min()) if slack.size else math.inf, tol)


def _upper_half(rng, n):
    """Points of [1/2, 1): half uniform in x, half uniform in h up to h = 30."""
    k = n // 2
    u = 0.5 + 0.5 * rng.random(k)
    v = 1.0 - 0.5 * np.exp(-30.0 * rng.random(n - k))
    return np.concatenate([u, v])


def sweep_deriv(n, rng):
    x, y = _upper_half(rng, n), _upper_half(rng, n)
    x, y = np.minimum(x, y), np.maximum(x, y)
    keep = x < y
    return _result("deriv", _deriv_defect(x[keep], y[keep]), INEQUALITY_SLACK)


def sweep_step_contraction(ctx, n, rng):
    """Random pairs in every piece of both maps.

    Returns one result for the middle pieces (inequality) and one for the
    isometric pieces (identity, checked as ``-|defect|``).
    """
    fam = ctx.fam
    Hs = lambda lo, hi, m: lo + (hi - lo) * rng.random(m)
    m = n // 4
    # middle pieces: f0 on H in [0, eta], f1 on H in [-eta, 0]
    mid = []
    for symbol, (lo, hi) in ((0, (0.0, ctx.eta)), (1, (-ctx.eta, 0.0))):
        k = n // 2
        x, y = Hs(lo, hi, k), Hs(lo, hi, k)
        t = np.abs(x - y)
        img = np.abs(fm.lift_apply_array(fam, symbol, x) - fm.lift_apply_array(fam, symbol, y))
        mid.append((1.0 - 2.0 * fam.c / 3.0 * t) * t - img)
    iso = []
    for symbol, ranges in ((0, ((-30.0, 0.0), (ctx.eta, 30.0))),
                           (1, ((-30.0, -ctx.eta), (0.0, 30.0)))):
        for lo, hi in ranges:
            x, y = Hs(lo, hi, m), Hs(lo, hi, m)
            img = np.abs(fm.lift_apply_array(fam, symbol, x) - fm.lift_apply_array(fam, symbol, y))
            iso.append(-np.abs(np.abs(x - y) - img))
    return (_result("f-contr", np.concatenate(mid), INEQUALITY_SLACK),
            _result("f-contr-isometry", np.concatenate(iso), IDENTITY_TOL))


def sweep_weak_contraction(ctx, n, rng):
    fam = ctx.fam
    slack = []
    for symbol in (0, 1):
        k = n // 2
        x = lift_array(rng.random(k))
        y = lift_array(rng.random(k))
        img = np.abs(fm.lift_apply_array(fam, symbol, x) - fm.lift_apply_array(fam, symbol, y))
        slack.append(np.abs(x - y) - img)
    return _result("d-contr", np.concatenate(slack), INEQUALITY_SLACK)


def sweep_nohalf(ctx, n, rng):
    """Pairs ``x <= 1/2 <= y`` with ``d(x, y) < eta`` must not be separated by either map."""
    fam = ctx.fam
    Hx = -ctx.eta * rng.random(n)
    Hy = (ctx.eta + Hx) * rng.random(n)
    keep = Hx < Hy
    Hx, Hy = Hx[keep], Hy[keep]
    f0x, f0y = fm.lift_apply_array(fam, 0, Hx), fm.lift_apply_array(fam, 0, Hy)
    f1x, f1y = fm.lift_apply_array(fam, 1, Hx), fm.lift_apply_array(fam, 1, Hy)
    ok = (f0x < f0y) & (f0y < 0.0) & (0.0 < f1x) & (f1x < f1y)
    return _result("nohalf", np.where(ok, 0.0, -1.0), INEQUALITY_SLACK)


def sweep_crossings(ctx, n, rng, max_steps=10_000):
    """Run pairs starting in ``[1/2, 1)`` until the upper one first reaches ``(0, 1/2]``.

    At that moment ``d(x_n, y_n) <= chi(d(x_0, y_0))`` must hold. Pairs that
    do not cross within ``max_steps`` are dropped.
    """
    fam = ctx.fam
    x0 = lift_array(_upper_half(rng, n))
    y0 = lift_array(_upper_half(rng, n))
    x0, y0 = np.minimum(x0, y0), np.maximum(x0, y0)
    keep = x0 < y0
    x0, y0 = x0[keep], y0[keep]
    t0 = y0 - x0
    x, y = x0.copy(), y0.copy()
    final = np.full(x.size, np.nan)
    active = np.arange(x.size)
    for _ in range(max_steps):
        if not active.size:
            break
        s = rng.integers(0, 2, active.size)
        x[active] = fm.lift_apply_array(fam, s, x[active])
        y[active] = fm.lift_apply_array(fam, s, y[active])
        crossed = y[active] <= 0.0
        done = active[crossed]
        final[done] = y[done] - x[done]
        active = active[~crossed]
    done = ~np.isnan(final)
    half = ctx.eta / 2.0
    t = t0[done]
    env = np.where(t <= half, _chi_quadratic(fam.c, np.minimum(t, half)), ctx.chi_slope * t)
    return _result("long-contr", env - final[done], INEQUALITY_SLACK)


def certificate_suite(ctx, n, rng):
    """All contraction sweeps for one family, ``n`` random pairs each."""
    mid, iso = sweep_step_contraction(ctx, n, rng)
    return [
        sweep_deriv(n, rng),
        mid,
        iso,
        sweep_weak_contraction(ctx, n, rng),
        sweep_nohalf(ctx, n, rng),
        sweep_crossings(ctx, n, rng),
    ]
