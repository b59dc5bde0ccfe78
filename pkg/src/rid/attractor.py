"""Pullback estimation of the attractor graph and the experiments built on it.

The attracting graph is estimated by pulling a fixed compact bracket through
ever longer past words (depths 1, 2, 4, ...) until its image is narrower than
``tol_d`` in the contraction metric. Any object with a
``symbols_at(offset, length)`` method can serve as the base point: a
:class:`~rid.base_process.SeededSampler`, a cylinder-constrained sampler, or
an explicit :class:`~rid.base_process.SymbolWindow`.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import fiber_maps as fm
from ._validation import DomainError, check_open_unit
from .base_process import SeededSampler, SymbolWindow, WindowError, shift_window
from .metric import lift, lift_array, unlift, unlift_array
from .skew_product import pull_lifted_scalar, push_lifted
from .stats import ks_statistic

DEFAULT_BRACKET = (1e-6, 1.0 - 1e-6)
DEFAULT_MAX_DEPTH = 2**20
_CHUNK_CELLS = 2**23  # rows * depth per batch


@dataclass(frozen=True)
class PullbackEstimate:
    value: float
    bracket_lo: float
    bracket_hi: float
    depth: int
    d_width: float
    converged: bool
    degenerate: bool = False
    h_value: float = math.nan  # midpoint in lifted coordinates


class Shifted:
    """View of a sampler-like source through ``k`` applications of the shift."""

    def __init__(self, base, k):
        self.base, self.k = base, int(k)

    @property
    def p0(self):
        return self.base.p0

    def symbols_at(self, offset, length):
        return self.base.symbols_at(offset + self.k, length)


def shifted(source, k):
    if isinstance(source, SymbolWindow):
        return shift_window(source, k)
    return Shifted(source, k)


def _depth_limit(source, max_depth):
    if isinstance(source, SymbolWindow):
        if not len(source) or not source.covers(source.offset, 0):
            raise WindowError("past window must cover index -1")
        return min(max_depth, -source.offset)
    return max_depth


def _n_jobs(n_jobs):
    if n_jobs is None:
        n_jobs = int(os.environ.get("RID_THREADS", "1") or 1)
    return max(1, int(n_jobs))


def _estimate_rows(fam, sources, limits, tol_d, bracket_h):
    """Doubling-depth pullback for one chunk of rows; returns per-row arrays."""
    r = len(sources)
    lo_out, hi_out = np.empty(r), np.empty(r)
    depth = np.zeros(r, dtype=np.int64)
    conv = np.zeros(r, dtype=bool)
    pending = np.arange(r)
    n = 1
    while pending.size:
        cur = np.minimum(n, limits[pending])
        for d in np.unique(cur):
            rows = pending[cur == d]
            step = max(1, _CHUNK_CELLS // int(d))
            for i in range(0, rows.size, step):
                part = rows[i:i + step]
                words = np.stack([sources[j].symbols_at(-int(d), int(d)) for j in part])
                H = np.empty((2, part.size))
                H[0], H[1] = bracket_h
                H = push_lifted(fam, words, H)
                lo_out[part], hi_out[part] = H[0], H[1]
                depth[part] = d
                conv[part] = H[1] - H[0] <= tol_d
        finished = conv[pending] | (cur >= limits[pending])
        pending = pending[~finished]
        n *= 2
    return lo_out, hi_out, depth, conv


def estimate_phi_batch(fam, sources, tol_d=1e-8, max_depth=DEFAULT_MAX_DEPTH,
                       bracket=DEFAULT_BRACKET, n_jobs=None):
    """:func:`estimate_phi` for many base points, vectorised across them.

    Rows are split into chunks processed on up to ``n_jobs`` threads
    (default ``RID_THREADS`` or 1); the output order never depends on it.
    """
    lo, hi = map(float, bracket)
    if not (0.0 < lo < hi < 1.0):
        raise DomainError("bracket must satisfy 0 < lo < hi < 1")
    if not tol_d > 0:
        raise DomainError("tol_d must be positive")
    if max_depth < 1:
        raise DomainError("max_depth must be >= 1")
    sources = list(sources)
    if not sources:
        return []
    limits = np.array([_depth_limit(s, max_depth) for s in sources], dtype=np.int64)
    bracket_h = (lift(lo), lift(hi))
    jobs = _n_jobs(n_jobs)
    size = max(1, math.ceil(len(sources) / jobs))
    chunks = [range(i, min(i + size, len(sources))) for i in range(0, len(sources), size)]

    def work(ch):
        return _estimate_rows(fam, [sources[i] for i in ch], limits[ch.start:ch.stop], tol_d, bracket_h)

    if jobs == 1 or len(chunks) == 1:
        parts = [work(ch) for ch in chunks]
    else:
        with ThreadPoolExecutor(jobs) as pool:
            parts = list(pool.map(work, chunks))
    Hlo, Hhi, depth, conv = (np.concatenate(p) for p in zip(*parts))
    mid = 0.5 * (Hlo + Hhi)
    vals, los, his = unlift_array(mid), unlift_array(Hlo), unlift_array(Hhi)
    degenerate = (Hlo < bracket_h[0]) | (Hhi > bracket_h[1])
    return [
        PullbackEstimate(float(vals[i]), float(los[i]), float(his[i]), int(depth[i]),
                         float(Hhi[i] - Hlo[i]), bool(conv[i]), bool(degenerate[i]), float(mid[i]))
        for i in range(len(sources))
    ]


def estimate_phi(fam, past_source, tol_d=1e-8, max_depth=DEFAULT_MAX_DEPTH, bracket=DEFAULT_BRACKET):
    """Pull ``bracket`` back through depths 1, 2, 4, ... until its image is ``tol_d``-thin.

    The estimate is the ``d``-midpoint of the final image. Running out of depth
    returns an estimate with ``converged=False``; an image that has left the
    seed bracket (e.g. an all-zero past) is marked ``degenerate``.
    """
    return estimate_phi_batch(fam, [past_source], tol_d, max_depth, bracket, n_jobs=1)[0]


def graph_invariance_defects(fam, sources, tol_d=1e-8, max_depth=DEFAULT_MAX_DEPTH, n_jobs=None):
    """``|f_{w_0}(phi(w)) - phi(sigma w)|`` for each source, with both estimates."""
    sources = list(sources)
    here = estimate_phi_batch(fam, sources, tol_d, max_depth, n_jobs=n_jobs)
    there = estimate_phi_batch(fam, [shifted(s, 1) for s in sources], tol_d, max_depth, n_jobs=n_jobs)
    out = []
    for src, e0, e1 in zip(sources, here, there):
        if e0.converged and e1.converged:
            s0 = int(src.symbols_at(0, 1)[0])
            moved = unlift(fm.lift_apply(fam, s0, e0.h_value))
            out.append(abs(moved - e1.value))
        else:
            out.append(math.nan)
    return np.array(out), here, there


def check_graph_invariance(fam, window, tol_d=1e-8, max_depth=DEFAULT_MAX_DEPTH):
    """Invariance defect of the estimated graph for a window over ``[-n, 0]``."""
    if not window.covers(-1, 1):
        raise WindowError("window must cover indices -1 and 0")
    here = estimate_phi(fam, window.restrict(window.offset, 0), tol_d, max_depth)
    there = estimate_phi(fam, shift_window(window.restrict(window.offset, 1), 1), tol_d, max_depth)
    if not (here.converged and there.converged):
        raise ValueError("pullback estimates did not converge; raise max_depth or tol_d")
    return abs(unlift(fm.lift_apply(fam, window[0], here.h_value)) - there.value)


BASIN_EPS = 1e-6


def _classify(H):
    if H < lift(BASIN_EPS):
        return "to_zero"
    if H > lift(1.0 - BASIN_EPS):
        return "to_one"
    return "undecided"


def basin_dichotomy_lifted(fam, past, H, n):
    word = past.symbols_at(-n, n)[::-1].tolist()
    return _classify(pull_lifted_scalar(fam, word, H))


def basin_dichotomy(fam, past, x, n):
    """Where ``x`` goes under ``n`` steps of the inverse skew product.

    Points below the graph value tend to 0 and points above tend to 1; the
    result is ``"to_zero"`` / ``"to_one"`` once within ``1e-6`` of an
    endpoint, ``"undecided"`` otherwise.
    """
    x = check_open_unit(x)
    if n < 0:
        raise DomainError("n must be >= 0")
    if isinstance(past, SymbolWindow) and n and not past.covers(-n, 0):
        raise WindowError(f"need a past window over [{-n}, -1]")
    return basin_dichotomy_lifted(fam, past, lift(x), n)


@dataclass
class PhiSample:
    values: np.ndarray
    estimates: list
    excluded: int

    def ks(self):
        return ks_statistic(self.values)


def sample_phi_given_future(fam, future, num_samples, sampler, tol_d=1e-8,
                            max_depth=DEFAULT_MAX_DEPTH, n_jobs=None):
    """Graph values over i.i.d. pasts glued to a fixed future.

    Past ``i`` comes from ``sampler.child(i)``. The graph value reads only
    negative indices, so ``future`` never enters the computation; it is
    validated and kept for the record. Unconverged estimates are excluded and
    counted.
    """
    if num_samples < 1:
        raise DomainError("num_samples must be >= 1")
    if len(future) and future.offset != 0:
        raise WindowError("future window must start at index 0")
    ests = estimate_phi_batch(fam, [sampler.child(i) for i in range(num_samples)],
                              tol_d, max_depth, n_jobs=n_jobs)
    vals = np.array([e.value for e in ests if e.converged])
    return PhiSample(vals, ests, num_samples - vals.size)


@dataclass
class VanishingReport:
    n: int
    values: np.ndarray  # x_n from the reference start, one per prefix
    spreads: np.ndarray  # max - min of x_n over the start grid, one per prefix
    ks: object
    future_head: np.ndarray

    @property
    def min(self):
        return float(self.values.min())

    @property
    def max(self):
        return float(self.values.max())

    @property
    def fixed_prefix_spread(self):
        return float(self.spreads[0])

    @property
    def median_spread(self):
        return float(np.median(self.spreads))


X0_GRID = tuple(k / 10 for k in range(1, 10))


def vanishing_attractor_experiment(fam, future_seed, n, num_pasts, sampler,
                                   x0_grid=X0_GRID, x0_ref=0.5):
    """Distribution of ``x_n`` when only the one-sided future beyond time ``n`` is fixed.

    Symbols at indices ``>= n`` come from ``SeededSampler(future_seed)``;
    prefix ``i`` on ``[0, n-1]`` comes from ``sampler.child(i)``. Every start in
    ``x0_grid`` (which must contain ``x0_ref``) is run through every prefix.
    """
    if num_pasts < 1 or n < 0:
        raise DomainError("need num_pasts >= 1 and n >= 0")
    grid = np.array(x0_grid, dtype=np.float64)
    ref = int(np.flatnonzero(grid == x0_ref)[0])
    future = SeededSampler(future_seed, sampler.p0).symbols_at(n, 16)
    words = np.stack([sampler.child(i).symbols_at(0, n) for i in range(num_pasts)])
    H = np.repeat(lift_array(grid)[:, None], num_pasts, axis=1)
    x = unlift_array(push_lifted(fam, words, H))
    spreads = x.max(axis=0) - x.min(axis=0)
    return VanishingReport(n, x[ref], spreads, ks_statistic(x[ref]), future)


@dataclass
class DenseHistogram:
    counts: np.ndarray
    edges: np.ndarray
    values: np.ndarray

    @property
    def empty_bins(self):
        return int(np.count_nonzero(self.counts == 0))


def dense_graph_demo(fam, cylinder, num_samples, sampler, bins=20, tol_d=1e-8,
                     max_depth=DEFAULT_MAX_DEPTH, n_jobs=None):
    """Histogram of graph values over base points pinned to ``cylinder``."""
    if bins < 10:
        raise DomainError("bins must be >= 10")
    srcs = [sampler.child(i).with_cylinder(cylinder) for i in range(num_samples)]
    ests = estimate_phi_batch(fam, srcs, tol_d, max_depth, n_jobs=n_jobs)
    vals = np.array([e.value for e in ests if e.converged])
    counts, edges = np.histogram(vals, bins=bins, range=(0.0, 1.0))
    return DenseHistogram(counts, edges, vals)
