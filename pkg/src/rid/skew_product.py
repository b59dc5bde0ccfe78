"""Compositions of fiber maps along symbol words.

Index conventions follow the shift: the forward map at time ``k`` uses the
symbol at index ``k``; pulling a point back from depth ``n`` applies the
symbol at ``-n`` first and the symbol at ``-1`` last.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fiber_maps as fm
from ._validation import DomainError, check_closed_unit
from .base_process import WindowError

OPEN_LO = 2.0 ** -74
OPEN_HI = math.nextafter(1.0, 0.0)


@dataclass
class OrbitTrace:
    """A fiber orbit. ``states``, ``branches`` and ``log_derivs`` are ``None``
    unless the orbit was run with ``store=True``."""

    x0: float
    final: float
    steps: int
    log_deriv_sum: float
    clamp_count: int = 0
    states: np.ndarray | None = None
    branches: np.ndarray | None = None
    log_derivs: np.ndarray | None = None


def _clamp(x):
    if x < OPEN_LO:
        return OPEN_LO, 1
    if x > OPEN_HI:
        return OPEN_HI, 1
    return x, 0


def _run(fam, word, x0, step, slope, store, keep_open):
    x = check_closed_unit(x0, "x0")
    n = len(word)
    states = np.empty(n + 1) if store else None
    logs = np.empty(n) if store else None
    if store:
        states[0] = x
    total, clamps = 0.0, 0
    for k, s in enumerate(word):
        s = int(s)
        ld = math.log(slope(fam, s, x))
        x = step(fam, s, x)
        if keep_open:
            x, hit = _clamp(x)
            clamps += hit
        total += ld
        if store:
            states[k + 1] = x
            logs[k] = ld
    return OrbitTrace(float(x0), x, n, total, clamps, states,
                      np.array(word, dtype=np.uint8) if store else None, logs)


def forward_orbit(fam, w, x0, n, store=False, keep_open=False):
    """Iterate ``x_{k+1} = f_{w_k}(x_k)`` for ``k = 0 .. n-1``.

    ``log_derivs[k]`` is ``log f'_{w_k}(x_k)``. With ``keep_open`` every state
    is clamped into ``[2**-74, 1 - 2**-53]`` and each clamp is counted.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    if n and not w.covers(0, n):
        raise WindowError(f"forward orbit of {n} steps needs indices [0, {n - 1}]")
    word = w.symbols_at(0, n)
    return _run(fam, word, x0, fm.apply, fm.derivative, store, keep_open)


def _inverse_slope(fam, s, y):
    return 1.0 / fm.derivative(fam, s, fm.apply_inverse(fam, s, y))


def backward_orbit(fam, w, x0, n, store=False, keep_open=False):
    """Iterate ``x_{-k} = f_{w_{-k}}^{-1}(x_{-k+1})`` for ``k = 1 .. n``.

    States are recorded as ``x_0, x_{-1}, ..., x_{-n}`` and ``branches[k-1]``
    is the symbol at index ``-k``.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    if n and not w.covers(-n, 0):
        raise WindowError(f"backward orbit of {n} steps needs indices [{-n}, -1]")
    word = w.symbols_at(-n, n)[::-1]
    return _run(fam, word, x0, fm.apply_inverse, _inverse_slope, store, keep_open)


def _past_word(past, n):
    if n and not past.covers(-n, 0):
        raise WindowError(f"pullback of depth {n} needs a window over [{-n}, -1]")
    return past.symbols_at(-n, n)


def pullback_point(fam, past, y, n=None):
    """``(f_{w_{-1}} o ... o f_{w_{-n}})(y)``; ``n`` defaults to the whole window,
    which must then end at index -1."""
    y = check_closed_unit(y, "y")
    if n is None:
        if len(past) and past.stop != 0:
            raise WindowError("past window must end at index -1")
        n = len(past)
    for s in _past_word(past, n):
        y = fm.apply(fam, int(s), y)
    return y


def phi_nm(fam, past, n, m):
    """The point sent to ``1/m`` by the depth-``n`` forward composition from ``sigma^{-n}``."""
    if m < 1:
        raise DomainError("m must be a positive integer")
    return pullback_point(fam, past, 1.0 / m, n)


def push_lifted(fam, words, H):
    """Push lifted states through a batch of words.

    ``words`` has shape ``(rows, length)`` and is applied column by column;
    ``H`` has shape ``(..., rows)`` so several states per row move together.
    """
    words = np.asarray(words)
    H = np.array(H, dtype=np.float64)
    for j in range(words.shape[1]):
        H = fm.lift_apply_array(fam, words[:, j], H)
    return H


def push_lifted_scalar(fam, word, H):
    for s in word:
        H = fm.lift_apply(fam, s, H)
    return H


def pull_lifted_scalar(fam, word, H):
    """Apply inverses along ``word`` in the given order."""
    for s in word:
        H = fm.lift_apply_inverse(fam, s, H)
    return H
