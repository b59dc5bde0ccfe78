"""The piecewise-linear pair ``f0``, ``f1`` and their lifted forms.

``f0(x) = a*x`` on ``[0, 1-c]`` and ``1 - b*(1-x)`` on ``[1-c, 1]``;
``f1(x) = b*x`` on ``[0, c]`` and ``1 - a*(1-x)`` on ``[c, 1]``, with
``a = 1/(2(1-c))`` and ``b = 1/(2c)``. Both maps send their breakpoint to 1/2.

Lifted coordinates
------------------
Long orbits are iterated in the coordinate ``H = h(x)`` where
``h(x) = log(2x)`` for ``x <= 1/2`` and ``-log(2(1-x))`` above. In ``H`` the map
``f0`` is the translation ``H + log a`` for ``H <= 0``, the translation
``H - log b`` for ``H >= log b``, and a smooth increasing bridge in between;
``f1`` is its reflection ``H -> -f0(-H)``. Points near 0 and 1 keep full
relative precision, the endpoints correspond to ``-inf`` and ``+inf``, and the
contraction metric is plain ``|H - H'|``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_c, check_closed_unit, check_symbol


@dataclass(frozen=True)
class PLFamily:
    c: float = 0.25

    def __post_init__(self):
        object.__setattr__(self, "c", check_c(self.c))

    @property
    def a(self):
        return 1.0 / (2.0 * (1.0 - self.c))

    @property
    def b(self):
        return 1.0 / (2.0 * self.c)

    @property
    def log_a(self):
        return -math.log(2.0) - math.log1p(-self.c)

    @property
    def log_b(self):
        return -math.log(2.0 * self.c)

    @property
    def breakpoints(self):
        return (1.0 - self.c, self.c)


def apply(fam, symbol, x):
    symbol = check_symbol(symbol)
    x = check_closed_unit(x)
    a, b, c = fam.a, fam.b, fam.c
    if symbol == 0:
        return a * x if x <= 1.0 - c else 1.0 - b * (1.0 - x)
    return b * x if x <= c else 1.0 - a * (1.0 - x)


def apply_inverse(fam, symbol, y):
    symbol = check_symbol(symbol)
    y = check_closed_unit(y, "y")
    a, b = fam.a, fam.b
    if symbol == 0:
        return y / a if y <= 0.5 else 1.0 - (1.0 - y) / b
    return y / b if y <= 0.5 else 1.0 - (1.0 - y) / a


def derivative(fam, symbol, x):
    """Slope of the active piece; the left slope at the breakpoint."""
    symbol = check_symbol(symbol)
    x = check_closed_unit(x)
    if symbol == 0:
        return fam.a if x <= 1.0 - fam.c else fam.b
    return fam.b if x <= fam.c else fam.a


def symmetry_defect(fam, x):
    """``|f1(x) - (1 - f0(1-x))|``; zero up to rounding for every x."""
    return abs(apply(fam, 1, x) - (1.0 - apply(fam, 0, 1.0 - x)))


# --- lifted maps, scalar -------------------------------------------------

def _f0_lifted(fam, H):
    if H <= 0.0:
        return H + fam.log_a
    if H > fam.log_b:
        return H - fam.log_b
    return -math.log1p(-fam.c) + math.log1p(-0.5 * math.exp(-H))


def _f0_lifted_inverse(fam, G):
    if G <= fam.log_a:
        return G - fam.log_a
    if G > 0.0:
        return G + fam.log_b
    return -math.log(-2.0 * math.expm1(G + math.log1p(-fam.c)))


def lift_apply(fam, symbol, H):
    """``h(f_symbol(h^{-1}(H)))`` for a scalar lifted state."""
    if symbol == 0:
        return _f0_lifted(fam, H)
    return -_f0_lifted(fam, -H)


def lift_apply_inverse(fam, symbol, H):
    if symbol == 0:
        return _f0_lifted_inverse(fam, H)
    return -_f0_lifted_inverse(fam, -H)


def lift_log_derivative(fam, symbol, H):
    """``log f_symbol'(x)`` at ``x = h^{-1}(H)`` (left slope at the breakpoint)."""
    if symbol == 0:
        return fam.log_a if H <= fam.log_b else fam.log_b
    return fam.log_b if H <= -fam.log_b else fam.log_a


def at_breakpoint(fam, symbol, H):
    return H == (fam.log_b if symbol == 0 else -fam.log_b)


# --- lifted maps, vectorised ---------------------------------------------

def _f0_lifted_array(fam, G):
    mid = -math.log1p(-fam.c) + np.log1p(-0.5 * np.exp(-np.clip(G, 0.0, fam.log_b)))
    out = np.where(G <= 0.0, G + fam.log_a, mid)
    return np.where(G > fam.log_b, G - fam.log_b, out)


def lift_apply_array(fam, symbols, H):
    """Vectorised :func:`lift_apply`; ``symbols`` broadcasts against ``H``."""
    sign = 1.0 - 2.0 * np.asarray(symbols, dtype=np.float64)
    with np.errstate(invalid="ignore"):
        return sign * _f0_lifted_array(fam, sign * H)


def lift_apply_inverse_array(fam, symbols, H):
    sign = 1.0 - 2.0 * np.asarray(symbols, dtype=np.float64)
    G = sign * H
    arg = np.clip(G, fam.log_a, 0.0) + math.log1p(-fam.c)
    mid = -np.log(-2.0 * np.expm1(arg))
    out = np.where(G <= fam.log_a, G - fam.log_a, mid)
    with np.errstate(invalid="ignore"):
        return sign * np.where(G > 0.0, G + fam.log_b, out)
