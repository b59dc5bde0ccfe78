"""Input validation helpers shared by the public API."""
import math
import numbers

import numpy as np

UINT64_MAX = 2**64 - 1


class DomainError(ValueError):
    """Argument outside the domain of a map, metric or estimator."""


def check_c(c):
    if isinstance(c, bool) or not isinstance(c, numbers.Real):
        raise DomainError(f"c must be a real number, got {c!r}")
    c = float(c)
    if not (0.0 < c < 0.5):
        raise DomainError(f"c must lie strictly inside (0, 1/2), got {c}")
    return c


def check_symbol(symbol):
    if symbol not in (0, 1):
        raise DomainError(f"symbol must be 0 or 1, got {symbol!r}")
    return int(symbol)


def check_closed_unit(x, name="x"):
    x = float(x)
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {x}")
    return x


def check_open_unit(x, name="x"):
    x = float(x)
    if not (0.0 < x < 1.0):
        raise DomainError(f"{name} must lie in (0, 1), got {x}")
    return x


def check_nonnegative(t, name="t"):
    t = float(t)
    if math.isnan(t) or t < 0.0:
        raise DomainError(f"{name} must be >= 0, got {t}")
    return t


def check_seed(seed):
    if isinstance(seed, bool) or not isinstance(seed, numbers.Integral):
        raise DomainError(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not (0 <= seed <= UINT64_MAX):
        raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def check_symbols(symbols):
    """Return ``symbols`` as a read-only uint8 array, rejecting anything but 0/1."""
    arr = np.asarray(symbols)
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise DomainError("symbols must be 0 or 1")
    arr = arr.astype(np.uint8, copy=True)
    arr.setflags(write=False)
    return arr
