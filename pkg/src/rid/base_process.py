"""Finite views of points of the Bernoulli shift.

A point of the two-sided shift is an infinite 0/1 sequence indexed by the
integers. Experiments only ever read finitely many coordinates, so a point is
represented by a :class:`SeededSampler`, which defines every coordinate lazily
and reproducibly from a 64-bit seed, and finite blocks of it are materialised
as :class:`SymbolWindow` values.

Random stream
-------------
Coordinates are produced in blocks of ``BLOCK_SIZE`` symbols. Block ``j``
(``j`` may be negative; it covers absolute indices ``j*BLOCK_SIZE`` up to
``(j+1)*BLOCK_SIZE - 1``) is drawn from numpy's PCG64 generator seeded with
``SeedSequence(entropy=seed, spawn_key=(zigzag(j),))`` where
``zigzag(j) = 2j`` for ``j >= 0`` and ``-2j - 1`` otherwise. The block's
uniform doubles ``u`` map to symbol 0 when ``u < p0`` and 1 otherwise.
PCG64 has period 2**128, and numpy guarantees the stream for a fixed
seed sequence across platforms.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import DomainError, check_seed, check_symbols

BLOCK_SIZE = 4096


class WindowError(ValueError):
    """A window does not cover the requested indices, or windows do not abut."""


def _zigzag(j):
    return 2 * j if j >= 0 else -2 * j - 1


def derive_seed(master, *keys):
    """Derive an independent 64-bit seed from ``master`` and non-negative integer keys.

    Used to give every ensemble member its own stream, so results do not depend
    on scheduling or on how many members run.
    """
    master = check_seed(master)
    state = np.random.SeedSequence(master, spawn_key=tuple(int(k) for k in keys))
    lo, hi = state.generate_state(2, np.uint32)
    return int(lo) | (int(hi) << 32)


@dataclass(frozen=True)
class SymbolWindow:
    """Symbols ``symbols[i]`` sitting at absolute indices ``offset + i``."""

    offset: int
    symbols: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "offset", int(self.offset))
        object.__setattr__(self, "symbols", check_symbols(self.symbols).ravel())

    @property
    def stop(self):
        return self.offset + len(self.symbols)

    def __len__(self):
        return len(self.symbols)

    def covers(self, start, stop):
        return self.offset <= start and stop <= self.stop

    def __getitem__(self, k):
        if not self.offset <= k < self.stop:
            raise WindowError(f"index {k} outside window [{self.offset}, {self.stop})")
        return int(self.symbols[k - self.offset])

    def symbols_at(self, offset, length):
        """Symbols at absolute indices ``offset .. offset+length-1``."""
        if length < 0:
            raise DomainError("length must be >= 0")
        if length and not self.covers(offset, offset + length):
            raise WindowError(
                f"window [{self.offset}, {self.stop}) does not cover "
                f"[{offset}, {offset + length})"
            )
        i = offset - self.offset
        return self.symbols[i:i + length]

    def restrict(self, start, stop):
        return SymbolWindow(start, self.symbols_at(start, stop - start))

    def __eq__(self, other):
        if not isinstance(other, SymbolWindow):
            return NotImplemented
        return self.offset == other.offset and np.array_equal(self.symbols, other.symbols)

    def __hash__(self):
        return hash((self.offset, self.symbols.tobytes()))


@dataclass
class SeededSampler:
    """A reproducible point of the shift: every coordinate is a function of ``seed``."""

    seed: int
    p0: float = 0.5
    _blocks: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        self.seed = check_seed(self.seed)
        self.p0 = float(self.p0)
        if not (0.0 < self.p0 < 1.0):
            raise DomainError(f"p0 must lie in (0, 1), got {self.p0}")

    def _block(self, j):
        block = self._blocks.get(j)
        if block is None:
            seq = np.random.SeedSequence(self.seed, spawn_key=(_zigzag(j),))
            u = np.random.Generator(np.random.PCG64(seq)).random(BLOCK_SIZE)
            block = (u >= self.p0).astype(np.uint8)
            block.setflags(write=False)
            self._blocks[j] = block
        return block

    def symbols_at(self, offset, length):
        if length < 0:
            raise DomainError("length must be >= 0")
        if length == 0:
            return np.zeros(0, dtype=np.uint8)
        first = offset // BLOCK_SIZE
        last = (offset + length - 1) // BLOCK_SIZE
        joined = np.concatenate([self._block(j) for j in range(first, last + 1)])
        i = offset - first * BLOCK_SIZE
        return joined[i:i + length]

    def child(self, *keys):
        """An independent sampler keyed by ``(seed, *keys)``."""
        return SeededSampler(derive_seed(self.seed, *keys), self.p0)

    def with_cylinder(self, cylinder):
        return CylinderSampler(self, cylinder)


@dataclass
class CylinderSampler:
    """A sampler whose coordinates inside ``cylinder`` are pinned to the cylinder's word."""

    base: SeededSampler
    cylinder: SymbolWindow

    @property
    def p0(self):
        return self.base.p0

    def symbols_at(self, offset, length):
        out = np.array(self.base.symbols_at(offset, length))
        lo = max(offset, self.cylinder.offset)
        hi = min(offset + length, self.cylinder.stop)
        if lo < hi:
            out[lo - offset:hi - offset] = self.cylinder.symbols_at(lo, hi - lo)
        return out


def sample_window(sampler, offset, length):
    """Read the coordinates ``offset .. offset+length-1`` of ``sampler`` as a window.

    Identical arguments always give identical windows; the sampler caches the
    blocks it has generated but its stream never advances.
    """
    if length < 0:
        raise DomainError("length must be >= 0")
    return SymbolWindow(offset, sampler.symbols_at(offset, length))


def shift_window(w, k):
    """View ``w`` through the shift applied ``k`` times.

    Coordinate ``j`` of the shifted point is coordinate ``j + k`` of the
    original, so only the offset moves.
    """
    return SymbolWindow(w.offset - k, w.symbols)


def concat(past, future):
    """Join a past window over ``[-n, -1]`` and a future window over ``[0, m-1]``."""
    if len(past) and past.stop != 0:
        raise WindowError(f"past must end at index -1, ends at {past.stop - 1}")
    if len(future) and future.offset != 0:
        raise WindowError(f"future must start at index 0, starts at {future.offset}")
    if not len(past):
        return future if len(future) else SymbolWindow(0, [])
    if not len(future):
        return past
    return SymbolWindow(past.offset, np.concatenate([past.symbols, future.symbols]))
