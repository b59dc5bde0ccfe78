from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rid import DomainError, PLFamily, SeededSampler, SymbolWindow, WindowError, derive_seed, sample_window
from rid import fiber_maps as fm
from rid.metric import lift_array
from rid.skew_product import (OPEN_HI, OPEN_LO, backward_orbit, forward_orbit, phi_nm,
                              pullback_point, push_lifted)

FAM = PLFamily(0.25)
words = st.lists(st.integers(0, 1), min_size=1, max_size=60)


def test_zero_steps():
    tr = forward_orbit(FAM, SymbolWindow(0, []), 0.3, 0, store=True)
    assert tr.states.tolist() == [0.3] and tr.final == 0.3
    tr = backward_orbit(FAM, SymbolWindow(0, []), 0.3, 0, store=True)
    assert tr.states.tolist() == [0.3]


def test_forward_example():
    tr = forward_orbit(FAM, SymbolWindow(0, [0, 1]), 0.3, 2, store=True)
    assert tr.states == pytest.approx([0.3, 0.2, 0.4], abs=1e-16)
    assert tr.branches.tolist() == [0, 1]
    assert np.exp(tr.log_derivs) == pytest.approx([2 / 3, 2.0])


def test_backward_example():
    tr = backward_orbit(FAM, SymbolWindow(-1, [1]), 0.4, 1, store=True)
    assert tr.states == pytest.approx([0.4, 0.2])


def test_store_is_optional():
    tr = forward_orbit(FAM, SymbolWindow(0, [0, 1]), 0.3, 2)
    assert tr.states is None and tr.final == pytest.approx(0.4)


def test_short_window():
    with pytest.raises(WindowError):
        forward_orbit(FAM, SymbolWindow(0, [0]), 0.3, 2)
    with pytest.raises(WindowError):
        backward_orbit(FAM, SymbolWindow(-1, [0]), 0.3, 2)


@pytest.mark.parametrize("x0", [0.0, 1.0])
def test_endpoints_stay(x0):
    w = sample_window(SeededSampler(1), 0, 500)
    tr = forward_orbit(FAM, w, x0, 500, store=True)
    assert np.all(tr.states == x0)


def test_forward_then_backward():
    rng = np.random.default_rng(3)
    for i in range(10**4 // 50):
        w = sample_window(SeededSampler(derive_seed(3, i)), 0, 20)
        x0 = float(rng.uniform(0.01, 0.99))
        y = forward_orbit(FAM, w, x0, 20).final
        back = backward_orbit(FAM, SymbolWindow(-20, w.symbols), y, 20).final
        assert back == pytest.approx(x0, abs=1e-12)


@given(words, words, st.floats(0, 1))
def test_semigroup(u, v, x0):
    # rational oracle for the composition
    whole = forward_orbit(FAM, SymbolWindow(0, u + v), x0, len(u + v)).final
    mid = forward_orbit(FAM, SymbolWindow(0, u), x0, len(u)).final
    assert whole == forward_orbit(FAM, SymbolWindow(0, v), mid, len(v)).final
    x = Fr(x0)
    c = Fr(1, 4)
    for s in u + v:
        x = (x * 2 / 3 if x <= 1 - c else 1 - 2 * (1 - x)) if s == 0 else \
            (2 * x if x <= c else 1 - (1 - x) * 2 / 3)
    assert whole == pytest.approx(float(x), abs=1e-13)


@given(words, st.floats(0, 1), st.floats(0, 1))
def test_order_preserved(word, x0, y0):
    if x0 == y0:
        return
    x0, y0 = min(x0, y0), max(x0, y0)
    n = len(word)
    xs = forward_orbit(FAM, SymbolWindow(0, word), x0, n, store=True).states
    ys = forward_orbit(FAM, SymbolWindow(0, word), y0, n, store=True).states
    assert np.all(xs <= ys)
    # strict in exact arithmetic; check it in lifted coordinates where it survives rounding
    H = push_lifted(FAM, np.array([word]), lift_array(np.array([[x0], [y0]])))
    assert H[0, 0] <= H[1, 0]


def test_inf_visits():
    # 100 seeds, x0 = 1e-3, 10**5 steps: both halves are visited at least 10**3 times
    rows = 100
    words = np.stack([SeededSampler(derive_seed(77, i)).symbols_at(0, 10**5) for i in range(rows)])
    H = np.full(rows, lift_array(1e-3))
    low = np.zeros(rows, dtype=np.int64)
    high = np.zeros(rows, dtype=np.int64)
    for j in range(words.shape[1]):
        H = fm.lift_apply_array(FAM, words[:, j], H)
        low += H <= 0.0
        high += H >= 0.0
    assert low.min() >= 1000 and high.min() >= 1000


def test_keep_open_counts_clamps():
    w = SymbolWindow(0, [0] * 200)
    tr = forward_orbit(FAM, w, 0.5, 200, keep_open=True)
    # (2/3)**200 / 2 is far below 2**-74, so the clamp engages
    assert tr.final == OPEN_LO and tr.clamp_count > 0
    # near 1 the upper branch stalls at 1 - 2**-53 by rounding, so only a start at 1 clamps
    tr = forward_orbit(FAM, SymbolWindow(0, [1] * 200), 0.5, 200, keep_open=True)
    assert tr.final == OPEN_HI and tr.clamp_count == 0
    tr = forward_orbit(FAM, SymbolWindow(0, [1] * 5), 1.0, 5, keep_open=True)
    assert tr.final == OPEN_HI and tr.clamp_count == 1
    assert forward_orbit(FAM, SymbolWindow(0, [0, 1]), 0.3, 2, keep_open=True).clamp_count == 0


def test_pullback_examples():
    assert pullback_point(FAM, SymbolWindow(0, []), 0.37) == 0.37
    assert pullback_point(FAM, SymbolWindow(-2, [0, 1]), 0.3) == pytest.approx(0.4, abs=1e-16)
    assert phi_nm(FAM, SymbolWindow(0, []), 0, 2) == 0.5
    assert phi_nm(FAM, SymbolWindow(-3, [0, 0, 0]), 3, 2) == pytest.approx(4 / 27, abs=1e-16)


def test_pullback_needs_past_ending_at_minus_one():
    with pytest.raises(WindowError):
        pullback_point(FAM, SymbolWindow(-2, [0, 1, 1]), 0.3)


def test_phi_nm_bad_m():
    with pytest.raises(DomainError):
        phi_nm(FAM, SymbolWindow(-1, [0]), 1, 0)


@given(st.lists(st.integers(0, 1), max_size=40), st.floats(0, 1), st.floats(0, 1))
def test_pullback_monotone(word, y0, y1):
    past = SymbolWindow(-len(word), word)
    lo, hi = min(y0, y1), max(y0, y1)
    assert pullback_point(FAM, past, lo) <= pullback_point(FAM, past, hi)


@given(st.lists(st.integers(0, 1), max_size=30), st.integers(1, 50))
def test_phi_nm_in_open_interval(word, m):
    if m == 1:
        return
    past = SymbolWindow(-len(word), word)
    assert 0.0 < phi_nm(FAM, past, len(word), m) < 1.0
