import numpy as np
import pytest
from hypothesis import given, strategies as st

from rid import DomainError, SeededSampler, SymbolWindow, WindowError, derive_seed, sample_window
from rid.base_process import BLOCK_SIZE, concat, shift_window

seeds = st.integers(0, 2**64 - 1)


def test_same_arguments_same_window():
    s = SeededSampler(11)
    assert sample_window(s, -8, 8) == sample_window(s, -8, 8)
    assert sample_window(s, -8, 8) == sample_window(SeededSampler(11), -8, 8)


def test_empty_window():
    w = sample_window(SeededSampler(3), 0, 0)
    assert len(w) == 0


def test_negative_length_rejected():
    with pytest.raises(DomainError):
        sample_window(SeededSampler(3), 0, -1)


@pytest.mark.parametrize("seed", range(10))
def test_symbol_frequency(seed):
    # oracle: direct count; 0.005 is 10 standard deviations at n = 10**6
    u = SeededSampler(derive_seed(1234, seed)).symbols_at(0, 10**6)
    assert abs(np.mean(u == 0) - 0.5) < 0.005


@given(seeds, st.integers(-3 * BLOCK_SIZE, 3 * BLOCK_SIZE), st.integers(0, 3 * BLOCK_SIZE),
       st.integers(0, 3 * BLOCK_SIZE))
def test_overlapping_reads_agree(seed, offset, length, cut):
    # a window read in one call matches the same indices read in two calls
    s = SeededSampler(seed)
    cut = min(cut, length)
    whole = s.symbols_at(offset, length)
    parts = np.concatenate([SeededSampler(seed).symbols_at(offset, cut),
                            SeededSampler(seed).symbols_at(offset + cut, length - cut)])
    assert np.array_equal(whole, parts)


def test_p0_biases_the_stream():
    u = SeededSampler(5, p0=0.9).symbols_at(0, 10**5)
    assert abs(np.mean(u == 0) - 0.9) < 0.005


def test_children_are_independent_streams():
    s = SeededSampler(7)
    a, b = s.child(0).symbols_at(0, 1000), s.child(1).symbols_at(0, 1000)
    assert not np.array_equal(a, b)
    assert np.array_equal(a, SeededSampler(7).child(0).symbols_at(0, 1000))


def test_derive_seed_is_deterministic_and_keyed():
    assert derive_seed(42, 1, 2) == derive_seed(42, 1, 2)
    assert derive_seed(42, 1, 2) != derive_seed(42, 2, 1)
    assert 0 <= derive_seed(2**64 - 1, 0) < 2**64


@pytest.mark.parametrize("bad", [-1, 2**64, 1.5, True])
def test_bad_seed(bad):
    with pytest.raises(DomainError):
        SeededSampler(bad)


def test_window_rejects_non_binary():
    with pytest.raises(DomainError):
        SymbolWindow(0, [0, 2])


def test_window_is_read_only():
    w = SymbolWindow(0, [0, 1])
    with pytest.raises(ValueError):
        w.symbols[0] = 1


def test_window_indexing():
    w = SymbolWindow(-2, [1, 0, 1])
    assert [w[-2], w[-1], w[0]] == [1, 0, 1]
    with pytest.raises(WindowError):
        w[1]
    with pytest.raises(WindowError):
        w.symbols_at(-3, 2)


def test_shift_by_zero_is_identity():
    w = SymbolWindow(3, [0, 1, 1])
    assert shift_window(w, 0) == w


@given(st.integers(-50, 50), st.integers(-50, 50), st.lists(st.integers(0, 1), max_size=20))
def test_shift_and_back(offset, k, syms):
    w = SymbolWindow(offset, syms)
    assert shift_window(shift_window(w, k), -k) == w


@given(st.integers(-20, 20), st.lists(st.integers(0, 1), min_size=1, max_size=20), st.integers(-5, 5))
def test_shift_reads_sigma_k(offset, syms, k):
    w = SymbolWindow(offset, syms)
    v = shift_window(w, k)
    for j in range(v.offset, v.stop):
        assert v[j] == w[j + k]


def test_shift_example():
    v = shift_window(SymbolWindow(0, [0, 1]), 1)
    assert v.offset == -1 and v.symbols.tolist() == [0, 1]


def test_concat():
    w = concat(SymbolWindow(-1, [1]), SymbolWindow(0, [0]))
    assert w.offset == -1 and w.symbols.tolist() == [1, 0]
    fut = SymbolWindow(0, [1, 1])
    assert concat(SymbolWindow(0, []), fut) == fut


def test_concat_gap():
    with pytest.raises(WindowError):
        concat(SymbolWindow(-2, [0, 1]), SymbolWindow(1, [1, 0]))
    with pytest.raises(WindowError):
        concat(SymbolWindow(-3, [0, 1]), SymbolWindow(0, [1]))


def test_cylinder_pins_coordinates():
    cyl = SymbolWindow(-3, [1, 1, 1, 1, 1, 1, 1])
    s = SeededSampler(9).with_cylinder(cyl)
    u = s.symbols_at(-10, 20)
    assert u[7:14].tolist() == [1] * 7
    base = SeededSampler(9).symbols_at(-10, 20)
    assert np.array_equal(u[:7], base[:7]) and np.array_equal(u[14:], base[14:])
