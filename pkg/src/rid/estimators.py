"""scikit-learn style wrappers around the pullback and exponent estimators.

Rows of ``X`` are symbol words. For :class:`PullbackAttractor` column ``j`` of
an ``(n_samples, n)`` matrix holds the symbol at index ``j - n``, so the last
column is index -1. For :class:`FiberLyapunov` row ``i`` is a forward word
starting at index 0.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import attractor as at
from . import stats as st
from ._validation import DomainError, check_c, check_open_unit, check_symbols
from .base_process import SymbolWindow
from .fiber_maps import PLFamily


def _check_words(X):
    X = check_array(X, dtype=None, ensure_2d=True)
    return check_symbols(X)


class _Word:
    # forward word as a sampler-like source; fair coins are assumed
    p0 = 0.5

    def __init__(self, word):
        self.window = SymbolWindow(0, word)

    def symbols_at(self, offset, length):
        return self.window.symbols_at(offset, length)


class PullbackAttractor(BaseEstimator, TransformerMixin):
    """Graph value of the pullback attractor for each past word.

    Parameters
    ----------
    c : float
        Breakpoint parameter, strictly inside (0, 1/2).
    tol_d : float
        Target bracket width in the contraction metric.
    max_depth : int
        Cap on the pullback depth; words shorter than this cap it further.

    Attributes
    ----------
    family_ : PLFamily
    """

    def __init__(self, c=0.25, tol_d=1e-8, max_depth=at.DEFAULT_MAX_DEPTH):
        self.c = c
        self.tol_d = tol_d
        self.max_depth = max_depth

    def fit(self, X=None, y=None):
        check_c(self.c)
        if not self.tol_d > 0:
            raise DomainError("tol_d must be positive")
        if self.max_depth < 1:
            raise DomainError("max_depth must be >= 1")
        self.family_ = PLFamily(self.c)
        if X is not None:
            self.n_features_in_ = _check_words(X).shape[1]
        return self

    def estimates(self, X):
        """Full :class:`~rid.attractor.PullbackEstimate` records, one per row."""
        check_is_fitted(self, "family_")
        X = _check_words(X)
        n = X.shape[1]
        return at.estimate_phi_batch(self.family_, [SymbolWindow(-n, row) for row in X],
                                     self.tol_d, self.max_depth)

    def transform(self, X):
        """Graph values as an ``(n_samples, 1)`` array; NaN where not converged."""
        return np.array([[e.value if e.converged else np.nan] for e in self.estimates(X)])

    def predict(self, X, x):
        """+1 where ``x`` lies above the graph value, -1 below, 0 if undecided."""
        x = check_open_unit(x)
        vals = self.transform(X)[:, 0]
        out = np.sign(x - vals)
        out[np.isnan(vals)] = 0.0
        return out.astype(np.int8)


class FiberLyapunov(BaseEstimator):
    """Fiber Lyapunov exponent from forward words.

    Parameters
    ----------
    c : float
        Breakpoint parameter, strictly inside (0, 1/2).
    x0 : float
        Start of every orbit, inside (0, 1).

    Attributes
    ----------
    exponents_ : ndarray of shape (n_samples,)
        Birkhoff average of ``log f'`` along each row.
    std_errors_ : ndarray of shape (n_samples,)
    exponent_ : float
        Mean of ``exponents_``.
    closed_form_ : float
        Exponent under Lebesgue measure.
    """

    def __init__(self, c=0.25, x0=0.5):
        self.c = c
        self.x0 = x0

    def fit(self, X, y=None):
        fam = PLFamily(check_c(self.c))
        x0 = check_open_unit(self.x0, "x0")
        X = _check_words(X)
        if X.shape[1] < 2:
            raise DomainError("words need at least 2 symbols")
        ests = [st.fiber_lyapunov(fam, _Word(row), x0, X.shape[1]) for row in X]
        self.exponents_ = np.array([e.estimate for e in ests])
        self.std_errors_ = np.array([e.std_error for e in ests])
        self.exponent_ = float(self.exponents_.mean())
        self.closed_form_ = st.fiber_exponent_closed_form(fam)
        self.n_features_in_ = X.shape[1]
        return self
