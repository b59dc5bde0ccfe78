"""Random compositions of two piecewise-linear interval homeomorphisms."""
from ._validation import DomainError
from .base_process import SeededSampler, SymbolWindow, WindowError, derive_seed, sample_window
from .fiber_maps import PLFamily

__version__ = "0.1.0"

__all__ = ["DomainError", "PLFamily", "SeededSampler", "SymbolWindow", "WindowError",
           "derive_seed", "sample_window", "__version__"]
