"""Selects the propagation kernel at import time.

The Cython extension ``aspcag._kernels`` is used when it has been built;
otherwise the pure-Python implementation is loaded.  Setting the environment
variable ``ASPCAG_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

COMPILED_AVAILABLE = _compiled is not None

if COMPILED_AVAILABLE and not os.environ.get("ASPCAG_PURE_PYTHON"):
    Propagator = _compiled.Propagator
    BACKEND = "cython"
else:
    Propagator = _kernels_py.Propagator
    BACKEND = "python"


def propagator_class(backend: str = None):
    """Return the Propagator class for ``backend`` ('cython', 'python' or None)."""
    if backend is None:
        return Propagator
    if backend == "python":
        return _kernels_py.Propagator
    if backend == "cython":
        if _compiled is None:
            raise ImportError("compiled kernel not built; run `pip install -e .`")
        return _compiled.Propagator
    raise ValueError(f"unknown kernel backend {backend!r}")
