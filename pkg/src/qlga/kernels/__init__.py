"""Hot loops of the sector time step.

Two interchangeable backends expose the same functions:

``numba``
    ``@njit`` loop kernels, parallel over output rows (default).
``numpy``
    vectorized pure-numpy fallback.

The default is taken from the ``QLGA_BACKEND`` environment variable
(``numba`` or ``numpy``); setting ``QLGA_DISABLE_NUMBA=1`` forces numpy.
Both backends produce the same transition table, entry for entry.
"""

from __future__ import annotations

import importlib
import os
from types import ModuleType

BACKENDS = ("numba", "numpy")


def _default_backend() -> str:
    if os.environ.get("QLGA_DISABLE_NUMBA", "").strip() not in ("", "0"):
        return "numpy"
    name = os.environ.get("QLGA_BACKEND", "numba").strip().lower()
    if name not in BACKENDS:
        raise ValueError(f"QLGA_BACKEND must be one of {BACKENDS}, got {name!r}")
    if name == "numba":
        try:
            import numba  # noqa: F401
        except ImportError:
            return "numpy"
    return name


DEFAULT_BACKEND = _default_backend()


def get_backend(name: str | None = None) -> ModuleType:
    name = DEFAULT_BACKEND if name is None else name.lower()
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}")
    return importlib.import_module(f"{__name__}._{name}")


def set_num_threads(n: int) -> None:
    """Worker count for the numba backend; results do not depend on it."""
    if n < 1:
        raise ValueError("thread count must be >= 1")
    try:
        import numba
    except ImportError:
        return
    numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
