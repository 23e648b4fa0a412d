"""Kernel backend selection.

Set ``NANOPORE1D_DISABLE_JIT=1`` to run the pure-numpy kernels; otherwise the
numba kernels are used when numba imports.
"""

from __future__ import annotations

import os

DISABLE_ENV = "NANOPORE1D_DISABLE_JIT"

try:
    import numba  # noqa: F401
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False


def jit_requested() -> bool:
    return os.environ.get(DISABLE_ENV, "").strip().lower() in ("", "0", "false", "no")


def backend() -> str:
    """``"numba"`` or ``"numpy"``, read from the environment at call time."""
    return "numba" if HAVE_NUMBA and jit_requested() else "numpy"
