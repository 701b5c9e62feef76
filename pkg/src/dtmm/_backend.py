"""Backend selection for the ordered-product scan.

The compiled extension is preferred when available; the pure-Python twin is
always present. ``DTMM_BACKEND=py|cython|auto`` overrides the choice at
import time.
"""

from __future__ import annotations

import os

from . import _core_py

BACKEND_ENV = "DTMM_BACKEND"


def _select():
    choice = os.environ.get(BACKEND_ENV, "auto").strip().lower()
    if choice not in ("auto", "py", "cython"):
        raise ValueError(
            f"{BACKEND_ENV} must be one of auto, py, cython (got {choice!r})"
        )
    if choice == "py":
        return "py", _core_py.ordered_scan
    try:
        from . import _core
    except ImportError:
        if choice == "cython":
            raise ImportError(
                "the compiled dtmm._core extension is not available; "
                "rebuild the package or set DTMM_BACKEND=py"
            ) from None
        return "py", _core_py.ordered_scan
    return "cython", _core.ordered_scan


BACKEND_NAME, ordered_scan = _select()
