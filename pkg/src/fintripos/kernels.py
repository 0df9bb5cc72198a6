"""Kernel selection: the compiled extension when built, else the pure-Python one.

Set ``FINTRIPOS_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("FINTRIPOS_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

enumerate_pers = _impl.enumerate_pers
enumerate_funrels = _impl.enumerate_funrels
classify_names = _impl.classify_names
