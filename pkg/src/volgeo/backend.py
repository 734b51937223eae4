"""Kernel backend selection: compiled extension if available, numpy otherwise.

Set VOLGEO_BACKEND=python to force the numpy kernels, VOLGEO_BACKEND=compiled
to require the extension (ImportError if it was not built).  The default
"auto" prefers the extension and silently falls back.
"""

from __future__ import annotations

import os

from . import _kernels_py

_choice = os.environ.get("VOLGEO_BACKEND", "auto").lower()

if _choice not in ("auto", "python", "compiled"):
    raise ValueError(f"VOLGEO_BACKEND must be auto|python|compiled, got {_choice!r}")

if _choice == "python":
    kernels = _kernels_py
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        if _choice == "compiled":
            raise
        kernels = _kernels_py

BACKEND_NAME = "compiled" if getattr(kernels, "IS_COMPILED", False) else "python"
