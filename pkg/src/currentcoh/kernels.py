"""Kernel dispatch: compiled extension if importable, numpy fallback otherwise."""
from __future__ import annotations

import os

from . import _fallback

BACKEND = "python"
if os.environ.get("CURRENTCOH_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - depends on the build
        _impl = _fallback
else:
    _impl = _fallback

matmul_mod = _impl.matmul_mod
trace_product = _impl.trace_product
rank_mod = _impl.rank_mod
