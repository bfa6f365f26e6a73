"""Backend selection for the multiprecision kernels.

The compiled ``_mpcore`` extension is used when it imports; otherwise the
pure-Python ``_fallback`` module provides identical entry points. Setting
``DDSIM_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _fallback

fallback = _fallback

compiled = None
if os.environ.get("DDSIM_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _mpcore as compiled
    except ImportError:  # extension not built
        compiled = None

_impl = compiled if compiled is not None else _fallback
BACKEND = "compiled" if compiled is not None else "python"

matmul = _impl.matmul
eigh = _impl.eigh
vdv = _impl.vdv

__all__ = ["BACKEND", "matmul", "eigh", "vdv", "compiled", "fallback"]
