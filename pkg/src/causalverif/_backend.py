"""Select the compiled kernels when available, else the pure-Python twins.

Set ``CAUSALVERIF_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels


def _load() -> ModuleType:
    if os.environ.get("CAUSALVERIF_PURE_PYTHON", "").strip() not in ("", "0"):
        return _pykernels
    try:
        from . import _ckernels
    except ImportError:
        return _pykernels
    return _ckernels


kernels = _load()
BACKEND: str = kernels.BACKEND


def available() -> dict[str, ModuleType]:
    """Every importable kernel implementation, keyed by backend name."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
