"""Backend selection for the attempt kernels.

The compiled module is used when it imports; ``SUBFREE_PURE=1`` forces the
numpy fallback. ``BACKEND`` names the active one.
"""
from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels

_compiled: ModuleType | None
try:
    from . import _kernels as _compiled  # type: ignore[attr-defined]
except ImportError:
    _compiled = None

if _compiled is not None and os.environ.get("SUBFREE_PURE", "") not in ("1", "true", "yes"):
    _impl: ModuleType = _compiled
    BACKEND = "cython"
else:
    _impl = _pykernels
    BACKEND = "python"

NAMES = ("ck_attempts", "dck_attempts", "tree_attempts", "diamond_attempts", "checkh_attempts")


def available() -> list[str]:
    return ["python"] + (["cython"] if _compiled is not None else [])


def backend(name: str | None = None) -> ModuleType:
    """Kernel module by name; ``None`` gives the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _pykernels
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


ck_attempts = _impl.ck_attempts
dck_attempts = _impl.dck_attempts
tree_attempts = _impl.tree_attempts
diamond_attempts = _impl.diamond_attempts
checkh_attempts = _impl.checkh_attempts
