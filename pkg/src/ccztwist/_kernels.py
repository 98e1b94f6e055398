"""Backend selection for the hot kernels.

The compiled extension is used when it imports cleanly; setting the
environment variable ``CCZTWIST_PURE_PYTHON=1`` forces the numpy fallback.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels


def _load_compiled() -> ModuleType | None:
    try:
        from . import _ckernels  # type: ignore[attr-defined]
    except ImportError:
        return None
    return _ckernels


def backends() -> dict[str, ModuleType]:
    """All importable backends by name (used by tests and the benchmark)."""
    out: dict[str, ModuleType] = {"python": _pykernels}
    compiled = _load_compiled()
    if compiled is not None:
        out["compiled"] = compiled
    return out


def _select() -> ModuleType:
    if os.environ.get("CCZTWIST_PURE_PYTHON", "").strip() not in ("", "0"):
        return _pykernels
    return _load_compiled() or _pykernels


active = _select()
BACKEND: str = active.BACKEND

exp_table = active.exp_table
fwht = active.fwht
group_ring_walsh = active.group_ring_walsh
ddt_rows = active.ddt_rows
interpolate = active.interpolate
