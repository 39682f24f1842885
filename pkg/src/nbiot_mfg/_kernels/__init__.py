"""Sweep-kernel backend selection.

The compiled Cython module is used when it imported successfully and the
``NBIOT_MFG_PURE_PY`` environment variable is unset; otherwise the pure
Python reference implementation takes over.  Both produce bit-identical
results (asserted in the test suite), so the choice only affects speed.
"""

import os

from . import reference

try:
    from . import _sweeps as _compiled
except ImportError:
    _compiled = None

_FORCE_PURE = os.environ.get("NBIOT_MFG_PURE_PY", "") not in ("", "0")

_active = reference if (_compiled is None or _FORCE_PURE) else _compiled

fpk_sweep_kernel = _active.fpk_sweep_kernel
adjoint_sweep_kernel = _active.adjoint_sweep_kernel


def backend_name() -> str:
    return _active.BACKEND


def available_backends():
    mods = {"python": reference}
    if _compiled is not None:
        mods["cython"] = _compiled
    return mods
