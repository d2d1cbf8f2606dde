"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it was built; otherwise the
numpy implementation in ``_pykernels`` is used. Setting the environment
variable ``CUMBREAK_PURE_PYTHON=1`` forces the numpy path.
"""
import os

from . import _pykernels

if os.environ.get("CUMBREAK_PURE_PYTHON", "").strip() not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "python" if _impl is _pykernels else "cython"

cumfit = _impl.cumfit
cumfit_grid = _impl.cumfit_grid
bartlett_lrv = _impl.bartlett_lrv
cumulative_design = _pykernels.cumulative_design
OK = _pykernels.OK
DEGENERATE = _pykernels.DEGENERATE
