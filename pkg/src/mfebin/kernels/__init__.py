"""Hot inner loops, compiled when possible.

The Cython extension ``_ckernels`` is used if it was built; otherwise the
NumPy versions in ``_pykernels`` are used.  Setting ``MFEBIN_PURE_PYTHON=1``
forces the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
if os.environ.get("MFEBIN_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
else:
    _impl = _pykernels

zhang_suen = _impl.zhang_suen
drd_flip_sum = _impl.drd_flip_sum

__all__ = ["BACKEND", "zhang_suen", "drd_flip_sum"]
