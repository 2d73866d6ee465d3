"""Batch kernels: run an estimator over a whole sample array.

The compiled Cython extension (``_ck``) is preferred; the pure-Python
implementation (``_pyk``) is the fallback and the semantic reference. Both
implement identical arithmetic and produce bit-identical traces (enforced
by the parity tests). Set ``QEWA_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pyk

if os.environ.get("QEWA_PURE_PYTHON"):
    _impl = _pyk
    IMPL_NAME = "python"
else:
    try:
        from . import _ck as _impl  # type: ignore[no-redef]

        IMPL_NAME = "cython"
    except ImportError:
        _impl = _pyk
        IMPL_NAME = "python"

qewa_path = _impl.qewa_path
dumiqe_path = _impl.dumiqe_path
frugal_path = _impl.frugal_path
ewa_path = _impl.ewa_path

__all__ = [
    "qewa_path",
    "dumiqe_path",
    "frugal_path",
    "ewa_path",
    "IMPL_NAME",
]
