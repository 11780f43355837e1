"""Kernel backend selection.

The compiled Cython kernel is used when its extension module imported
successfully; otherwise (or when HYDG_PURE_PYTHON is set) the numpy fallback
takes over. Both backends implement identical selection semantics, including
tie-breaking, so results never depend on which one is active.
"""

import os

from . import knn_python

if os.environ.get("HYDG_PURE_PYTHON"):
    _impl = knn_python
    HAVE_EXT = False
else:
    try:
        from . import _knn_cy as _impl

        HAVE_EXT = True
    except ImportError:
        _impl = knn_python
        HAVE_EXT = False

topk_temporal = _impl.topk_temporal


def backend_name():
    return "cython" if HAVE_EXT else "python"
