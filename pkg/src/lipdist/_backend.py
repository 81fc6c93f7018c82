"""Selects the search kernel at import: compiled if available, else pure Python.

Set ``LIPDIST_PURE=1`` to force the pure-Python kernel.
"""

import os

from . import _pysearch

KERNELS = {"python": _pysearch.search}

try:
    from . import _csearch
except ImportError:  # extension not built
    _csearch = None
else:
    KERNELS["cython"] = _csearch.search

if os.environ.get("LIPDIST_PURE") or _csearch is None:
    DEFAULT = "python"
else:
    DEFAULT = "cython"


def get_kernel(name=None):
    name = name or DEFAULT
    try:
        return KERNELS[name]
    except KeyError:
        raise ValueError(f"kernel {name!r} is not available; have {sorted(KERNELS)}") from None
