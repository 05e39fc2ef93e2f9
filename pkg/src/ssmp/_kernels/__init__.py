"""Hot-loop kernels: compiled when available, pure Python otherwise.

Set ``SSMP_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

if _ckernels is not None and not os.environ.get("SSMP_PURE_PYTHON"):
    active = _ckernels
    BACKEND = "cython"
else:
    active = _pykernels
    BACKEND = "python"


def get(name=None):
    """Kernel module by name (``"cython"`` / ``"python"``); default is active."""
    if name is None:
        return active
    if name == "python":
        return _pykernels
    if name == "cython":
        if _ckernels is None:
            raise ImportError("compiled kernels are not built")
        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")


def available():
    return ["python"] + (["cython"] if _ckernels is not None else [])
