"""Kernel backend selection.

The compiled extension is used when importable; ``ZRPEVO_PURE_PYTHON=1``
forces the pure-Python fallback.
"""
import importlib
import os

_NAMES = {"cython": "zrpevo._kernels", "python": "zrpevo._kernels_py"}


def load_backend(name):
    """Import a kernel module by backend name ('cython' or 'python')."""
    return importlib.import_module(_NAMES[name])


def _select():
    if os.environ.get("ZRPEVO_PURE_PYTHON", "") not in ("", "0"):
        return "python", load_backend("python")
    try:
        return "cython", load_backend("cython")
    except ImportError:
        return "python", load_backend("python")


BACKEND, kernels = _select()
