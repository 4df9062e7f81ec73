"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it imports; otherwise, or
when the environment variable ``CECHAPPROX_PURE_PYTHON`` is set to a
non-empty value other than ``0``, the pure-Python ``_kernels_py`` module is
used.  ``BACKEND`` names the active choice.
"""
import os

from . import _kernels_py

_force_python = os.environ.get("CECHAPPROX_PURE_PYTHON", "") not in ("", "0")

if _force_python:
    _impl = _kernels_py
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "cython" if _impl is not _kernels_py else "python"

miniball = _impl.miniball
miniball_radius = _impl.miniball_radius
coface_radii = _impl.coface_radii
z2_rank = _impl.z2_rank


def available_backends():
    """Map of backend name to kernel module for every importable backend."""
    out = {"python": _kernels_py}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        out["cython"] = _ckernels
    return out
