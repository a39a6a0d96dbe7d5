"""Kernel selection: compiled ``_kernels`` when importable, else numpy.

Set ``VAROSC_PURE_PYTHON=1`` to force the numpy fallback.
"""
import os

from . import _fallback

if os.environ.get("VAROSC_PURE_PYTHON", "") not in ("", "0"):
    kernels = _fallback
else:
    try:
        from . import _kernels as kernels
    except ImportError:  # extension not built
        kernels = _fallback

BACKEND = kernels.NAME
