"""Kernel selection: compiled extension when importable, numpy fallback otherwise.

Set ``PMAPS_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("PMAPS_PURE_PYTHON", "") not in ("", "0"):
    from pmaps import _kernels_py as impl

    BACKEND = "python"
else:
    try:
        from pmaps import _kernels as impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        from pmaps import _kernels_py as impl

        BACKEND = "python"

affine_orbit_float = impl.affine_orbit_float
affine_orbit_int = impl.affine_orbit_int
block_codes = impl.block_codes
w1_sorted = impl.w1_sorted

__all__ = [
    "BACKEND",
    "affine_orbit_float",
    "affine_orbit_int",
    "block_codes",
    "w1_sorted",
]
