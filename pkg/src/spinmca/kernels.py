"""Backend selection for the hot kernels.

The compiled extension ``spinmca._core`` is used when it imports; otherwise, or
when the environment variable ``SPINMCA_PURE_PYTHON`` is set to a non-empty
value other than ``0``, the pure-Python module ``spinmca._core_py`` is used.
``BACKEND`` names the active implementation.
"""
import os

from . import _core_py

if os.environ.get("SPINMCA_PURE_PYTHON", "") not in ("", "0"):
    _impl = _core_py
    BACKEND = "python"
else:
    try:
        from . import _core as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _core_py
        BACKEND = "python"

vteam_rate = _impl.vteam_rate
vteam_integrate = _impl.vteam_integrate
program_cells = _impl.program_cells
im_evaluate = _impl.im_evaluate


def backends():
    """Map of importable backend name -> module (the fallback is always present)."""
    found = {"python": _core_py}
    try:
        from . import _core
        found["cython"] = _core
    except ImportError:
        pass
    return found
