"""Backend selection for the hot loops.

The compiled extension ``polarssk._kernels`` is used when it has been built;
otherwise the NumPy fallback is imported. Setting the environment variable
``POLARSSK_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("POLARSSK_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "cython"

boxplus = _impl.boxplus
polar_transform = _impl.polar_transform
sc_decode = _impl.sc_decode
genie_stats = _impl.genie_stats
