"""Kernel backend selection.

The compiled ``_ccore`` extension is used when importable; otherwise the
pure-Python ``_pycore`` kernels. ``BUBBLECHAOS_BACKEND=python`` forces the
fallback.
"""

import os

from . import _pycore

kernels = _pycore
if os.environ.get("BUBBLECHAOS_BACKEND", "").lower() != "python":
    try:
        from . import _ccore as kernels  # noqa: F811
    except ImportError:  # extension not built
        kernels = _pycore

BACKEND = kernels.BACKEND
COMPLETED = kernels.COMPLETED
COLLAPSED = kernels.COLLAPSED
STEP_UNDERFLOW = kernels.STEP_UNDERFLOW
STEP_LIMIT = kernels.STEP_LIMIT
SINGULAR = kernels.SINGULAR
