"""Backend selection for the evaluation kernel.

The compiled extension is used when it was built; setting
``HOPFDIAG_PURE_PYTHON=1`` forces the numpy fallback.
"""
from __future__ import annotations

import os

from ._kernels_py import contract_object

if os.environ.get("HOPFDIAG_PURE_PYTHON", "") not in ("", "0"):
    from ._kernels_py import contract
    BACKEND = "python"
else:
    try:
        from ._kernels import contract
        BACKEND = "cython"
    except ImportError:
        from ._kernels_py import contract
        BACKEND = "python"

__all__ = ["contract", "contract_object", "BACKEND"]
