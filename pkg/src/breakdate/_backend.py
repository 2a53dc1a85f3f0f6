"""Kernel selection: the compiled module when importable, else numpy.

Set ``BREAKDATE_BACKEND=python`` to force the fallback.
"""

import os

if os.environ.get("BREAKDATE_BACKEND", "").lower() == "python":
    from . import _pykernels as kernels

    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels

        BACKEND = "compiled"
    except ImportError:  # extension not built
        from . import _pykernels as kernels

        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
