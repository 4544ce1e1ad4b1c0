"""Kernel selection: compiled extension when importable, numpy fallback otherwise.

Set ``LLOYDGREEN_BACKEND`` to ``python`` to force the fallback, or to
``cython`` to make a missing extension an import error.
"""

import os

_choice = os.environ.get("LLOYDGREEN_BACKEND", "auto").lower()

if _choice == "python":
    from . import _pykernels as kernels
else:
    try:
        from . import _ckernels as kernels
    except ImportError:
        if _choice == "cython":
            raise
        from . import _pykernels as kernels

BACKEND = kernels.NAME
