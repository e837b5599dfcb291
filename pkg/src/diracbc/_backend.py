"""Select the compiled kernels if available, else the numpy fallback.

Set ``DIRACBC_PURE=1`` in the environment to force the fallback.
"""

import os

from . import _pykernels

if os.environ.get("DIRACBC_PURE", "") not in ("", "0"):
    kernels = _pykernels
else:
    try:
        from . import _ckernels as kernels
    except ImportError:
        kernels = _pykernels

BACKEND = kernels.BACKEND
