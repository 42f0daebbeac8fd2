"""Pick the compiled DBM kernels when available.

Set ``TBISIM_PURE=1`` to force the pure-Python implementation.
"""

import os

from . import _dbm_py

INF = _dbm_py.INF
LE_ZERO = _dbm_py.LE_ZERO

backend = _dbm_py
BACKEND_NAME = "python"

if os.environ.get("TBISIM_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _dbm_core
    except ImportError:  # pragma: no cover - depends on the build
        pass
    else:
        backend = _dbm_core
        BACKEND_NAME = "cython"

close = backend.close
tighten = backend.tighten
normalize = backend.normalize
includes = backend.includes
add = backend.add
