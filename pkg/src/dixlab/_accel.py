"""Optional numba acceleration.

Hot loops in :mod:`dixlab.kernels` compile with numba when it imports
cleanly and the ``DIXLAB_NO_NUMBA`` environment variable is unset (or
``"0"``).  Otherwise ``njit`` degrades to a no-op decorator and the
pure-numpy fallbacks take over.  The flag is read once at import time;
flip it before importing dixlab, not after.

Kernels are compiled serially (no prange), so results do not depend on
a thread budget.
"""

import os

_flag = os.environ.get("DIXLAB_NO_NUMBA", "").strip()
NUMBA_DISABLED = _flag not in ("", "0")

try:
    if NUMBA_DISABLED:
        raise ImportError("numba disabled by DIXLAB_NO_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via the env flag
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap
