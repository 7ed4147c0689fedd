"""Kernel backend selection.

The compiled extension (:mod:`jcashbf._core`) is preferred when it imported,
otherwise the pure-numpy reference (:mod:`jcashbf._kernels_np`) is used. Set
``JCASHBF_BACKEND=numpy`` to force the fallback or ``JCASHBF_BACKEND=compiled``
to make a missing extension a hard error. Both backends expose the same
functions and agree numerically; ``benchmarks/bench_kernels.py`` compares
their speed.
"""

import os

from . import _kernels_np

_requested = os.environ.get("JCASHBF_BACKEND", "").strip().lower()

if _requested in ("", "compiled"):
    try:
        from . import _core as kernels
        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        kernels = _kernels_np
        BACKEND = "numpy"
elif _requested in ("numpy", "python"):
    kernels = _kernels_np
    BACKEND = "numpy"
else:
    raise ImportError(f"unknown JCASHBF_BACKEND value {_requested!r}; "
                      "use 'compiled' or 'numpy'")
