"""Selects the coverage kernel backend once at import time.

The compiled extension is preferred when built; set DISP_KERNELS=pure to
force the Python fallback or DISP_KERNELS=compiled to fail loudly when
the extension is missing.
"""

import os

_choice = os.environ.get("DISP_KERNELS", "auto").strip().lower() or "auto"
if _choice in ("auto", "compiled"):
    try:
        from dispersion import _fastcover as _backend
    except ImportError:
        if _choice == "compiled":
            raise ImportError(
                "DISP_KERNELS=compiled but the dispersion._fastcover extension "
                "is not built"
            ) from None
        from dispersion import _purecover as _backend
elif _choice == "pure":
    from dispersion import _purecover as _backend
else:
    raise ValueError(f"unrecognized DISP_KERNELS value {_choice!r}")

BACKEND: str = _backend.backend_name()
greedy_cover = _backend.greedy_cover
best_cover = _backend.best_cover
