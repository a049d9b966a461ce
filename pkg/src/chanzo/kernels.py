"""Kernel backend selection.

Imports the compiled extension when available, otherwise falls back to the
numpy reference implementations. Override with CHANZO_BACKEND=compiled|numpy
(requesting `compiled` when the extension is missing raises at import).
"""

import os

from . import _kernels_np

_requested = os.environ.get("CHANZO_BACKEND", "auto").lower()

if _requested not in ("auto", "compiled", "numpy"):
    raise RuntimeError(f"CHANZO_BACKEND must be auto, compiled or numpy, got {_requested!r}")

_impl = None
if _requested in ("auto", "compiled"):
    try:
        from . import _fast as _impl  # type: ignore[no-redef]
    except ImportError:
        if _requested == "compiled":
            raise RuntimeError("CHANZO_BACKEND=compiled but the chanzo._fast extension is not built")
        _impl = None
if _impl is None:
    _impl = _kernels_np

BACKEND = "compiled" if _impl is not _kernels_np else "numpy"

ris_response = _impl.ris_response
ris_response_batch = _impl.ris_response_batch
ma_response = _impl.ma_response
ma_response_batch = _impl.ma_response_batch
csm_tally = _impl.csm_tally


def backend_name():
    return BACKEND
