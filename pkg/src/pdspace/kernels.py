"""Backend selection for the transportation kernel.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``PDSPACE_PURE_PYTHON`` is set to a non-empty value
other than ``0``, the pure-Python implementation is used. Both return the
same flows on the same input.
"""

import os

from . import _transport_py

if os.environ.get("PDSPACE_PURE_PYTHON", "") not in ("", "0"):
    transport = _transport_py.transport
    BACKEND = "python"
else:
    try:
        from ._transport import transport
    except ImportError:
        transport = _transport_py.transport
        BACKEND = "python"
    else:
        BACKEND = "cython"

BACKENDS = {"python": _transport_py.transport}
try:
    from ._transport import transport as _compiled
except ImportError:
    pass
else:
    BACKENDS["cython"] = _compiled

__all__ = ["transport", "BACKEND", "BACKENDS"]
