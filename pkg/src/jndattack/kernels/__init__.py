"""Backend selection for the hot numeric kernels.

The compiled Cython extension is preferred; the NumPy fallback is
selected automatically when the extension was not built, or explicitly
by setting the environment variable ``JNDATTACK_PURE`` to a non-empty
value before import.
"""

import os

if os.environ.get("JNDATTACK_PURE"):
    from ._fallback import block_transform, conv2d

    BACKEND = "numpy"
else:
    try:
        from ._core import block_transform, conv2d

        BACKEND = "compiled"
    except ImportError:
        from ._fallback import block_transform, conv2d

        BACKEND = "numpy"

__all__ = ["conv2d", "block_transform", "BACKEND"]
