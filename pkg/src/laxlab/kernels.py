"""Backend selection for the hot equation-of-motion kernel.

The compiled Cython module ``laxlab._kernels`` is preferred; the pure-numpy
``laxlab._kernels_py`` is used when it is unavailable or when the
environment variable ``LAXLAB_PURE_PYTHON`` is set to a non-empty value
other than ``0``.
"""
import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    BACKENDS["cython"] = _compiled

_forced = os.environ.get("LAXLAB_PURE_PYTHON", "")
if _compiled is not None and _forced in ("", "0"):
    DEFAULT_BACKEND = "cython"
else:
    DEFAULT_BACKEND = "python"


def get_backend(name=None):
    """Return the kernel module called ``name`` (default: the import-time choice)."""
    if name is None:
        name = DEFAULT_BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"kernel backend {name!r} not available; have {sorted(BACKENDS)}"
        ) from None
