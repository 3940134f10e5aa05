"""Kernel backend selection.

The compiled extension (``qdkd._kernels_c``) is preferred when importable;
otherwise the pure-Python twin is used. Both produce identical results
(enforced by tests), so the choice affects speed only.

Set the environment variable ``QDKD_KERNELS`` to ``python``/``py`` or
``compiled``/``c`` to force a backend (``auto`` is the default). Requesting
``compiled`` when the extension is missing raises ImportError.
"""

import os

from . import _kernels_py

_ENV_VAR = "QDKD_KERNELS"

kernels = _kernels_py
backend_name = "python"


def _load(name):
    if name in ("python", "py", "pure"):
        return _kernels_py, "python"
    if name in ("compiled", "c", "cy"):
        from . import _kernels_c

        return _kernels_c, "compiled"
    raise ValueError(f"unknown kernel backend {name!r} (use 'python', 'compiled' or 'auto')")


def activate(name):
    """Switch the active kernel backend. Intended for benchmarks and tests."""
    global kernels, backend_name
    kernels, backend_name = _load(name)
    return kernels


def active_backend():
    """Name of the kernel backend in use: 'compiled' or 'python'."""
    return backend_name


_choice = os.environ.get(_ENV_VAR, "auto").strip().lower() or "auto"
if _choice == "auto":
    try:
        activate("compiled")
    except ImportError:
        activate("python")
else:
    activate(_choice)
