"""Kernel backend selection.

The compiled extension is preferred when present; otherwise the numpy
fallback is used.  Set ``SERIABENCH_KERNELS=python`` or ``=compiled`` to
force a backend (forcing ``compiled`` raises if the extension is missing).
"""

import os

from . import _pyref

_forced = os.environ.get("SERIABENCH_KERNELS", "").strip().lower()

if _forced == "python":
    impl = _pyref
elif _forced == "compiled":
    from . import _core as impl  # noqa: F401 - ImportError is the contract
else:
    try:
        from . import _core as impl
    except ImportError:
        impl = _pyref

BACKEND = impl.NAME


def get_backend(name=None):
    """Return a kernel backend module: the active one, or by name."""
    if name is None or name == BACKEND:
        return impl
    if name == "python":
        return _pyref
    if name == "compiled":
        from . import _core
        return _core
    raise ValueError(f"unknown kernel backend {name!r}")
