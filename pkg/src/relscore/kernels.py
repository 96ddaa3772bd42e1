"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``RELSCORE_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if not os.environ.get("RELSCORE_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"


def get(name: str = BACKEND):
    """Kernel module by backend name (``"cython"`` or ``"python"``)."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels  # type: ignore[attr-defined]

        return _kernels
    raise ValueError(f"unknown kernel backend {name!r}")


def available() -> list[str]:
    out = ["python"]
    try:
        from . import _kernels  # noqa: F401

        out.append("cython")
    except ImportError:
        pass
    return out


preorder = _impl.preorder
build_virtual = _impl.build_virtual
evaluate = _impl.evaluate
