"""Stepping-kernel backend selection.

The compiled Cython kernels (``_fastloops``) are used when the extension
was built; otherwise the pure-numpy fallback (``_pyloops``) is selected.
Set the environment variable ``FLOCKVI_PURE_PYTHON=1`` to force the
fallback, e.g. to benchmark one backend against the other.
"""

from __future__ import annotations

import os

from . import _pyloops

_forced_py = os.environ.get("FLOCKVI_PURE_PYTHON", "").strip() not in ("", "0")

if _forced_py:
    _active = _pyloops
else:
    try:
        from . import _fastloops as _active  # type: ignore[no-redef]
    except ImportError:
        _active = _pyloops


def kernels(backend: str | None = None):
    """Returns the kernel module for ``backend`` (default: the active one).

    Args:
        backend: None, "compiled", or "python".

    Raises:
        ValueError: unknown backend name, or "compiled" requested but the
            extension is not built.
    """
    if backend is None:
        return _active
    if backend == "python":
        return _pyloops
    if backend == "compiled":
        try:
            from . import _fastloops
        except ImportError as exc:
            raise ValueError("compiled backend requested but extension not built") from exc
        return _fastloops
    raise ValueError(f"unknown backend {backend!r} (expected 'compiled' or 'python')")


def backend_name() -> str:
    """Name of the backend selected at import time."""
    return "compiled" if _active.COMPILED else "python"


def available_backends() -> tuple[str, ...]:
    try:
        from . import _fastloops  # noqa: F401
    except ImportError:
        return ("python",)
    return ("compiled", "python")
