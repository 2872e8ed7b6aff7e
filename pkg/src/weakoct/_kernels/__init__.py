"""Dense-kernel backend selection.

At import time the compiled extension is preferred; the pure-Python fallback
is used when the extension is unavailable or when WEAKOCT_PURE is set in the
environment.  :func:`select` rebinds the active backend at runtime (used by
the benchmark harness to time both); the library itself is otherwise
stateless.
"""

from __future__ import annotations

import os

from . import pure

try:
    from . import _speedups  # type: ignore[attr-defined]
except ImportError:
    _speedups = None

if os.environ.get("WEAKOCT_PURE") or _speedups is None:
    _active = pure
else:
    _active = _speedups


def available_backends() -> tuple[str, ...]:
    return ("pure", "compiled") if _speedups is not None else ("pure",)


def backend_name() -> str:
    return _active.BACKEND


def select(name: str) -> str:
    """Switch the active backend; returns the previously active name."""
    global _active
    previous = _active.BACKEND
    if name == "pure":
        _active = pure
    elif name == "compiled":
        if _speedups is None:
            raise ValueError("compiled kernels are not available")
        _active = _speedups
    else:
        raise ValueError(f"unknown kernel backend {name!r}")
    return previous


def close_cells(nums: list, dens: list, dim: int) -> bool:
    return _active.close_cells(nums, dens, dim)


def strengthen_cells(nums: list, dens: list, dim: int) -> None:
    _active.strengthen_cells(nums, dens, dim)


def assume_pot_cells(
    nums: list, dens: list, dim: int, x: int, y: int, cnum: int, cden: int
) -> None:
    _active.assume_pot_cells(nums, dens, dim, x, y, cnum, cden)
