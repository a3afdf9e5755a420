"""Kernel backend selection.

Default: every kernel in ``_reference`` is compiled with ``numba.njit``.
Setting ``SPLITSIM_NO_NUMBA=1`` (or a failed numba import) selects the pure
NumPy/Python reference implementations instead. Both backends run the very
same source, so outputs are bit-identical.
"""
import os
from types import SimpleNamespace

from . import _reference

_KERNEL_NAMES = [
    "girth_bfs",
    "greedy_power_coloring",
    "check_power_coloring",
    "euler_orient",
    "condexp_weak_split",
    "condexp_strong_split",
    "condexp_shatter",
    "greedy_coloring",
    "greedy_mis",
]


def _build_reference() -> SimpleNamespace:
    return SimpleNamespace(**{name: getattr(_reference, name) for name in _KERNEL_NAMES})


def _build_numba() -> SimpleNamespace:
    import numba

    jit = numba.njit(cache=True, fastmath=False)
    return SimpleNamespace(**{name: jit(getattr(_reference, name)) for name in _KERNEL_NAMES})


def _select():
    if os.environ.get("SPLITSIM_NO_NUMBA", "").strip() not in ("", "0"):
        return _build_reference(), "numpy"
    try:
        ns = _build_numba()
    except ImportError:
        return _build_reference(), "numpy"
    return ns, "numba"


active, BACKEND = _select()
reference = _build_reference()


def backend_name() -> str:
    return BACKEND
