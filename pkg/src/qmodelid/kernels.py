"""Kernel backend selection.

The compiled extension ``_ckernels`` is used when it imports; otherwise the
numpy fallback ``_pykernels`` is used. Set ``QMODELID_PURE_PYTHON=1`` to force
the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

_BACKENDS = {"python": _pykernels}

try:
    from . import _ckernels  # type: ignore[attr-defined]
except ImportError:  # extension not built
    _ckernels = None
else:
    _BACKENDS["cython"] = _ckernels

if os.environ.get("QMODELID_PURE_PYTHON", "") not in ("", "0") or _ckernels is None:
    BACKEND = "python"
else:
    BACKEND = "cython"


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def get_backend(name: str | None = None):
    """Return the kernel module for ``name`` (default: the active backend)."""
    return _BACKENDS[name or BACKEND]


def sequence_table(states, maps, effects, max_len: int, backend: str | None = None):
    return get_backend(backend).sequence_table(states, maps, effects, max_len)


def snd_scan(theta, angle_tol: float, backend: str | None = None) -> bool:
    return bool(get_backend(backend).snd_scan(theta, angle_tol))


sequence_count = _pykernels.sequence_count
