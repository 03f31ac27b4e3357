"""Central numeric policy.

Every tolerance used by the library is read from the active
:class:`Tolerances` instance, so callers (and the CLI) can override them
in one place with :func:`override`.
"""

from __future__ import annotations

import contextlib
import contextvars
import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    herm: float = 1e-9
    trace: float = 1e-9
    psd: float = 1e-9
    prob: float = 1e-9
    unitary: float = 1e-9
    # relative singular value threshold for rank decisions
    rank: float = 1e-8
    # absolute min-eigenvalue threshold for "singular" (determinant zero)
    singular: float = 1e-8
    # inclusive slack at the depolarizing window boundary
    boundary: float = 1e-12
    # g condition number gate in linear-inversion tomography
    max_condition: float = 1e8
    # angular tolerance (radians) for eigenphase comparisons
    angle: float = 1e-9
    # max number of probability-table entries
    table_cap: int = 2_000_000


_ACTIVE: contextvars.ContextVar[Tolerances] = contextvars.ContextVar(
    "qmodelid_tolerances", default=Tolerances()
)


def tol() -> Tolerances:
    """Return the active tolerance set."""
    return _ACTIVE.get()


def set_tolerances(**overrides) -> Tolerances:
    """Replace the active tolerances for the current context (no restore)."""
    new = dataclasses.replace(_ACTIVE.get(), **overrides)
    _ACTIVE.set(new)
    return new


@contextlib.contextmanager
def override(**overrides):
    """Temporarily override tolerances.

    >>> with override(psd=1e-6):
    ...     tol().psd
    1e-06
    """
    token = _ACTIVE.set(dataclasses.replace(_ACTIVE.get(), **overrides))
    try:
        yield _ACTIVE.get()
    finally:
        _ACTIVE.reset(token)
