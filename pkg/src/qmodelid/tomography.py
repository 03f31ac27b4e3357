"""Linear-inversion gate-set tomography.

Only sequences of length 0 and 1 are used. With ``d^2`` fiducial states and
effects the Gram matrix ``g = M_out M_in`` and the per-map matrices
``G_j = M_out M_j M_in`` determine every map up to a similarity, so the
reconstruction lands in a "data gauge" where the fiducial states are
coordinate vectors. :func:`gauge_fix` moves it to a prior frame.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from ._config import tol
from .core import DensityMatrix, Effect, ModelRepresentation, QuantumMap
from .equivalence import select_independent
from .errors import IllConditioned, InvalidArgument, NotComplete
from .gauge import GaugeTransform, apply_gauge


@dataclass
class FiducialFrame:
    state_indices: tuple
    effect_indices: tuple
    m_in: np.ndarray   # columns: vectorized fiducial states
    m_out: np.ndarray  # rows: conjugated vectorized fiducial effects

    @property
    def g(self) -> np.ndarray:
        return self.m_out @ self.m_in


def _check_indices(indices, size: int, what: str) -> tuple:
    out = tuple(int(i) for i in indices)
    for i in out:
        if not 0 <= i < size:
            raise InvalidArgument(f"{what} index {i} out of range [0, {size})")
    if len(set(out)) != len(out):
        raise InvalidArgument(f"duplicate {what} indices: {out}")
    return out


def fiducial_frame(rep: ModelRepresentation, state_indices=None,
                   effect_indices=None) -> FiducialFrame:
    """Frame matrices for the chosen fiducials (default: first independent ones)."""
    d2 = rep.dim**2
    sv = rep.state_vectors()
    er = rep.effect_rows()
    si = select_independent(sv, d2) if state_indices is None else \
        _check_indices(state_indices, len(rep.states), "state")
    ei = select_independent(er, d2) if effect_indices is None else \
        _check_indices(effect_indices, len(rep.effects), "effect")
    rs = la.numerical_rank(sv[list(si)]) if len(si) else 0
    re_ = la.numerical_rank(er[list(ei)]) if len(ei) else 0
    if len(si) != d2 or len(ei) != d2 or rs < d2 or re_ < d2:
        raise NotComplete(f"fiducials must be {d2} independent states and effects "
                          f"(got state rank {rs} of {len(si)}, effect rank {re_} of {len(ei)})",
                          rank_states=rs, rank_effects=re_)
    return FiducialFrame(tuple(si), tuple(ei), sv[list(si)].T.copy(), er[list(ei)].copy())


@dataclass
class GstDataset:
    """Length-0 and length-1 probabilities arranged for linear inversion.

    ``g[k, i] = Tr(E_k rho_i)`` over fiducials; ``maps[j][1][k, i]`` adds
    ``M_j`` in between. Non-fiducial states keep a column of fiducial-effect
    probabilities and non-fiducial effects a row of fiducial-state ones,
    keyed by their position in the source representation.
    """

    dim: int
    g: np.ndarray
    maps: list  # of (label, G_j)
    state_indices: tuple
    effect_indices: tuple
    state_labels: list
    effect_labels: list
    extra_states: dict = field(default_factory=dict)   # index -> column
    extra_effects: dict = field(default_factory=dict)  # index -> row
    kind: str = "exact"
    shots: int | None = None
    seed: int | None = None

    @property
    def n_states(self) -> int:
        return len(self.state_labels)

    @property
    def n_effects(self) -> int:
        return len(self.effect_labels)

    def blocks(self):
        """All probability arrays in a fixed order (used for sampling streams)."""
        yield self.g
        for _, gj in self.maps:
            yield gj
        for idx in sorted(self.extra_states):
            yield self.extra_states[idx]
        for idx in sorted(self.extra_effects):
            yield self.extra_effects[idx]


def collect_dataset(rep: ModelRepresentation, state_indices=None,
                    effect_indices=None) -> GstDataset:
    """Exact dataset for the chosen fiducials."""
    frame = fiducial_frame(rep, state_indices, effect_indices)
    m_in, m_out = frame.m_in, frame.m_out
    sv, er = rep.state_vectors(), rep.effect_rows()
    extra_s = {i: np.real(m_out @ sv[i]) for i in range(len(rep.states))
               if i not in frame.state_indices}
    extra_e = {k: np.real(er[k] @ m_in) for k in range(len(rep.effects))
               if k not in frame.effect_indices}
    return GstDataset(
        dim=rep.dim,
        g=np.real(frame.g),
        maps=[(m.label, np.real(m_out @ m.superop @ m_in)) for m in rep.maps],
        state_indices=frame.state_indices,
        effect_indices=frame.effect_indices,
        state_labels=[s.label for s in rep.states],
        effect_labels=[e.label for e in rep.effects],
        extra_states=extra_s,
        extra_effects=extra_e,
    )


def sample_dataset(rep: ModelRepresentation, state_indices=None, effect_indices=None,
                   shots: int = 1000, seed: int = 0) -> GstDataset:
    """Binomial frequencies in place of every probability.

    Entry ``n`` of block ``b`` draws from ``default_rng([seed, b, n])``, so the
    result does not depend on evaluation order.
    """
    if int(shots) != shots or shots < 1:
        raise InvalidArgument("shots must be a positive integer")
    shots, seed = int(shots), int(seed)
    ds = collect_dataset(rep, state_indices, effect_indices)

    def draw(block: int, p: np.ndarray) -> np.ndarray:
        flat = np.clip(p.reshape(-1), 0.0, 1.0)
        out = np.empty_like(flat)
        for n, pn in enumerate(flat):
            out[n] = np.random.default_rng([seed, block, n]).binomial(shots, pn) / shots
        return out.reshape(p.shape)

    blocks = list(ds.blocks())
    sampled = [draw(b, p) for b, p in enumerate(blocks)]
    it = iter(sampled)
    ds.g = next(it)
    ds.maps = [(label, next(it)) for label, _ in ds.maps]
    ds.extra_states = {idx: next(it) for idx in sorted(ds.extra_states)}
    ds.extra_effects = {idx: next(it) for idx in sorted(ds.extra_effects)}
    ds.kind, ds.shots, ds.seed = "sampled", shots, seed
    return ds


def _gram_inverse(g: np.ndarray) -> np.ndarray:
    u, s, vh = np.linalg.svd(g)
    cond = float(s[0] / s[-1]) if s[-1] > 0 else float("inf")
    if cond > tol().max_condition:
        raise IllConditioned(f"Gram matrix condition number {cond:.3e} exceeds "
                             f"{tol().max_condition:.1e}; fiducials too collinear")
    return (vh.conj().T / s) @ u.conj().T


def lgst_reconstruct(ds: GstDataset, label: str = "lgst") -> ModelRepresentation:
    """Reconstruction in the data gauge.

    Fiducial states become coordinate vectors, fiducial effects the rows of
    g and maps ``g^{-1} G_j``. The result is related to the generating
    representation by the gauge whose matrix is that representation's
    ``M_in``, and is frequently non-physical.
    """
    d = ds.dim
    g_inv = _gram_inverse(np.asarray(ds.g, dtype=complex))
    eye = np.eye(d * d)
    states: list = [None] * ds.n_states
    effects: list = [None] * ds.n_effects
    for col, i in enumerate(ds.state_indices):
        states[i] = DensityMatrix(la.devectorize(eye[:, col]), ds.state_labels[i])
    for i, p in ds.extra_states.items():
        states[i] = DensityMatrix(la.devectorize(g_inv @ p), ds.state_labels[i])
    for row, k in enumerate(ds.effect_indices):
        effects[k] = Effect(la.devectorize(np.conj(ds.g[row])), ds.effect_labels[k])
    for k, p in ds.extra_effects.items():
        effects[k] = Effect(la.devectorize(np.conj(p)), ds.effect_labels[k])
    if any(s is None for s in states) or any(e is None for e in effects):
        raise InvalidArgument("dataset does not cover every state and effect index")
    maps = [QuantumMap(g_inv @ gj, lab) for lab, gj in ds.maps]
    return ModelRepresentation(d, states, maps, effects, label=label)


def data_gauge_frame(rep: ModelRepresentation, prior: FiducialFrame) -> FiducialFrame:
    """The frame of ``rep`` on the prior's fiducial indices."""
    return fiducial_frame(rep, prior.state_indices, prior.effect_indices)


def gauge_fix(rep: ModelRepresentation, prior: FiducialFrame) -> ModelRepresentation:
    """Apply ``T = M_in(rep) M_in(prior)^{-1}`` so the fiducial states equal the prior ones."""
    d2 = rep.dim**2
    if la.numerical_rank(prior.m_in) < d2 or la.numerical_rank(prior.m_out) < d2:
        raise NotComplete("prior frame is not complete")
    own = rep.state_vectors()[list(prior.state_indices)].T
    if la.numerical_rank(own) < d2:
        raise NotComplete("representation is not complete on the prior's fiducial indices")
    t = GaugeTransform(own @ np.linalg.inv(prior.m_in), "gauge_fix")
    return apply_gauge(rep, t).replace(label=f"{rep.label} (gauge-fixed)")
