"""Distribution equivalence, gauge recovery and Wigner classification.

Two representations are distribution-equivalent when every probability
agrees. When both are complete (d^2 linearly independent states and
effects) they are related by a gauge, recovered here by linear inversion.
The gauge describes the same physics exactly when it is a unitary or
antiunitary transformation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import linalg as la
from ._config import tol
from .core import ModelRepresentation, probability_table
from .errors import (
    GramMismatch,
    InconsistentGauge,
    NotComplete,
    NotEquivalent,
    NotProjection,
    ShapeMismatch,
    SingularTransform,
)
from .gauge import GaugeTransform, apply_gauge, as_gauge, transpose_map

__all__ = [
    "EquivalenceResult", "WignerTransform", "WignerFit", "distributions_equal",
    "select_independent", "recover_gauge_gst", "classify_transform", "same_model",
    "recover_wigner_from_projections", "transpose_map",
]


@dataclass
class EquivalenceResult:
    equal: bool
    max_dev: float
    witness: tuple | None = None  # (i, seq, k) of the largest deviation

    def __bool__(self) -> bool:
        return self.equal

    def to_dict(self) -> dict:
        w = None
        if self.witness is not None:
            i, seq, k = self.witness
            w = {"i": i, "seq": list(seq), "k": k}
        return {"equal": self.equal, "max_dev": self.max_dev, "witness": w}


def distributions_equal(rep_a: ModelRepresentation, rep_b: ModelRepresentation,
                        max_len: int = 3, atol: float = 1e-9) -> EquivalenceResult:
    """Compare exact probability tables up to sequence length ``max_len``."""
    if rep_a.shape != rep_b.shape:
        raise ShapeMismatch(f"index sets differ: {rep_a.shape} vs {rep_b.shape}")
    ta = probability_table(rep_a, max_len)
    tb = probability_table(rep_b, max_len)
    diff = np.abs(ta.values - tb.values)
    if diff.size == 0:
        return EquivalenceResult(True, 0.0)
    worst = int(np.argmax(diff))
    max_dev = float(diff[worst])
    equal = max_dev <= atol
    return EquivalenceResult(equal, max_dev, ta.key(worst))


# ---------------------------------------------------------------------------
# Gauge recovery
# ---------------------------------------------------------------------------


def select_independent(vectors: np.ndarray, count: int) -> list[int]:
    """Greedy indices of rows of ``vectors`` that raise the numerical rank."""
    chosen: list[int] = []
    for idx in range(vectors.shape[0]):
        trial = vectors[chosen + [idx]]
        if la.numerical_rank(trial) == len(chosen) + 1:
            chosen.append(idx)
            if len(chosen) == count:
                break
    return chosen


def _frame(rep: ModelRepresentation):
    d2 = rep.dim**2
    sv = rep.state_vectors()
    er = rep.effect_rows()
    si = select_independent(sv, d2)
    ei = select_independent(er, d2)
    if len(si) < d2 or len(ei) < d2:
        raise NotComplete(
            f"representation is not complete: state rank {la.numerical_rank(sv)}, "
            f"effect rank {la.numerical_rank(er)} (need {d2})",
            rank_states=len(si), rank_effects=len(ei))
    return si, ei


def recover_gauge_gst(rep_a: ModelRepresentation, rep_b: ModelRepresentation,
                      atol: float = 1e-8) -> GaugeTransform:
    """Gauge T with ``apply_gauge(rep_a, T) == rep_b``.

    ``T = M_in M'_in^{-1} = M_out^{-1} M'_out`` where the frames use the same
    d^2 independent states/effects of both representations. Both formulas
    are computed and must agree.
    """
    if rep_a.shape != rep_b.shape or rep_a.dim != rep_b.dim:
        raise ShapeMismatch(f"index sets differ: {rep_a.shape} vs {rep_b.shape}")
    si, ei = _frame(rep_a)
    eq = distributions_equal(rep_a, rep_b, max_len=1)
    if not eq.equal:
        raise NotEquivalent(f"distributions differ (max deviation {eq.max_dev:.3e} "
                            f"at {eq.witness})")
    m_in = rep_a.state_vectors()[si].T
    m_out = rep_a.effect_rows()[ei]
    m_in_b = rep_b.state_vectors()[si].T
    m_out_b = rep_b.effect_rows()[ei]
    if la.numerical_rank(m_in_b) < m_in_b.shape[0] or la.numerical_rank(m_out_b) < m_out_b.shape[0]:
        raise NotComplete("second representation is not complete on the same indices")
    t_in = m_in @ np.linalg.inv(m_in_b)
    t_out = np.linalg.solve(m_out, m_out_b)
    gap = float(np.max(np.abs(t_in - t_out)))
    if gap > atol:
        raise InconsistentGauge(f"M_in M'_in^-1 and M_out^-1 M'_out differ by {gap:.3e}")
    t = GaugeTransform(t_in, "recovered")
    dev = apply_gauge(rep_a, t).max_deviation(rep_b)
    if dev > atol:
        raise InconsistentGauge(f"recovered gauge reproduces rep_b only to {dev:.3e}")
    return t


# ---------------------------------------------------------------------------
# Unitary / antiunitary classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WignerTransform:
    """``X -> u X u^dag``, followed by a transpose when ``antiunitary``."""

    u: np.ndarray
    antiunitary: bool = False

    def __post_init__(self):
        object.__setattr__(self, "u", la.check_unitary(self.u))

    @property
    def dim(self) -> int:
        return self.u.shape[0]

    @property
    def kind(self) -> str:
        return "antiunitary" if self.antiunitary else "unitary"

    @property
    def superop(self) -> np.ndarray:
        s = la.unitary_superop(self.u)
        if self.antiunitary:
            s = la.swap_operator(self.dim) @ s
        return s

    @property
    def label(self) -> str:
        return self.kind

    def gauge(self) -> GaugeTransform:
        return GaugeTransform(self.superop, self.kind)

    def inverse(self) -> "WignerTransform":
        if self.antiunitary:
            # inverse of X -> (u X u^dag)^T is X -> u^dag X^T u = (u^T X u^T^dag)^T
            return WignerTransform(self.u.T, True)
        return WignerTransform(self.u.conj().T, False)

    def __call__(self, mat) -> np.ndarray:
        m = self.u @ la.as_matrix(mat) @ self.u.conj().T
        return m.T if self.antiunitary else m


def _unitary_from_choi(choi: np.ndarray, d: int) -> np.ndarray | None:
    """u if the Choi matrix is that of a unitary conjugation, else None."""
    t = tol()
    if la.herm_deviation(choi) > 1e-8 * max(1.0, float(np.max(np.abs(choi)))):
        return None
    w, v = la.herm_eigh(choi)
    if w[0] < -1e-8 or abs(float(np.sum(w)) - d) > 1e-8:
        return None
    if int(np.sum(w > t.rank * w[-1])) != 1:
        return None
    u = np.sqrt(w[-1]) * la.kraus_from_choi_vector(v[:, -1], d)
    if la.unitarity_deviation(u) > 1e-8:
        return None
    return la.fix_global_phase(u)


def classify_transform(t) -> WignerTransform | None:
    """Return the Wigner transform equal to ``t``, or None if ``t`` is neither.

    Unitary iff the Choi matrix is PSD, rank one, trace d and its Kraus
    operator is unitary. Antiunitary iff ``W o T`` is unitary (W the
    transpose map), matching ``WignerTransform(u, True) = W o U``.
    """
    g = as_gauge(t)
    d = g.dim
    if not np.isfinite(la.condition_number(g.superop)) or la.numerical_rank(g.superop) < d * d:
        raise SingularTransform("classify_transform needs an invertible transform")
    u = _unitary_from_choi(g.choi, d)
    if u is not None:
        return WignerTransform(u, False)
    w_t = la.swap_operator(d) @ g.superop
    u = _unitary_from_choi(la.choi_from_superop(w_t), d)
    if u is not None:
        return WignerTransform(u, True)
    return None


def same_model(rep_a: ModelRepresentation, rep_b: ModelRepresentation) -> WignerTransform | None:
    """The Wigner transform S with ``apply_gauge(rep_a, S) == rep_b``, if any.

    Returns None when the relating gauge exists but is not unitary or
    antiunitary: the two representations then describe different models.
    """
    return classify_transform(recover_gauge_gst(rep_a, rep_b))


# ---------------------------------------------------------------------------
# Wigner reconstruction from projection images
# ---------------------------------------------------------------------------


@dataclass
class WignerFit:
    """Basis ``|a'>`` (columns), phases ``phi_{1,a}`` and the orientation sign kappa."""

    basis: np.ndarray
    phases: np.ndarray
    kappa: int

    @property
    def u(self) -> np.ndarray:
        """``u = sum_a e^{i phi_{1,a}} |a'><a|``."""
        return self.basis * np.exp(1j * self.phases)[None, :]

    def transform(self) -> WignerTransform:
        """``S = W^{(1 - kappa)/2} U^{-1}``; images are ``S^{-1}(pi) = U W^{(1-kappa)/2}(pi)``."""
        return WignerTransform(self.u.conj().T, self.kappa == -1)

    def image(self, pi: np.ndarray) -> np.ndarray:
        x = pi.T if self.kappa == -1 else pi
        return self.u @ x @ self.u.conj().T


def _check_projection(label, m: np.ndarray, atol: float) -> np.ndarray:
    m = la.as_matrix(m, label)
    if la.herm_deviation(m) > atol:
        raise NotProjection(f"image {label} is not Hermitian")
    if np.max(np.abs(m @ m - m)) > atol or abs(np.trace(m).real - 1) > atol:
        raise NotProjection(f"image {label} is not a rank-one projection")
    return la.hermitian_part(m)


def recover_wigner_from_projections(images: dict, dim: int, atol: float = 1e-8) -> WignerFit:
    """Reconstruct the Wigner transform mapping the projection set onto ``images``.

    ``images`` maps each label of :func:`qmodelid.uniqueness.projection_set_pi`
    to the image ``S^{-1}(pi)``. The basis ``|a'>`` comes from the images of
    ``pi_a``; the pair phases ``e^{i phi^x_{a,b}}`` and ``e^{i phi^y_{a,b}}``
    from the off-diagonal element of the two-level images; kappa from
    ``e^{i phi^y} = i kappa e^{i phi^x}``, which must be the same sign for
    every pair.
    """
    from .uniqueness import projection_set_pi

    pset = projection_set_pi(dim)
    missing = [lab for lab in pset.labels if lab not in images]
    if missing:
        raise GramMismatch(f"images missing for {missing}")
    imgs = {lab: _check_projection(lab, images[lab], atol) for lab in pset.labels}

    # overlap table must match that of the projection set
    labs = pset.labels
    g_ref = np.array([[np.trace(pset[a] @ pset[b]).real for b in labs] for a in labs])
    g_img = np.array([[np.trace(imgs[a] @ imgs[b]).real for b in labs] for a in labs])
    gap = float(np.max(np.abs(g_ref - g_img)))
    if gap > atol:
        raise GramMismatch(f"image overlaps differ from the projection set's by {gap:.3e}")

    basis = np.empty((dim, dim), dtype=complex)
    for a in range(dim):
        w, v = la.herm_eigh(imgs[f"pi_{a}"])
        basis[:, a] = v[:, -1]

    def pair_phase(kind, a, b):
        # <b'|P|a'> = e^{i phi}/2 for P = |psi><psi|, psi = (|a'> + e^{i phi}|b'>)/sqrt2
        z = 2 * np.vdot(basis[:, b], imgs[f"pi{kind}_{a}_{b}"] @ basis[:, a])
        if abs(abs(z) - 1) > atol * 10:
            raise GramMismatch(f"pair image {kind}_{a}_{b} not an equal superposition")
        return z / abs(z)

    kappa = None
    for a, b in itertools.combinations(range(dim), 2):
        ratio = pair_phase("y", a, b) / (1j * pair_phase("x", a, b))
        k_ab = int(np.sign(ratio.real))
        if abs(ratio - k_ab) > 1e-6:
            raise GramMismatch(f"pair ({a},{b}) phase ratio {ratio} is not +-1")
        if kappa is None:
            kappa = k_ab
        elif k_ab != kappa:
            raise GramMismatch(f"orientation sign differs between pairs (0,1) and ({a},{b})")

    phases = np.zeros(dim)
    for a in range(1, dim):
        phases[a] = np.angle(pair_phase("x", 0, a))
    fit = WignerFit(basis, phases, kappa)

    worst = max(float(np.max(np.abs(fit.image(pset[lab]) - imgs[lab]))) for lab in labs)
    if worst > atol:
        raise GramMismatch(f"assembled transform misses the images by {worst:.3e}")
    return fit
