"""Gauge transformations and the depolarizing family.

A gauge T acts on a representation as

    states  rho -> T^{-1}(rho)
    maps    M   -> T^{-1} M T
    effects E   -> T^*(E)

which leaves every probability unchanged. Gauges are stored as
superoperators so all of this is plain matrix algebra.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import linalg as la
from ._config import tol
from .core import DensityMatrix, Effect, ModelRepresentation, QuantumMap, check_physical
from .errors import (
    DimensionMismatch,
    InvalidArgument,
    NotHPTP,
    NotPhysical,
    SingularTransform,
)


@dataclass(frozen=True, eq=False)
class GaugeTransform:
    superop: np.ndarray
    label: str = ""

    def __post_init__(self):
        s = la.as_matrix(self.superop, "gauge superoperator")
        la.dim_of_superop(s)
        object.__setattr__(self, "superop", s)

    @property
    def dim(self) -> int:
        return la.dim_of_superop(self.superop)

    @cached_property
    def inverse_superop(self) -> np.ndarray:
        s = self.superop
        cond = la.condition_number(s)
        if not np.isfinite(cond) or cond > 1e13:
            raise SingularTransform(f"gauge {self.label!r} is singular (cond {cond:.3e})")
        inv = np.linalg.inv(s)
        resid = float(np.max(np.abs(s @ inv - np.eye(s.shape[0]))))
        if resid > 1e-10:
            raise SingularTransform(
                f"gauge {self.label!r} inverse failed verification (residual {resid:.3e})")
        return inv

    def inverse(self) -> "GaugeTransform":
        return GaugeTransform(self.inverse_superop, f"inv({self.label})")

    def dual(self) -> "GaugeTransform":
        return dual(self)

    def compose(self, other: "GaugeTransform") -> "GaugeTransform":
        """``self`` after ``other``."""
        return GaugeTransform(self.superop @ other.superop, f"{self.label}*{other.label}")

    def __call__(self, mat) -> np.ndarray:
        return la.devectorize(self.superop @ la.vectorize(la.as_matrix(mat)))

    def as_map(self) -> QuantumMap:
        return QuantumMap(self.superop, self.label)

    @cached_property
    def choi(self) -> np.ndarray:
        return la.choi_from_superop(self.superop)

    def __eq__(self, other):
        return isinstance(other, GaugeTransform) and np.array_equal(self.superop, other.superop)

    __hash__ = None


def as_gauge(t) -> GaugeTransform:
    if isinstance(t, GaugeTransform):
        return t
    if hasattr(t, "superop"):
        return GaugeTransform(t.superop, getattr(t, "label", ""))
    return GaugeTransform(t)


def identity_gauge(dim: int) -> GaugeTransform:
    return GaugeTransform(np.eye(dim * dim, dtype=complex), "id")


def unitary_gauge(u, label: str = "U") -> GaugeTransform:
    """``X -> u X u^dag``."""
    return GaugeTransform(la.unitary_superop(la.check_unitary(u)), label)


def transpose_map(dim: int) -> GaugeTransform:
    """``X -> X^T``; its superoperator is the SWAP permutation."""
    return GaugeTransform(la.swap_operator(dim), "W")


def antiunitary_gauge(u, label: str = "WU") -> GaugeTransform:
    """``X -> (u X u^dag)^T``, the transpose map after a unitary conjugation."""
    m = la.check_unitary(u)
    return GaugeTransform(la.swap_operator(m.shape[0]) @ la.unitary_superop(m), label)


def random_gauge(dim: int, rng: np.random.Generator,
                 near_identity: float | None = None) -> GaugeTransform:
    """Random invertible complex gauge.

    By default a complex Ginibre d^2 x d^2 matrix. With ``near_identity=s``
    the gauge is ``1 + s G`` with G normalised to unit-scale spectrum.
    """
    n = dim * dim
    g = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    if near_identity is not None:
        g = np.eye(n) + near_identity * g / np.sqrt(n)
    return GaugeTransform(g, "random")


def dual(t) -> GaugeTransform:
    """Hilbert-Schmidt adjoint: ``Tr[T*(A)^dag B] = Tr[A^dag T(B)]``.

    Its superoperator is the conjugate transpose of T's. For
    Hermitian-preserving T this coincides with ``Tr[T*(A) B] = Tr[A T(B)]``.
    """
    g = as_gauge(t)
    return GaugeTransform(g.superop.conj().T, f"dual({g.label})")


def apply_gauge(rep: ModelRepresentation, t) -> ModelRepresentation:
    """The transformed triple ``({T^-1(rho)}, {T^-1 M T}, {T^*(E)})``.

    The result may be non-physical; inspect it with
    :func:`qmodelid.core.check_physical`.
    """
    g = as_gauge(t)
    if g.dim != rep.dim:
        raise DimensionMismatch(f"gauge acts on d={g.dim}, representation has d={rep.dim}")
    s = g.superop
    s_inv = g.inverse_superop
    s_dag = s.conj().T
    states = [DensityMatrix(la.devectorize(s_inv @ la.vectorize(x.mat)), x.label)
              for x in rep.states]
    maps = [QuantumMap(s_inv @ m.superop @ s, m.label) for m in rep.maps]
    effects = [Effect(la.devectorize(s_dag @ la.vectorize(e.mat)), e.label)
               for e in rep.effects]
    return rep.replace(states=states, maps=maps, effects=effects)


# ---------------------------------------------------------------------------
# Depolarizing family
# ---------------------------------------------------------------------------


def depolarizing_superop(F: float, dim: int) -> np.ndarray:
    v = np.eye(dim).reshape(-1)
    return F * np.eye(dim * dim) + (1 - F) / dim * np.outer(v, v)


def depolarizing(F: float, dim: int, *, as_gauge: bool = True) -> GaugeTransform:
    """``D_F(rho) = F rho + (1 - F) Tr(rho) 1/d``.

    ``D_F D_F' = D_{F F'}``, so the inverse is ``D_{1/F}``; F = 0 is rejected
    when the result is meant as a gauge. Use ``.as_map()`` for the channel
    view (CPTP for 0 <= F <= 1).
    """
    F = float(F)
    if not np.isfinite(F):
        raise InvalidArgument("F must be finite")
    if as_gauge and F == 0:
        raise InvalidArgument("D_0 is not invertible and cannot be a gauge")
    return GaugeTransform(depolarizing_superop(F, dim).astype(complex), f"D({F:g})")


def _min_eigs(rep: ModelRepresentation) -> tuple[float, float]:
    lam_s = min((float(la.herm_eigvalsh(s.mat)[0]) for s in rep.states), default=np.inf)
    lam_c = min((float(la.herm_eigvalsh(m.choi)[0]) for m in rep.maps), default=np.inf)
    return lam_s, lam_c


def lambda_min(rep: ModelRepresentation) -> float:
    """Smallest eigenvalue over all states and all Choi matrices."""
    return min(_min_eigs(rep))


def max_depolarizing_F(rep: ModelRepresentation) -> float:
    """Largest F with ``D_{1/F}(rep)`` still physical: ``(1 - d lambda_min)^{-1}``.

    Returns ``inf`` when ``lambda_min >= 1/d``. Values of ``lambda_min`` within
    the boundary tolerance of zero count as zero, giving exactly 1.
    """
    report = check_physical(rep)
    if not report.passed:
        raise NotPhysical("max_depolarizing_F requires a physical representation: "
                          + "; ".join(f"{e.kind} {e.index}: {', '.join(e.reasons)}"
                                      for e in report.failures))
    d = rep.dim
    lam = lambda_min(rep)
    eps = tol().boundary
    if lam >= 1.0 / d - eps:
        return float("inf")
    if lam <= eps:
        return 1.0
    return 1.0 / (1.0 - d * lam)


# ---------------------------------------------------------------------------
# Hermitian- and trace-preserving gauges
# ---------------------------------------------------------------------------


def hptp_diagnostics(t) -> dict:
    g = as_gauge(t)
    c = g.choi
    return {
        "choi_herm_dev": la.herm_deviation(c),
        "tp_dev": float(np.max(np.abs(la.partial_trace_second(c) - np.eye(g.dim)))),
    }


def is_hptp(t) -> bool:
    """Choi Hermitian and ``Tr_2(C) = 1``, both within tolerance."""
    diag = hptp_diagnostics(t)
    t_ = tol()
    return diag["choi_herm_dev"] <= t_.herm and diag["tp_dev"] <= t_.trace


@dataclass
class EtaKrausDecomposition:
    """``T(X) = sum_l eta_l F_l X F_l^dag`` with real weights eta_l."""

    terms: list  # of (eta: float, F: ndarray)

    @property
    def etas(self) -> np.ndarray:
        return np.array([eta for eta, _ in self.terms])

    @property
    def dim(self) -> int:
        return self.terms[0][1].shape[0]

    def superop(self) -> np.ndarray:
        return sum(eta * np.kron(f, f.conj()) for eta, f in self.terms)

    def normalization(self) -> np.ndarray:
        """``sum_l eta_l F_l^dag F_l`` (identity for trace-preserving T)."""
        return sum(eta * f.conj().T @ f for eta, f in self.terms)


def eta_kraus(t) -> EtaKrausDecomposition:
    """Eigendecomposition of the Choi matrix read back as a weighted Kraus form."""
    g = as_gauge(t)
    if not is_hptp(g):
        raise NotHPTP(f"gauge {g.label!r} is not Hermitian- and trace-preserving: "
                      f"{hptp_diagnostics(g)}")
    w, v = la.herm_eigh(g.choi)
    cut = tol().rank * max(np.max(np.abs(w)), 1e-300)
    terms = [(float(w[i]), la.kraus_from_choi_vector(v[:, i], g.dim))
             for i in range(w.size) if abs(w[i]) > cut]
    return EtaKrausDecomposition(terms)
