"""When does data pin down the physics?

* A nontrivial model whose states and Choi matrices are all full rank is
  never unique: a depolarizing gauge ``D_{1/F}`` with F slightly above 1
  yields a physical, distribution-equivalent representation with different
  spectra (:func:`necessary_condition`, :func:`counterexample`).
* A model containing the projection set Pi among both its states and its
  effects is unique (:func:`contains_projection_set`).
* A model able to realise every unitary map, with one singular state and one
  singular effect, is unique (:func:`unitary_generation_check`).

Supporting tools for the unitary case: super-non-degeneracy of unitaries,
dense super-non-degenerate approximants, spectral classification of
unitary pairs, orbit completeness and depolarizing-commutant fitting.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import kernels
from . import linalg as la
from ._config import tol
from .core import ModelRepresentation, QuantumMap, check_physical, is_trivial, map_tp_deviation
from .errors import (
    FOutOfWindow,
    InvalidArgument,
    NotPhysical,
    NumericalError,
    TrivialMatrix,
    TrivialModel,
)
from .gauge import apply_gauge, depolarizing, depolarizing_superop, lambda_min, max_depolarizing_F

TRIVIAL = "Trivial"
NOT_UNIQUE = "NotUnique"
NECESSARY_HOLDS = "NecessaryConditionHolds"
UNIQUE_PROJECTIONS = "UniqueByTheorem2"
UNIQUE_UNITARIES = "UniqueByTheorem3"


@dataclass
class UniquenessVerdict:
    status: str
    diagnostics: dict = field(default_factory=dict)
    counterexample: ModelRepresentation | None = None
    F: float | None = None


def _require_physical(rep: ModelRepresentation, what: str):
    report = check_physical(rep)
    if not report.passed:
        detail = "; ".join(f"{e.kind} {e.index} ({e.label}): {', '.join(e.reasons)}"
                           for e in report.failures)
        raise NotPhysical(f"{what} requires a physical representation: {detail}")


# ---------------------------------------------------------------------------
# Necessary condition and counterexamples
# ---------------------------------------------------------------------------


def singular_elements(rep: ModelRepresentation) -> list[str]:
    """Labels of states and Choi matrices with min eigenvalue at or below the singular threshold."""
    cut = tol().singular
    out = [f"state {i} ({s.label})" for i, s in enumerate(rep.states)
           if la.herm_eigvalsh(s.mat)[0] <= cut]
    out += [f"map {j} ({m.label})" for j, m in enumerate(rep.maps)
            if la.herm_eigvalsh(m.choi)[0] <= cut]
    return out


def determinant_product(rep: ModelRepresentation) -> float:
    """Product of det(rho_i) and det(C_j); informational only (underflows easily)."""
    prod = 1.0
    for s in rep.states:
        prod *= float(np.prod(la.herm_eigvalsh(s.mat)))
    for m in rep.maps:
        prod *= float(np.prod(la.herm_eigvalsh(m.choi)))
    return prod


def default_counterexample_F(F_max: float) -> float:
    """Midpoint of (1, F_max), capped at 2."""
    if not np.isfinite(F_max):
        return 2.0
    return min((1.0 + F_max) / 2.0, 2.0)


def counterexample(rep: ModelRepresentation, F: float) -> ModelRepresentation:
    """``apply_gauge(rep, D_{1/F})``: physical and distribution-equivalent for 1 <= F <= F_max."""
    if is_trivial(rep):
        raise TrivialModel("trivial models admit no spectral counterexample")
    F_max = max_depolarizing_F(rep)
    F = float(F)
    if not (F >= 1.0 and F <= F_max + tol().boundary):
        raise FOutOfWindow(f"F = {F!r} outside the physical window [1, {F_max!r}]")
    if F == 1.0:
        return rep
    out = apply_gauge(rep, depolarizing(1.0 / F, rep.dim))
    return out.replace(label=f"{rep.label} / D(1/{F:g})")


def window_spectra(rep: ModelRepresentation, F: float) -> dict:
    """Min eigenvalues of ``D_F(rho_i)`` and of the Choi matrices of ``D_F M_j``.

    These are the quantities bounded by the window: each equals
    ``F lambda + (1 - F)/d`` and is non-negative for all elements exactly when
    ``F <= F_max``. (The similarity ``D_F M_j D_{1/F}`` can stay CP somewhat
    beyond F_max, so the window is sufficient, and tight for the states and
    the post-composed maps.)
    """
    g = depolarizing(F, rep.dim, as_gauge=False)
    states = [float(la.herm_eigvalsh(g(s.mat))[0]) for s in rep.states]
    maps = [float(la.herm_eigvalsh(la.choi_from_superop(g.superop @ m.superop))[0])
            for m in rep.maps]
    return {"states": states, "maps": maps, "min": min(states + maps, default=np.inf)}


def _spectra(rep: ModelRepresentation):
    eye = np.eye(rep.dim)
    for i, s in enumerate(rep.states):
        yield "state", i, s.label, la.herm_eigvalsh(s.mat)
    for j, m in enumerate(rep.maps):
        yield "map", j, m.label, la.herm_eigvalsh(m(eye))
    for k, e in enumerate(rep.effects):
        yield "effect", k, e.label, la.herm_eigvalsh(e.mat)


def spectral_certificate(rep: ModelRepresentation, other: ModelRepresentation, F: float) -> dict | None:
    """Find an element whose spectrum moved by at least the guaranteed amount.

    States and unit images ``M(1)`` move their top eigenvalue by at least
    ``(F - 1) * spread / d``; effects by ``(1 - 1/F) * spread / d``. Unitary
    and antiunitary transformations preserve all these spectra, so any hit
    certifies that the two representations are different models.
    """
    d = rep.dim
    best = None
    for (kind, idx, label, w), (_, _, _, w2) in zip(_spectra(rep), _spectra(other)):
        spread = float(w[-1] - w[0])
        factor = (1 - 1 / F) if kind == "effect" else (F - 1)
        bound = factor * spread / d
        gap = abs(float(w2[-1] - w[-1]))
        if bound > 1e-12 and gap >= bound * (1 - 1e-9):
            if best is None or gap > best["gap"]:
                best = {"kind": kind, "index": idx, "label": label, "gap": gap, "bound": bound}
    return best


def necessary_condition(rep: ModelRepresentation) -> UniquenessVerdict:
    """Apply the full-rank obstruction.

    Trivial models are reported as such. If every state and Choi matrix is
    full rank the model is not unique and a counterexample at
    ``F = (1 + F_max)/2`` (capped at 2) is attached. Otherwise the necessary
    condition holds, which says nothing about sufficiency.
    """
    _require_physical(rep, "necessary_condition")
    lam = lambda_min(rep)
    diag = {"lambda_min": lam, "det_product": determinant_product(rep),
            "singular_elements": singular_elements(rep)}
    if is_trivial(rep):
        return UniquenessVerdict(TRIVIAL, diag)
    if lam <= tol().singular:
        return UniquenessVerdict(NECESSARY_HOLDS, diag)
    F_max = max_depolarizing_F(rep)
    F = default_counterexample_F(F_max)
    ce = counterexample(rep, F)
    diag["F_max"] = F_max
    diag["certificate"] = spectral_certificate(rep, ce, F)
    return UniquenessVerdict(NOT_UNIQUE, diag, counterexample=ce, F=F)


# ---------------------------------------------------------------------------
# Projection sets
# ---------------------------------------------------------------------------


@dataclass
class ProjectionSet:
    dim: int
    projections: dict  # label -> d x d matrix, in canonical order

    @property
    def labels(self) -> list[str]:
        return list(self.projections)

    def __getitem__(self, label: str) -> np.ndarray:
        return self.projections[label]

    def __len__(self) -> int:
        return len(self.projections)

    def __iter__(self):
        return iter(self.projections.items())

    def matrices(self) -> list[np.ndarray]:
        return list(self.projections.values())


def _proj(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def _ket(d, coeffs: dict) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    for idx, c in coeffs.items():
        v[idx] = c
    return v


def projection_set_qpt(dim: int) -> ProjectionSet:
    """``pi_a``, ``pi^x_{a,b}``, ``pi^y_{a,b}``: d^2 projections spanning the Hermitian matrices."""
    if dim < 2:
        raise InvalidArgument("dim must be >= 2")
    out = {f"pi_{a}": _proj(_ket(dim, {a: 1})) for a in range(dim)}
    for a, b in itertools.combinations(range(dim), 2):
        out[f"pix_{a}_{b}"] = _proj(_ket(dim, {a: 1, b: 1}))
        out[f"piy_{a}_{b}"] = _proj(_ket(dim, {a: 1, b: 1j}))
    return ProjectionSet(dim, out)


def projection_set_pi(dim: int) -> ProjectionSet:
    """The QPT projections plus ``pi^x_{a,b,c}``, ``pi^y_{a,b,c}``, ``pi^y_{c,b,a}`` for a < b < c."""
    pset = projection_set_qpt(dim)
    out = dict(pset.projections)
    for a, b, c in itertools.combinations(range(dim), 3):
        out[f"pix_{a}_{b}_{c}"] = _proj(_ket(dim, {a: 1, b: 1, c: 1}))
        out[f"piy_{a}_{b}_{c}"] = _proj(_ket(dim, {a: 1, b: 1j, c: 1j}))
        out[f"piy_{c}_{b}_{a}"] = _proj(_ket(dim, {c: 1, b: 1j, a: 1j}))
    return ProjectionSet(dim, out)


@dataclass
class CriterionResult:
    holds: bool
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.holds


def _match(pi: np.ndarray, mats, atol: float) -> int | None:
    for idx, m in enumerate(mats):
        if np.max(np.abs(m - pi)) <= atol:
            return idx
    return None


def contains_projection_set(rep: ModelRepresentation, atol: float = 1e-9) -> CriterionResult:
    """Every element of Pi(d) appears (exactly, to ``atol``) among the states and the effects.

    Membership is literal: no gauge search. Passing means the model is
    unique. Approximate membership is reported in the details but carries no
    uniqueness claim beyond the stated tolerance.
    """
    _require_physical(rep, "contains_projection_set")
    pset = projection_set_pi(rep.dim)
    states = [s.mat for s in rep.states]
    effects = [e.mat for e in rep.effects]
    matched, missing = {}, []
    for label, pi in pset:
        si = _match(pi, states, atol)
        ei = _match(pi, effects, atol)
        if si is None or ei is None:
            missing.append(label)
        else:
            matched[label] = (si, ei)
    return CriterionResult(not missing, {"matched": matched, "missing": missing})


# ---------------------------------------------------------------------------
# Unitary maps
# ---------------------------------------------------------------------------


def is_unitary_map(qmap: QuantumMap) -> np.ndarray | None:
    """u (phase-fixed) if ``qmap`` is CPTP with ``|det(superop) - 1| <= 1e-8``, else None."""
    t = tol()
    c = qmap.choi
    if la.herm_deviation(c) > t.herm or map_tp_deviation(qmap) > t.trace:
        return None
    w, v = la.herm_eigh(c)
    if w[0] < -t.psd:
        return None
    if abs(np.linalg.det(qmap.superop) - 1) > 1e-8:
        return None
    u = np.sqrt(w[-1]) * la.kraus_from_choi_vector(v[:, -1], qmap.dim)
    return la.fix_global_phase(u)


def unitary_generation_check(rep: ModelRepresentation) -> CriterionResult:
    """Uniqueness from unitary generation plus a singular state and a singular effect.

    Requires (a) the ``unitary_complete`` declaration, with every map not
    listed in ``extra_maps`` verified unitary; (b) a state and (c) an effect
    with min eigenvalue at or below the singular threshold. Coverage of all
    unitaries is declared, not verified.
    """
    _require_physical(rep, "unitary_generation_check")
    cut = tol().singular
    non_unitary = [j for j, m in enumerate(rep.maps)
                   if j not in rep.extra_maps and is_unitary_map(m) is None]
    sing_states = [i for i, s in enumerate(rep.states) if la.herm_eigvalsh(s.mat)[0] <= cut]
    sing_effects = [k for k, e in enumerate(rep.effects) if la.herm_eigvalsh(e.mat)[0] <= cut]
    holds = bool(rep.unitary_complete and not non_unitary and sing_states and sing_effects)
    return CriterionResult(holds, {
        "unitary_complete": rep.unitary_complete,
        "non_unitary_maps": non_unitary,
        "singular_states": sing_states,
        "singular_effects": sing_effects,
    })


def assess_uniqueness(rep: ModelRepresentation) -> UniquenessVerdict:
    """Dispatch: trivial, then the two sufficient conditions, then the necessary one."""
    _require_physical(rep, "assess_uniqueness")
    if is_trivial(rep):
        return UniquenessVerdict(TRIVIAL, {"lambda_min": lambda_min(rep)})
    pi = contains_projection_set(rep)
    if pi:
        return UniquenessVerdict(UNIQUE_PROJECTIONS, {"matched": sorted(pi.details["matched"])})
    gen = unitary_generation_check(rep)
    if gen:
        return UniquenessVerdict(UNIQUE_UNITARIES, gen.details)
    return necessary_condition(rep)


# ---------------------------------------------------------------------------
# Super-non-degeneracy
# ---------------------------------------------------------------------------


def super_non_degenerate(u) -> bool:
    """No product ``e^{i(t_c - t_d)} e^{i(t_e - t_f)}`` (c!=d, e!=f, c!=f, d!=e) is an eigenvalue ratio.

    Brute force over all index tuples, angular tolerance ``tol().angle``.
    """
    m = la.check_unitary(u)
    return kernels.snd_scan(la.eigenphases(m), tol().angle)


def snd_approximant(u, N: int, offset_base: int = 4) -> np.ndarray:
    """Nearby super-non-degenerate unitary with the same eigenbasis.

    Each eigenphase is truncated to N decimal digits of a full turn and
    offset by ``offset_base^{-a} 10^{-3N}`` (a = 1..d). With base 4 the
    offsets can never cancel in the defining relation, so the output is
    super-non-degenerate whenever the offsets exceed the angular tolerance
    (N = 1, 2 for d <= 5). Base 2 offsets can cancel once d >= 3.
    """
    m = la.check_unitary(u)
    if int(N) < 1:
        raise InvalidArgument("N must be >= 1")
    if int(offset_base) < 2:
        raise InvalidArgument("offset_base must be >= 2")
    N = int(N)
    t, z = scipy.linalg.schur(m, output="complex")
    theta = np.mod(np.angle(np.diag(t)), 2 * np.pi)
    a = np.arange(1, m.shape[0] + 1)
    turns = np.floor(10.0**N * theta / (2 * np.pi)) * 10.0**-N \
        + float(offset_base) ** -a * 10.0 ** (-3 * N)
    return (z * np.exp(2j * np.pi * turns)[None, :]) @ z.conj().T


@dataclass
class UnitaryRelation:
    kind: str  # "unitary" | "antiunitary" | "unrelated"
    omega: float | None = None
    guaranteed: bool = False  # True when an input is super-non-degenerate


def _multiset_match(x: np.ndarray, y: np.ndarray, atol: float) -> bool:
    free = list(range(y.size))
    for val in x:
        dist = la.circular_distance(val, y[free])
        pos = int(np.argmin(dist)) if free else -1
        if pos < 0 or dist[pos] > atol:
            return False
        free.pop(pos)
    return True


def classify_unitary_relation(u_a, u_b, atol: float = 1e-8) -> UnitaryRelation:
    """Compare eigenphase multisets up to a rotation, optionally after reflection.

    Returns ``unitary`` with omega such that ``eig(u_b) = e^{i omega} eig(u_a)``,
    or ``antiunitary`` with ``eig(u_b) = e^{i omega} conj(eig(u_a))``. The
    verdict is guaranteed correct when either input is super-non-degenerate;
    otherwise it is best-effort (``guaranteed=False``).
    """
    a = np.sort(la.eigenphases(la.check_unitary(u_a, "u_a")))
    b = np.sort(la.eigenphases(la.check_unitary(u_b, "u_b")))
    guaranteed = super_non_degenerate(u_a) or super_non_degenerate(u_b)
    if a.size != b.size:
        return UnitaryRelation("unrelated", None, guaranteed)

    def wrap(x):
        return float(np.angle(np.exp(1j * x)))

    for s in range(b.size):
        omega = b[s] - a[0]
        if _multiset_match(np.mod(a + omega, 2 * np.pi), b, atol):
            return UnitaryRelation("unitary", wrap(omega), guaranteed)
    neg = np.sort(np.mod(-a, 2 * np.pi))
    for s in range(b.size):
        omega = b[s] - neg[0]
        if _multiset_match(np.mod(neg + omega, 2 * np.pi), b, atol):
            return UnitaryRelation("antiunitary", wrap(omega), guaranteed)
    return UnitaryRelation("unrelated", None, guaranteed)


# ---------------------------------------------------------------------------
# Orbit completeness and the depolarizing commutant
# ---------------------------------------------------------------------------


@dataclass
class CompleteFamily:
    matrices: list  # each u A u^dag
    unitaries: list
    rank: int


def _loop_unitary(d: int) -> np.ndarray:
    """``|0><0| + |d-1><1| + sum_{a=2}^{d-1} |a-1><a|``."""
    u = np.zeros((d, d), dtype=complex)
    u[0, 0] = 1
    u[d - 1, 1] = 1
    for a in range(2, d):
        u[a - 1, a] = 1
    return u


def _swap_unitary(d: int, b: int, c: int) -> np.ndarray:
    u = np.eye(d, dtype=complex)
    u[[b, c]] = u[[c, b]]
    return u


def _unitary_sending_zero_to(psi: np.ndarray) -> np.ndarray:
    q, _ = np.linalg.qr(psi.reshape(-1, 1), mode="complete")
    return q


def complete_set_from(A) -> CompleteFamily:
    """A finite family ``{u A u^dag}`` spanning all d x d matrices.

    In the eigenbasis of A (eigenvalues descending) averages over powers of
    the loop permutation, with and without the swap of the extreme levels,
    isolate ``|0><0|`` as a linear combination. Conjugating those generators
    by unitaries sending ``|0>`` onto each QPT projection vector then gives a
    spanning family; the span rank is certified by SVD.

    A must be non-trivial (not proportional to identity) and, as the orbit of
    a traceless matrix stays traceless, have non-zero trace.
    """
    a_mat = la.as_matrix(A, "A")
    d = a_mat.shape[0]
    scale = max(1.0, float(np.max(np.abs(a_mat))))
    if la.herm_deviation(a_mat) > tol().herm * scale:
        raise InvalidArgument("A must be Hermitian")
    a_mat = la.hermitian_part(a_mat)
    tr = float(np.trace(a_mat).real)
    if np.max(np.abs(a_mat - tr / d * np.eye(d))) <= tol().herm * scale:
        raise TrivialMatrix("A is proportional to the identity")
    if abs(tr) <= tol().herm * scale:
        raise InvalidArgument("A is traceless; its unitary orbit spans only traceless matrices")

    w, v = np.linalg.eigh(a_mat)
    w, v = w[::-1], v[:, ::-1]
    diag = np.diag(w).astype(complex)
    loop = _loop_unitary(d)
    swap = _swap_unitary(d, 0, d - 1)
    gens = [np.linalg.matrix_power(loop, l) for l in range(1, d)]
    gens += [g @ swap for g in gens]

    # sanity: the generators isolate |0><0|
    a1 = sum(g @ diag @ g.conj().T for g in gens[: d - 1]) / (d - 1)
    a2 = sum(g @ diag @ g.conj().T for g in gens[d - 1:]) / (d - 1)
    p0 = ((tr - w[-1]) * a1 - (tr - w[0]) * a2) / ((w[0] - w[-1]) * tr)
    target = np.zeros((d, d))
    target[0, 0] = 1
    if np.max(np.abs(p0 - target)) > 1e-8:
        raise NumericalError("failed to isolate a rank-one projection from A")

    matrices, unitaries = [], []
    for psi_proj in projection_set_qpt(d).matrices():
        ww, vv = np.linalg.eigh(psi_proj)
        rot = _unitary_sending_zero_to(vv[:, -1])
        for g in gens:
            u = v @ rot @ g @ v.conj().T
            unitaries.append(u)
            matrices.append(u @ a_mat @ u.conj().T)
    stacked = np.array([m.reshape(-1) for m in matrices])
    rank = la.numerical_rank(stacked)
    if rank < d * d:
        raise NumericalError(f"family spans rank {rank} < {d * d}")
    return CompleteFamily(matrices, unitaries, rank)


def fit_depolarizing(qmap, atol: float = 1e-8) -> float | None:
    """F if ``qmap`` equals ``D_F`` (to ``atol``), else None.

    F is read off the restriction to the traceless subspace, which must be
    ``F * identity``; the map must also be unital.
    """
    s = getattr(qmap, "superop", qmap)
    s = la.as_matrix(s, "superoperator")
    d = la.dim_of_superop(s)
    v = np.eye(d).reshape(-1) / np.sqrt(d)
    proj = np.eye(d * d) - np.outer(v, v)
    F_c = np.trace(proj @ s @ proj) / (d * d - 1)
    if abs(F_c.imag) > atol:
        return None
    F = float(F_c.real)
    if np.max(np.abs(s - depolarizing_superop(F, d))) > atol:
        return None
    if np.max(np.abs(s @ (v * np.sqrt(d)) - v * np.sqrt(d))) > tol().trace:
        return None
    return F
