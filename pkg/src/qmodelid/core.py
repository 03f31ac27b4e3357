"""Model representations: states, maps and two-outcome effects.

A representation is the triple ``({rho_i}, {M_j}, {E_k})``. Maps are stored
as d^2 x d^2 superoperators in the row-major vectorized picture (see
:mod:`qmodelid.linalg`); Choi matrices and Kraus forms are derived views.

Constructors do not enforce physicality. Gauge-transformed representations
are routinely non-physical, so physicality is a report
(:func:`check_physical`), never a construction-time invariant.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from . import kernels
from . import linalg as la
from ._config import tol
from .errors import (
    CapExceeded,
    DimensionMismatch,
    IndexOutOfRange,
    InvalidArgument,
    ValueOutOfRange,
)

vectorize = la.vectorize
devectorize = la.devectorize


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    mat: np.ndarray
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "mat", la.as_matrix(self.mat, "state"))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def __eq__(self, other):
        return isinstance(other, DensityMatrix) and np.array_equal(self.mat, other.mat)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Effect:
    """The 'true' outcome operator E of a two-outcome measurement {E, 1 - E}."""

    mat: np.ndarray
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "mat", la.as_matrix(self.mat, "effect"))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def __eq__(self, other):
        return isinstance(other, Effect) and np.array_equal(self.mat, other.mat)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class QuantumMap:
    """A linear map on d x d matrices held as its superoperator."""

    superop: np.ndarray
    label: str = ""

    def __post_init__(self):
        s = la.as_matrix(self.superop, "superoperator")
        la.dim_of_superop(s)
        object.__setattr__(self, "superop", s)

    @property
    def dim(self) -> int:
        return la.dim_of_superop(self.superop)

    @cached_property
    def choi(self) -> np.ndarray:
        return la.choi_from_superop(self.superop)

    def __call__(self, mat) -> np.ndarray:
        m = la.as_matrix(mat)
        if m.shape[0] != self.dim:
            raise DimensionMismatch(f"map acts on d={self.dim}, got {m.shape}")
        return la.devectorize(self.superop @ la.vectorize(m))

    def compose(self, other: "QuantumMap") -> "QuantumMap":
        """``self`` after ``other``."""
        return QuantumMap(self.superop @ other.superop, f"{self.label}*{other.label}")

    def kraus(self) -> list[np.ndarray]:
        """Kraus operators from the Choi eigendecomposition (CP part only)."""
        w, v = la.herm_eigh(self.choi)
        cut = tol().psd
        return [np.sqrt(x) * la.kraus_from_choi_vector(v[:, i], self.dim)
                for i, x in enumerate(w) if x > cut]

    def __eq__(self, other):
        return isinstance(other, QuantumMap) and np.array_equal(self.superop, other.superop)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class ModelRepresentation:
    """The triple (states, maps, effects) plus metadata.

    ``unitary_complete`` declares that the device can realise every unitary
    map (a capability premise, not something data can certify).
    ``extra_maps`` lists map indices declared as non-unitary extras when that
    premise is used.
    """

    dim: int
    states: tuple
    maps: tuple
    effects: tuple
    unitary_complete: bool = False
    label: str = ""
    extra_maps: tuple = ()

    def __post_init__(self):
        if int(self.dim) < 1:
            raise InvalidArgument(f"dim must be positive, got {self.dim}")
        object.__setattr__(self, "dim", int(self.dim))
        states = tuple(s if isinstance(s, DensityMatrix) else DensityMatrix(s)
                       for s in self.states)
        maps = tuple(m if isinstance(m, QuantumMap) else QuantumMap(m) for m in self.maps)
        effects = tuple(e if isinstance(e, Effect) else Effect(e) for e in self.effects)
        for kind, items in (("state", states), ("map", maps), ("effect", effects)):
            for idx, item in enumerate(items):
                if item.dim != self.dim:
                    raise DimensionMismatch(
                        f"{kind} {idx} has dimension {item.dim}, expected {self.dim}")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "effects", effects)
        extra = tuple(sorted(int(j) for j in self.extra_maps))
        for j in extra:
            if not 0 <= j < len(maps):
                raise IndexOutOfRange(f"extra map index {j} out of range")
        object.__setattr__(self, "extra_maps", extra)

    @property
    def shape(self) -> tuple[int, int, int]:
        return len(self.states), len(self.maps), len(self.effects)

    def state_vectors(self) -> np.ndarray:
        """(n_states, d^2) array of ``|rho_i>>``."""
        return np.array([la.vectorize(s.mat) for s in self.states], dtype=complex).reshape(
            len(self.states), self.dim**2)

    def effect_rows(self) -> np.ndarray:
        """(n_effects, d^2) array of row vectors ``<<E_k|``."""
        return np.array([la.vectorize(e.mat).conj() for e in self.effects],
                        dtype=complex).reshape(len(self.effects), self.dim**2)

    def map_stack(self) -> np.ndarray:
        d2 = self.dim**2
        return np.array([m.superop for m in self.maps], dtype=complex).reshape(
            len(self.maps), d2, d2)

    def replace(self, **changes) -> "ModelRepresentation":
        fields = dict(dim=self.dim, states=self.states, maps=self.maps, effects=self.effects,
                      unitary_complete=self.unitary_complete, label=self.label,
                      extra_maps=self.extra_maps)
        fields.update(changes)
        return ModelRepresentation(**fields)

    def max_deviation(self, other: "ModelRepresentation") -> float:
        """Largest elementwise difference over all states, maps and effects."""
        if self.dim != other.dim or self.shape != other.shape:
            return float("inf")
        dev = 0.0
        for a, b in zip(self.states, other.states):
            dev = max(dev, float(np.max(np.abs(a.mat - b.mat))))
        for a, b in zip(self.maps, other.maps):
            dev = max(dev, float(np.max(np.abs(a.superop - b.superop))))
        for a, b in zip(self.effects, other.effects):
            dev = max(dev, float(np.max(np.abs(a.mat - b.mat))))
        return dev

    def isclose(self, other: "ModelRepresentation", atol: float = 1e-9) -> bool:
        return self.max_deviation(other) <= atol

    def __eq__(self, other):
        if not isinstance(other, ModelRepresentation):
            return NotImplemented
        return (self.dim == other.dim and self.shape == other.shape
                and self.unitary_complete == other.unitary_complete
                and self.max_deviation(other) == 0.0)

    __hash__ = None


# ---------------------------------------------------------------------------
# Vectorized picture
# ---------------------------------------------------------------------------


def choi_of(qmap: QuantumMap) -> np.ndarray:
    return qmap.choi


def superop_from_choi(choi, label: str = "") -> QuantumMap:
    c = la.as_matrix(choi, "Choi matrix")
    return QuantumMap(la.superop_from_choi(c), label)


def map_from_kraus(kraus_ops: Sequence, label: str = "") -> QuantumMap:
    """``rho -> sum_l K_l rho K_l^dag``."""
    ops = [la.as_matrix(k, "Kraus operator") for k in kraus_ops]
    if not ops:
        raise InvalidArgument("need at least one Kraus operator")
    d = ops[0].shape[0]
    if any(k.shape != (d, d) for k in ops):
        raise DimensionMismatch("Kraus operators must share a square shape")
    return QuantumMap(sum(np.kron(k, k.conj()) for k in ops), label)


def map_from_unitary(u, label: str = "") -> QuantumMap:
    m = la.check_unitary(u)
    return QuantumMap(la.unitary_superop(m), label)


def identity_map(dim: int, label: str = "id") -> QuantumMap:
    return QuantumMap(np.eye(dim * dim, dtype=complex), label)


# ---------------------------------------------------------------------------
# Probabilities
# ---------------------------------------------------------------------------


def _check_index(idx, size, what):
    if not 0 <= idx < size:
        raise IndexOutOfRange(f"{what} index {idx} out of range [0, {size})")


def _finish_probability(p: float, strict: bool) -> float:
    eps = tol().prob
    if -eps <= p < 0.0:
        return 0.0
    if 1.0 < p <= 1.0 + eps:
        return 1.0
    if (p < -eps or p > 1.0 + eps) and strict:
        raise ValueOutOfRange(f"probability {p!r} outside [0, 1]")
    return p


def probability(rep: ModelRepresentation, i: int, seq: Sequence[int], k: int,
                strict: bool = False) -> float:
    """``Tr[E_k M_{j_N} ... M_{j_1}(rho_i)]`` evaluated as ``<<E_k| M ... M |rho_i>>``.

    Values within ``tol().prob`` of [0, 1] are clamped. Out-of-range values
    raise :class:`ValueOutOfRange` in strict mode and are returned as-is
    otherwise.
    """
    n_s, n_m, n_e = rep.shape
    _check_index(i, n_s, "state")
    _check_index(k, n_e, "effect")
    v = la.vectorize(rep.states[i].mat)
    for j in seq:
        _check_index(j, n_m, "map")
        v = rep.maps[j].superop @ v
    p = float(np.vdot(la.vectorize(rep.effects[k].mat), v).real)
    return _finish_probability(p, strict)


def iter_sequences(n_maps: int, max_len: int) -> Iterator[tuple[int, ...]]:
    """All map sequences of length 0..max_len in lexicographic order."""
    yield ()
    if max_len == 0:
        return

    def rec(prefix):
        for j in range(n_maps):
            seq = prefix + (j,)
            yield seq
            if len(seq) < max_len:
                yield from rec(seq)

    yield from rec(())


def table_size(n_states: int, n_maps: int, n_effects: int, max_len: int) -> int:
    return n_states * n_effects * kernels.sequence_count(n_maps, max_len)


@dataclass(eq=False)
class ProbabilityTable:
    """Values of p(i, seq, k) for every sequence up to ``max_len``.

    Entries are stored flat in lexicographic (i, seq, k) order.
    """

    n_states: int
    n_maps: int
    n_effects: int
    max_len: int
    values: np.ndarray
    kind: str = "exact"
    shots: int | None = None
    seed: int | None = None
    out_of_range: list = field(default_factory=list)

    @cached_property
    def sequences(self) -> list[tuple[int, ...]]:
        return list(iter_sequences(self.n_maps, self.max_len))

    @cached_property
    def _seq_pos(self) -> dict:
        return {s: n for n, s in enumerate(self.sequences)}

    def __len__(self) -> int:
        return self.values.size

    def key(self, flat_index: int) -> tuple[int, tuple[int, ...], int]:
        n_seq = len(self.sequences)
        i, rest = divmod(flat_index, n_seq * self.n_effects)
        s, k = divmod(rest, self.n_effects)
        return i, self.sequences[s], k

    def keys(self):
        for i in range(self.n_states):
            for s in self.sequences:
                for k in range(self.n_effects):
                    yield i, s, k

    def items(self):
        return zip(self.keys(), self.values.tolist())

    def __getitem__(self, key) -> float:
        i, seq, k = key
        seq = tuple(seq)
        if seq not in self._seq_pos:
            raise IndexOutOfRange(f"sequence {seq} not in table")
        _check_index(i, self.n_states, "state")
        _check_index(k, self.n_effects, "effect")
        n_seq = len(self.sequences)
        return float(self.values[(i * n_seq + self._seq_pos[seq]) * self.n_effects + k])

    def to_rows(self):
        """Rows ``(i, 'j1;j2;...', k, p)`` in table order."""
        for (i, seq, k), p in self.items():
            yield i, ";".join(str(j) for j in seq), k, p


def _resolve_threads(threads: int | None) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("QMODELID_THREADS", "")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def probability_table(rep: ModelRepresentation, max_len: int, *, strict: bool = False,
                      cap: int | None = None, threads: int | None = None,
                      backend: str | None = None) -> ProbabilityTable:
    """Exact table of every probability with sequence length 0..max_len.

    Work is split by state index across ``threads`` workers (default from
    ``QMODELID_THREADS``); output order is the same for any thread count.
    """
    if max_len < 0:
        raise InvalidArgument("max_len must be >= 0")
    n_s, n_m, n_e = rep.shape
    cap = tol().table_cap if cap is None else cap
    size = table_size(n_s, n_m, n_e, max_len)
    if size > cap:
        raise CapExceeded(f"table would have {size} entries (cap {cap})")

    states = rep.state_vectors()
    maps = rep.map_stack()
    effects = rep.effect_rows()
    n_threads = min(_resolve_threads(threads), max(n_s, 1))
    if n_threads > 1:
        chunks = np.array_split(np.arange(n_s), n_threads)
        with ThreadPoolExecutor(n_threads) as pool:
            parts = list(pool.map(
                lambda idx: kernels.sequence_table(states[idx], maps, effects, max_len,
                                                   backend=backend), chunks))
        raw = np.concatenate(parts)
    else:
        raw = kernels.sequence_table(states, maps, effects, max_len, backend=backend)

    values = raw.real.copy()
    eps = tol().prob
    values[(values < 0) & (values >= -eps)] = 0.0
    values[(values > 1) & (values <= 1 + eps)] = 1.0
    bad = np.flatnonzero((values < -eps) | (values > 1 + eps))
    table = ProbabilityTable(n_s, n_m, n_e, max_len, values)
    if bad.size:
        if strict:
            i, s, k = table.key(int(bad[0]))
            raise ValueOutOfRange(
                f"probability {values[bad[0]]!r} at (i={i}, seq={s}, k={k}) outside [0, 1]")
        table.out_of_range = [int(b) for b in bad]
    return table


def sample_table(rep: ModelRepresentation, max_len: int, shots: int, seed: int, *,
                 cap: int | None = None, backend: str | None = None) -> ProbabilityTable:
    """Binomial frequencies (``shots`` trials per entry) in place of exact values."""
    if int(shots) != shots or shots < 1:
        raise InvalidArgument("shots must be a positive integer")
    exact = probability_table(rep, max_len, cap=cap, backend=backend)
    rng = np.random.default_rng(int(seed))
    counts = rng.binomial(int(shots), np.clip(exact.values, 0.0, 1.0))
    return ProbabilityTable(exact.n_states, exact.n_maps, exact.n_effects, max_len,
                            counts / int(shots), kind="sampled", shots=int(shots),
                            seed=int(seed))


# ---------------------------------------------------------------------------
# Physicality
# ---------------------------------------------------------------------------


@dataclass
class ElementReport:
    kind: str
    index: int
    label: str
    passed: bool
    margin: float
    reasons: list = field(default_factory=list)


@dataclass
class PhysicalityReport:
    elements: list

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.elements)

    @property
    def failures(self) -> list:
        return [e for e in self.elements if not e.passed]

    @property
    def worst_margin(self) -> float:
        return min((e.margin for e in self.elements), default=float("inf"))

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "worst_margin": self.worst_margin,
            "elements": [
                {"kind": e.kind, "index": e.index, "label": e.label, "pass": e.passed,
                 "margin": e.margin, "reasons": list(e.reasons)}
                for e in self.elements
            ],
        }


def _state_report(idx: int, s: DensityMatrix) -> ElementReport:
    t = tol()
    reasons = []
    herm = la.herm_deviation(s.mat)
    if herm > t.herm:
        reasons.append(f"not Hermitian (dev {herm:.3e})")
    tr = complex(np.trace(s.mat))
    if abs(tr - 1) > t.trace:
        reasons.append(f"trace {tr.real:.12g}{tr.imag:+.3g}j != 1")
    lam = float(la.herm_eigvalsh(s.mat)[0])
    if lam < -t.psd:
        reasons.append(f"negative eigenvalue {lam:.6g}")
    return ElementReport("state", idx, s.label, not reasons, lam, reasons)


def _effect_report(idx: int, e: Effect) -> ElementReport:
    t = tol()
    reasons = []
    herm = la.herm_deviation(e.mat)
    if herm > t.herm:
        reasons.append(f"not Hermitian (dev {herm:.3e})")
    w = la.herm_eigvalsh(e.mat)
    if w[0] < -t.psd:
        reasons.append(f"negative eigenvalue {w[0]:.6g}")
    if w[-1] > 1 + t.psd:
        reasons.append(f"eigenvalue {w[-1]:.6g} exceeds 1")
    margin = float(min(w[0], 1 - w[-1]))
    return ElementReport("effect", idx, e.label, not reasons, margin, reasons)


def map_tp_deviation(qmap: QuantumMap) -> float:
    return float(np.max(np.abs(la.partial_trace_second(qmap.choi) - np.eye(qmap.dim))))


def _map_report(idx: int, m: QuantumMap) -> ElementReport:
    t = tol()
    reasons = []
    herm = la.herm_deviation(m.choi)
    if herm > t.herm:
        reasons.append(f"Choi not Hermitian (dev {herm:.3e})")
    tp = map_tp_deviation(m)
    if tp > t.trace:
        reasons.append(f"not trace-preserving (dev {tp:.3e})")
    lam = float(la.herm_eigvalsh(m.choi)[0])
    if lam < -t.psd:
        reasons.append(f"not CP: Choi eigenvalue {lam:.6g}")
    return ElementReport("map", idx, m.label, not reasons, lam, reasons)


def check_physical(rep: ModelRepresentation) -> PhysicalityReport:
    """Per-element physicality verdicts with eigenvalue margins.

    Margins: min eigenvalue for states, min Choi eigenvalue for maps, and
    ``min(lambda_min, 1 - lambda_max)`` for effects.
    """
    elems = [_state_report(i, s) for i, s in enumerate(rep.states)]
    elems += [_map_report(j, m) for j, m in enumerate(rep.maps)]
    elems += [_effect_report(k, e) for k, e in enumerate(rep.effects)]
    return PhysicalityReport(elems)


def is_trivial(rep: ModelRepresentation, atol: float | None = None) -> bool:
    """Maximally mixed states, unital maps and effects proportional to identity."""
    atol = tol().herm if atol is None else atol
    d = rep.dim
    eye = np.eye(d)
    for s in rep.states:
        if np.max(np.abs(s.mat - eye / d)) > atol:
            return False
    for m in rep.maps:
        if np.max(np.abs(m(eye) - eye)) > atol:
            return False
    for e in rep.effects:
        if np.max(np.abs(e.mat - np.trace(e.mat) / d * eye)) > atol:
            return False
    return True


# ---------------------------------------------------------------------------
# Random models
# ---------------------------------------------------------------------------


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_state(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    g = _ginibre(rng, dim, rank or dim)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(_ginibre(rng, dim, dim))
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_kraus(dim: int, rng: np.random.Generator, rank: int | None = None) -> list:
    """Random Kraus set normalised on the input side by ``(sum K^dag K)^{-1/2}``."""
    ops = [_ginibre(rng, dim, dim) for _ in range(rank or dim * dim)]
    s = sum(k.conj().T @ k for k in ops)
    w, v = np.linalg.eigh(s)
    inv_sqrt = (v / np.sqrt(w)) @ v.conj().T
    return [k @ inv_sqrt for k in ops]


def random_effect(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    g = _ginibre(rng, dim, rank or dim)
    p = g @ g.conj().T
    scale = rng.uniform(0.5, 1.0)
    return scale * p / np.linalg.eigvalsh(p)[-1]


def random_model(dim: int, n_states: int, n_maps: int, n_effects: int,
                 seed: int | None = None, *, state_rank: int | None = None,
                 kraus_rank: int | None = None, effect_rank: int | None = None,
                 pure_states: Sequence[int] = (), singular_effects: Sequence[int] = (),
                 singular_maps: Sequence[int] = (), unitary_complete: bool = False,
                 label: str = "") -> ModelRepresentation:
    """Random physical representation, deterministic in ``seed``.

    States are ``G G^dag / Tr`` with complex Gaussian G, maps come from random
    Kraus sets (``kraus_rank`` operators, default d^2 for a full-rank Choi),
    effects are random PSD matrices scaled to a max eigenvalue in [0.5, 1].
    ``pure_states`` forces rank 1 on the listed states, ``singular_effects``
    forces a zero eigenvalue on the listed effects, ``singular_maps`` uses
    d^2 - 1 Kraus operators for the listed maps (singular Choi).
    """
    if dim < 2:
        raise InvalidArgument("dim must be >= 2")
    if min(n_states, n_maps, n_effects) < 0:
        raise InvalidArgument("counts must be non-negative")
    for name, r in (("state_rank", state_rank), ("effect_rank", effect_rank)):
        if r is not None and not 1 <= r <= dim:
            raise InvalidArgument(f"{name} must be in [1, {dim}]")
    if kraus_rank is not None and not 1 <= kraus_rank <= dim * dim:
        raise InvalidArgument(f"kraus_rank must be in [1, {dim * dim}]")
    for name, idxs, n in (("pure_states", pure_states, n_states),
                          ("singular_effects", singular_effects, n_effects),
                          ("singular_maps", singular_maps, n_maps)):
        for i in idxs:
            if not 0 <= i < n:
                raise InvalidArgument(f"{name} index {i} out of range")

    rng = np.random.default_rng(seed)
    states = []
    for i in range(n_states):
        rank = 1 if i in pure_states else state_rank
        states.append(DensityMatrix(random_state(dim, rng, rank), f"rho{i}"))
    maps = []
    for j in range(n_maps):
        rank = dim * dim - 1 if j in singular_maps else kraus_rank
        maps.append(map_from_kraus(random_kraus(dim, rng, rank), f"M{j}"))
    effects = []
    for k in range(n_effects):
        rank = dim - 1 if k in singular_effects else effect_rank
        effects.append(Effect(random_effect(dim, rng, rank), f"E{k}"))
    return ModelRepresentation(dim, states, maps, effects, unitary_complete=unitary_complete,
                               label=label or f"random(d={dim}, seed={seed})")
