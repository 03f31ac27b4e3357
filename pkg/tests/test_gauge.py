import numpy as np
import pytest

from qmodelid import (
    GaugeTransform, antiunitary_gauge, apply_gauge, check_physical, depolarizing,
    distributions_equal, dual, eta_kraus, is_hptp, max_depolarizing_F, random_gauge,
    random_model, transpose_map, unitary_gauge,
)
from qmodelid import linalg as la
from qmodelid.core import ModelRepresentation, identity_map, random_unitary
from qmodelid.errors import DimensionMismatch, InvalidArgument, NotHPTP, NotPhysical, SingularTransform
from qmodelid.gauge import identity_gauge, lambda_min


def _rand(rng, d):
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


def test_identity_gauge_is_noop():
    rep = random_model(2, 3, 2, 3, seed=1)
    assert apply_gauge(rep, identity_gauge(2)) == rep


def test_unitary_gauge_preserves_spectra_and_physics(rng):
    rep = random_model(3, 3, 2, 3, seed=2)
    out = apply_gauge(rep, unitary_gauge(random_unitary(3, rng)))
    assert check_physical(out).passed
    for a, b in zip(rep.states, out.states):
        assert np.allclose(la.herm_eigvalsh(a.mat), la.herm_eigvalsh(b.mat), atol=1e-12)


def test_depolarizing_gauge_inside_window(lam01_model):
    assert abs(lambda_min(lam01_model) - 0.1) < 1e-12
    assert abs(max_depolarizing_F(lam01_model) - 1.25) < 1e-12
    out = apply_gauge(lam01_model, depolarizing(1 / 1.2, 2))
    assert check_physical(out).passed


def test_gauge_roundtrip_and_composition(rng):
    rep = random_model(2, 3, 2, 3, seed=3)
    t1, t2 = random_gauge(2, rng), random_gauge(2, rng)
    back = apply_gauge(apply_gauge(rep, t1), t1.inverse())
    assert back.max_deviation(rep) < 1e-10
    two_step = apply_gauge(apply_gauge(rep, t1), t2)
    one_step = apply_gauge(rep, t1.compose(t2))
    assert two_step.max_deviation(one_step) < 1e-10


def test_gauge_invariance_of_tables(rng):
    rep = random_model(3, 2, 2, 2, seed=4)
    out = apply_gauge(rep, random_gauge(3, rng))
    assert distributions_equal(rep, out, max_len=3).max_dev <= 1e-10


def test_apply_gauge_errors():
    rep = random_model(2, 1, 1, 1, seed=0)
    with pytest.raises(DimensionMismatch):
        apply_gauge(rep, identity_gauge(3))
    singular = GaugeTransform(np.diag([1, 1, 1, 0]).astype(complex))
    with pytest.raises(SingularTransform):
        apply_gauge(rep, singular)


def test_dual_examples(rng):
    assert dual(identity_gauge(2)).superop.tolist() == identity_gauge(2).superop.tolist()
    u = random_unitary(3, rng)
    du = dual(unitary_gauge(u))
    a = _rand(rng, 3)
    assert np.allclose(du(a), u.conj().T @ a @ u, atol=1e-12)
    F = 0.7
    dd = dual(depolarizing(F, 3))
    traceless = a - np.trace(a) / 3 * np.eye(3)
    assert np.allclose(dd(traceless), F * traceless, atol=1e-12)
    assert np.allclose(dd(np.eye(3)), np.eye(3), atol=1e-12)


def test_dual_trace_identity_for_hermitian_preserving(rng):
    # bilinear form Tr[T*(A) B] = Tr[A T(B)] for Hermitian-preserving T
    for t in (depolarizing(1.3, 2), unitary_gauge(random_unitary(2, rng)), transpose_map(2)):
        a, b = _rand(rng, 2), _rand(rng, 2)
        lhs = np.trace(dual(t)(a) @ b)
        rhs = np.trace(a @ t(b))
        assert abs(lhs - rhs) < 1e-10


def test_dual_sesquilinear_identity_general(rng):
    t = random_gauge(2, rng)
    a, b = _rand(rng, 2), _rand(rng, 2)
    assert abs(np.trace(dual(t)(a).conj().T @ b) - np.trace(a.conj().T @ t(b))) < 1e-10
    assert np.max(np.abs(dual(dual(t)).superop - t.superop)) <= 1e-12


def test_depolarizing_examples():
    assert np.array_equal(depolarizing(1, 2).superop, np.eye(4))
    assert np.allclose(depolarizing(2, 2).compose(depolarizing(0.5, 2)).superop, np.eye(4), atol=1e-15)
    ket0 = np.diag([1.0, 0.0])
    assert np.allclose(depolarizing(0.5, 2)(ket0), np.diag([0.75, 0.25]))
    with pytest.raises(InvalidArgument):
        depolarizing(0, 2)


def test_depolarizing_semigroup(rng):
    for _ in range(20):
        F, G = rng.uniform(0.2, 2, size=2)
        lhs = depolarizing(F, 3).compose(depolarizing(G, 3)).superop
        assert np.max(np.abs(lhs - depolarizing(F * G, 3).superop)) < 1e-12


def test_max_depolarizing_F_examples():
    pure = random_model(2, 2, 1, 2, seed=0, pure_states=[0])
    assert max_depolarizing_F(pure) == 1.0
    mixed_id = ModelRepresentation(2, [np.eye(2) / 2], [identity_map(2)], [np.eye(2) / 2])
    assert max_depolarizing_F(mixed_id) == 1.0
    only_mixed = ModelRepresentation(2, [np.eye(2) / 2], [], [np.eye(2) / 2])
    assert max_depolarizing_F(only_mixed) == float("inf")
    with pytest.raises(NotPhysical):
        max_depolarizing_F(ModelRepresentation(2, [np.diag([1.1, -0.1])], [], []))


def test_is_hptp_examples(rng):
    for F in (0.3, 1.0, 1.7, -0.5):
        assert is_hptp(depolarizing(F, 2))
    assert is_hptp(transpose_map(2))
    a = np.array([[1, 0.3j], [0.1, 1]])
    one_sided = GaugeTransform(np.kron(a, np.eye(2)))
    assert not is_hptp(one_sided)


def test_physical_gauges_are_hptp(rng):
    # gauges relating two physical complete representations
    rep = random_model(2, 4, 2, 4, seed=7)
    F_max = max_depolarizing_F(rep)
    gauges = [unitary_gauge(random_unitary(2, rng)), antiunitary_gauge(random_unitary(2, rng)),
              depolarizing(1 / (1 + 0.5 * (F_max - 1)), 2)]
    for g in gauges:
        assert check_physical(apply_gauge(rep, g)).passed
        assert is_hptp(g)


def test_eta_kraus_examples():
    dec = eta_kraus(identity_gauge(2))
    assert len(dec.terms) == 1
    eta, f = dec.terms[0]
    assert abs(eta - 2) < 1e-12
    assert la.equal_up_to_phase(f, np.eye(2) / np.sqrt(2), 1e-12)
    dec = eta_kraus(transpose_map(2))
    assert np.allclose(np.sort(dec.etas), [-1, 1, 1, 1], atol=1e-12)
    dec = eta_kraus(depolarizing(0.5, 2))
    assert np.all(dec.etas >= -1e-12)


def test_eta_kraus_reassembles(rng):
    for t in (depolarizing(1.4, 3), transpose_map(3), antiunitary_gauge(random_unitary(3, rng))):
        dec = eta_kraus(t)
        assert np.max(np.abs(dec.superop() - t.superop)) < 1e-10
        assert np.max(np.abs(dec.normalization() - np.eye(3))) < 1e-9
    with pytest.raises(NotHPTP):
        eta_kraus(random_gauge(2, rng))
