import numpy as np
import pytest

from qmodelid import (
    WignerTransform, apply_gauge, classify_transform, depolarizing, distributions_equal,
    random_gauge, random_model, recover_gauge_gst, recover_wigner_from_projections,
    same_model, transpose_map, unitary_gauge,
)
from qmodelid import linalg as la
from qmodelid.core import random_unitary
from qmodelid.errors import (
    GramMismatch, InconsistentGauge, NotComplete, NotEquivalent, NotProjection, ShapeMismatch,
)
from qmodelid.gauge import antiunitary_gauge, identity_gauge
from qmodelid.uniqueness import projection_set_pi


def complete(d, seed):
    return random_model(d, d * d, 2, d * d, seed=seed)


# --- distributions_equal ------------------------------------------------------

def test_distributions_equal_under_random_gauge(rng):
    rep = complete(2, 1)
    res = distributions_equal(rep, apply_gauge(rep, random_gauge(2, rng)), max_len=3)
    assert res.equal and res.max_dev <= 1e-10


def test_distributions_differ_after_perturbation():
    rep = complete(2, 2)
    states = list(rep.states)
    states[1] = states[1].mat + 1e-3 * np.array([[1, 0], [0, -1]])
    res = distributions_equal(rep, rep.replace(states=states))
    assert not res.equal
    assert res.witness[0] == 1
    assert res.max_dev > 1e-5


def test_distributions_equal_antiunitary(rng):
    rep = complete(3, 3)
    other = apply_gauge(rep, antiunitary_gauge(random_unitary(3, rng)))
    assert distributions_equal(rep, other).equal


def test_distributions_equal_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        distributions_equal(random_model(2, 2, 1, 2, seed=0), random_model(2, 3, 1, 2, seed=0))


# --- recover_gauge_gst ----------------------------------------------------------

def test_recover_gauge_roundtrip(rng):
    for d in (2, 3):
        rep = complete(d, 4)
        t0 = random_gauge(d, rng)
        t = recover_gauge_gst(rep, apply_gauge(rep, t0))
        assert np.max(np.abs(t.superop - t0.superop)) < 1e-8


def test_recover_gauge_identity():
    rep = complete(2, 5)
    assert np.max(np.abs(recover_gauge_gst(rep, rep).superop - np.eye(4))) < 1e-12


def test_recover_gauge_incomplete():
    rep = random_model(2, 3, 1, 4, seed=6)
    with pytest.raises(NotComplete) as info:
        recover_gauge_gst(rep, rep)
    assert info.value.rank_states == 3


def test_recover_gauge_not_equivalent():
    a, b = complete(2, 7), complete(2, 8)
    with pytest.raises(NotEquivalent):
        recover_gauge_gst(a, b)


def test_recover_gauge_map_mismatch(rng):
    rep = complete(2, 9)
    b = apply_gauge(rep, random_gauge(2, rng))
    bad = b.replace(maps=[b.maps[0], b.maps[1].superop + 1e-3 * np.eye(4)])
    with pytest.raises(NotEquivalent):
        recover_gauge_gst(rep, bad)


def test_recover_gauge_inconsistent_formulas():
    # a 1e-10 state perturbation passes the 1e-9 table check but not a 1e-13 gauge check
    rep = complete(2, 12)
    states = list(rep.states)
    states[0] = states[0].mat + 1e-10 * np.array([[1, 0], [0, -1]])
    with pytest.raises(InconsistentGauge):
        recover_gauge_gst(rep, rep.replace(states=states), atol=1e-13)


# --- classification ---------------------------------------------------------------

def test_classify_examples():
    theta = 0.7
    rx = np.array([[np.cos(theta / 2), -1j * np.sin(theta / 2)],
                   [-1j * np.sin(theta / 2), np.cos(theta / 2)]])
    w = classify_transform(unitary_gauge(rx))
    assert w.kind == "unitary" and la.equal_up_to_phase(w.u, rx, 1e-10)
    w = classify_transform(antiunitary_gauge(rx))
    assert w.kind == "antiunitary" and la.equal_up_to_phase(w.u, rx, 1e-10)
    assert classify_transform(depolarizing(0.5, 2)) is None


def test_classify_many_random(rng):
    for n in range(200):
        d = 2 + n % 3
        u = random_unitary(d, rng)
        flag = bool(n % 2)
        w = classify_transform(WignerTransform(u, flag).gauge())
        assert w is not None and w.antiunitary == flag
        assert la.equal_up_to_phase(w.u, u, 1e-9)
        first = w.u.reshape(-1, order="F")[np.argmax(np.abs(w.u.reshape(-1, order="F")) > 1e-8)]
        assert abs(first.imag) < 1e-12 and first.real > 0


def test_wigner_transform_inverse(rng):
    for flag in (False, True):
        s = WignerTransform(random_unitary(3, rng), flag)
        x = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        assert np.allclose(s.inverse()(s(x)), x, atol=1e-12)
        assert np.allclose(s.superop @ s.inverse().superop, np.eye(9), atol=1e-12)


# --- same_model -------------------------------------------------------------------

def test_same_model_examples(rng, lam01_model):
    rep = complete(2, 10)
    assert same_model(rep, apply_gauge(rep, unitary_gauge(random_unitary(2, rng)))).kind == "unitary"
    assert same_model(rep, apply_gauge(rep, transpose_map(2))).kind == "antiunitary"
    assert same_model(lam01_model, apply_gauge(lam01_model, depolarizing(1 / 1.2, 2))) is None


def test_same_model_reflexive_symmetric(rng):
    rep = complete(3, 11)
    assert same_model(rep, rep).kind == "unitary"
    u = random_unitary(3, rng)
    other = apply_gauge(rep, antiunitary_gauge(u))
    fwd, back = same_model(rep, other), same_model(other, rep)
    assert fwd.kind == back.kind == "antiunitary"
    assert la.equal_up_to_phase(fwd.inverse().gauge().superop, back.gauge().superop, 1e-8)


# --- transpose map ------------------------------------------------------------------

def test_transpose_map_properties():
    w = transpose_map(2)
    e01 = np.array([[0, 1], [0, 0]])
    assert np.array_equal(w(e01), e01.T)
    assert np.max(np.abs(w.superop @ w.superop - np.eye(4))) <= 1e-15
    assert np.allclose(np.sort(la.herm_eigvalsh(w.choi)), [-1, 1, 1, 1])


# --- Wigner recovery from projection images -------------------------------------

def _images(s: WignerTransform, d: int):
    inv = s.inverse()
    return {label: inv(m) for label, m in projection_set_pi(d)}


def test_wigner_identity_fit():
    fit = recover_wigner_from_projections(dict(projection_set_pi(3)), 3)
    assert fit.kappa == 1
    assert la.equal_up_to_phase(fit.u, np.eye(3), 1e-10)


def test_wigner_random_unitary_images(rng):
    u = random_unitary(3, rng)
    images = _images(WignerTransform(u, False), 3)
    fit = recover_wigner_from_projections(images, 3)
    assert fit.kappa == 1
    for label, m in projection_set_pi(3):
        assert np.max(np.abs(fit.image(m) - images[label])) <= 1e-8
    assert la.equal_up_to_phase(fit.transform().superop, WignerTransform(u).superop, 1e-8)


def test_wigner_transpose_images():
    images = {label: m.T for label, m in projection_set_pi(3)}
    fit = recover_wigner_from_projections(images, 3)
    assert fit.kappa == -1
    assert fit.transform().antiunitary


def test_wigner_overlaps_preserved(rng):
    fit = recover_wigner_from_projections(_images(WignerTransform(random_unitary(3, rng), True), 3), 3)
    items = list(projection_set_pi(3))
    for la_, a in items:
        for lb, b in items:
            assert abs(np.trace(fit.image(a) @ fit.image(b)) - np.trace(a @ b)) < 1e-9


def test_wigner_rejects_bad_inputs():
    images = dict(projection_set_pi(2))
    images["pi_0"] = np.diag([1.0, 1.0])
    with pytest.raises(NotProjection):
        recover_wigner_from_projections(images, 2)
    images = dict(projection_set_pi(2))
    images["pix_0_1"] = images["pi_0"]
    with pytest.raises(GramMismatch):
        recover_wigner_from_projections(images, 2)
