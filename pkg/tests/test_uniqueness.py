import itertools
from math import comb

import numpy as np
import pytest

from conftest import pi_model
from qmodelid import (
    ModelRepresentation, apply_gauge, check_physical, depolarizing, distributions_equal,
    identity_map, map_from_unitary, max_depolarizing_F, random_model, same_model, transpose_map,
)
from qmodelid import linalg as la
from qmodelid.core import random_unitary
from qmodelid.errors import FOutOfWindow, InvalidArgument, NotPhysical, NotUnitary, TrivialMatrix, TrivialModel
from qmodelid.uniqueness import (
    assess_uniqueness, classify_unitary_relation, complete_set_from, contains_projection_set,
    counterexample, fit_depolarizing, is_unitary_map, necessary_condition, projection_set_pi,
    projection_set_qpt, snd_approximant, spectral_certificate, super_non_degenerate,
    unitary_generation_check, window_spectra,
)

KET0, KET1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
HADAMARD = np.array([[1, 1], [1, -1]]) / np.sqrt(2)


# --- necessary condition / counterexample --------------------------------------

def test_necessary_condition_full_rank(lam01_model):
    v = necessary_condition(lam01_model)
    assert v.status == "NotUnique"
    assert abs(v.F - 1.125) < 1e-12
    assert abs(v.diagnostics["lambda_min"] - 0.1) < 1e-12
    ce = v.counterexample
    assert check_physical(ce).passed
    assert distributions_equal(lam01_model, ce).equal
    assert same_model(lam01_model, ce) is None
    assert v.diagnostics["certificate"] is not None


def test_necessary_condition_pure_state():
    rep = random_model(2, 4, 2, 4, seed=1, pure_states=[2])
    v = necessary_condition(rep)
    assert v.status == "NecessaryConditionHolds"
    assert any("state 2" in s for s in v.diagnostics["singular_elements"])


def test_necessary_condition_singular_choi_never_not_unique():
    for seed in range(5):
        rep = random_model(3, 3, 2, 3, seed=seed, singular_maps=[1])
        assert necessary_condition(rep).status != "NotUnique"


def test_necessary_condition_trivial(trivial_model):
    assert necessary_condition(trivial_model).status == "Trivial"


def test_necessary_condition_requires_physical():
    with pytest.raises(NotPhysical):
        necessary_condition(ModelRepresentation(2, [np.diag([1.2, -0.2])], [], [KET0]))


def test_counterexample_inside_window(lam01_model):
    ce = counterexample(lam01_model, 1.2)
    assert check_physical(ce).passed
    assert distributions_equal(lam01_model, ce).equal
    before = la.herm_eigvalsh(lam01_model.states[0].mat)
    after = la.herm_eigvalsh(ce.states[0].mat)
    assert not np.allclose(before, after)
    cert = spectral_certificate(lam01_model, ce, 1.2)
    assert cert["bound"] > 0
    assert cert["gap"] >= cert["bound"] * (1 - 1e-9)  # tight for the lambda_min state


def test_counterexample_F1_is_identity(lam01_model):
    assert counterexample(lam01_model, 1.0) == lam01_model


def test_counterexample_out_of_window(lam01_model, trivial_model):
    with pytest.raises(FOutOfWindow):
        counterexample(lam01_model, 1.3)
    with pytest.raises(FOutOfWindow):
        counterexample(lam01_model, 0.9)
    with pytest.raises(TrivialModel):
        counterexample(trivial_model, 1.1)
    # the D_{1/1.3} state really is negative
    assert la.herm_eigvalsh(depolarizing(1.3, 2)(lam01_model.states[0].mat))[0] < 0


def test_window_spectra_tight(lam01_model):
    assert window_spectra(lam01_model, 1.25)["min"] > -1e-12
    assert window_spectra(lam01_model, 1.3)["min"] < -1e-6


# --- projection sets --------------------------------------------------------------

@pytest.mark.parametrize("d,size", [(2, 4), (3, 12), (4, 28), (5, 55)])
def test_projection_set_sizes(d, size):
    pset = projection_set_pi(d)
    assert len(pset) == size == d + 2 * comb(d, 2) + 3 * comb(d, 3)
    qpt = projection_set_qpt(d)
    assert len(qpt) == d * d
    assert la.numerical_rank(np.array([m.reshape(-1) for m in qpt.matrices()])) == d * d


def test_projection_set_algebra():
    pset = projection_set_pi(4)
    for _, p in pset:
        assert np.max(np.abs(p @ p - p)) < 1e-12
        assert np.max(np.abs(p - p.conj().T)) < 1e-12
    for a, b, c in itertools.combinations(range(4), 3):
        assert abs(np.trace(pset[f"pi_{a}"] @ pset[f"pix_{a}_{b}"]) - 0.5) < 1e-12
        assert abs(np.trace(pset[f"pix_{a}_{b}_{c}"] @ pset[f"pi_{a}"]) - 1 / 3) < 1e-12
        assert abs(np.trace(pset[f"pix_{a}_{b}"] @ pset[f"piy_{a}_{b}"]) - 0.5) < 1e-12


def test_projection_set_labels():
    assert projection_set_pi(2).labels == ["pi_0", "pi_1", "pix_0_1", "piy_0_1"]
    assert "piy_2_1_0" in projection_set_pi(3).labels
    with pytest.raises(InvalidArgument):
        projection_set_pi(1)


def test_contains_projection_set():
    rep = pi_model(2, maps=[map_from_unitary(HADAMARD)])
    res = contains_projection_set(rep)
    assert res.holds and not res.details["missing"]
    assert assess_uniqueness(rep).status == "UniqueByTheorem2"

    states = list(rep.states)
    p = states[3].mat
    states[3] = (1 - 1e-3) * p + 1e-3 * (np.eye(2) - p)
    assert not contains_projection_set(rep.replace(states=states))

    qpt3 = pi_model(3, qpt=True)
    res = contains_projection_set(qpt3)
    assert not res.holds
    assert set(res.details["missing"]) == {"pix_0_1_2", "piy_0_1_2", "piy_2_1_0"}


# --- unitary maps and the unitary-generation check ---------------------------------

def test_is_unitary_map_examples():
    x = np.array([[0, 1], [1, 0]])
    u = is_unitary_map(map_from_unitary(1j * x))
    assert u is not None and la.equal_up_to_phase(u, x, 1e-12)
    dep = depolarizing(0.9, 2)
    assert abs(np.linalg.det(dep.superop) - 0.729) < 1e-12
    assert is_unitary_map(dep.as_map()) is None
    assert is_unitary_map(transpose_map(2).as_map()) is None


def _unitary_rep(effects, flag=True):
    maps = [map_from_unitary(HADAMARD), map_from_unitary(np.diag([1, 1j]))]
    return ModelRepresentation(2, [KET0, np.eye(2) / 2], maps, effects, unitary_complete=flag)


def test_unitary_generation_check():
    good = _unitary_rep([0.8 * KET1, np.eye(2) / 2])
    assert unitary_generation_check(good).holds
    assert assess_uniqueness(good).status == "UniqueByTheorem3"
    full_rank = _unitary_rep([np.diag([0.8, 0.1]), np.eye(2) / 2])
    assert not unitary_generation_check(full_rank)
    assert not unitary_generation_check(_unitary_rep([0.8 * KET1], flag=False))


def test_unitary_generation_extra_maps():
    rep = _unitary_rep([0.8 * KET1])
    rep = rep.replace(maps=list(rep.maps) + [depolarizing(0.5, 2).as_map()])
    assert not unitary_generation_check(rep)
    assert unitary_generation_check(rep.replace(extra_maps=(2,)))


def test_assess_dispatch(trivial_model):
    assert assess_uniqueness(trivial_model).status == "Trivial"
    assert assess_uniqueness(random_model(2, 4, 1, 4, seed=3)).status == "NotUnique"


# --- super-non-degeneracy ---------------------------------------------------------

def test_snd_examples():
    assert super_non_degenerate(np.diag([1, 1j]))
    assert not super_non_degenerate(np.diag([1, -1]))
    assert not super_non_degenerate(np.diag([1, 1j, 1j]))
    with pytest.raises(NotUnitary):
        super_non_degenerate(np.diag([1, 2]))


def test_snd_approximant_formula_base2():
    u = snd_approximant(np.eye(3), 2, offset_base=2)
    turns = np.angle(np.diag(u)) / (2 * np.pi)
    assert np.allclose(turns, [2.0**-1 * 1e-6, 2.0**-2 * 1e-6, 2.0**-3 * 1e-6], rtol=0, atol=1e-18)
    # 2 t2 - t1 - t3 = t3 - t2: these offsets collide for d >= 3
    assert not super_non_degenerate(u)


def test_snd_approximant_default_base():
    u = snd_approximant(np.eye(3), 2)
    turns = np.angle(np.diag(u)) / (2 * np.pi)
    assert np.allclose(turns, [4.0**-1 * 1e-6, 4.0**-2 * 1e-6, 4.0**-3 * 1e-6], rtol=0, atol=1e-18)
    assert super_non_degenerate(u)


def test_snd_approximant_bound_and_limit(rng):
    u = random_unitary(3, rng)
    approx4 = snd_approximant(u, 4)
    assert np.linalg.norm(approx4 - u, 2) <= 1e-3
    dev3 = np.linalg.norm(snd_approximant(u, 3) - u, 2)
    dev6 = np.linalg.norm(snd_approximant(u, 6) - u, 2)
    assert dev6 < dev3
    assert la.unitarity_deviation(approx4) < 1e-12
    # same eigenbasis: commutes with u's spectral projectors
    w, v = np.linalg.eig(u)
    assert np.allclose(np.linalg.inv(v) @ approx4 @ v, np.diag(np.diag(np.linalg.inv(v) @ approx4 @ v)),
                       atol=1e-9)
    with pytest.raises(InvalidArgument):
        snd_approximant(u, 0)


# --- spectral classification -----------------------------------------------------

def test_classify_unitary_relation_examples(rng):
    ua = snd_approximant(random_unitary(3, rng), 2)
    v = random_unitary(3, rng)
    rel = classify_unitary_relation(ua, np.exp(0.9j) * v @ ua @ v.conj().T)
    assert rel.kind == "unitary" and abs(rel.omega - 0.9) < 1e-8 and rel.guaranteed
    # transposition keeps the spectrum, so this is a unitary relation
    rel = classify_unitary_relation(ua, np.exp(-0.4j) * v @ ua.T @ v.conj().T)
    assert rel.kind == "unitary" and abs(rel.omega + 0.4) < 1e-8
    rel = classify_unitary_relation(ua, np.exp(-0.4j) * v @ ua.conj() @ v.conj().T)
    assert rel.kind == "antiunitary" and abs(rel.omega + 0.4) < 1e-8
    rel = classify_unitary_relation(np.diag([1, 1j, -1]), np.diag([1, np.exp(0.3j), -1]))
    assert rel.kind == "unrelated"


# --- completeness generation -----------------------------------------------------

def test_complete_set_examples():
    fam = complete_set_from(KET0)
    assert fam.rank == 4
    fam = complete_set_from(np.diag([0.7, 0.2, 0.1]))
    assert fam.rank == 9
    for u, m in zip(fam.unitaries[:5], fam.matrices[:5]):
        assert la.unitarity_deviation(u) < 1e-12
        assert np.allclose(m, u @ np.diag([0.7, 0.2, 0.1]) @ u.conj().T)
    with pytest.raises(TrivialMatrix):
        complete_set_from(np.eye(3) / 3)
    with pytest.raises(InvalidArgument):
        complete_set_from(np.diag([1.0, -1.0]))


# --- depolarizing commutant -----------------------------------------------------

def test_fit_depolarizing_examples():
    assert abs(fit_depolarizing(depolarizing(0.7, 2)) - 0.7) < 1e-12
    assert fit_depolarizing(map_from_unitary(np.diag([1, -1]))) is None
    assert fit_depolarizing(identity_map(3)) == pytest.approx(1.0, abs=1e-15)


def test_fit_depolarizing_commutant(rng):
    # anything commuting with many random unitary conjugations is depolarizing
    F = 0.35
    s = depolarizing(F, 3).superop
    unitaries = [map_from_unitary(random_unitary(3, rng)).superop for _ in range(50)]
    assert all(np.max(np.abs(s @ w - w @ s)) <= 1e-10 for w in unitaries)
    assert abs(fit_depolarizing(s) - F) < 1e-10
    assert fit_depolarizing(transpose_map(3)) is None


def test_det_of_depolarizing():
    for d in (2, 3):
        for F in (0.5, 0.9, 1.2):
            det = np.linalg.det(depolarizing(F, d).superop)
            assert abs(det - F ** (d * d - 1)) <= 1e-9 * F ** (d * d - 1)
