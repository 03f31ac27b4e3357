import numpy as np
from hypothesis import given, settings, strategies as st

from qmodelid import (
    WignerTransform, apply_gauge, classify_transform, depolarizing, distributions_equal,
    random_gauge, random_model,
)
from qmodelid import linalg as la
from qmodelid.core import random_unitary
from qmodelid.uniqueness import snd_approximant, super_non_degenerate

seeds = st.integers(0, 2**31 - 1)
dims = st.sampled_from([2, 3])


@settings(max_examples=25, deadline=None)
@given(seed=seeds, d=dims)
def test_gauge_invariance(seed, d):
    rng = np.random.default_rng(seed)
    rep = random_model(d, 2, 2, 2, seed=seed)
    assert distributions_equal(rep, apply_gauge(rep, random_gauge(d, rng)), max_len=2).equal


@settings(max_examples=50, deadline=None)
@given(F=st.floats(0.2, 2.0), G=st.floats(0.2, 2.0), d=dims)
def test_depolarizing_semigroup(F, G, d):
    lhs = depolarizing(F, d).compose(depolarizing(G, d)).superop
    assert np.max(np.abs(lhs - depolarizing(F * G, d).superop)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(seed=seeds, d=st.sampled_from([2, 3, 4]), anti=st.booleans())
def test_classify_recovers_wigner(seed, d, anti):
    u = random_unitary(d, np.random.default_rng(seed))
    w = classify_transform(WignerTransform(u, anti).gauge())
    assert w is not None and w.antiunitary == anti and la.equal_up_to_phase(w.u, u, 1e-9)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, d=st.sampled_from([2, 3, 4, 5]), N=st.sampled_from([1, 2]))
def test_snd_approximant_always_snd(seed, d, N):
    u = random_unitary(d, np.random.default_rng(seed))
    assert super_non_degenerate(snd_approximant(u, N))
