import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opholder import functions as fn
from opholder.extremal_search import (Registry, evaluate, mcc_transfer, omega_search, omega_sweep,
                                      registry_extend, zygmund_fit)
from opholder.sampling import hermitian, trial_rng


def _certified(est, f):
    val, cons = evaluate(est.tag, f, est.witness)
    assert abs(val - est.lower_bound) <= 1e-12 * max(1.0, val)
    assert cons <= est.delta * (1 + 1e-12) + 1e-12


@pytest.mark.parametrize("delta", [1e-3, 0.1, 0.7])
def test_identity_is_exact(delta):
    f = fn.identity()
    est = omega_search(f, delta, dim=4, restarts=4, iters=30)
    assert 0.999 * delta <= est.lower_bound <= delta + 1e-12  # rounding in A + K - A
    _certified(est, f)


@given(st.floats(1e-4, 1.0))
@settings(max_examples=10)
def test_sqrt_scalar_witness(delta):
    f = fn.abs_power(0.5)
    est = omega_search(f, delta, dim=3, restarts=2, iters=10)
    assert est.lower_bound >= math.sqrt(delta) - 1e-9
    _certified(est, f)


@pytest.mark.parametrize("tag", ["1", "2", "3"])
def test_commutator_tags_certified(tag):
    f = fn.abs_fn()
    est = omega_search(f, 0.2, dim=3, restarts=3, iters=30, tag=tag)
    _certified(est, f)
    R = est.witness["R"]
    assert abs(np.linalg.norm(R, 2) - 1) < 1e-12
    if tag == "1":
        assert np.allclose(R, R.conj().T)


def test_sweep_nondecreasing():
    ests = omega_sweep(fn.abs_fn(), [0.02, 0.05, 0.1, 0.3], dim=3, restarts=3, iters=20)
    vals = [e.lower_bound for e in ests]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_bad_inputs():
    with pytest.raises(ValueError):
        omega_search(fn.identity(), 0.0)
    with pytest.raises(ValueError):
        omega_search(fn.identity(), 0.1, tag="9")
    with pytest.raises(ValueError):
        mcc_transfer({}, "sideways", fn.identity())


def test_transfer_up_keeps_value():
    f = fn.abs_fn()
    est = omega_search(f, 0.1, dim=3, restarts=2, iters=20)
    out = mcc_transfer(est.witness, "f->3", f)
    assert out["ok"] and abs(out["value"] - est.lower_bound) <= 1e-12


@given(st.integers(0, 2 ** 31))
@settings(max_examples=15)
def test_transfer_down_half_value(seed):
    rng = trial_rng(seed, 0)
    n = int(rng.integers(1, 5))
    A = hermitian(rng, n)
    R = hermitian(rng, n, 1.0) if n > 1 else np.eye(1, dtype=complex)
    f = fn.abs_power(0.5)
    out = mcc_transfer({"A": A, "R": R}, "1->f", f)
    assert out["value"] >= 0.5 * out["source_value"] - 1e-9
    assert out["constraint"] <= out["bound_factor"] * out["source_constraint"] + 1e-9


def test_commuting_witness_transfers_exactly():
    A = np.diag([0.3, -0.2, 0.9]).astype(complex)
    B = np.diag([0.1, -0.2, 0.5]).astype(complex)
    f = fn.abs_fn()
    out = mcc_transfer({"A": A, "B": B}, "f->3", f)
    assert abs(out["value"] - out["source_value"]) <= 1e-15


def test_registry():
    f = fn.abs_power(0.5)
    reg = Registry(f, [1e-3, 1e-2, 0.1, 1.0])
    assert np.all(reg.maxima == 0)
    history = []
    for _ in range(10):
        registry_extend(reg, 8)
        history.append(reg.maxima.copy())
    assert all(np.all(b >= a) for a, b in zip(history, history[1:]))
    reg.append([[0.01]], [[0.0]])
    assert reg.maxima[1] >= math.sqrt(0.01) - 1e-15
    assert all(len(A) <= 4 for A, _ in reg.entries)


def test_zygmund_guards_and_constant():
    with pytest.raises(ValueError, match="unbounded"):
        zygmund_fit(fn.identity())
    assert zygmund_fit(fn.constant(2.0), [0.5, 0.1], restarts=1, iters=5)["C_hat"] == 0.0
    with pytest.raises(ValueError):
        zygmund_fit(fn.lacunary_cos(), [2.0])


def test_zygmund_lacunary_finite():
    res = zygmund_fit(fn.lacunary_cos(), [2.0 ** -k for k in range(1, 6)], restarts=2, iters=20)
    assert np.isfinite(res["C_hat"]) and res["C_hat"] > 0
