import numpy as np
import pytest
from hypothesis import given, strategies as st

from opholder.function_analysis import (Q, W, WSHARP, FrequencyKernel, PeriodicSignal,
                                        SampledLineSignal, build_cutoff, cutoff, kernel_symbol,
                                        lp_block, q_symbol, qn0_residual, qn_smooth, reconstruct,
                                        transition, vp_cutoff, vp_smooth)


def test_transition_endpoints_and_symmetry():
    t = np.linspace(0, 1, 101)
    h = transition(t)
    assert h[0] == 0 and h[-1] == 1
    assert np.all(np.diff(h) >= 0)
    assert np.allclose(h + transition(1 - t), 1, atol=1e-15)


def test_cutoff_support():
    x = np.array([0.0, 0.3, 0.49, 2.0, 3.0])
    assert np.all(cutoff(x) == 0)
    assert cutoff(np.array([1.0]))[0] == 1


@given(st.floats(1.0, 2.0))
def test_two_scale_partition(x):
    assert abs(cutoff(np.array([x]))[0] + cutoff(np.array([x / 2]))[0] - 1) < 1e-15


def test_partition_of_unity():
    xs, _ = build_cutoff().samples(2.0 ** -20, 2.0 ** 20, 1000)
    assert build_cutoff().partition_defect(xs) <= 1e-12


def test_vp_cutoff_flat_core():
    x = np.linspace(-1, 1, 11)
    assert np.all(vp_cutoff(x) == 1)
    assert vp_cutoff(np.array([2.5]))[0] == 0


def test_kernel_supports():
    for n in (-3, 0, 4):
        k = FrequencyKernel(W, n)
        lo, hi = k.support()
        xi = np.linspace(-3 * hi, 3 * hi, 4001)
        s = k.symbol(xi)
        assert np.all(s[(xi < lo) | (xi > hi)] == 0)
        assert np.allclose(kernel_symbol(WSHARP, n, -xi), s)


def test_q_symbol_flat_near_zero():
    for m in (1, 2, 3):
        x = np.linspace(-1 / m, 1 / m, 51)
        assert np.allclose(q_symbol(x, m), 1.0)
    x = np.linspace(-5, 5, 301)
    assert np.allclose(q_symbol(x, 1), vp_cutoff(x))


def test_kernel_errors():
    with pytest.raises(ValueError):
        kernel_symbol("bogus", 0, 1.0)
    with pytest.raises(ValueError):
        kernel_symbol(Q, 0, 1.0)
    with pytest.raises(ValueError):
        kernel_symbol(W, 1000, 1.0)


def _random_signal(rng, d):
    c = rng.standard_normal(2 * d + 1) + 1j * rng.standard_normal(2 * d + 1)
    return PeriodicSignal(c)


def test_reconstruction_exact(rng):
    f = _random_signal(rng, 1024)
    for N in (-1, 0, 3, 9):
        assert np.max(np.abs(reconstruct(f, N).coeffs - f.coeffs)) <= 1e-12


def test_vp_smooth_keeps_low_degree(rng):
    f = _random_signal(rng, 8)
    assert np.allclose(vp_smooth(f, 3).coeffs, f.coeffs)


def test_blocks_sum_to_signal(rng):
    f = _random_signal(rng, 40)
    total = lp_block(f, 0)
    for n in range(1, 8):
        total = total + lp_block(f, n)
    assert np.allclose(total.coeffs, f.coeffs, atol=1e-13)


def test_signal_evaluation_matches_coefficients():
    f = PeriodicSignal.from_dict({2: 1.0, -2: 1.0})
    x = np.linspace(0, 6, 7)
    assert np.allclose(f.at_angle(x), 2 * np.cos(2 * x))
    assert np.isclose(f.sup_norm(), 2.0)


def test_line_signal_aliasing_reported():
    sig = SampledLineSignal.sample(lambda x: np.exp(-x ** 2), 40.0, 0.05, 8.0)
    out, defect = vp_smooth(sig, 4)
    assert defect >= 0
    assert np.max(np.abs(out.values - sig.values)) < 1e-8


@pytest.mark.parametrize("m", [1, 2, 3])
def test_qn0_identity(m):
    f = PeriodicSignal.from_dict({1: 0.5, -1: 0.5, 3: 0.25j, -3: -0.25j})
    for n in (-2, 0, 2):
        assert qn0_residual(f, n, m) <= 1e-8


def test_qn_smooth_exact_on_low_frequencies():
    f = PeriodicSignal.from_dict({1: 1.0, -1: 1.0})
    assert np.allclose(qn_smooth(f, 2, 2).coeffs, f.coeffs)
