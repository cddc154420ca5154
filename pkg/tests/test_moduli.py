import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from opholder import functions as fn
from opholder.moduli import (Grid, constant_modulus, doubling_check, finite_diff, holder_order,
                             holder_seminorm, lacunary_signal, lambda_omega_norm, log_modulus,
                             modulus_of_function, omega_star, omega_star_closed_power,
                             periodic_lambda_norm, power_modulus, vp_error_ratio)


def test_holder_order():
    assert holder_order(0.5) == 1
    assert holder_order(1.0) == 2
    assert holder_order(1.5) == 2


def test_identity_seminorm_lipschitz():
    rep = holder_seminorm(fn.identity(), 0.999, Grid(-1, 1, 64, 1e-3, 1.0, 64))
    assert rep.order == 1
    assert 0.99 < rep.value <= 1.01


def test_sqrt_abs_seminorm_attained_at_origin():
    rep = holder_seminorm(fn.abs_power(0.5), 0.5, Grid(-1, 1, 257, 1e-4, 1.0, 128))
    assert abs(rep.value - 1.0) < 1e-9
    assert set(rep.to_json()) == {"value", "t_star", "x_star", "grid", "order"}


def test_zygmund_seminorm_of_polynomial_is_second_difference():
    rep = holder_seminorm(fn.power(2), 1.0, Grid(-1, 1, 33, 1e-3, 2.0, 64))
    assert abs(rep.value - 2 * 2.0) < 1e-9  # |Delta^2_t t^2| = 2t^2


def test_circle_seminorm_identity():
    rep = holder_seminorm(fn.trig_polynomial({1: 1.0}), 1.0)
    # second differences of z on the circle: |1 - tau|^2 / |1 - tau| -> 2 at tau = -1
    assert 0 < rep.value <= 2 + 1e-9


def test_lambda_omega_rejects_vanishing_modulus():
    with pytest.raises(ValueError):
        lambda_omega_norm(fn.identity(), constant_modulus(0.0), 1, Grid(-1, 1, 8, 1e-3, 1, 8))


@given(st.integers(1, 3), st.floats(0.05, 2.0))
def test_difference_doubling_identity(m, h):
    f = fn.sin_fn()
    x = np.linspace(-2, 2, 17)
    lhs = finite_diff(f, 2 * h, m, x)
    rhs = sum(math.comb(m, j) * finite_diff(f, h, m, x + j * h) for j in range(m + 1))
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_modulus_of_function_doubling():
    f = fn.sin_fn()
    for x in (0.01, 0.1, 0.5):
        assert modulus_of_function(f, 2, 2 * x) <= 4 * modulus_of_function(f, 2, x) * (1 + 1e-9)


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.9])
def test_omega_star_closed_form(alpha, m):
    om = power_modulus(alpha, m)
    for x in (1e-3, 0.5, 7.0):
        val = omega_star(om, m, x)
        ref = float(omega_star_closed_power(alpha, m, x))
        assert abs(val - ref) <= 1e-8 * ref


def test_omega_star_dominates_omega():
    om = log_modulus(0.5)
    for x in np.geomspace(1e-4, 10, 9):
        assert float(om(x)) <= omega_star(om, 1, x) * (1 + 1e-10)


def test_omega_star_diverges_for_linear_modulus():
    assert omega_star(power_modulus(1.0, 1), 1, 0.5) == math.inf


def test_doubling_examples():
    sq = doubling_check(power_modulus(0.5), 1)
    assert abs(sq["kappa"] - math.sqrt(2)) < 1e-12
    assert abs(sq["ob_factor"] - 2 * math.sqrt(2)) < 1e-12
    assert sq["ob_pass"]
    lin = doubling_check(power_modulus(1.0), 1)
    assert abs(lin["kappa"] - 2) < 1e-12 and lin["ob_factor"] is None
    quad = doubling_check(power_modulus(2.0, 2), 2)
    assert quad["pass"] and abs(quad["kappa"] - 4) < 1e-12


def test_vp_error_ratio_zero_for_low_degree():
    sig = lacunary_signal(3, 0.5)
    assert vp_error_ratio(sig, power_modulus(0.5), 1, 3) == 0.0


def test_vp_error_ratio_bounded_envelope():
    sig = lacunary_signal(10, 0.5)
    om = power_modulus(0.5)
    s = periodic_lambda_norm(sig, om, 1)
    ratios = [vp_error_ratio(sig, om, 1, n, seminorm=s) for n in range(0, 9)]
    assert max(ratios) < 2.0


def test_vp_error_ratio_constant_signal():
    assert vp_error_ratio(lacunary_signal(0, 0.5), power_modulus(0.5), 1, 2) == 0.0
