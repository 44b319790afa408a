import numpy as np
import pytest

from progmix.groups import CyclicTable, special_linear_group
from progmix.mixing import GroupFunction, constant_function, delta_function, random_sign_function
from progmix.spectral import (
    QuasirandomnessParameter,
    check_bnp_inequality,
    check_spectral_bounds,
    check_two_point_mixing,
    class_expansion,
    classical_sl2_parameter,
    cyclic_spectral_oracle,
    convolution_matrix,
    spectral_norm,
    tt_star_check,
)


def test_point_mass_has_norm_one():
    for p in (3, 5):
        table = special_linear_group(2, p)
        mu = np.zeros(table.size)
        mu[7] = 1.0
        assert abs(spectral_norm(table, mu).norm - 1.0) < 1e-10


def test_uniform_probability_has_norm_zero():
    for p in (3, 5):
        table = special_linear_group(2, p)
        mu = np.full(table.size, 1 / table.size)
        assert spectral_norm(table, mu).norm < 1e-10


def test_cyclic_oracle_point_mass():
    z4 = CyclicTable(4)
    mu = np.zeros(4)
    mu[1] = 1.0
    assert abs(spectral_norm(z4, mu).norm - 1.0) < 1e-10
    assert abs(cyclic_spectral_oracle(mu) - 1.0) < 1e-12


def test_cyclic_oracle_equivalence():
    rng = np.random.default_rng(0)
    for n in range(2, 17):
        table = CyclicTable(n)
        mu = rng.random(n)
        assert abs(spectral_norm(table, mu).norm - cyclic_spectral_oracle(mu)) < 1e-8


def test_power_iteration_agrees_with_svd():
    rng = np.random.default_rng(1)
    for p in (3, 5):
        table = special_linear_group(2, p)
        mu = rng.random(table.size)
        mu /= mu.sum()
        full = spectral_norm(table, mu, method="full_svd")
        power = spectral_norm(table, mu, method="power_iteration")
        assert abs(full.norm - power.norm) / full.norm < 1e-6
        assert power.residual <= 1e-8


def test_power_iteration_on_uniform():
    table = special_linear_group(2, 3)
    mu = np.full(table.size, 1 / table.size)
    assert spectral_norm(table, mu, method="power_iteration").norm < 1e-10


def test_svd_size_limit():
    table = special_linear_group(2, 3)
    with pytest.raises(ValueError):
        spectral_norm(CyclicTable(6000), np.zeros(6000), method="full_svd")
    with pytest.raises(ValueError):
        spectral_norm(table, np.zeros(table.size), method="no_such_method")


def test_seminorm_properties():
    rng = np.random.default_rng(2)
    table = special_linear_group(2, 3)
    for _ in range(10):
        mu = rng.standard_normal(table.size)
        nu = rng.standard_normal(table.size)
        n_mu = spectral_norm(table, mu).norm
        n_nu = spectral_norm(table, nu).norm
        assert abs(spectral_norm(table, 2.5 * mu).norm - 2.5 * n_mu) < 1e-8
        assert spectral_norm(table, mu + nu).norm <= n_mu + n_nu + 1e-8


def test_convolution_matrix_is_right_convolution():
    from progmix.mixing import convolve

    table = special_linear_group(2, 3)
    rng = np.random.default_rng(3)
    mu = rng.random(table.size)
    f = rng.standard_normal(table.size)
    direct = convolve(GroupFunction(f, table), GroupFunction(mu, table)).values
    assert np.allclose(convolution_matrix(table, mu) @ f, direct)


def test_quasirandomness_parameter_validation():
    with pytest.raises(ValueError):
        QuasirandomnessParameter(0.5)
    assert classical_sl2_parameter(7).D == 3
    assert classical_sl2_parameter(7).provenance == "classical_formula"


def test_spectral_bounds_point_mass_l1_tight():
    table = special_linear_group(2, 5)
    mu = np.zeros(table.size)
    mu[0] = 1.0
    report = check_spectral_bounds(table, mu, classical_sl2_parameter(5))
    assert report.holds
    assert abs(report.norm - report.l1_bound) < 1e-9


def test_spectral_bounds_uniform():
    table = special_linear_group(2, 5)
    mu = np.full(table.size, 1 / table.size)
    report = check_spectral_bounds(table, mu, classical_sl2_parameter(5))
    assert report.holds
    assert report.norm < 1e-10


def test_spectral_bounds_random_probability_measures():
    table = special_linear_group(2, 5)
    quasi = classical_sl2_parameter(5)
    rng = np.random.default_rng(4)
    for _ in range(100):
        mu = rng.random(table.size)
        mu /= mu.sum()
        assert check_spectral_bounds(table, mu, quasi, c0=4.0).holds


def test_bnp_inequality_examples():
    table = special_linear_group(2, 5)
    quasi = classical_sl2_parameter(5)
    rng = np.random.default_rng(5)
    v = rng.standard_normal(table.size)
    f1 = GroupFunction(v - v.mean(), table)
    ones = constant_function(table)
    rep = check_bnp_inequality(table, f1, ones, quasi)
    assert rep.holds and rep.lhs < 1e-10

    centred = delta_function(table, 3).values - 1 / table.size
    f = GroupFunction(centred, table)
    assert check_bnp_inequality(table, f, f, quasi).holds


def test_bnp_inequality_random_mean_zero_pair():
    table = special_linear_group(2, 7)
    quasi = QuasirandomnessParameter(3.0)
    rng = np.random.default_rng(6)
    for _ in range(10):
        a, b = rng.standard_normal((2, table.size))
        rep = check_bnp_inequality(
            table, GroupFunction(a - a.mean(), table), GroupFunction(b - b.mean(), table), quasi
        )
        assert rep.holds


def test_bnp_requires_a_mean_zero_factor():
    table = special_linear_group(2, 3)
    with pytest.raises(ValueError):
        check_bnp_inequality(table, constant_function(table), constant_function(table),
                             classical_sl2_parameter(3))


def test_two_point_mixing_constant_case():
    table = special_linear_group(2, 5)
    rep = check_two_point_mixing(table, constant_function(table), constant_function(table),
                                 classical_sl2_parameter(5))
    assert rep.lhs == 0


def test_two_point_mixing_borel_coset_function():
    from progmix.groups import borel_subgroup

    table = special_linear_group(2, 5)
    b_idx = table.indices_of(borel_subgroup(5).mats)
    values = np.full(table.size, -len(b_idx) / table.size)
    values[b_idx] += 1.0
    f = GroupFunction(values, table)
    rep = check_two_point_mixing(table, f, f, classical_sl2_parameter(5))
    assert rep.holds
    assert rep.margin >= 0


def test_two_point_mixing_random_signs():
    rng = np.random.default_rng(7)
    for p in (3, 5, 7):
        table = special_linear_group(2, p)
        quasi = classical_sl2_parameter(p)
        for _ in range(50):
            f1 = random_sign_function(table, rng)
            f2 = random_sign_function(table, rng)
            assert check_two_point_mixing(table, f1, f2, quasi).holds


def test_tt_star_point_mass_and_uniform():
    table = special_linear_group(2, 3)
    mu = np.zeros(table.size)
    mu[5] = 1.0
    rep = tt_star_check(table, mu)
    assert abs(rep.composed_norm - 1.0) < 1e-9 and abs(rep.norm_squared - 1.0) < 1e-9
    uniform = np.full(table.size, 1 / table.size)
    rep = tt_star_check(table, uniform)
    assert rep.composed_norm < 1e-10 and rep.norm_squared < 1e-10


def test_tt_star_random_measures():
    table = special_linear_group(2, 3)
    rng = np.random.default_rng(8)
    for _ in range(10):
        mu = rng.random(table.size)
        mu /= mu.sum()
        assert tt_star_check(table, mu).relative_difference < 1e-6


def test_class_expansion_rejects_central_point():
    with pytest.raises(ValueError):
        class_expansion([5], selector="split_torus", torus_eigenvalue=1)
    with pytest.raises(ValueError):
        class_expansion([5], selector="split_torus", torus_eigenvalue=4)  # -1 mod 5
    with pytest.raises(ValueError):
        class_expansion([3], selector="split_torus")  # no split torus mod 3


def test_class_expansion_ratios_bounded_and_decreasing():
    report = class_expansion([3, 5, 7])
    for row in report.rows:
        assert row.ratio <= 1 + 1e-12
        assert row.class_size * 2 * row.p == row.group_order  # unipotent centraliser 2p
    assert report.strictly_decreasing
    assert report.fitted_exponent > 0


def test_class_expansion_split_torus():
    report = class_expansion([5, 7], selector="split_torus")
    for row in report.rows:
        assert row.ratio <= 1 + 1e-12
    assert report.rows[0].class_size == 30  # |G| / (p - 1) at p = 5
