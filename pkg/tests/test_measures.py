import numpy as np
import pytest
from fractions import Fraction

from progmix.groups import (
    element,
    identity_element,
    is_regular_semisimple,
    mat_inv,
    mat_mul,
    special_linear_group,
    unipotent_subgroup,
)
from progmix.measures import (
    Measure,
    check_conjugate_average_identity,
    conjugate_product_fibres,
    conjugate_product_measure,
    heavy_mass,
    heavy_mass_mixing_bound,
    trace_stabilizer_set,
    uniform_measure,
)


def brute_fibres(table, b, h):
    """Oracle: pure-Python double loop over (g, c) pairs."""
    from progmix.groups import centralizer

    p = table.p
    z = centralizer(table, b.array())
    counts = {}
    for gi in range(table.size):
        g = table.element(gi)
        for ci in range(z.size):
            c = z.element(ci)
            point = mat_mul(
                mat_mul(mat_mul(mat_mul(mat_mul(g, mat_inv(c)), mat_inv(h)), mat_inv(g)), mat_inv(c)),
                mat_inv(h),
            )
            key = table.index_of(point)
            counts[key] = counts.get(key, 0) + 1
    return counts, z.size


def test_histogram_matches_brute_force_oracle():
    table = special_linear_group(2, 3)
    b = element([[0, 1], [2, 0]], 3)  # trace 0, regular semisimple
    assert is_regular_semisimple(b)
    h = element([[1, 1], [1, 2]], 3)
    oracle, z_size = brute_fibres(table, b, h)
    fast = conjugate_product_fibres(table, b, h)
    assert fast.sum() == table.size * z_size
    for idx in range(table.size):
        assert oracle.get(idx, 0) == int(fast[idx])


def test_measure_mass_is_exactly_one():
    table = special_linear_group(2, 5)
    rng = np.random.default_rng(0)
    for _ in range(5):
        b = table.element(int(rng.integers(table.size)))
        h = table.element(int(rng.integers(table.size)))
        mu = conjugate_product_measure(table, b, h)
        assert mu.counts.sum() == mu.denominator
        assert mu.total_mass == 1.0
        assert np.all(mu.weights >= 0)


def test_identity_atom_of_frozen_instance():
    # frozen from the brute-force oracle above
    table = special_linear_group(2, 3)
    b = element([[0, 1], [2, 0]], 3)
    mu = conjugate_product_measure(table, b, identity_element(2, 3))
    idx = table.identity_index
    assert mu.counts[idx] == 56
    assert mu.denominator == 96
    assert abs(mu.weights[idx] - 56 / 96) < 1e-15


def test_fibre_maxima_stay_quadratic():
    # the identity fibre carries about |Z(b)| * |Z(c^-1 h^-1)| pairs, so the
    # max fibre is bounded by twice (p+1)^2 at these sizes
    for p in (5, 7):
        table = special_linear_group(2, p)
        rng = np.random.default_rng([11, p])
        for _ in range(5):
            while True:
                b = table.element(int(rng.integers(table.size)))
                if is_regular_semisimple(b):
                    break
            h = table.element(int(rng.integers(table.size)))
            counts = conjugate_product_fibres(table, b, h)
            assert counts.max() <= 2 * (p + 1) ** 2


def test_heavy_mass_on_uniform():
    table = special_linear_group(2, 5)
    mu = uniform_measure(table)
    assert abs(heavy_mass(mu, 1.0) - 1.0) < 1e-12
    assert heavy_mass(mu, 2.0) == 0.0


def test_heavy_mass_on_point_mass():
    table = special_linear_group(2, 3)
    weights = np.zeros(table.size)
    weights[0] = 1.0
    mu = Measure(weights, table, 1.0)
    for c0 in (1.0, 4.0, 20.0):
        assert heavy_mass(mu, c0) == 1.0


def test_heavy_mass_monotone_in_threshold():
    table = special_linear_group(2, 5)
    b = table.element(17)
    h = table.element(42)
    mu = conjugate_product_measure(table, b, h)
    values = [heavy_mass(mu, c0) for c0 in (1.0, 2.0, 4.0, 8.0, 16.0)]
    for lo, hi in zip(values[1:], values[:-1]):
        assert lo <= hi
    assert 0 <= values[-1] <= 1


def test_heavy_mass_requires_sane_threshold():
    with pytest.raises(ValueError):
        heavy_mass(uniform_measure(special_linear_group(2, 3)), 0.5)


def test_heavy_mass_estimate_reproducible():
    table = special_linear_group(2, 3)
    a = heavy_mass_mixing_bound(table, 4.0, 1.0, samples=20, seed=3)
    b = heavy_mass_mixing_bound(table, 4.0, 1.0, samples=20, seed=3)
    assert a.value == b.value
    assert a.mean_heavy_mass == b.mean_heavy_mass
    assert a.value == (4.0 + a.mean_heavy_mass) ** 0.25


def test_heavy_mass_trend_over_primes():
    # the asymptotic 1/p decay is visible from p = 5 on; p = 3 sits below the
    # later primes because its threshold 4/|G| is so coarse
    means = {}
    for p in (3, 5, 7, 11):
        table = special_linear_group(2, p)
        d = (p - 1) / 2 if p > 3 else 1.0
        means[p] = heavy_mass_mixing_bound(table, 4.0, d, samples=50, seed=0).mean_heavy_mass
    assert means[5] > means[7] > means[11]
    assert means[3] > means[11]
    for p, m in means.items():
        assert m <= 5 / p


def test_trace_stabilizer_contains_identity():
    table = special_linear_group(2, 5)
    b = element([[2, 0], [0, 3]], 5)
    rng = np.random.default_rng(1)
    for _ in range(5):
        h = table.element(int(rng.integers(table.size)))
        ys = trace_stabilizer_set(table, b, h)
        assert table.mats[table.identity_index][None] in ys


def test_trace_stabilizer_linear_size():
    table = special_linear_group(2, 5)
    b = element([[2, 0], [0, 3]], 5)
    rng = np.random.default_rng(1)
    for _ in range(20):
        h = table.element(int(rng.integers(table.size)))
        assert trace_stabilizer_set(table, b, h).size <= 4 * 5


def test_trace_stabilizer_ratio_bounded_across_primes():
    worst = 0.0
    for p in (5, 7, 11, 13):
        table = special_linear_group(2, p)
        rng = np.random.default_rng([10, p])
        for _ in range(20):
            while True:
                b = table.element(int(rng.integers(table.size)))
                if is_regular_semisimple(b):
                    break
            h = table.element(int(rng.integers(table.size)))
            worst = max(worst, trace_stabilizer_set(table, b, h).size / p)
    assert worst <= 2.0


def test_trace_stabilizer_requires_regular_semisimple():
    table = special_linear_group(2, 5)
    with pytest.raises(ValueError):
        trace_stabilizer_set(table, element([[1, 1], [0, 1]], 5), identity_element(2, 5))


def test_conjugate_average_identity_trivial_subgroup():
    from progmix.groups import GroupTable

    table = special_linear_group(2, 3)
    trivial = GroupTable(table.mats[table.identity_index][None], 3, "subset")
    report = check_conjugate_average_identity(table, trivial)
    assert report.exact_equal
    assert report.lhs_mass == report.rhs_mass == 1


def test_conjugate_average_identity_unipotent():
    for p in (3, 5):
        table = special_linear_group(2, p)
        report = check_conjugate_average_identity(table, unipotent_subgroup(p))
        assert report.exact_equal
        assert report.max_abs_difference <= 1e-12
        assert report.lhs_mass == Fraction(1)
        assert report.rhs_mass == Fraction(1)
