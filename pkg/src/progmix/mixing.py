"""Progression averages over finite groups and their deviation forms.

The k-term progression average of functions f_0 .. f_{k-1} on a group G is

    E_{x,g in G}  f_0(x) f_1(xg) f_2(xg^2) ... f_{k-1}(xg^{k-1}),

with the shift applied on the right; averaging over x makes this identical
to the variant that starts the progression at xg^{-1}.  The deviation form
replaces the inner x-average by its absolute distance from the product of
the means, measuring how far a single shift g is from mixing.

Integer-valued inputs (indicators, +-1 signs) are accumulated exactly in
integer arithmetic, and the exact value is reported as a Fraction alongside
the float.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .budget import OP_BUDGET, charge


@dataclass
class GroupFunction:
    """A dense function on the elements of a group table."""

    values: np.ndarray
    table: object

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if len(self.values) != self.table.size:
            raise ValueError("value array does not match the table size")

    @property
    def is_integer_valued(self) -> bool:
        return np.issubdtype(self.values.dtype, np.integer)

    def mean(self) -> complex | float:
        return self.values.mean()

    def l2_norm(self) -> float:
        """Averaged norm (E |f|^2)^(1/2)."""
        return float(np.sqrt(np.mean(np.abs(self.values) ** 2)))

    def linf_norm(self) -> float:
        return float(np.max(np.abs(self.values)))


def constant_function(table, value=1) -> GroupFunction:
    dtype = np.int64 if isinstance(value, (int, np.integer)) else np.float64
    return GroupFunction(np.full(table.size, value, dtype=dtype), table)


def delta_function(table, index: int) -> GroupFunction:
    values = np.zeros(table.size, dtype=np.int64)
    values[index] = 1
    return GroupFunction(values, table)


def indicator_function(table, indices) -> GroupFunction:
    values = np.zeros(table.size, dtype=np.int64)
    values[np.asarray(indices, dtype=np.int64)] = 1
    return GroupFunction(values, table)


def random_sign_function(table, rng: np.random.Generator) -> GroupFunction:
    return GroupFunction(rng.choice(np.array([-1, 1], dtype=np.int64), size=table.size), table)


@dataclass
class MixingResult:
    """Outcome of one progression-average evaluation."""

    value: float
    product_of_means: float
    deviation: float
    samples_used: int | str
    exact_value: Fraction | None = None
    exact_product: Fraction | None = None
    stderr: float | None = None


MAX_PROGRESSION_LENGTH = 4


def _common_table(fs, table=None):
    if not (1 <= len(fs) <= MAX_PROGRESSION_LENGTH):
        raise ValueError(f"need between 1 and {MAX_PROGRESSION_LENGTH} functions")
    table = table if table is not None else fs[0].table
    for f in fs:
        if f.table is not table:
            raise ValueError("all functions must live on the given table")
    return table


def _exact_inputs(fs) -> bool:
    return all(f.is_integer_valued for f in fs)


def _per_shift_sums(table, fs):
    """Yield (gi, sum over x of the product along the progression)."""
    n = table.size
    k = len(fs)
    vals = [f.values for f in fs]
    for gi in range(n):
        prod = vals[0].copy()
        if k > 1:
            perm = table.rmul_perm(gi)
            cursor = perm
            prod = prod * vals[1][cursor]
            for i in range(2, k):
                cursor = perm[cursor]
                prod = prod * vals[i][cursor]
        yield gi, prod.sum()


def progression_average(table=None, fs=None, samples=None, seed=None) -> MixingResult:
    """The k-term progression average E_{x,g} prod_i f_i(x g^i).

    Exact mode (samples=None or "exact") runs the full double average and
    errors out past the operation budget; an integer `samples` switches to
    seeded Monte Carlo over uniform (x, g) pairs.
    """
    fs = list(fs)
    table = _common_table(fs, table)
    n = table.size
    k = len(fs)
    if samples is not None and samples != "exact":
        return _progression_average_sampled(table, fs, int(samples), seed)
    charge(k * n * n, OP_BUDGET, f"exact {k}-term average on {n} elements")
    exact = _exact_inputs(fs)
    total = 0 if exact else 0.0
    for _, s in _per_shift_sums(table, fs):
        total += int(s) if exact else s
    value = total / (n * n)
    means = [f.mean() for f in fs]
    prod_means = np.prod(means)
    result = MixingResult(
        value=value,
        product_of_means=prod_means,
        deviation=abs(value - prod_means),
        samples_used="exact",
    )
    if exact:
        result.exact_value = Fraction(total, n * n)
        result.exact_product = _exact_mean_product(fs, n)
        result.deviation = abs(float(result.exact_value - result.exact_product))
    return result


def _exact_mean_product(fs, n: int) -> Fraction:
    prod = Fraction(1)
    for f in fs:
        prod *= Fraction(int(f.values.sum(dtype=np.int64)), n)
    return prod


def _progression_average_sampled(table, fs, samples: int, seed) -> MixingResult:
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = np.random.default_rng(seed)
    n = table.size
    x_idx = rng.integers(0, n, size=samples)
    g_idx = rng.integers(0, n, size=samples)
    result_dtype = np.result_type(*(f.values.dtype for f in fs), np.float64)
    prod = fs[0].values.astype(result_dtype)[x_idx]
    cursor = x_idx
    for f in fs[1:]:
        cursor = table.rmul_indices_many(cursor, g_idx)
        prod = prod * f.values[cursor]
    value = complex(prod.mean()) if np.iscomplexobj(prod) else float(prod.mean())
    stderr = float(prod.std(ddof=1) / np.sqrt(samples)) if samples > 1 else float("inf")
    prod_means = np.prod([f.mean() for f in fs])
    return MixingResult(
        value=value,
        product_of_means=prod_means,
        deviation=abs(value - prod_means),
        samples_used=samples,
        stderr=stderr,
    )


def progression_deviation(table=None, fs=None, samples=None, seed=None) -> MixingResult:
    """The per-shift deviation E_g | E_x prod_i f_i(x g^i) - prod_i E f_i |.

    Vanishes identically for k = 1.  Monte Carlo mode samples shifts g
    uniformly and keeps the inner x-average exact.
    """
    fs = list(fs)
    table = _common_table(fs, table)
    n = table.size
    k = len(fs)
    exact = _exact_inputs(fs)
    prod_means = np.prod([f.mean() for f in fs])

    if samples is not None and samples != "exact":
        samples = int(samples)
        if samples < 1:
            raise ValueError("samples must be positive")
        rng = np.random.default_rng(seed)
        g_indices = rng.integers(0, n, size=samples)
        devs = np.empty(samples, dtype=np.float64)
        for j, gi in enumerate(g_indices):
            inner = _single_shift_sum(table, fs, int(gi)) / n
            devs[j] = abs(inner - prod_means)
        stderr = float(devs.std(ddof=1) / np.sqrt(samples)) if samples > 1 else float("inf")
        value = float(devs.mean())
        return MixingResult(
            value=value,
            product_of_means=prod_means,
            deviation=value,
            samples_used=samples,
            stderr=stderr,
        )

    charge(k * n * n, OP_BUDGET, f"exact {k}-term deviation on {n} elements")
    if exact:
        exact_prod = _exact_mean_product(fs, n)
        total = Fraction(0)
        for _, s in _per_shift_sums(table, fs):
            total += abs(Fraction(int(s), n) - exact_prod)
        exact_value = total / n
        value = float(exact_value)
        return MixingResult(
            value=value,
            product_of_means=prod_means,
            deviation=value,
            samples_used="exact",
            exact_value=exact_value,
            exact_product=exact_prod,
        )
    acc = 0.0
    for _, s in _per_shift_sums(table, fs):
        acc += abs(s / n - prod_means)
    value = acc / n
    return MixingResult(
        value=value,
        product_of_means=prod_means,
        deviation=value,
        samples_used="exact",
    )


def _single_shift_sum(table, fs, gi: int):
    prod = fs[0].values.copy()
    if len(fs) > 1:
        perm = table.rmul_perm(gi)
        cursor = perm
        prod = prod * fs[1].values[cursor]
        for f in fs[2:]:
            cursor = perm[cursor]
            prod = prod * f.values[cursor]
    return prod.sum()


def restricted_progression_deviation(table, shift_set, fs, signed: bool = False) -> MixingResult:
    """Deviation with the shift g restricted to a subset of the group.

    Unsigned (default): E_{g in S} | E_x prod f_i(x g^i) - prod E f_i |.
    Signed: | E_{g in S} E_x prod f_i(x g^i) - prod E f_i |.
    """
    fs = list(fs)
    _common_table(fs, table)
    if shift_set.size == 0:
        raise ValueError("shift set is empty")
    shift_indices = table.indices_of(shift_set.mats)
    n = table.size
    prod_means = np.prod([f.mean() for f in fs])
    inner = np.asarray([_single_shift_sum(table, fs, int(gi)) / n for gi in shift_indices])
    if signed:
        value = abs(inner.mean() - prod_means)
    else:
        value = float(np.mean(np.abs(inner - prod_means)))
    return MixingResult(
        value=value,
        product_of_means=prod_means,
        deviation=value,
        samples_used="exact",
    )


def convolve(f: GroupFunction, mu: GroupFunction) -> GroupFunction:
    """Discrete convolution (f * mu)(x) = sum_y f(y) mu(y^-1 x)."""
    if f.table is not mu.table:
        raise ValueError("functions must live on the same table")
    table = f.table
    inv = table.inv_perm()
    out_dtype = np.result_type(f.values.dtype, mu.values.dtype, np.float64)
    if np.issubdtype(f.values.dtype, np.integer) and np.issubdtype(
        mu.values.dtype, np.integer
    ):
        out_dtype = np.int64
    out = np.zeros(table.size, dtype=out_dtype)
    for yi in np.flatnonzero(f.values):
        out += f.values[yi] * mu.values[table.lmul_perm(int(inv[yi]))]
    return GroupFunction(out, table)


def coset_smooth(f: GroupFunction, subgroup) -> GroupFunction:
    """Convolve f with the uniform probability on a subgroup.

    The result is constant on the subgroup's cosets, with the same mean as f.
    """
    table = f.table
    sub_idx = table.indices_of(subgroup.mats)
    mu = np.zeros(table.size, dtype=np.float64)
    mu[sub_idx] = 1.0 / len(sub_idx)
    return convolve(f, GroupFunction(mu, table))
