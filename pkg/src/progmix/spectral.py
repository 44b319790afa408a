"""Reduced spectral norms of convolution operators, and expansion checks.

The reduced spectral norm of mu: G -> C is the operator norm of the right
convolution f -> f * mu restricted to mean-zero f, with the averaged L^2
norm on both sides.  It is computed here either from a full SVD of the
projected convolution matrix or by power iteration on the normal operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import mixing
from .groups import conjugacy_class, element, special_linear_group
from .fields import inv_mod

FULL_SVD_LIMIT = 5000


@dataclass
class SpectralEstimate:
    norm: float
    method: str
    iterations: int
    residual: float


@dataclass
class QuasirandomnessParameter:
    """Lower bound on the dimension of nontrivial unitary representations."""

    D: float
    provenance: str = "configured"

    def __post_init__(self):
        if self.D < 1:
            raise ValueError("quasirandomness parameter must be >= 1")


def classical_sl2_parameter(p: int) -> QuasirandomnessParameter:
    """The classical minimal nontrivial representation degree (p-1)/2 for
    SL_2(F_p)."""
    return QuasirandomnessParameter((p - 1) / 2, "classical_formula")


def _values(mu) -> np.ndarray:
    if isinstance(mu, mixing.GroupFunction):
        return mu.values
    if hasattr(mu, "weights"):
        return mu.weights
    return np.asarray(mu)


def convolution_matrix(table, mu) -> np.ndarray:
    """Matrix of f -> f * mu: out[x, y] = mu(y^-1 x)."""
    vals = _values(mu)
    n = table.size
    out = np.empty((n, n), dtype=vals.dtype if np.iscomplexobj(vals) else np.float64)
    inv = table.inv_perm()
    for y in range(n):
        out[:, y] = vals[table.lmul_perm(int(inv[y]))]
    return out


def _projected(matrix: np.ndarray) -> np.ndarray:
    # restrict the domain to mean-zero functions
    return matrix - matrix.mean(axis=1, keepdims=True)


def spectral_norm(
    table,
    mu,
    method: str = "full_svd",
    tol: float = 1e-8,
    max_iterations: int = 10_000,
) -> SpectralEstimate:
    """Reduced spectral norm of mu on the given group table."""
    if method not in ("full_svd", "power_iteration"):
        raise ValueError(f"unknown method {method!r}")
    if method == "full_svd" and table.size > FULL_SVD_LIMIT:
        raise ValueError(
            f"table of size {table.size} exceeds the full SVD limit "
            f"{FULL_SVD_LIMIT}; use power_iteration"
        )
    mat = _projected(convolution_matrix(table, mu))
    if method == "full_svd":
        top = float(np.linalg.svd(mat, compute_uv=False)[0])
        return SpectralEstimate(top, "full_svd", 0, 0.0)
    return _power_iteration(mat, tol, max_iterations)


def _power_iteration(mat: np.ndarray, tol: float, max_iterations: int) -> SpectralEstimate:
    n = mat.shape[0]
    rng = np.random.default_rng(12345)
    v = rng.standard_normal(n)
    v -= v.mean()
    norm_v = np.linalg.norm(v)
    if norm_v == 0:
        return SpectralEstimate(0.0, "power_iteration", 0, 0.0)
    v /= norm_v
    herm = np.conj(mat.T) @ mat
    sigma = 0.0
    for it in range(1, max_iterations + 1):
        w = herm @ v
        norm_w = np.linalg.norm(w)
        if norm_w == 0:
            return SpectralEstimate(0.0, "power_iteration", it, 0.0)
        new_sigma = float(np.sqrt(norm_w))
        v = w / norm_w
        residual = abs(new_sigma - sigma) / max(new_sigma, 1e-300)
        sigma = new_sigma
        if residual <= tol:
            return SpectralEstimate(sigma, "power_iteration", it, residual)
    raise RuntimeError(
        f"power iteration did not reach relative residual {tol} "
        f"in {max_iterations} iterations"
    )


def cyclic_spectral_oracle(mu) -> float:
    """max over nonzero frequencies of |sum_x mu(x) e(-xi x / n)| on Z_n."""
    vals = np.asarray(_values(mu), dtype=complex)
    n = len(vals)
    best = 0.0
    for xi in range(1, n):
        s = np.sum(vals * np.exp(-2j * np.pi * xi * np.arange(n) / n))
        best = max(best, abs(s))
    return best


@dataclass
class SpectralBoundsReport:
    norm: float
    l1_bound: float
    l2_bound: float
    split_bound: float
    c0: float
    quasi_d: float
    holds: bool = field(init=False)

    def __post_init__(self):
        slack = 1e-10
        self.holds = (
            self.norm <= self.l1_bound + slack
            and self.norm <= self.l2_bound + slack
            and self.norm <= self.split_bound + slack
        )


def check_spectral_bounds(table, mu, quasi: QuasirandomnessParameter, c0: float = 4.0):
    """Compare the reduced spectral norm against its three standard bounds:
    the l1 mass, the quasirandom l2 bound D^(-1/2) |G|^(1/2) |mu|_2, and the
    split bound C0 D^(-1/2) + (mass above the C0/|G| level)."""
    vals = _values(mu)
    n = table.size
    norm = spectral_norm(table, mu).norm
    l1 = float(np.sum(np.abs(vals)))
    l2 = float(np.sqrt(np.sum(np.abs(vals) ** 2)))
    heavy = float(np.sum(vals[np.abs(vals) > c0 / n]))
    d = quasi.D
    return SpectralBoundsReport(
        norm=norm,
        l1_bound=l1,
        l2_bound=d ** -0.5 * np.sqrt(n) * l2,
        split_bound=c0 * d**-0.5 + heavy,
        c0=c0,
        quasi_d=d,
    )


@dataclass
class InequalityReport:
    lhs: float
    rhs: float
    quasi_d: float
    margin: float = field(init=False)
    holds: bool = field(init=False)

    def __post_init__(self):
        self.margin = self.rhs - self.lhs
        self.holds = self.lhs <= self.rhs + 1e-10


def check_bnp_inequality(
    table, f1: mixing.GroupFunction, f2: mixing.GroupFunction, quasi: QuasirandomnessParameter
) -> InequalityReport:
    """|f1 * f2|_L2 <= D^(-1/2) |G| |f1|_L2 |f2|_L2, one factor mean-zero."""
    tol = 1e-9
    if abs(f1.mean()) > tol and abs(f2.mean()) > tol:
        raise ValueError("at least one factor must have mean zero")
    conv = mixing.convolve(f1, f2)
    lhs = conv.l2_norm()
    rhs = quasi.D**-0.5 * table.size * f1.l2_norm() * f2.l2_norm()
    return InequalityReport(lhs=lhs, rhs=rhs, quasi_d=quasi.D)


def check_two_point_mixing(
    table, f1: mixing.GroupFunction, f2: mixing.GroupFunction, quasi: QuasirandomnessParameter
) -> InequalityReport:
    """Two-term deviation form against D^(-1/2) |f1|_L2 |f2|_L2."""
    dev = mixing.progression_deviation(table, [f1, f2]).value
    rhs = quasi.D**-0.5 * f1.l2_norm() * f2.l2_norm()
    return InequalityReport(lhs=dev, rhs=rhs, quasi_d=quasi.D)


@dataclass
class TTStarReport:
    norm: float
    norm_squared: float
    composed_norm: float
    relative_difference: float


def tt_star_check(table, mu) -> TTStarReport:
    """Compare |mu * mu~|_S with |mu|_S^2, mu~(g) = conj(mu(g^-1))."""
    vals = _values(mu)
    tilde = np.conj(vals[table.inv_perm()])
    f_mu = mixing.GroupFunction(vals, table)
    f_tilde = mixing.GroupFunction(tilde, table)
    composed = mixing.convolve(f_mu, f_tilde)
    norm = spectral_norm(table, vals).norm
    composed_norm = spectral_norm(table, composed.values).norm
    rel = abs(composed_norm - norm**2) / max(norm**2, 1e-300)
    return TTStarReport(
        norm=norm,
        norm_squared=norm**2,
        composed_norm=composed_norm,
        relative_difference=rel,
    )


@dataclass
class ClassExpansionRow:
    p: int
    group_order: int
    class_size: int
    norm: float
    ratio: float


@dataclass
class ClassExpansionReport:
    rows: list[ClassExpansionRow]
    fitted_exponent: float
    strictly_decreasing: bool


def _expansion_base_point(p: int, selector: str, torus_eigenvalue: int | None):
    if selector == "unipotent":
        return element([[1, 1], [0, 1]], p)
    if selector == "split_torus":
        lam = 2 if torus_eigenvalue is None else torus_eigenvalue % p
        if lam % p in (0, 1, p - 1):
            raise ValueError(
                f"eigenvalue {lam} gives a central or non-regular element mod {p}"
            )
        return element([[lam, 0], [0, inv_mod(lam, p)]], p)
    raise ValueError(f"unknown selector {selector!r}")


def class_expansion(
    primes, selector: str = "unipotent", torus_eigenvalue: int | None = None
) -> ClassExpansionReport:
    """Ratio |1_C(a)|_S / |C(a)| across primes, with a log-log slope fit.

    The base point a must be non-central; the ratio is expected to decay
    like p^(-c) for some c > 0, and -slope is reported as the fitted c.
    """
    rows = []
    for p in primes:
        a = _expansion_base_point(p, selector, torus_eigenvalue)
        tbl = special_linear_group(2, p)
        arr = a.array()
        if arr[0, 1] == 0 and arr[1, 0] == 0 and arr[0, 0] == arr[1, 1]:
            raise ValueError("base point is central; expansion needs a non-central class")
        cls = conjugacy_class(tbl, a)
        ind = mixing.indicator_function(tbl, tbl.indices_of(cls.mats))
        norm = spectral_norm(tbl, ind.values.astype(np.float64)).norm
        rows.append(
            ClassExpansionRow(
                p=p,
                group_order=tbl.size,
                class_size=cls.size,
                norm=norm,
                ratio=norm / cls.size,
            )
        )
    logs_p = np.log([r.p for r in rows])
    logs_r = np.log([r.ratio for r in rows])
    slope = float(np.polyfit(logs_p, logs_r, 1)[0]) if len(rows) > 1 else float("nan")
    decreasing = all(rows[i].ratio > rows[i + 1].ratio for i in range(len(rows) - 1))
    return ClassExpansionReport(rows=rows, fitted_exponent=-slope, strictly_decreasing=decreasing)
