"""Dense Fourier analysis on Z_n and on the additive group of F_p.

Transforms are the naive O(n^2) kind with the averaged normalisation
fhat(xi) = E_a f(a) e(-xi a / n); at desk scale (n <= ~100) nothing faster
is needed, and the pairing stays exact in closed form.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .fields import inv_mod


@lru_cache(maxsize=128)
def _phase_matrix(n: int) -> np.ndarray:
    """W[xi, a] = exp(-2 pi i xi a / n)."""
    idx = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(idx, idx) / n)


def dft(values) -> np.ndarray:
    """Averaged transform: out[xi] = (1/n) sum_a values[a] e(-xi a / n)."""
    values = np.asarray(values, dtype=complex)
    n = len(values)
    return _phase_matrix(n) @ values / n


def idft(coeffs) -> np.ndarray:
    """Inverse of dft: out[a] = sum_xi coeffs[xi] e(xi a / n)."""
    coeffs = np.asarray(coeffs, dtype=complex)
    n = len(coeffs)
    return np.conj(_phase_matrix(n)).T @ coeffs


def ap3_average(f0, f1, f2) -> complex:
    """E_{x,g in Z_n} f0(x) f1(x+g) f2(x+2g), by direct summation."""
    f0, f1, f2 = (np.asarray(f, dtype=complex) for f in (f0, f1, f2))
    n = len(f0)
    if not len(f1) == len(f2) == n:
        raise ValueError("functions must share a common length")
    total = 0.0 + 0.0j
    for g in range(n):
        total += np.mean(f0 * np.roll(f1, -g) * np.roll(f2, -2 * g))
    return total / n


def ap3_average_spectral(f0, f1, f2) -> complex:
    """The same three-term average, summed on the frequency side."""
    c0, c1, c2 = dft(f0), dft(f1), dft(f2)
    n = len(c0)
    xi = np.arange(n)
    return complex(np.sum(c0[xi] * c1[(-2 * xi) % n] * c2[xi]))


def dilated_trilinear_identity(h1, h2, h3, t: int, p: int) -> tuple[complex, complex]:
    """Both sides of the dilated three-function identity over F_p.

    Spatial side: E_{a,b} h1(a) h2(a+b) h3(a + (1+t^2) b).
    Spectral side: sum_xi h1^(xi) h2^(-(1+t^-2) xi) h3^(t^-2 xi).
    Requires t != 0 mod p.
    """
    t %= p
    if t == 0:
        raise ValueError("dilation parameter t must be nonzero")
    h1, h2, h3 = (np.asarray(h, dtype=complex) for h in (h1, h2, h3))
    if not len(h1) == len(h2) == len(h3) == p:
        raise ValueError(f"functions must have length p = {p}")
    w = (t * t) % p
    coeff = (1 + w) % p

    idx = np.arange(p)
    lhs = 0.0 + 0.0j
    for b in range(p):
        lhs += np.mean(h1 * h2[(idx + b) % p] * h3[(idx + coeff * b) % p])
    lhs /= p

    t_inv2 = pow(inv_mod(t, p), 2, p)
    c1, c2, c3 = dft(h1), dft(h2), dft(h3)
    rhs = complex(np.sum(c1[idx] * c2[(-(1 + t_inv2) * idx) % p] * c3[(t_inv2 * idx) % p]))
    return complex(lhs), rhs
