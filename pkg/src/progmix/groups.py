"""Enumeration and indexing of SL_d(F_p) and its substructures.

A GroupTable stores its elements as one (n, d, d) integer array, sorted in
lexicographic order of the flattened entries, so every index is reproducible
across runs.  Element-by-element products are computed on the fly; no n x n
multiplication table is ever materialised.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from .budget import ENUMERATION_BUDGET, charge
from .fields import FieldElement, check_odd_prime, inv_mod, squares_mod


@dataclass(frozen=True)
class GroupElement:
    """A d x d matrix over F_p with determinant one."""

    entries: tuple[tuple[int, ...], ...]
    p: int

    def __post_init__(self):
        check_odd_prime(self.p)
        rows = tuple(tuple(int(e) % self.p for e in row) for row in self.entries)
        object.__setattr__(self, "entries", rows)
        d = len(rows)
        if any(len(row) != d for row in rows):
            raise ValueError("matrix must be square")

    @property
    def d(self) -> int:
        return len(self.entries)

    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64)

    def __repr__(self) -> str:
        rows = "; ".join(" ".join(str(e) for e in row) for row in self.entries)
        return f"[{rows}] (mod {self.p})"


def _as_array(x, p: int | None = None) -> tuple[np.ndarray, int]:
    """Coerce a GroupElement or array-like to an int64 array plus modulus."""
    if isinstance(x, GroupElement):
        if p is not None and x.p != p:
            raise ValueError(f"modulus mismatch: {x.p} vs {p}")
        return x.array(), x.p
    if p is None:
        raise ValueError("a raw matrix needs an explicit modulus")
    return np.asarray(x, dtype=np.int64) % p, p


def element(mat, p: int) -> GroupElement:
    return GroupElement(tuple(tuple(int(e) for e in row) for row in np.asarray(mat)), p)


def identity_element(d: int, p: int) -> GroupElement:
    return element(np.eye(d, dtype=np.int64), p)


def mat_mul(x: GroupElement, y: GroupElement) -> GroupElement:
    """Matrix product over the common prime field."""
    if x.p != y.p or x.d != y.d:
        raise ValueError("operands must share the same dimension and modulus")
    return element(x.array() @ y.array() % x.p, x.p)


def mat_inv(x: GroupElement) -> GroupElement:
    """Inverse of a determinant-one matrix, via the adjugate."""
    return element(_inverse_many(x.array()[None], x.p)[0], x.p)


def mat_trace(x: GroupElement) -> FieldElement:
    return FieldElement(int(np.trace(x.array())), x.p)


def _mul_many(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Batched product of (..., d, d) integer matrices modulo p."""
    return np.einsum("...ij,...jk->...ik", a, b) % p


def _det_many(mats: np.ndarray, p: int) -> np.ndarray:
    d = mats.shape[-1]
    if d == 2:
        return (mats[..., 0, 0] * mats[..., 1, 1] - mats[..., 0, 1] * mats[..., 1, 0]) % p
    a, b, c = mats[..., 0, 0], mats[..., 0, 1], mats[..., 0, 2]
    d0, e, f = mats[..., 1, 0], mats[..., 1, 1], mats[..., 1, 2]
    g, h, i = mats[..., 2, 0], mats[..., 2, 1], mats[..., 2, 2]
    return (a * (e * i - f * h) - b * (d0 * i - f * g) + c * (d0 * h - e * g)) % p


def _inverse_many(mats: np.ndarray, p: int) -> np.ndarray:
    """Batched inverse of determinant-one (..., d, d) matrices (adjugate)."""
    d = mats.shape[-1]
    out = np.empty_like(mats)
    if d == 2:
        out[..., 0, 0] = mats[..., 1, 1]
        out[..., 0, 1] = -mats[..., 0, 1]
        out[..., 1, 0] = -mats[..., 1, 0]
        out[..., 1, 1] = mats[..., 0, 0]
        return out % p
    if d == 3:
        for i in range(3):
            for j in range(3):
                r = [k for k in range(3) if k != j]
                c = [k for k in range(3) if k != i]
                minor = (
                    mats[..., r[0], c[0]] * mats[..., r[1], c[1]]
                    - mats[..., r[0], c[1]] * mats[..., r[1], c[0]]
                )
                out[..., i, j] = (-1) ** (i + j) * minor
        return out % p
    raise ValueError(f"unsupported dimension {d}")


class GroupTable:
    """Immutable indexed enumeration of a set of SL_d(F_p) matrices.

    When `check_group` is set the constructor verifies the identity and all
    inverses are present and spot-checks closure under products; the full
    closure properties of the subgroup constructors are exercised in tests.
    """

    def __init__(self, mats, p: int, label: str, check_group: bool = False):
        check_odd_prime(p)
        mats = np.asarray(mats, dtype=np.int64) % p
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
            raise ValueError("expected an (n, d, d) array of matrices")
        self.p = p
        self.d = int(mats.shape[1])
        self.label = label
        keys = self._encode(mats)
        order = np.argsort(keys, kind="stable")
        keys = keys[order]
        if np.any(np.diff(keys) == 0):
            raise ValueError("duplicate elements in table")
        self._keys = keys
        self.mats = np.ascontiguousarray(mats[order])
        self.mats.setflags(write=False)
        self._keys.setflags(write=False)
        self.size = int(len(self.mats))
        self._inv_perm_cache: np.ndarray | None = None
        self._inv_mats_cache: np.ndarray | None = None
        bad = _det_many(self.mats, p) != 1
        if np.any(bad):
            raise ValueError("table contains a matrix of determinant != 1")
        if check_group:
            self._check_group()

    def _encode(self, mats: np.ndarray) -> np.ndarray:
        if len(mats) == 0:
            return np.empty(0, dtype=np.int64)
        flat = mats.reshape(len(mats), -1)
        weights = self.p ** np.arange(flat.shape[1] - 1, -1, -1, dtype=np.int64)
        return flat @ weights

    def _check_group(self) -> None:
        if self.identity_index is None:
            raise ValueError(f"{self.label}: identity missing")
        self.inv_perm()  # raises if some inverse is absent
        probe = min(self.size, 8)
        prods = _mul_many(self.mats[:probe, None], self.mats[None, :], self.p)
        self.indices_of(prods.reshape(-1, self.d, self.d))

    def __len__(self) -> int:
        return self.size

    def __contains__(self, x) -> bool:
        mat, _ = _as_array(x, self.p)
        key = self._encode(mat[None])[0]
        pos = np.searchsorted(self._keys, key)
        return pos < self.size and self._keys[pos] == key

    def indices_of(self, mats: np.ndarray) -> np.ndarray:
        """Indices of the given (n, d, d) matrices; raises if any is absent."""
        keys = self._encode(np.asarray(mats, dtype=np.int64) % self.p)
        if self.size == 0:
            if len(keys):
                raise KeyError(f"element not in table '{self.label}'")
            return np.empty(0, dtype=np.int64)
        pos = np.searchsorted(self._keys, keys)
        pos_clipped = np.minimum(pos, self.size - 1)
        if not np.all(self._keys[pos_clipped] == keys):
            raise KeyError(f"element not in table '{self.label}'")
        return pos_clipped

    def index_of(self, x) -> int:
        mat, _ = _as_array(x, self.p)
        return int(self.indices_of(mat[None])[0])

    def element(self, i: int) -> GroupElement:
        return element(self.mats[i], self.p)

    @property
    def identity_index(self) -> int | None:
        key = self._encode(np.eye(self.d, dtype=np.int64)[None])[0]
        pos = np.searchsorted(self._keys, key)
        if pos < self.size and self._keys[pos] == key:
            return int(pos)
        return None

    def inv_mats(self) -> np.ndarray:
        if self._inv_mats_cache is None:
            self._inv_mats_cache = _inverse_many(self.mats, self.p)
            self._inv_mats_cache.setflags(write=False)
        return self._inv_mats_cache

    def inv_perm(self) -> np.ndarray:
        """Index permutation sending each element to its inverse."""
        if self._inv_perm_cache is None:
            self._inv_perm_cache = self.indices_of(self.inv_mats())
            self._inv_perm_cache.setflags(write=False)
        return self._inv_perm_cache

    def rmul_perm(self, gi: int) -> np.ndarray:
        """Indices of x * g over all table elements x, for g = element gi."""
        return self.indices_of(_mul_many(self.mats, self.mats[gi], self.p))

    def lmul_perm(self, gi: int) -> np.ndarray:
        """Indices of g * x over all table elements x, for g = element gi."""
        return self.indices_of(_mul_many(self.mats[gi][None], self.mats, self.p))

    def rmul_indices_many(self, x_idx: np.ndarray, g_idx: np.ndarray) -> np.ndarray:
        """Indices of x_i * g_i for paired index arrays (sampling paths)."""
        prods = _mul_many(self.mats[x_idx], self.mats[g_idx], self.p)
        return self.indices_of(prods)


class CyclicTable:
    """Z_n with additive composition; used for abelian cross-checks."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be positive")
        self.n = self.size = int(n)
        self.label = f"cyclic_{n}"
        self.identity_index = 0

    def __len__(self) -> int:
        return self.size

    def inv_perm(self) -> np.ndarray:
        return (-np.arange(self.size)) % self.size

    def rmul_perm(self, gi: int) -> np.ndarray:
        return (np.arange(self.size) + gi) % self.size

    lmul_perm = rmul_perm

    def rmul_indices_many(self, x_idx: np.ndarray, g_idx: np.ndarray) -> np.ndarray:
        return (np.asarray(x_idx) + np.asarray(g_idx)) % self.size


def special_linear_order(d: int, p: int) -> int:
    """|SL_d(F_p)| by the closed product formula."""
    order = 1
    for i in range(d):
        order *= p**d - p**i
    return order // (p - 1)


def _enumerate_sl2(p: int) -> np.ndarray:
    r = np.arange(p, dtype=np.int64)
    a, b, c, d = np.meshgrid(r, r, r, r, indexing="ij")
    mask = (a * d - b * c) % p == 1
    return np.stack([a[mask], b[mask], c[mask], d[mask]], axis=1).reshape(-1, 2, 2)


def _enumerate_sl3(p: int) -> np.ndarray:
    r = np.arange(p, dtype=np.int64)
    grids = np.meshgrid(*([r] * 6), indexing="ij")
    lower = np.stack([g.ravel() for g in grids], axis=1)  # rows 2 and 3, p^6 entries
    d, e, f, g, h, i = (lower[:, j] for j in range(6))
    chunks = []
    for a, b, c in product(range(p), repeat=3):
        det = (a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)) % p
        sel = lower[det == 1]
        block = np.empty((len(sel), 3, 3), dtype=np.int64)
        block[:, 0] = (a, b, c)
        block[:, 1] = sel[:, :3]
        block[:, 2] = sel[:, 3:]
        chunks.append(block)
    return np.concatenate(chunks)


@lru_cache(maxsize=32)
def special_linear_group(d: int, p: int) -> GroupTable:
    """Enumerate SL_d(F_p) as a GroupTable (cached; tables are immutable)."""
    if d not in (2, 3):
        raise ValueError(f"only d in {{2, 3}} is supported, got {d}")
    check_odd_prime(p)
    charge(p ** (d * d - 1), ENUMERATION_BUDGET, f"enumerating SL_{d}(F_{p})")
    mats = _enumerate_sl2(p) if d == 2 else _enumerate_sl3(p)
    table = GroupTable(mats, p, "full")
    expected = special_linear_order(d, p)
    if table.size != expected:
        raise AssertionError(
            f"enumeration produced {table.size} elements, formula gives {expected}"
        )
    return table


@lru_cache(maxsize=32)
def borel_subgroup(p: int) -> GroupTable:
    """Upper-triangular matrices in SL_2(F_p); order p(p-1)."""
    check_odd_prime(p)
    mats = []
    for t in range(1, p):
        t_inv = inv_mod(t, p)
        for a in range(p):
            mats.append([[t, a], [0, t_inv]])
    return GroupTable(np.array(mats, dtype=np.int64), p, "borel", check_group=True)


@lru_cache(maxsize=32)
def unipotent_subgroup(p: int) -> GroupTable:
    """Matrices equal to the identity except possibly at the upper right entry."""
    check_odd_prime(p)
    mats = [[[1, a], [0, 1]] for a in range(p)]
    return GroupTable(np.array(mats, dtype=np.int64), p, "unipotent", check_group=True)


def trace_values(table: GroupTable) -> np.ndarray:
    return np.einsum("nii->ni", table.mats).sum(axis=1) % table.p


def is_regular_semisimple(x: GroupElement) -> bool:
    """Distinct eigenvalues over the algebraic closure.

    For d = 2 this is trace != +-2; for d = 3 the characteristic polynomial
    must be squarefree (trivial gcd with its formal derivative over F_p).
    """
    p = x.p
    m = x.array()
    if x.d == 2:
        return int(np.trace(m)) % p not in (2, p - 2)
    if x.d == 3:
        c2 = int(np.trace(m)) % p
        minors = 0
        for i in range(3):
            r = [k for k in range(3) if k != i]
            minors += m[r[0], r[0]] * m[r[1], r[1]] - m[r[0], r[1]] * m[r[1], r[0]]
        c1 = int(minors) % p
        # charpoly x^3 - c2 x^2 + c1 x - 1
        f = [p - 1, c1, (p - c2) % p, 1]
        fp = [c1, (2 * (p - c2)) % p, 3 % p]
        return len(_poly_gcd_mod(f, fp, p)) == 1
    raise ValueError(f"unsupported dimension {x.d}")


def _poly_trim(a: list[int]) -> list[int]:
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def _poly_gcd_mod(a: list[int], b: list[int], p: int) -> list[int]:
    """Monic gcd of two polynomials with coefficients mod p (low-to-high)."""
    a = _poly_trim([c % p for c in a])
    b = _poly_trim([c % p for c in b])
    while b != [0]:
        # remainder of a by b
        a = a[:]
        while len(a) >= len(b) and a != [0]:
            shift = len(a) - len(b)
            factor = a[-1] * inv_mod(b[-1], p) % p
            for i, c in enumerate(b):
                a[shift + i] = (a[shift + i] - factor * c) % p
            a = _poly_trim(a)
        a, b = b, a
    lead_inv = inv_mod(a[-1], p)
    return [c * lead_inv % p for c in a]


def centralizer(table: GroupTable, b) -> GroupTable:
    """All table elements commuting with b (a subgroup when the table is one)."""
    b_mat, _ = _as_array(b, table.p)
    if b_mat[None] not in table:
        raise KeyError("b is not an element of the table")
    left = _mul_many(table.mats, b_mat, table.p)
    right = _mul_many(b_mat[None], table.mats, table.p)
    mask = (left == right).all(axis=(1, 2))
    return GroupTable(table.mats[mask], table.p, "centralizer")


def conjugacy_class(table: GroupTable, a) -> GroupTable:
    """The orbit {g a g^-1 : g in table}."""
    a_mat, _ = _as_array(a, table.p)
    if a_mat[None] not in table:
        raise KeyError("a is not an element of the table")
    conj = _mul_many(_mul_many(table.mats, a_mat, table.p), table.inv_mats(), table.p)
    idx = np.unique(table.indices_of(conj))
    return GroupTable(table.mats[idx], table.p, "class")


@lru_cache(maxsize=32)
def diagonalisable_set(p: int) -> GroupTable:
    """Elements of SL_2(F_p) with an eigenbasis over F_p.

    Fast criterion: central (+-identity), or trace^2 - 4 a nonzero square.
    """
    table = special_linear_group(2, p)
    tr = trace_values(table)
    disc = (tr * tr - 4) % p
    nonzero_square = np.zeros(p, dtype=bool)
    for s in squares_mod(p):
        nonzero_square[s] = s != 0
    central = np.array([table.index_of(m * np.eye(2, dtype=np.int64)) for m in (1, p - 1)])
    mask = nonzero_square[disc]
    mask[central] = True
    return GroupTable(table.mats[mask], p, "diag_set")


def shear(a, p: int | None = None) -> GroupElement:
    """The unipotent matrix [[1, a], [0, 1]]."""
    if isinstance(a, FieldElement):
        a, p = a.value, a.p
    if p is None:
        raise ValueError("shear needs a modulus")
    return GroupElement(((1, int(a) % p), (0, 1)), p)


def borel_character(x: GroupElement) -> FieldElement:
    """The homomorphism sending an upper-triangular matrix to its lower-right
    entry (the inverse of its upper-left entry); kernel is the shear subgroup."""
    if x.entries[1][0] != 0:
        raise ValueError("element is not upper-triangular")
    return FieldElement(x.entries[1][1], x.p)


def distinct_conjugate_count(table: GroupTable, sub: GroupTable) -> int:
    """Number of distinct conjugates g * sub * g^-1 with g ranging over table."""
    sub_mats = sub.mats
    seen = set()
    for gi in range(table.size):
        g = table.mats[gi]
        g_inv = table.inv_mats()[gi]
        conj = _mul_many(_mul_many(g[None], sub_mats, table.p), g_inv[None], table.p)
        keys = np.sort(table._encode(conj))
        seen.add(keys.tobytes())
    return len(seen)
