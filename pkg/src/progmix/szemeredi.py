"""Exhaustive counters for grid and corner configurations in Z_n^m.

count_grid(A, k) counts tuples (a_1, ..., a_m, r) whose full translate grid
{a + (i_1, ..., i_m) r : i_j in {-k, ..., k}} lies in A; count_corners(A)
counts (a, r) with a + r e_i in A for every coordinate direction i.  The
lifting construction turns one grid instance into a corner instance in a
higher-dimensional pattern set.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from .budget import MEMBERSHIP_BUDGET, charge


@dataclass(frozen=True)
class PatternSet:
    """A subset of Z_n^m given by its member tuples."""

    m: int
    n: int
    members: frozenset[tuple[int, ...]]

    def __post_init__(self):
        for tup in self.members:
            if len(tup) != self.m or any(not 0 <= v < self.n for v in tup):
                raise ValueError(f"tuple {tup} is not in Z_{self.n}^{self.m}")

    def __len__(self) -> int:
        return len(self.members)

    def mask(self) -> np.ndarray:
        return _mask_of(self)

    @classmethod
    def from_tuples(cls, m: int, n: int, tuples) -> "PatternSet":
        return cls(m, n, frozenset(tuple(int(v) % n for v in t) for t in tuples))

    @classmethod
    def full(cls, m: int, n: int) -> "PatternSet":
        return cls(m, n, frozenset(product(range(n), repeat=m)))

    @classmethod
    def random(cls, m: int, n: int, density: float, rng: np.random.Generator) -> "PatternSet":
        total = n**m
        count = int(round(density * total))
        chosen = rng.choice(total, size=count, replace=False)
        tuples = [tuple(int(v) for v in np.unravel_index(int(c), (n,) * m)) for c in chosen]
        return cls(m, n, frozenset(tuples))


@lru_cache(maxsize=256)
def _mask_of(pattern: PatternSet) -> np.ndarray:
    mask = np.zeros((pattern.n,) * pattern.m, dtype=bool)
    for tup in pattern.members:
        mask[tup] = True
    mask.setflags(write=False)
    return mask


def count_grid(pattern: PatternSet, k: int) -> int:
    """Exact number of (a, r) whose {-k..k}^m translate grid lies in A."""
    if k < 0:
        raise ValueError("k must be >= 0")
    m, n = pattern.m, pattern.n
    charge(n ** (m + 1) * (2 * k + 1) ** m, MEMBERSHIP_BUDGET, "grid configuration count")
    mask = pattern.mask()
    offsets = list(product(range(-k, k + 1), repeat=m))
    total = 0
    for r in range(n):
        acc = np.ones_like(mask)
        for off in offsets:
            shift = tuple(-(i * r) % n for i in off)
            acc &= np.roll(mask, shift, axis=tuple(range(m)))
        total += int(acc.sum())
    return total


def count_corners(pattern: PatternSet) -> int:
    """Exact number of (a, r) with a + r e_i in A for every axis i."""
    m, n = pattern.m, pattern.n
    charge(n ** (m + 1) * m, MEMBERSHIP_BUDGET, "corner configuration count")
    mask = pattern.mask()
    total = 0
    for r in range(n):
        acc = np.ones_like(mask)
        for axis in range(m):
            acc &= np.roll(mask, -r % n, axis=axis)
        total += int(acc.sum())
    return total


def lift_pattern(pattern: PatternSet, k: int) -> PatternSet:
    """Lift A in Z_n^m to Z_n^(m+K), K = (2k+1)^m, by absorbing one grid
    direction per offset: (a, b_1 .. b_K) is a member iff
    a + sum_j b_j v_j lies in A, with v_j running over {-k..k}^m.

    The lifted set always has exactly |A| * n^K members.
    """
    m, n = pattern.m, pattern.n
    offsets = list(product(range(-k, k + 1), repeat=m))
    big_k = len(offsets)
    charge(n ** (m + big_k), MEMBERSHIP_BUDGET, "pattern lift")
    members = []
    for bs in product(range(n), repeat=big_k):
        shift = tuple(
            sum(b * off[i] for b, off in zip(bs, offsets)) % n for i in range(m)
        )
        for tup in pattern.members:
            head = tuple((tup[i] - shift[i]) % n for i in range(m))
            members.append(head + bs)
    lifted = PatternSet(m + big_k, n, frozenset(members))
    if len(lifted) != len(pattern) * n**big_k:
        raise AssertionError("lift produced an unexpected member count")
    return lifted
