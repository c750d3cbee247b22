"""Slow, obviously-correct reference implementations used by the property tests."""

from __future__ import annotations

import functools
import itertools
import math
from collections.abc import Sequence

import numpy as np

import nshentropy as E
from nshentropy._src.metric import matching_cost


# region Matching
def brute_force_wasserstein(a: E.Barcode, b: E.Barcode, p: float) -> float:
    """Minimum of the matching objective over every bijection of the padded
    barcodes. A padding interval is placed at the midpoint of its partner."""
    us = list(a.intervals)
    vs = list(b.intervals)
    n = max(len(us), len(vs))
    us += [None] * (n - len(us))
    vs += [None] * (n - len(vs))

    def cost(u: E.Interval | None, v: E.Interval | None) -> float:
        if u is None and v is None:
            return 0.0
        if u is None or v is None:
            x = u if u is not None else v
            assert x is not None
            if not x.is_finite:
                return math.inf
            mid = (x.birth + x.death) / 2.0
            return max(abs(x.birth - mid), abs(x.death - mid))
        if u.is_finite != v.is_finite:
            return math.inf
        if not u.is_finite:
            return abs(u.birth - v.birth)
        return max(abs(u.birth - v.birth), abs(u.death - v.death))

    best = math.inf
    for perm in itertools.permutations(range(n)):
        value = matching_cost([cost(us[i], vs[j]) for i, j in enumerate(perm)], p)
        best = min(best, value)
    return best if n else 0.0


# endregion


# region Rips
def brute_force_rips(points: np.ndarray, max_dim: int, max_scale: float) -> set[tuple[tuple[int, ...], float]]:
    """Every vertex subset of size at most ``max_dim + 2`` with diameter within scale."""
    n = len(points)
    found: set[tuple[tuple[int, ...], float]] = set()
    for size in range(1, max_dim + 3):
        for vertices in itertools.combinations(range(n), size):
            value = max(
                (float(np.linalg.norm(points[i] - points[j])) for i, j in itertools.combinations(vertices, 2)),
                default=0.0,
            )
            if value <= max_scale:
                found.add((vertices, value))
    return found


def _rank(vectors: Sequence[int]) -> int:
    pivots: dict[int, int] = {}
    for v in vectors:
        while v:
            low = v.bit_length() - 1
            if low not in pivots:
                pivots[low] = v
                break
            v ^= pivots[low]
    return len(pivots)


def _cycle_basis(chains: Sequence[int], boundaries: Sequence[int]) -> list[int]:
    """Basis (as chains) of the kernel of the map sending ``chains[k]`` to
    ``boundaries[k]``, by elimination that tracks combinations."""
    pivots: dict[int, tuple[int, int]] = {}
    kernel: list[int] = []
    for chain, boundary in zip(chains, boundaries):
        while boundary:
            low = boundary.bit_length() - 1
            if low not in pivots:
                pivots[low] = (boundary, chain)
                break
            other_boundary, other_chain = pivots[low]
            boundary ^= other_boundary
            chain ^= other_chain
        if not boundary:
            kernel.append(chain)
    return kernel


class RankOracle:
    """Persistent Betti numbers of a filtered complex from full boundary
    matrices of sublevel complexes, and intervals recovered from them."""

    def __init__(self, fc: E.FilteredComplex):
        self.simplices = fc.simplices
        self.values = fc.values()
        self.position_in_dim: dict[tuple[int, ...], int] = {}
        counters: dict[int, int] = {}
        for s in self.simplices:
            self.position_in_dim[s.vertices] = counters.get(s.dim, 0)
            counters[s.dim] = counters.get(s.dim, 0) + 1

    def _boundary(self, vertices: tuple[int, ...]) -> int:
        if len(vertices) == 1:
            return 0
        mask = 0
        for k in range(len(vertices)):
            face = vertices[:k] + vertices[k + 1 :]
            mask ^= 1 << self.position_in_dim[face]
        return mask

    def _sublevel(self, dim: int, t: float) -> list[tuple[int, ...]]:
        return [s.vertices for s in self.simplices if s.dim == dim and s.value <= t]

    @functools.cache
    def _cycles(self, dim: int, s: float) -> list[int]:
        chains = [1 << self.position_in_dim[v] for v in self._sublevel(dim, s)]
        boundaries = [self._boundary(v) for v in self._sublevel(dim, s)]
        return _cycle_basis(chains, boundaries)

    @functools.cache
    def _filling(self, dim: int, t: float) -> list[int]:
        return [self._boundary(v) for v in self._sublevel(dim + 1, t)]

    @functools.cache
    def persistent_betti(self, dim: int, s: float, t: float) -> int:
        """Rank of ``H_dim(K_s) -> H_dim(K_t)`` for s <= t."""
        cycles = self._cycles(dim, s)
        filling = self._filling(dim, t)
        z = len(cycles)
        b = _rank(filling)
        z_plus_b = _rank(cycles + filling)
        return z - (z + b - z_plus_b)

    def intervals(self, dim: int) -> list[E.Interval]:
        values = self.values
        k = len(values)

        def beta(i: int, j: int) -> int:
            if i < 0:
                return 0
            return self.persistent_betti(dim, values[i], values[j])

        found: list[E.Interval] = []
        for i in range(k):
            for j in range(i + 1, k):
                multiplicity = beta(i, j - 1) - beta(i, j) - beta(i - 1, j - 1) + beta(i - 1, j)
                found += [E.Interval(values[i], values[j])] * multiplicity
            infinite = beta(i, k - 1) - beta(i - 1, k - 1)
            found += [E.Interval(values[i], math.inf)] * infinite
        return sorted(found)


# endregion
