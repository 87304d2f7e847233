"""Exact maximum weighted independent set for small graphs.

Weights are exact rationals. They are scaled to integers by the LCM of
their denominators, so every comparison is exact. Graphs up to
``BRUTE_FORCE_MAX`` vertices are enumerated. Larger ones go through an
include-first branch and bound, bounded by a greedy clique cover.

Among optimal sets the lexicographically smallest sorted index tuple is
returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

BRUTE_FORCE_MAX = 10
DEFAULT_LIMIT = 64


class CapacityError(ValueError):
    """The graph is larger than the solver is configured to accept."""


@dataclass(frozen=True)
class WeightedGraph:
    order: int
    edges: frozenset[tuple[int, int]]
    weights: tuple[Fraction, ...]

    def __init__(self, order: int, edges: Iterable[tuple[int, int]], weights: Iterable) -> None:
        norm = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < order and 0 <= v < order):
                raise ValueError(f"edge ({u}, {v}) outside [0, {order})")
            norm.add((min(u, v), max(u, v)))
        w = tuple(Fraction(x) for x in weights)
        if len(w) != order:
            raise ValueError(f"expected {order} weights, got {len(w)}")
        if any(x <= 0 for x in w):
            raise ValueError("weights must be strictly positive")
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "edges", frozenset(norm))
        object.__setattr__(self, "weights", w)

    def adjacency_masks(self) -> list[int]:
        adj = [0] * self.order
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return adj

    def weight_of(self, chosen: Iterable[int]) -> Fraction:
        return sum((self.weights[v] for v in chosen), Fraction(0))

    def is_independent(self, chosen: Iterable[int]) -> bool:
        s = set(chosen)
        return not any(u in s and v in s for u, v in self.edges)


def _integer_weights(weights: tuple[Fraction, ...]) -> list[int]:
    scale = math.lcm(*(w.denominator for w in weights)) if weights else 1
    return [int(w * scale) for w in weights]


def _bits(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def _brute_force(adj: list[int], w: list[int]) -> int:
    n = len(w)
    best_mask, best_w, best_key = 0, 0, ()
    for mask in range(1, 1 << n):
        total = 0
        m = mask
        ok = True
        while m:
            low = m & -m
            v = low.bit_length() - 1
            if adj[v] & mask:
                ok = False
                break
            total += w[v]
            m ^= low
        if not ok or total < best_w:
            continue
        key = _bits(mask)
        if total > best_w or key < best_key:
            best_mask, best_w, best_key = mask, total, key
    return best_mask


class _BranchAndBound:
    def __init__(self, adj: list[int], w: list[int]) -> None:
        self.adj = adj
        self.w = w
        self.by_weight = sorted(range(len(w)), key=lambda v: (-w[v], v))
        self.best_w = -1
        self.best_mask = 0

    def bound(self, cand: int) -> int:
        # Greedy clique cover: heaviest vertex opens a clique, each later
        # vertex joins the first clique it is fully adjacent to.
        cliques: list[int] = []
        total = 0
        for v in self.by_weight:
            if not (cand >> v) & 1:
                continue
            for idx, members in enumerate(cliques):
                if members & ~self.adj[v] == 0:
                    cliques[idx] = members | (1 << v)
                    break
            else:
                cliques.append(1 << v)
                total += self.w[v]
        return total

    def run(self, chosen: int, weight: int, cand: int) -> None:
        if cand == 0:
            if weight > self.best_w:
                self.best_w, self.best_mask = weight, chosen
            return
        if weight + self.bound(cand) <= self.best_w:
            return
        low = cand & -cand
        v = low.bit_length() - 1
        self.run(chosen | low, weight + self.w[v], cand & ~low & ~self.adj[v])
        self.run(chosen, weight, cand & ~low)


def solve(g: WeightedGraph, limit: int = DEFAULT_LIMIT) -> tuple[int, ...]:
    """Return the sorted indices of a maximum weight independent set of ``g``.

    Raises:
        CapacityError: if ``g.order`` exceeds ``limit``.
    """
    if g.order > limit:
        raise CapacityError(f"graph of order {g.order} exceeds the solver limit of {limit}")
    if g.order == 0:
        return ()
    adj = g.adjacency_masks()
    w = _integer_weights(g.weights)
    if g.order <= BRUTE_FORCE_MAX:
        return _bits(_brute_force(adj, w))
    bnb = _BranchAndBound(adj, w)
    bnb.run(0, 0, (1 << g.order) - 1)
    return _bits(bnb.best_mask)
