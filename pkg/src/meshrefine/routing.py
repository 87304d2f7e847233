"""Deterministic stand-ins for the four routing protocols.

* ``SPA``             shortest path (AODV-like)
* ``K_DISJOINT``      up to K node-disjoint shortest paths (AOMDV-like)
* ``MPR_SPA``         shortest path over the MPR forwarding digraph (OLSR-like)
* ``MPR_K_DISJOINT``  node-disjoint extraction over that digraph (MP-OLSR-like)

Every tie is broken towards the lexicographically smallest node sequence, so
each method is a pure function of the network and the endpoints.
"""

from __future__ import annotations

import enum
import functools
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .topology import Network


class Method(str, enum.Enum):
    SPA = "SPA"
    K_DISJOINT = "K_DISJOINT"
    MPR_SPA = "MPR_SPA"
    MPR_K_DISJOINT = "MPR_K_DISJOINT"

    @property
    def multipath(self) -> bool:
        return self in (Method.K_DISJOINT, Method.MPR_K_DISJOINT)


@dataclass(frozen=True)
class Path:
    nodes: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(int(v) for v in self.nodes))
        if len(self.nodes) < 2:
            raise ValueError(f"a path needs at least two nodes, got {self.nodes}")
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError(f"path revisits a node: {self.nodes}")

    @property
    def hop_count(self) -> int:
        return len(self.nodes) - 1

    @property
    def origin(self) -> int:
        return self.nodes[0]

    @property
    def destination(self) -> int:
        return self.nodes[-1]

    def hops(self) -> list[tuple[int, int]]:
        return list(zip(self.nodes, self.nodes[1:]))

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class PathSet:
    """Paths from ``origin`` to ``destination``; a path's id is its list index."""

    origin: int
    destination: int
    paths: tuple[Path, ...] = ()
    method: str | None = None
    k_max: int | None = None

    def __post_init__(self) -> None:
        paths = tuple(p if isinstance(p, Path) else Path(tuple(p)) for p in self.paths)
        object.__setattr__(self, "paths", paths)
        seen = set()
        for p in paths:
            if p.origin != self.origin or p.destination != self.destination:
                raise ValueError(f"path {p.nodes} does not run {self.origin} -> {self.destination}")
            if p.nodes in seen:
                raise ValueError(f"duplicate path {p.nodes}")
            seen.add(p.nodes)

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)

    def __getitem__(self, pid: int) -> Path:
        return self.paths[pid]

    def to_dict(self) -> dict:
        return {
            "origin": self.origin,
            "destination": self.destination,
            "method": self.method,
            "k_max": self.k_max,
            "paths": [list(p.nodes) for p in self.paths],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: dict) -> "PathSet":
        return cls(int(doc["origin"]), int(doc["destination"]),
                   tuple(Path(tuple(p)) for p in doc["paths"]),
                   doc.get("method"), doc.get("k_max"))


@dataclass(frozen=True)
class RoutingConfig:
    method: Method = Method.K_DISJOINT
    k_max: int = 5

    def __post_init__(self) -> None:
        object.__setattr__(self, "method", Method(self.method))
        if self.k_max < 1:
            raise ValueError(f"k_max must be >= 1, got {self.k_max}")


def default_k(method: Method, delta: int) -> int:
    """K used in the experiments: 5 for K_DISJOINT; 3 or 5 (by delta) for MPR_K_DISJOINT."""
    method = Method(method)
    if method is Method.K_DISJOINT:
        return 5
    if method is Method.MPR_K_DISJOINT:
        return 3 if delta <= 8 else 5
    return 1


def validate_path(net: Network, path: Path) -> None:
    for u, v in path.hops():
        if v not in net.neighbors(u):
            raise ValueError(f"hop {u}->{v} of {path.nodes} is not a link")


# --- shortest-path core -------------------------------------------------------

Adjacency = Callable[[int], Iterable[int]]


def _lex_shortest(succ: Adjacency, pred: Adjacency, i: int, j: int,
                  removed: set[int], banned: set[tuple[int, int]]) -> tuple[int, ...] | None:
    """Lexicographically smallest shortest i->j node sequence avoiding ``removed``."""
    dist = {j: 0}
    queue = deque([j])
    while queue:
        v = queue.popleft()
        if v == i:
            break
        for u in pred(v):
            if u in dist or (u in removed and u != i) or (u, v) in banned:
                continue
            dist[u] = dist[v] + 1
            queue.append(u)
    if i not in dist:
        return None
    seq = [i]
    u = i
    while u != j:
        want = dist[u] - 1
        u = min(v for v in succ(u)
                if dist.get(v) == want and (u, v) not in banned and (v not in removed or v == j))
        seq.append(u)
    return tuple(seq)


def _disjoint(succ: Adjacency, pred: Adjacency, i: int, j: int, k_max: int) -> list[Path]:
    removed: set[int] = set()
    banned: set[tuple[int, int]] = set()
    out: list[Path] = []
    while len(out) < k_max:
        seq = _lex_shortest(succ, pred, i, j, removed, banned)
        if seq is None:
            break
        out.append(Path(seq))
        removed.update(seq[1:-1])
        if len(seq) == 2:
            banned.add((i, j))
    return out


def _check_pair(net: Network, i: int, j: int, k_max: int = 1) -> None:
    net.neighbors(i)
    net.neighbors(j)
    if i == j:
        raise ValueError("origin and destination must differ")
    if k_max < 1:
        raise ValueError(f"K must be >= 1, got {k_max}")


# --- plain graph --------------------------------------------------------------

def spa_route(net: Network, i: int, j: int) -> PathSet:
    """Single shortest path, or an empty set when j is unreachable."""
    _check_pair(net, i, j)
    paths = _disjoint(net.neighbors, net.neighbors, i, j, 1)
    return PathSet(i, j, tuple(paths), Method.SPA.value, 1)


def k_disjoint_routes(net: Network, i: int, j: int, k_max: int) -> PathSet:
    """Up to ``k_max`` internally node-disjoint paths, extracted shortest first.

    After each extraction the interior nodes of the found path are deleted
    (and the direct i-j link, if that was the path) before searching again.
    """
    _check_pair(net, i, j, k_max)
    paths = _disjoint(net.neighbors, net.neighbors, i, j, k_max)
    return PathSet(i, j, tuple(paths), Method.K_DISJOINT.value, k_max)


# --- MPR ------------------------------------------------------------------------

def two_hop_neighbors(net: Network, k: int) -> set[int]:
    one = net.neighbors(k)
    two: set[int] = set()
    for m in one:
        two |= net.neighbors(m)
    return two - one - {k}


def mpr_select(net: Network, k: int) -> frozenset[int]:
    """Greedy multipoint-relay set of ``k``.

    Repeatedly takes the neighbour covering the most still-uncovered strict
    two-hop neighbours (smallest id on ties), then drops members, smallest id
    first, whose removal leaves full coverage.
    """
    one = net.neighbors(k)
    target = two_hop_neighbors(net, k)
    uncovered = set(target)
    chosen: list[int] = []
    while uncovered:
        best = min((m for m in one if m not in chosen),
                   key=lambda m: (-len(net.neighbors(m) & uncovered), m))
        chosen.append(best)
        uncovered -= net.neighbors(best)
    mpr = set(chosen)
    for m in sorted(chosen):
        rest = mpr - {m}
        covered = set().union(*(net.neighbors(r) for r in rest)) if rest else set()
        if target <= covered:
            mpr = rest
    return frozenset(mpr)


@functools.lru_cache(maxsize=32)
def _mpr_arcs(net: Network) -> tuple[tuple[frozenset[int], ...], tuple[frozenset[int], ...]]:
    """(successors, predecessors) of the u -> mpr(u) digraph, without the final-hop arcs."""
    mpr = [mpr_select(net, u) for u in net.nodes]
    preds: list[set[int]] = [set() for _ in net.nodes]
    for u in net.nodes:
        for v in mpr[u]:
            preds[v].add(u)
    return tuple(mpr), tuple(frozenset(p) for p in preds)


def mpr_digraph(net: Network, j: int) -> tuple[Adjacency, Adjacency]:
    """Successor/predecessor functions of the MPR forwarding digraph towards ``j``.

    An arc u -> v exists iff v is one of u's relays, or v == j and u hears j.
    """
    succ_tab, pred_tab = _mpr_arcs(net)
    nj = net.neighbors(j)

    def succ(u: int) -> Iterable[int]:
        return succ_tab[u] | {j} if u in nj else succ_tab[u]

    def pred(v: int) -> Iterable[int]:
        return pred_tab[v] | nj if v == j else pred_tab[v]

    return succ, pred


def mpr_route(net: Network, i: int, j: int) -> PathSet:
    _check_pair(net, i, j)
    succ, pred = mpr_digraph(net, j)
    return PathSet(i, j, tuple(_disjoint(succ, pred, i, j, 1)), Method.MPR_SPA.value, 1)


def mpr_k_disjoint(net: Network, i: int, j: int, k_max: int) -> PathSet:
    _check_pair(net, i, j, k_max)
    succ, pred = mpr_digraph(net, j)
    return PathSet(i, j, tuple(_disjoint(succ, pred, i, j, k_max)),
                   Method.MPR_K_DISJOINT.value, k_max)


def route(net: Network, i: int, j: int, cfg: RoutingConfig) -> PathSet:
    if cfg.method is Method.SPA:
        return spa_route(net, i, j)
    if cfg.method is Method.K_DISJOINT:
        return k_disjoint_routes(net, i, j, cfg.k_max)
    if cfg.method is Method.MPR_SPA:
        return mpr_route(net, i, j)
    return mpr_k_disjoint(net, i, j, cfg.k_max)


def next_sets(ps: PathSet) -> dict[int, frozenset[int]]:
    """Map each forwarding node k to Next_k(i, j), read off consecutive hops."""
    out: dict[int, set[int]] = {}
    for p in ps.paths:
        for u, v in p.hops():
            out.setdefault(u, set()).add(v)
    return {k: frozenset(v) for k, v in out.items()}


def path_is_valid(net: Network, path: Path) -> bool:
    try:
        validate_path(net, path)
    except ValueError:
        return False
    return True


NextMap = Mapping[int, frozenset[int]]
