"""Random unit-disk mesh topologies.

Nodes are dropped in a square one at a time. Node 0 sits at the centre; every
later node is drawn uniformly and kept only if it lands at least
``MIN_SPACING`` from all placed nodes, hears at least one of them, and pushes
no degree (its own or a neighbour's) above the cap. Two nodes are neighbours
iff their Euclidean distance is at most the common radius ``R``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .seeding import stream

DEFAULT_SIDE = 1500.0
MIN_SPACING = 25.0
DEFAULT_MAX_ATTEMPTS = 1000
DEFAULT_MAX_RESTARTS = 100
FORMAT_VERSION = 1

_BATCH = 64


class GenerationError(RuntimeError):
    """Raised when no network satisfying the placement constraints was found."""


class NetworkFormatError(ValueError):
    """Raised when a serialized network is malformed or violates an invariant."""


def comm_radius(n: int, delta: int) -> float:
    """Communication/interference radius for ``n`` nodes and degree cap ``delta``.

    Chosen so that R = 200 for n = 80, delta = 4 and the expected number of
    nodes per radius-R disc tracks ``delta``.
    """
    if n < 1 or delta < 1:
        raise ValueError(f"comm_radius needs n >= 1 and delta >= 1, got n={n}, delta={delta}")
    return 200.0 * math.sqrt(20.0 * delta / n)


@dataclass(frozen=True)
class Point:
    x: float
    y: float


@dataclass(frozen=True)
class GenerationConfig:
    n: int
    delta: int
    seed: int = 0
    side: float = DEFAULT_SIDE
    max_attempts: int = DEFAULT_MAX_ATTEMPTS
    max_restarts: int = DEFAULT_MAX_RESTARTS

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if self.delta < 1:
            raise ValueError(f"delta must be >= 1, got {self.delta}")
        if self.max_attempts < 1:
            raise ValueError(f"max_attempts must be >= 1, got {self.max_attempts}")
        if self.max_restarts < 1:
            raise ValueError(f"max_restarts must be >= 1, got {self.max_restarts}")
        if self.side <= 0:
            raise ValueError(f"side must be positive, got {self.side}")


@dataclass(frozen=True)
class Network:
    """An immutable unit-disk graph over placed nodes.

    Adjacency is always derived from ``positions`` and ``radius``; it is never
    supplied or stored independently.
    """

    positions: tuple[Point, ...]
    radius: float
    delta: int
    side: float = DEFAULT_SIDE
    seed: int | None = None
    _adj: tuple[frozenset[int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        xy = np.array([(p.x, p.y) for p in self.positions], dtype=float).reshape(-1, 2)
        dx = xy[:, None, 0] - xy[None, :, 0]
        dy = xy[:, None, 1] - xy[None, :, 1]
        close = dx * dx + dy * dy <= self.radius * self.radius
        np.fill_diagonal(close, False)
        adj = tuple(frozenset(int(v) for v in np.flatnonzero(row)) for row in close)
        object.__setattr__(self, "_adj", adj)

    @classmethod
    def from_xy(cls, coords, radius: float, delta: int | None = None, side: float = DEFAULT_SIDE,
                seed: int | None = None) -> "Network":
        pts = tuple(Point(float(x), float(y)) for x, y in coords)
        return cls(pts, float(radius), delta if delta is not None else max(1, len(pts) - 1), side, seed)

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def nodes(self) -> range:
        return range(self.n)

    def neighbors(self, u: int) -> frozenset[int]:
        self._check(u)
        return self._adj[u]

    def degree(self, u: int) -> int:
        return len(self.neighbors(u))

    def are_neighbors(self, u: int, v: int) -> bool:
        self._check(u)
        self._check(v)
        return u != v and self.distance_sq(u, v) <= self.radius * self.radius

    def distance_sq(self, u: int, v: int) -> float:
        a, b = self.positions[u], self.positions[v]
        dx, dy = a.x - b.x, a.y - b.y
        return dx * dx + dy * dy

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in self.nodes for v in sorted(self._adj[u]) if u < v]

    def _check(self, u: int) -> None:
        if not (isinstance(u, (int, np.integer)) and 0 <= u < self.n):
            raise IndexError(f"invalid node id {u!r} for network of {self.n} nodes")

    def to_dict(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "n": self.n,
            "delta": self.delta,
            "side": self.side,
            "radius": self.radius,
            "seed": self.seed,
            "positions": [[p.x, p.y] for p in self.positions],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: dict) -> "Network":
        """Load and validate a serialized network; raises NetworkFormatError."""
        try:
            if doc["version"] != FORMAT_VERSION:
                raise NetworkFormatError(f"unsupported network format version {doc['version']!r}")
            n, delta = int(doc["n"]), int(doc["delta"])
            positions = doc["positions"]
            if len(positions) != n:
                raise NetworkFormatError(f"n={n} but {len(positions)} positions stored")
            radius = float(doc["radius"])
            if not math.isclose(radius, comm_radius(n, delta), rel_tol=1e-12):
                raise NetworkFormatError(
                    f"radius {radius} inconsistent with comm_radius({n}, {delta})")
            net = cls.from_xy(positions, radius, delta, float(doc["side"]), doc.get("seed"))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, NetworkFormatError):
                raise
            raise NetworkFormatError(f"malformed network document: {exc}") from exc
        problems = audit(net)
        if problems:
            raise NetworkFormatError("; ".join(problems[:5]))
        return net

    @classmethod
    def from_json(cls, text: str) -> "Network":
        return cls.from_dict(json.loads(text))


def audit(net: Network, check_center: bool = True) -> list[str]:
    """Return every invariant violation found in ``net`` (empty list = clean)."""
    problems = []
    xy = np.array([(p.x, p.y) for p in net.positions], dtype=float)
    if len(xy) and (xy.min() < 0 or xy.max() > net.side):
        problems.append("node outside the square")
    if check_center and net.n and (net.positions[0].x, net.positions[0].y) != (net.side / 2, net.side / 2):
        problems.append("node 0 not at the centre")
    r2 = net.radius * net.radius
    for u in net.nodes:
        deg = len(net.neighbors(u))
        if not 1 <= deg <= net.delta:
            problems.append(f"node {u} has degree {deg} outside [1, {net.delta}]")
        for v in range(u + 1, net.n):
            d2 = net.distance_sq(u, v)
            if d2 < MIN_SPACING * MIN_SPACING:
                problems.append(f"nodes {u},{v} closer than {MIN_SPACING}")
            if (v in net.neighbors(u)) != (d2 <= r2) or (u in net.neighbors(v)) != (d2 <= r2):
                problems.append(f"adjacency of {u},{v} disagrees with distance")
    return problems


def _place(cfg: GenerationConfig, radius: float, rng: np.random.Generator) -> np.ndarray | None:
    """One growth attempt; returns an (n, 2) array or None after too many rejections."""
    xy = np.empty((cfg.n, 2))
    xy[0] = (cfg.side / 2, cfg.side / 2)
    deg = np.zeros(cfg.n, dtype=np.int64)
    r2 = radius * radius
    s2 = MIN_SPACING * MIN_SPACING
    for m in range(1, cfg.n):
        placed = xy[:m]
        budget = cfg.max_attempts
        while budget > 0:
            batch = min(_BATCH, budget)
            cand = rng.uniform(0.0, cfg.side, size=(batch, 2))
            dx = cand[:, None, 0] - placed[None, :, 0]
            dy = cand[:, None, 1] - placed[None, :, 1]
            d2 = dx * dx + dy * dy
            near = d2 <= r2
            count = near.sum(axis=1)
            ok = (d2 >= s2).all(axis=1) & (count >= 1) & (count <= cfg.delta)
            ok &= ~(near & (deg[:m] >= cfg.delta)[None, :]).any(axis=1)
            hits = np.flatnonzero(ok)
            if hits.size:
                k = hits[0]
                xy[m] = cand[k]
                deg[:m] += near[k]
                deg[m] = count[k]
                break
            budget -= batch
        else:
            return None
    return xy


def generate_network(cfg: GenerationConfig) -> Network:
    """Grow a random network under the placement rules; deterministic in ``cfg``.

    Raises:
        GenerationError: if ``cfg.max_restarts`` growth attempts all stall.
    """
    radius = comm_radius(cfg.n, cfg.delta)
    for restart in range(cfg.max_restarts):
        xy = _place(cfg, radius, stream(cfg.seed, "placement", restart))
        if xy is not None:
            return Network.from_xy(xy, radius, cfg.delta, cfg.side, cfg.seed)
    raise GenerationError(
        f"no network found for n={cfg.n}, delta={cfg.delta}, side={cfg.side} "
        f"after {cfg.max_restarts} restarts")
