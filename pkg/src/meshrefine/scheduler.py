"""Slotted TDMA evaluation of path sets under the protocol interference model.

Every path keeps one FIFO queue per hop. Each slot, origins inject one
packet per path (dropped if the first-hop queue is full). Then a greedy,
longest-queue-first, conflict-free set of hop queues transmits one packet
each. Queues are ordered by (length desc, hops to destination asc, link
index asc, path index asc).

Two hop queues conflict iff their directed links do: the links share a node,
or an endpoint of one is a neighbour of an endpoint of the other.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import IO, Callable, Sequence

from .routing import Path, PathSet
from .topology import Network

SCHEDULER_NAME = "greedy-tdma"


@dataclass(frozen=True)
class DirectedLink:
    tx: int
    rx: int


@dataclass(frozen=True)
class LinkConflictGraph:
    links: tuple[DirectedLink, ...]
    conflicts: frozenset[tuple[int, int]]

    def index(self) -> dict[tuple[int, int], int]:
        return {(l.tx, l.rx): x for x, l in enumerate(self.links)}

    def conflict_masks(self) -> list[int]:
        masks = [1 << x for x in range(len(self.links))]
        for a, b in self.conflicts:
            masks[a] |= 1 << b
            masks[b] |= 1 << a
        return masks

    def is_independent(self, active: Sequence[int]) -> bool:
        s = set(active)
        if len(s) != len(active):
            return False
        return not any(a in s and b in s for a, b in self.conflicts)


@dataclass(frozen=True)
class SimConfig:
    total_slots: int = 67500
    warmup_slots: int = 7500
    injection: int = 1
    queue_cap: int = 50
    slot_seconds: float = 0.002

    def __post_init__(self) -> None:
        if not 0 <= self.warmup_slots < self.total_slots:
            raise ValueError(f"need 0 <= warmup_slots < total_slots, got "
                             f"{self.warmup_slots}, {self.total_slots}")
        if self.injection < 0 or self.queue_cap < 1 or self.slot_seconds <= 0:
            raise ValueError("injection must be >= 0, queue_cap >= 1, slot_seconds > 0")

    @property
    def measured_slots(self) -> int:
        return self.total_slots - self.warmup_slots


@dataclass
class TrafficStats:
    """Delivered packet counts; path ids are (pathset index, path index)."""

    per_path: dict[tuple[int, int], int]
    per_od: dict[tuple[int, int], int]
    measured_slots: int
    injected: int = 0
    dropped: int = 0
    delivered_total: int = 0
    max_queue: int = 0
    max_first_queue: int = 0
    fifo_ok: bool = True
    scheduler: str = SCHEDULER_NAME


def _links_conflict(net: Network, a: DirectedLink, b: DirectedLink) -> bool:
    ends_a, ends_b = (a.tx, a.rx), (b.tx, b.rx)
    for u in ends_a:
        for v in ends_b:
            if u == v or v in net.neighbors(u):
                return True
    return False


def link_conflict_graph(net: Network, paths: Sequence[Path]) -> LinkConflictGraph:
    """One directed link per distinct hop across ``paths``, in first-seen order."""
    links: list[DirectedLink] = []
    seen: set[tuple[int, int]] = set()
    for p in paths:
        for u, v in p.hops():
            if v not in net.neighbors(u):
                raise ValueError(f"hop {u}->{v} is not a link of the network")
            if (u, v) not in seen:
                seen.add((u, v))
                links.append(DirectedLink(u, v))
    conflicts = {(x, y) for x in range(len(links)) for y in range(x + 1, len(links))
                 if _links_conflict(net, links[x], links[y])}
    return LinkConflictGraph(tuple(links), frozenset(conflicts))


def simulate_tdma(net: Network, active: Sequence[PathSet], cfg: SimConfig = SimConfig(),
                  seed: int = 0, trace: IO[str] | None = None,
                  observer: Callable[[int, list[int], list[int]], None] | None = None) -> TrafficStats:
    """Run the slotted simulation and count deliveries after warm-up.

    The greedy policy is deterministic, so ``seed`` only enters the record
    for lineage. If ``trace`` is given, one line per slot with the active
    link indices is written to it. ``observer(slot, backlogged, active)``
    receives the link indices holding packets and those that fired.
    """
    flat: list[tuple[tuple[int, int], Path]] = [
        ((s, p), path) for s, ps in enumerate(active) for p, path in enumerate(ps.paths)]
    lcg = link_conflict_graph(net, [path for _, path in flat])
    masks = lcg.conflict_masks()
    link_of = lcg.index()

    # one entry per (path, hop)
    q_link: list[int] = []
    q_togo: list[int] = []
    q_path: list[int] = []
    first_q: list[int] = []
    last_q: set[int] = set()
    for f, (_, path) in enumerate(flat):
        first_q.append(len(q_link))
        for h, (u, v) in enumerate(path.hops()):
            q_link.append(link_of[(u, v)])
            q_togo.append(path.hop_count - h)
            q_path.append(f)
        last_q.add(len(q_link) - 1)
    queues: list[deque[int]] = [deque() for _ in q_link]
    static_key = [(q_togo[q], q_link[q], q_path[q]) for q in range(len(q_link))]

    delivered = [0] * len(flat)
    last_seen = [-1] * len(flat)
    seq = [0] * len(flat)
    stats = TrafficStats({}, {}, cfg.measured_slots)

    for slot in range(cfg.total_slots):
        for f in range(len(flat)):
            q = queues[first_q[f]]
            for _ in range(cfg.injection):
                stats.injected += 1
                if len(q) < cfg.queue_cap:
                    q.append(seq[f])
                    seq[f] += 1
                else:
                    stats.dropped += 1
            stats.max_first_queue = max(stats.max_first_queue, len(q))

        ready = sorted((q for q in range(len(queues)) if queues[q]),
                       key=lambda q: (-len(queues[q]), static_key[q]))
        blocked = 0
        fire: list[int] = []
        for q in ready:
            bit = 1 << q_link[q]
            if blocked & bit:
                continue
            blocked |= masks[q_link[q]]
            fire.append(q)

        if observer is not None:
            observer(slot, sorted({q_link[q] for q in ready}), [q_link[q] for q in fire])
        if trace is not None:
            trace.write(" ".join(str(q_link[q]) for q in fire) + "\n")

        for q in fire:
            pkt = queues[q].popleft()
            if q in last_q:
                f = q_path[q]
                if pkt <= last_seen[f]:
                    stats.fifo_ok = False
                last_seen[f] = pkt
                if slot >= cfg.warmup_slots:
                    delivered[f] += 1
            else:
                queues[q + 1].append(pkt)
        stats.max_queue = max(stats.max_queue, max((len(q) for q in queues), default=0))

    for f, (pid, _) in enumerate(flat):
        stats.per_path[pid] = delivered[f]
    for s, ps in enumerate(active):
        od = (ps.origin, ps.destination)
        stats.per_od[od] = stats.per_od.get(od, 0) + sum(
            delivered[f] for f, (pid, _) in enumerate(flat) if pid[0] == s)
    stats.delivered_total = sum(delivered)
    return stats
