"""Local multi-path refinement.

Given the i->j path set, origin i looks only at its own neighbourhood, its
neighbours' neighbourhoods and their forwarding (Next) sets. It collects

* type-A pairs: a hop k -> k' on some path with k a neighbour of i, tagged
  with the paths using that hop, and
* type-B pairs: neighbouring nodes lying on different paths, one of them next
  to i and the other next to i or one hop further along some path.

These become a conflict graph over paths (type-B pairs enter as temporary
vertices that are removed at the end). A maximum weight independent set of
that graph, weighted by 1/hop-count, is the refined path set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from . import mwis
from .routing import NextMap, Path, PathSet, next_sets


class InconsistencyError(ValueError):
    """A classification refers to paths that are not in the path set."""


@dataclass(frozen=True)
class TypeAPair:
    k: int
    k2: int
    paths: frozenset[int]

    @property
    def nodes(self) -> tuple[int, int]:
        return (self.k, self.k2)


@dataclass(frozen=True)
class TypeBPair:
    k: int
    k2: int

    @property
    def nodes(self) -> tuple[int, int]:
        return (self.k, self.k2)


@dataclass(frozen=True)
class PairClassification:
    type_a: tuple[TypeAPair, ...] = ()
    type_b: tuple[TypeBPair, ...] = ()


@dataclass(frozen=True)
class ConflictGraph:
    """Final conflict graph over path ids, plus the intermediate stages.

    ``stage_edges`` keeps the edge sets after the node-coincidence step and
    after the distance-2 closure; vertices numbered ``>= len(path_nodes)``
    there are the temporary type-B vertices.
    """

    path_nodes: tuple[int, ...]
    edges: frozenset[tuple[int, int]]
    weights: tuple[Fraction, ...]
    temp_created: int = 0
    temp_nodes: frozenset[int] = frozenset()
    stage_edges: Mapping[str, frozenset[tuple[int, int]]] = field(default_factory=dict, compare=False)

    def as_weighted_graph(self) -> mwis.WeightedGraph:
        return mwis.WeightedGraph(len(self.path_nodes), self.edges, self.weights)

    def dump(self, labels: Sequence[str] | None = None) -> str:
        """Plain-text adjacency listing with weights, stable across runs."""
        name = (lambda v: labels[v]) if labels else str
        adj: dict[int, list[int]] = {v: [] for v in self.path_nodes}
        for u, v in sorted(self.edges):
            adj[u].append(v)
            adj[v].append(u)
        lines = [f"# conflict graph: {len(self.path_nodes)} paths, {len(self.edges)} edges, "
                 f"{self.temp_created} temporary vertices removed"]
        for v in self.path_nodes:
            nbrs = " ".join(name(u) for u in sorted(adj[v]))
            lines.append(f"{name(v)} w={self.weights[v]} : {nbrs}".rstrip())
        return "\n".join(lines) + "\n"


def _pair(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def classify_pairs(net, ps: PathSet, nexts: NextMap | None = None) -> PairClassification:
    """Collect the type-A and type-B pairs visible from the origin.

    ``net`` only needs a ``neighbors(u)`` method; it is called for the origin
    and for the origin's neighbours, nothing else.
    """
    if nexts is None:
        nexts = next_sets(ps)
    i = ps.origin
    ni = net.neighbors(i)

    on_path: dict[int, set[int]] = {}
    hop_paths: dict[tuple[int, int], set[int]] = {}
    for pid, p in enumerate(ps.paths):
        for v in p.nodes:
            on_path.setdefault(v, set()).add(pid)
        for u, v in p.hops():
            hop_paths.setdefault(_pair(u, v), set()).add(pid)

    type_a: dict[tuple[int, int], frozenset[int]] = {}
    for k in sorted(ni):
        for k2 in sorted(nexts.get(k, ())):
            key = _pair(k, k2)
            type_a[key] = frozenset(hop_paths[key])

    # nodes one hop past a neighbour of i along some path
    beyond = set()
    for l in ni:
        beyond |= nexts.get(l, frozenset())

    type_b: set[tuple[int, int]] = set()
    for k in sorted(ni):
        if k not in on_path:
            continue
        for k2 in net.neighbors(k):
            if k2 == i or k2 not in on_path:
                continue
            if on_path[k] & on_path[k2]:
                continue
            if k2 in ni or k2 in beyond:
                type_b.add(_pair(k, k2))

    return PairClassification(
        tuple(TypeAPair(a, b, ps_) for (a, b), ps_ in sorted(type_a.items())),
        tuple(TypeBPair(a, b) for a, b in sorted(type_b - set(type_a))),
    )


def build_conflict_graph(pc: PairClassification, ps: PathSet) -> ConflictGraph:
    n_paths = len(ps)
    groups: list[tuple[tuple[int, int], frozenset[int]]] = []
    for a in pc.type_a:
        bad = [p for p in a.paths if not 0 <= p < n_paths]
        if bad:
            raise InconsistencyError(f"pair {a.nodes} names unknown paths {sorted(bad)}")
        groups.append((a.nodes, a.paths))
    for t, b in enumerate(pc.type_b):
        groups.append((b.nodes, frozenset({n_paths + t})))
    order = n_paths + len(pc.type_b)

    # node coincidence, including a pair against itself
    coincide: set[tuple[int, int]] = set()
    for x, (nodes_x, grp_x) in enumerate(groups):
        for nodes_y, grp_y in groups[x:]:
            if set(nodes_x) & set(nodes_y):
                for u in grp_x:
                    for v in grp_y:
                        if u != v:
                            coincide.add(_pair(u, v))

    # one distance-2 closure pass over the graph as it stands
    adj: list[set[int]] = [set() for _ in range(order)]
    for u, v in coincide:
        adj[u].add(v)
        adj[v].add(u)
    closed = set(coincide)
    for c in range(order):
        nb = sorted(adj[c])
        for x, u in enumerate(nb):
            for v in nb[x + 1:]:
                if v not in adj[u]:
                    closed.add(_pair(u, v))

    final = frozenset((u, v) for u, v in closed if u < n_paths and v < n_paths)
    weights = tuple(Fraction(1, p.hop_count) for p in ps.paths)
    return ConflictGraph(
        path_nodes=tuple(range(n_paths)),
        edges=final,
        weights=weights,
        temp_created=len(pc.type_b),
        stage_edges={"coincidence": frozenset(coincide), "closure": frozenset(closed)},
    )


def enlarge_single(ps: PathSet, routes_from_k: PathSet) -> PathSet:
    """Grow a one-path set with the next hop's own routes, prefixed by the origin.

    A candidate is kept when it does not revisit the origin, is not already
    present and has no more hops than the original path.
    """
    if len(ps) != 1 or ps.paths[0].hop_count < 2:
        raise ValueError("enlargement applies to a single path of at least two links")
    (orig,) = ps.paths
    i, k = orig.nodes[0], orig.nodes[1]
    if routes_from_k.origin != k or routes_from_k.destination != ps.destination:
        raise ValueError(f"expected routes {k} -> {ps.destination}, got "
                         f"{routes_from_k.origin} -> {routes_from_k.destination}")
    out = [orig]
    seen = {orig.nodes}
    for q in routes_from_k.paths:
        if i in q.nodes:
            continue
        cand = (i,) + q.nodes
        if cand in seen or len(cand) - 1 > orig.hop_count:
            continue
        seen.add(cand)
        out.append(Path(cand))
    return PathSet(ps.origin, ps.destination, tuple(out), ps.method, ps.k_max)


RouteSource = Callable[[int, int], PathSet]


@dataclass(frozen=True)
class Refinement:
    """Outcome of one refinement, with enough context to audit it."""

    case: str                      # "direct", "moot" or "mwis"
    candidates: PathSet            # input after any enlargement
    selected: tuple[int, ...]      # ids into ``candidates``
    classification: PairClassification | None = None
    graph: ConflictGraph | None = None

    @property
    def paths(self) -> PathSet:
        c = self.candidates
        return PathSet(c.origin, c.destination, tuple(c.paths[p] for p in self.selected),
                       c.method, c.k_max)


def refine_detailed(net, ps: PathSet, all_routes: RouteSource | None = None) -> Refinement:
    if len(ps) == 0:
        raise ValueError("cannot refine an empty path set")
    for pid, p in enumerate(ps.paths):
        if p.hop_count == 1:
            return Refinement("direct", ps, (pid,))
    cand = ps
    if len(ps) == 1:
        k = ps.paths[0].nodes[1]
        if all_routes is not None:
            cand = enlarge_single(ps, all_routes(k, ps.destination))
        if len(cand) == 1:
            return Refinement("moot", ps, (0,))
    pc = classify_pairs(net, cand)
    graph = build_conflict_graph(pc, cand)
    chosen = mwis.solve(graph.as_weighted_graph())
    return Refinement("mwis", cand, chosen, pc, graph)


def refine(net, ps: PathSet, all_routes: RouteSource | None = None) -> PathSet:
    """Refined path set for one origin-destination pair.

    ``all_routes(k, j)`` supplies the k->j routes used to enlarge a lone
    multi-hop path; without it such a path is returned unchanged.
    """
    return refine_detailed(net, ps, all_routes).paths
