"""The five-path worked example (paths a..e from origin i to destination j).

Node ids: i=0, k1..k6 = 1..6, j=9. Paths, with the hop counts the example
implies:

    a = i k1 j           (2 hops)
    b = i k2 k6 j        (3)
    c = i k3 k2 k6 j     (4)
    d = i k1 k5 j        (3)
    e = i k4 k6 j        (3)

Neighbourhood: i hears k1..k4; the only link joining nodes on different
paths is k3-k5.
"""

from __future__ import annotations

from .mra import PairClassification, Refinement, TypeAPair, TypeBPair, build_conflict_graph, classify_pairs
from .mwis import solve
from .routing import PathSet

I, K1, K2, K3, K4, K5, K6, J = 0, 1, 2, 3, 4, 5, 6, 9
LABELS = ("a", "b", "c", "d", "e")
NODE_NAMES = {I: "i", K1: "k1", K2: "k2", K3: "k3", K4: "k4", K5: "k5", K6: "k6", J: "j"}

PATHS = PathSet(I, J, (
    (I, K1, J),
    (I, K2, K6, J),
    (I, K3, K2, K6, J),
    (I, K1, K5, J),
    (I, K4, K6, J),
))

CLASSIFICATION = PairClassification(
    type_a=(
        TypeAPair(K1, K5, frozenset({3})),
        TypeAPair(K1, J, frozenset({0})),
        TypeAPair(K2, K3, frozenset({2})),
        TypeAPair(K2, K6, frozenset({1, 2})),
        TypeAPair(K4, K6, frozenset({4})),
    ),
    type_b=(TypeBPair(K3, K5),),
)

_LINKS = [(I, K1), (I, K2), (I, K3), (I, K4), (K1, J), (K1, K5), (K5, J), (K2, K6),
          (K3, K2), (K6, J), (K4, K6), (K3, K5)]


class Fig1Graph:
    """Adjacency-only stand-in for a network, matching the example's panel (a)."""

    def __init__(self) -> None:
        adj: dict[int, set[int]] = {v: set() for v in NODE_NAMES}
        for u, v in _LINKS:
            adj[u].add(v)
            adj[v].add(u)
        self._adj = {k: frozenset(v) for k, v in adj.items()}

    def neighbors(self, u: int) -> frozenset[int]:
        return self._adj[u]


def run() -> tuple[Refinement, str]:
    """Classify, build the conflict graph and select; returns the result and a text dump."""
    pc = classify_pairs(Fig1Graph(), PATHS)
    graph = build_conflict_graph(pc, PATHS)
    chosen = solve(graph.as_weighted_graph())
    result = Refinement("mwis", PATHS, chosen, pc, graph)
    name = NODE_NAMES.get
    lines = ["# type-A pairs"]
    for a in pc.type_a:
        lines.append(f"{name(a.k)},{name(a.k2)} paths={{{','.join(LABELS[p] for p in sorted(a.paths))}}}")
    lines.append("# type-B pairs")
    for b in pc.type_b:
        lines.append(f"{name(b.k)},{name(b.k2)}")
    text = "\n".join(lines) + "\n" + graph.dump(LABELS)
    weight = graph.as_weighted_graph().weight_of(chosen)
    text += f"# selected {{{','.join(LABELS[p] for p in chosen)}}} weight={weight}\n"
    return result, text
