import pytest

from meshrefine.topology import GenerationConfig, generate_network


class AdjGraph:
    """Adjacency-only network stand-in for hand-built routing/refinement cases."""

    def __init__(self, edges, n=None):
        nodes = {v for e in edges for v in e}
        self.n = n if n is not None else (max(nodes) + 1 if nodes else 0)
        adj = [set() for _ in range(self.n)]
        for u, v in edges:
            adj[u].add(v)
            adj[v].add(u)
        self._adj = tuple(frozenset(a) for a in adj)
        self.delta = max((len(a) for a in adj), default=1)

    @property
    def nodes(self):
        return range(self.n)

    def neighbors(self, u):
        if not 0 <= u < self.n:
            raise IndexError(u)
        return self._adj[u]

    def __hash__(self):
        return hash(self._adj)

    def __eq__(self, other):
        return isinstance(other, AdjGraph) and self._adj == other._adj


class AuditedGraph:
    """Wraps a graph and records every node whose neighbourhood is read."""

    def __init__(self, inner):
        self.inner = inner
        self.queried = set()

    def neighbors(self, u):
        self.queried.add(u)
        return self.inner.neighbors(u)


@pytest.fixture
def adj_graph():
    return AdjGraph


@pytest.fixture(scope="session")
def net60():
    return generate_network(GenerationConfig(60, 8, seed=7))
