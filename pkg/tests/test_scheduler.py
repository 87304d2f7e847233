import io

import pytest

from meshrefine.routing import Method, PathSet, RoutingConfig, route
from meshrefine.scheduler import DirectedLink, SimConfig, link_conflict_graph, simulate_tdma
from meshrefine.topology import Network
from meshrefine.routing import Path


def _line(n, spacing=150.0, radius=160.0):
    return Network.from_xy([(spacing * k, 0.0) for k in range(n)], radius)


def test_links_sharing_a_node_conflict():
    net = Network.from_xy([(0, 0), (100, 0), (0, 100)], 150)
    lcg = link_conflict_graph(net, [Path((0, 1)), Path((0, 2))])
    assert lcg.links == (DirectedLink(0, 1), DirectedLink(0, 2))
    assert lcg.conflicts == {(0, 1)}


def test_neighbouring_endpoints_conflict():
    # u=0 -> v=1 and w=2 -> z=3 on a line; v and w are neighbours
    net = _line(4)
    lcg = link_conflict_graph(net, [Path((0, 1)), Path((2, 3))])
    assert lcg.conflicts == {(0, 1)}


def test_far_links_do_not_conflict():
    net = _line(6)
    lcg = link_conflict_graph(net, [Path((0, 1)), Path((4, 5))])
    assert lcg.conflicts == frozenset()


def test_links_deduplicated_across_paths():
    net = _line(4)
    lcg = link_conflict_graph(net, [Path((0, 1, 2)), Path((0, 1, 2, 3))])
    assert [(l.tx, l.rx) for l in lcg.links] == [(0, 1), (1, 2), (2, 3)]


def test_one_hop_path_delivers_every_slot():
    net = _line(2)
    stats = simulate_tdma(net, [PathSet(0, 1, ((0, 1),))], SimConfig(1500, 500))
    assert stats.per_path == {(0, 0): 1000}
    assert stats.per_od == {(0, 1): 1000}


def test_two_hop_chain_alternates():
    # the two links share node 1, so at most one fires per slot; once both
    # queues sit at the cap the schedule alternates exactly
    net = _line(3)
    for warm in (500, 1000, 7500):
        stats = simulate_tdma(net, [PathSet(0, 2, ((0, 1, 2),))], SimConfig(warm + 1000, warm))
        assert abs(stats.per_path[(0, 0)] - 500) <= 1


def test_two_conflicting_links_share_the_slots():
    net = Network.from_xy([(0, 0), (100, 0), (0, 100), (100, 100)], 120)
    sets = [PathSet(0, 1, ((0, 1),)), PathSet(2, 3, ((2, 3),))]
    stats = simulate_tdma(net, sets, SimConfig(1500, 500))
    assert abs(sum(stats.per_path.values()) - 1000) <= 1


def test_sim_config_validation():
    with pytest.raises(ValueError):
        SimConfig(100, 100)
    with pytest.raises(ValueError):
        SimConfig(100, 10, queue_cap=0)


def _workload(net60, method=Method.K_DISJOINT, k=3, pairs=12):
    cfg = RoutingConfig(method, k)
    return [route(net60, i, (i * 17 + 3) % 60, cfg) for i in range(pairs) if i != (i * 17 + 3) % 60]


def test_feasibility_and_maximality_every_slot(net60):
    sets = _workload(net60)
    lcg = link_conflict_graph(net60, [p for ps in sets for p in ps])
    masks = lcg.conflict_masks()
    bad = []

    def check(slot, backlogged, active):
        if not lcg.is_independent(active):
            bad.append(("conflict", slot))
        blocked = 0
        for l in active:
            blocked |= masks[l]
        for l in backlogged:
            if not (blocked >> l) & 1:
                bad.append(("idle", slot, l))

    simulate_tdma(net60, sets, SimConfig(600, 100), observer=check)
    assert bad == []


def test_trace_lines_are_independent(net60):
    sets = _workload(net60, Method.MPR_K_DISJOINT)
    buf = io.StringIO()
    cfg = SimConfig(300, 50)
    simulate_tdma(net60, sets, cfg, trace=buf)
    lines = buf.getvalue().splitlines()
    assert len(lines) == cfg.total_slots
    lcg = link_conflict_graph(net60, [p for ps in sets for p in ps])
    for line in lines:
        assert lcg.is_independent([int(x) for x in line.split()])


def test_conservation_and_fifo(net60):
    sets = _workload(net60)
    cfg = SimConfig(800, 200, queue_cap=20)
    stats = simulate_tdma(net60, sets, cfg)
    assert stats.delivered_total <= stats.injected - stats.dropped
    assert stats.max_first_queue <= cfg.queue_cap
    assert stats.fifo_ok
    for (i, j), x in stats.per_od.items():
        s = next(k for k, ps in enumerate(sets) if (ps.origin, ps.destination) == (i, j))
        assert x == sum(v for (a, _), v in stats.per_path.items() if a == s)
    assert all(v >= 0 for v in stats.per_path.values())


def test_simulation_is_deterministic(net60):
    sets = _workload(net60)
    a = simulate_tdma(net60, sets, SimConfig(400, 100), seed=3)
    b = simulate_tdma(net60, sets, SimConfig(400, 100), seed=3)
    assert a == b


def test_invalid_hop_rejected():
    net = _line(3)
    with pytest.raises(ValueError):
        link_conflict_graph(net, [Path((0, 2))])
