import csv
import io
import json

import pytest

from meshrefine import cli, experiments
from meshrefine.experiments import (
    CSV_COLUMNS, ODSet, SweepConfig, gen_od_sets, replay, run_sweep, theta_subset,
)
from meshrefine.routing import Method
from meshrefine.scheduler import SimConfig
from meshrefine.topology import GenerationConfig, Network, generate_network

SMALL_SIM = SimConfig(total_slots=300, warmup_slots=100)


@pytest.fixture(scope="module")
def net120():
    return generate_network(GenerationConfig(120, 8, seed=11))


def test_od_sets_shape(net120):
    sets = gen_od_sets(net120, 100, seed=5)
    assert len(sets) == 100
    for od in sets:
        assert len(od) == 120
        assert sorted(i for i, _ in od.pairs) == list(range(120))
        assert all(i != j and 0 <= j < 120 for i, j in od.pairs)
    assert len({od.pairs for od in sets}) == 100


def test_od_sets_deterministic(net120):
    assert gen_od_sets(net120, 3, seed=5) == gen_od_sets(net120, 3, seed=5)
    assert gen_od_sets(net120, 3, seed=5) != gen_od_sets(net120, 3, seed=6)


def test_od_sets_need_two_nodes():
    with pytest.raises(ValueError):
        gen_od_sets(Network.from_xy([(0, 0)], 10), 1, seed=0)


def test_od_set_rejects_repeated_origin():
    with pytest.raises(ValueError):
        ODSet(((0, 1), (0, 2)))


def test_theta_subsets(net120):
    od = gen_od_sets(net120, 1, seed=1)[0]
    assert theta_subset(od, 1.0, seed=9) == od
    assert len(theta_subset(od, 1 / 120, seed=9)) == 1
    assert len(theta_subset(od, 0.1, seed=9)) == 12
    prev = set()
    for theta in (0.05, 0.25, 0.5, 0.75, 1.0):
        cur = set(theta_subset(od, theta, seed=9).pairs)
        assert prev < cur
        prev = cur
    with pytest.raises(ValueError):
        theta_subset(od, 0, seed=9)


def _cfg(**kw):
    base = dict(n=30, delta=6, networks=1, od_sets_per_network=1, theta_points=(1.0,),
                methods=(Method.K_DISJOINT,), sim=SMALL_SIM, seed=4)
    base.update(kw)
    return SweepConfig(**base)


def test_minimal_sweep_rows():
    res = run_sweep(_cfg(methods=(Method.SPA, Method.K_DISJOINT)))
    assert [(r.method, r.refined) for r in res.records] == [
        ("SPA", False), ("SPA", True), ("K_DISJOINT", False), ("K_DISJOINT", True)]
    for r in res.records:
        assert (r.sigma is not None) == r.refined
        assert r.throughput_pps == pytest.approx(r.packets_per_slot / 0.002)
    assert not res.failures


def test_refinement_off_has_no_sigma():
    res = run_sweep(_cfg(refinement="off"))
    assert len(res.records) == 1
    assert res.records[0].sigma is None and not res.records[0].refined


def test_refinement_on_emits_refined_only():
    res = run_sweep(_cfg(refinement="on"))
    assert [r.refined for r in res.records] == [True]


def test_row_count_formula():
    cfg = _cfg(networks=2, od_sets_per_network=2, theta_points=(0.5, 1.0),
               methods=(Method.SPA, Method.MPR_K_DISJOINT))
    res = run_sweep(cfg)
    assert len(res.records) == 2 * 2 * 2 * 2 * 2
    keys = [(r.seed_path, r.method, r.refined) for r in res.records]
    assert len(set(keys)) == len(keys)


def test_replay_is_bit_identical():
    cfg = _cfg(networks=2, theta_points=(0.5, 1.0), methods=(Method.MPR_K_DISJOINT,))
    res = run_sweep(cfg)
    for rec in res.records:
        assert replay(cfg, rec) == rec


def test_replay_rejects_foreign_lineage():
    cfg = _cfg()
    rec = run_sweep(cfg).records[0]
    with pytest.raises(ValueError):
        replay(_cfg(seed=5), rec)


def test_workers_do_not_change_results():
    cfg = _cfg(networks=2, theta_points=(0.5, 1.0))
    serial = run_sweep(cfg).records
    parallel = run_sweep(_cfg(networks=2, theta_points=(0.5, 1.0), workers=2)).records
    assert serial == parallel


def test_failures_are_collected(monkeypatch):
    real = experiments.run_instance

    def flaky(cfg, net_idx, od_idx, *a, **kw):
        if net_idx == 1:
            raise RuntimeError("boom")
        return real(cfg, net_idx, od_idx, *a, **kw)

    monkeypatch.setattr(experiments, "run_instance", flaky)
    res = run_sweep(_cfg(networks=2))
    assert len(res.records) == 2
    assert res.failures == [{"network": 1, "od_set": 0, "error": "RuntimeError: boom"}]
    assert res.manifest()["failures"] == res.failures


def test_csv_and_manifest():
    res = run_sweep(_cfg())
    rows = list(csv.reader(io.StringIO(res.to_csv())))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert rows[1][CSV_COLUMNS.index("sigma")] == ""
    assert float(rows[2][CSV_COLUMNS.index("sigma")]) > 0
    man = res.manifest()
    assert man["version"] == experiments.MANIFEST_VERSION
    assert man["scheduler"] == "greedy-tdma"
    assert {"routing", "scheduler"} <= set(man["substitutions"])
    json.dumps(man)


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        _cfg(theta_points=(0.0,))
    with pytest.raises(ValueError):
        _cfg(refinement="maybe")


# --- CLI ------------------------------------------------------------------------

def test_cli_pipeline(tmp_path, capsys):
    net = tmp_path / "net.json"
    ps = tmp_path / "ps.json"
    assert cli.main(["gen-net", "--n", "30", "--delta", "6", "--seed", "3", "-o", str(net)]) == 0
    assert cli.main(["route", "--net", str(net), "--origin", "0", "--dest", "17",
                     "--method", "K_DISJOINT", "-o", str(ps)]) == 0
    doc = json.loads(ps.read_text())
    assert doc["origin"] == 0 and doc["destination"] == 17 and doc["paths"]
    ref = tmp_path / "ref.json"
    assert cli.main(["refine", "--net", str(net), "--paths", str(ps), "--dump-graph",
                     "-o", str(ref)]) == 0
    refined = json.loads(ref.read_text())
    assert set(map(tuple, refined["paths"])) <= set(map(tuple, doc["paths"]))
    trace = tmp_path / "trace.txt"
    out = tmp_path / "sim.json"
    assert cli.main(["simulate", "--net", str(net), "--paths", str(ps), "--slots", "200",
                     "--warmup", "50", "--trace", str(trace), "-o", str(out)]) == 0
    sim = json.loads(out.read_text())
    assert sim["scheduler"] == "greedy-tdma" and sim["measured_slots"] == 150
    assert len(trace.read_text().splitlines()) == 200
    assert cli.main(["audit", "--net", str(net), "--paths", str(ps)]) == 0
    assert capsys.readouterr().out.strip().endswith("ok")


def test_cli_audit_flags_bad_network(tmp_path):
    net = tmp_path / "net.json"
    cli.main(["gen-net", "--n", "20", "--delta", "6", "--seed", "1", "-o", str(net)])
    doc = json.loads(net.read_text())
    doc["positions"][3] = doc["positions"][1]  # violates the minimum spacing
    net.write_text(json.dumps(doc))
    assert cli.main(["audit", "--net", str(net)]) == 1


def test_cli_sweep_outputs(tmp_path):
    out, man = tmp_path / "rows.csv", tmp_path / "manifest.json"
    code = cli.main(["sweep", "--n", "30", "--delta", "6", "--od-sets", "1", "--theta", "0.5", "1",
                     "--methods", "SPA", "MPR_SPA", "--slots", "200", "--warmup", "50",
                     "--csv", str(out), "--manifest", str(man)])
    assert code == 0
    rows = out.read_text().splitlines()
    assert rows[0] == ",".join(CSV_COLUMNS)
    assert len(rows) == 1 + 2 * 2 * 2
    assert json.loads(man.read_text())["rows"] == 8


def test_cli_sweep_partial_failure_exit_code(tmp_path, monkeypatch):
    monkeypatch.setattr(experiments, "run_instance",
                        lambda *a, **k: (_ for _ in ()).throw(RuntimeError("x")))
    code = cli.main(["sweep", "--n", "30", "--delta", "6", "--od-sets", "1", "--slots", "200",
                     "--warmup", "50", "--csv", str(tmp_path / "r.csv")])
    assert code == 2


def test_cli_config_errors():
    assert cli.main(["gen-net", "--n", "2", "--delta", "1", "--side", "10"]) == 1
    assert cli.main(["sweep", "--theta", "2"]) == 1
    assert cli.main(["no-such-verb"]) == 1


def test_cli_fig1(capsys):
    assert cli.main(["--fig1"]) == 0
    text = capsys.readouterr().out
    assert "k2,k6 paths={b,c}" in text
    assert text.endswith("# selected {a,b} weight=5/6\n")
    assert cli.main(["fig1"]) == 0
