import csv
import io
import json

import pytest

from qcorr import behaviors as bh
from qcorr import cli
from qcorr import statelib as sl


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_bounds(capsys):
    code, out = run_json(capsys, "bounds", "svetlichny", "3")
    assert code == 0
    assert out["plhv"] == 4 and out["abs"] == 8
    assert out["qm"] == pytest.approx(4 * 2**0.5)


def test_evaluate_mermin_on_ghz(capsys):
    code, out = run_json(capsys, "evaluate", "mermin:3", "--state", "ghz3", "--settings", "mermin-ghz")
    assert code == 0 and out["value"] == pytest.approx(4)


def test_evaluate_with_explicit_angles(capsys):
    code, out = run_json(capsys, "evaluate", "svetlichny:2", "--state", "ghz:2",
                         "--settings", "0.785398163397:2.35619449019,0:1.57079632679")
    assert code == 0 and out["value"] == pytest.approx(2 * 2**0.5, abs=1e-9)


def test_detect_records(capsys):
    code, out = run_json(capsys, "detect", "ghz3")
    assert code == 0
    assert all(r["violated"] for r in out["records"])
    assert out["classification"]["levels"]["2"] == "excluded"


def test_detect_split_on_state_file(tmp_path, capsys):
    path = tmp_path / "rho.json"
    path.write_text(json.dumps(sl.state_to_json(sl.NAMED_STATES["dur3"]())))
    code, out = run_json(capsys, "detect", str(path), "--split", "a-(bc)")
    assert code == 0 and any(r["violated"] for r in out["records"])


def test_robustness_named_and_family(capsys):
    code, out = run_json(capsys, "robustness", "smolin", "--criterion", "some")
    assert code == 0 and out["exact"] == "2/3"
    code, out = run_json(capsys, "robustness", "ghz:4:white", "--criterion", "full")
    assert code == 0 and out["exact"] == "8/15"


def test_tradeoff_csv(capsys):
    code, out = run(capsys, "tradeoff", "--curve", "c", "--grid", "3", "--verify")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0] == ["theta_a", "theta_b", "value", "numeric"]
    assert len(rows) == 10
    for r in rows[1:]:
        assert float(r[2]) == pytest.approx(float(r[3]), abs=1e-8)


def test_polytope_membership_of_pr_box(tmp_path, capsys):
    path = tmp_path / "pr.json"
    path.write_text(json.dumps(bh.behavior_to_json(bh.pr_box())))
    code, out = run_json(capsys, "polytope", "membership", str(path))
    assert code == 0
    assert out["local"] is False and out["no_signaling"] is True
    code, out = run_json(capsys, "polytope", "facets", str(path))
    assert out["max_chsh"] == pytest.approx(4)
    code, out = run_json(capsys, "polytope", "vertices", str(path))
    assert out["count"] == 16


@pytest.mark.parametrize("audit,bound", [("tv", 8), ("ns", 4), ("d3", 2.5)])
def test_monogamy_audits(capsys, audit, bound):
    code, out = run_json(capsys, "monogamy", "--audit", audit, "--samples", "50", "--seed", "1")
    assert code == 0
    assert out["bound"] == bound and out["max_observed"] <= bound + 1e-8
    assert out["witnesses"]


def test_hv_sim_is_reproducible_across_thread_counts(capsys, monkeypatch):
    monkeypatch.setenv("QCORR_THREADS", "1")
    _, one = run_json(capsys, "hv-sim", "--family", "swap", "--samples", "40", "--seed", "7")
    monkeypatch.setenv("QCORR_THREADS", "4")
    _, four = run_json(capsys, "hv-sim", "--family", "swap", "--samples", "40", "--seed", "7")
    assert one == four
    assert one["max_chsh"] <= 2 + 1e-9


def test_reproduce_ids(capsys):
    code, out = run_json(capsys, "reproduce", "phi4-robustness")
    assert code == 0 and out["some_exact"] == "16/19"
    code, out = run_json(capsys, "reproduce", "w-state-d3")
    assert out["general"][0] == pytest.approx(1.022, abs=1e-3)
    code, out = run_json(capsys, "reproduce", "ch9-bell")
    assert out["value"] == pytest.approx(2 * 2**0.5)
    code, out = run_json(capsys, "reproduce", "ghz-thresholds")
    assert [r["some_exact"] for r in out["rows"]][0] == "4/5"
    code, out = run_json(capsys, "reproduce", "svetlichny-max")
    assert out["rows"][1]["plhv"] == 4


def test_unknown_reproduce_id_exits_2(capsys):
    code, out = run_json(capsys, "reproduce", "nope")
    assert code == 2 and out["error"] == "invariant"


def test_unknown_state_exits_2(capsys):
    code, out = run_json(capsys, "detect", "no-such-state")
    assert code == 2


def test_malformed_json_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    code, out = run_json(capsys, "polytope", "membership", str(path))
    assert code == 2


def test_size_cap_exits_3(tmp_path, capsys):
    big = bh.Behavior(bh.uniform_behavior(bh.Scenario.uniform(3, 8)).table)
    path = tmp_path / "big.json"
    path.write_text(json.dumps(bh.behavior_to_json(big)))
    code, out = run_json(capsys, "polytope", "vertices", str(path))
    assert code == 3 and out["error"] == "size-cap"


def test_bad_thread_env_exits_2(capsys, monkeypatch):
    monkeypatch.setenv("QCORR_THREADS", "zero")
    code, _ = run_json(capsys, "bounds", "chsh", "2")
    assert code == 2
