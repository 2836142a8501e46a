import json

import pytest

from gossip_age_sim.cli import EXIT_CONFIG, EXIT_GUARD, EXIT_OK, main
from gossip_age_sim.metrics import CSV_VERSION_HEADER, SweepTable


@pytest.fixture
def config_path(tmp_path):
    doc = {
        "network": {"n": 100, "lambda_e": 1.0, "lambda_s": 1.0, "lambda": 1.0},
        "ctmc": {"states": [{"kind": "complete"}], "q": ["1"], "p": [[0.0]]},
        "run": {"horizon": 200.0, "burn_in": 20.0, "seed": 5, "replicates": 2},
    }
    p = tmp_path / "config.json"
    p.write_text(json.dumps(doc))
    return str(p)


@pytest.fixture
def two_state_config_path(tmp_path):
    doc = {
        "network": {"n": 12, "lambda_e": 1.0, "lambda_s": 1.0, "lambda": 1.0},
        "ctmc": {
            "states": [{"kind": "complete"}, {"kind": "ring"}],
            "q": ["1", "2"],
            "p": [[0.0, 1.0], [1.0, 0.0]],
        },
        "run": {"horizon": 100.0, "burn_in": 10.0, "seed": 5},
    }
    p = tmp_path / "two_state.json"
    p.write_text(json.dumps(doc))
    return str(p)


def test_simulate_smoke(config_path, capsys):
    assert main(["simulate", "--config", config_path]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["network_avg_age"] > 0
    assert len(payload["per_node_avg_age"]) == 100


def test_simulate_missing_config_exits_2(capsys):
    assert main(["simulate", "--config", "/nonexistent.json"]) == EXIT_CONFIG
    assert "error" in capsys.readouterr().err


def test_simulate_bad_rate_expression_exits_2(config_path, capsys):
    rc = main(["simulate", "--config", config_path, "--set", 'ctmc.q=["sqt(n)"]'])
    assert rc == EXIT_CONFIG
    assert "sqt(n)" in capsys.readouterr().err


def test_simulate_overrides(config_path, capsys):
    assert main(["simulate", "--config", config_path, "--set", "network.n=3"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["per_node_avg_age"]) == 3


def test_sweep_row_count_and_jobs_determinism(config_path, tmp_path):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    args = [
        "sweep", "--config", config_path, "--n-list", "10,20", "--replicates", "2",
        "--rates", "1,sqrt(n)", "--seed", "9",
    ]
    assert main(args + ["--jobs", "1", "--out", str(out1)]) == EXIT_OK
    assert main(args + ["--jobs", "8", "--out", str(out2)]) == EXIT_OK
    assert out1.read_bytes() == out2.read_bytes()
    table = SweepTable.from_csv(out1.read_text())
    assert len(table.rows) == 2 * 2 * 2  # rates x n x replicates


def test_spread_csv(two_state_config_path, tmp_path, capsys):
    out = tmp_path / "spread.csv"
    rc = main(
        ["spread", "--config", two_state_config_path, "--trials", "10", "--out", str(out)]
    )
    assert rc == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == CSV_VERSION_HEADER
    assert lines[1] == "trial,T,n0_count"
    assert len([l for l in lines if l.startswith("mean_")]) == 2


def test_spread_guard_exits_3(tmp_path, capsys):
    doc = {
        "network": {"n": 4, "lambda_e": 1.0, "lambda_s": 1.0, "lambda": 1.0},
        "ctmc": {"states": [{"kind": "disconnected"}], "q": ["1"], "p": [[0.0]]},
        "run": {"horizon": 10.0, "burn_in": 0.0, "seed": 1},
    }
    p = tmp_path / "dc.json"
    p.write_text(json.dumps(doc))
    with pytest.warns(UserWarning):
        rc = main(["spread", "--config", str(p), "--trials", "1"])
    assert rc == EXIT_GUARD


def test_ctmc_analysis(two_state_config_path, capsys):
    assert main(["ctmc", "--config", two_state_config_path]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["pi"] == pytest.approx([2 / 3, 1 / 3])
    assert payload["return_moments"][0]["mean"] == pytest.approx(1.0 + 0.5)


def test_ctmc_mc_check(two_state_config_path, capsys):
    rc = main(["ctmc", "--config", two_state_config_path, "--mc-check", "--mc-returns", "20000"])
    assert rc == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    mc = payload["mc_check"][0]
    assert mc["mc_mean"] == pytest.approx(payload["return_moments"][0]["mean"], rel=0.05)


def test_ctmc_reducible_exits_2(tmp_path, capsys):
    doc = {
        "network": {"n": 9, "lambda_e": 1.0, "lambda_s": 1.0, "lambda": 1.0},
        "ctmc": {
            "states": [{"kind": "ring"}, {"kind": "grid"}, {"kind": "complete"}],
            "q": ["1", "1", "1"],
            "p": [[0, 1, 0], [1, 0, 0], [0.5, 0.5, 0]],
        },
        "run": {"horizon": 10.0, "seed": 1},
    }
    p = tmp_path / "red.json"
    p.write_text(json.dumps(doc))
    assert main(["ctmc", "--config", str(p)]) == EXIT_CONFIG


def test_presets_list(capsys):
    assert main(["presets", "list"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert [p["id"] for p in payload] == ["fig3", "fig4", "fig5", "thm1"]


def test_presets_run_shrunk(tmp_path):
    out = tmp_path / "preset.csv"
    rc = main(
        [
            "presets", "run", "thm1", "--n-list", "16,32", "--replicates", "2",
            "--horizon", "50", "--out", str(out), "--seed", "2",
        ]
    )
    assert rc == EXIT_OK
    table = SweepTable.from_csv(out.read_text())
    assert len(table.rows) == 4


def test_custom_edge_file(tmp_path, capsys):
    edges = tmp_path / "edges.txt"
    edges.write_text("0 1\n1 2\n2 0\n")
    doc = {
        "network": {"n": 3, "lambda_e": 1.0, "lambda_s": 1.0, "lambda": 1.0},
        "ctmc": {"states": [{"kind": "custom", "edge_file": "edges.txt"}], "q": ["1"], "p": [[0]]},
        "run": {"horizon": 50.0, "seed": 3},
    }
    p = tmp_path / "custom.json"
    p.write_text(json.dumps(doc))
    assert main(["simulate", "--config", str(p)]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["network_avg_age"] > 0
