import json

import pytest

from relaylab.cli import main


def _write(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


def test_success_writes_csv_and_summary(tmp_path, capsys):
    cfg = _write(tmp_path / "cfg.json", {
        "experiment": "ratio-sweep",
        "grid": [0.5, 2.0],
        "sim": {"slots": 20_000},
        "output_path": str(tmp_path / "run.csv"),
    })
    assert main(["ratio-sweep", "--config", cfg]) == 0
    out = capsys.readouterr().out
    assert "wrote 10 rows" in out
    assert (tmp_path / "run.csv").exists()
    assert (tmp_path / "run.summary.json").exists()


def test_rerun_byte_identical(tmp_path):
    cfg = _write(tmp_path / "cfg.json", {
        "experiment": "ratio-sweep",
        "grid": [1.0, 4.0],
        "sim": {"slots": 20_000},
    })
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert main(["ratio-sweep", "--config", cfg, "--output", str(a)]) == 0
    assert main(["ratio-sweep", "--config", cfg, "--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_overrides_land_in_sidecar(tmp_path):
    cfg = _write(tmp_path / "cfg.json", {
        "experiment": "validate",
        "grid": [[1, 1, 1.0]],
    })
    out = tmp_path / "v.csv"
    rc = main([
        "validate", "--config", cfg, "--output", str(out),
        "--seed", "7", "--slots", "5000", "--analytic-only",
    ])
    assert rc == 0
    payload = json.loads((tmp_path / "v.summary.json").read_text())
    assert payload["spec"]["sim"]["seed"] == 7
    assert payload["spec"]["sim"]["slots"] == 5000
    assert payload["spec"]["methods"] == ["analytic"]
    assert payload["spec"]["output_path"] == str(out)


def test_defaults_without_config(tmp_path, capsys):
    out = tmp_path / "g.csv"
    rc = main([
        "grouping-sweep", "--output", str(out),
        "--slots", "2000", "--analytic-only",
    ])
    assert rc == 0
    # default channel is L=4, so splits 1..3
    assert "wrote 3 rows" in capsys.readouterr().out


def test_seed_changes_monte_carlo_rows(tmp_path):
    cfg = _write(tmp_path / "cfg.json", {
        "experiment": "ratio-sweep",
        "grid": [1.0],
        "sim": {"slots": 20_000},
        "methods": ["monte-carlo"],
    })
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert main(["ratio-sweep", "--config", cfg, "--output", str(a), "--seed", "1"]) == 0
    assert main(["ratio-sweep", "--config", cfg, "--output", str(b), "--seed", "2"]) == 0
    assert a.read_bytes() != b.read_bytes()


def test_config_errors_exit_1(tmp_path, capsys):
    missing = str(tmp_path / "nope.json")
    assert main(["ratio-sweep", "--config", missing]) == 1
    assert "config error" in capsys.readouterr().err

    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    assert main(["ratio-sweep", "--config", str(bad)]) == 1

    unknown = _write(tmp_path / "unknown.json", {
        "experiment": "ratio-sweep", "grd": [1.0],
    })
    assert main(["ratio-sweep", "--config", unknown]) == 1

    mismatched = _write(tmp_path / "mismatch.json", {"experiment": "snr-sweep"})
    assert main(["ratio-sweep", "--config", mismatched]) == 1
    assert "snr-sweep" in capsys.readouterr().err


def test_unwritable_output_exits_1(tmp_path):
    cfg = _write(tmp_path / "cfg.json", {
        "experiment": "validate",
        "grid": [[1, 1, 1.0]],
        "sim": {"slots": 1000},
    })
    target = str(tmp_path / "no" / "such" / "dir" / "out.csv")
    assert main(["validate", "--config", cfg, "--output", target]) == 1


def test_numerical_failure_exits_2(tmp_path, capsys):
    cfg = _write(tmp_path / "cfg.json", {
        "experiment": "snr-sweep",
        "grid": [4000],
        "sim": {"slots": 1000},
    })
    rc = main(["snr-sweep", "--config", cfg, "--output", str(tmp_path / "x.csv")])
    assert rc == 2
    assert "numerical failure" in capsys.readouterr().err


def test_argparse_rejections():
    with pytest.raises(SystemExit) as exc:
        main(["bogus-experiment"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["ratio-sweep", "--analytic-only", "--mc-only"])
    assert exc.value.code == 2
