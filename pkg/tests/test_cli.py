import json

import pytest

from chaingap.cli import main


@pytest.fixture()
def flip_spec(tmp_path):
    path = tmp_path / "flip.json"
    path.write_text(json.dumps({"family": "explicit", "matrix": [[0, 1], [1, 0]]}))
    return str(path)


@pytest.fixture()
def walk_spec(tmp_path):
    path = tmp_path / "walk.json"
    path.write_text(
        json.dumps({"family": "circulant", "N": 8, "steps": [[0, 0.5], [1, 0.5]]})
    )
    return str(path)


def test_gap_command(walk_spec, capsys):
    assert main(["gap", "--spec", walk_spec]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["method"] == "normal_eigen"
    assert payload["relaxation"] == pytest.approx(2.6131259297527527, rel=1e-12)
    assert payload["closed_form_gap"] == pytest.approx(payload["gap"], rel=1e-9)


def test_delta_command(flip_spec, tmp_path, capsys):
    out = tmp_path / "curve.csv"
    code = main(
        ["delta", "--spec", flip_spec, "--n-max", "4", "--trials", "200",
         "--seed", "7", "--out", str(out)]
    )
    assert code == 0
    text = out.read_text()
    lines = text.strip().split("\n")
    assert lines[0] == "n,delta_exact,delta_mc,mc_stderr"
    assert len(lines) == 5
    assert capsys.readouterr().out.startswith("n,delta_exact")


def test_cheeger_command(flip_spec, capsys):
    assert main(["cheeger", "--spec", flip_spec]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload == {"argmin_set": [0], "exact": True, "xi": 1.0}


def test_path_bound_command(flip_spec, capsys):
    assert main(["path-bound", "--spec", flip_spec]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["congestion"] == pytest.approx(0.5)
    assert payload["gap_lower"] == pytest.approx(2.0)


def test_audit_command_passes(walk_spec, tmp_path, capsys):
    out = tmp_path / "audit.json"
    code = main(
        ["audit", "--spec", walk_spec, "--eps", "0.16666666666666666",
         "--n-max", "20", "--out", str(out), "--format", "json"]
    )
    assert code == 0
    table = capsys.readouterr().out
    assert "additive_gap_lower" in table
    assert "avg_dev_upper" in table
    payload = json.loads(out.read_text())
    assert payload["all_pass"] is True


def test_scan_command(walk_spec, tmp_path, capsys):
    out = tmp_path / "rows.csv"
    code = main(["scan", "--spec", walk_spec, "--n-list", "4,8", "--out", str(out)])
    assert code == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0].startswith("family,params_digest")
    assert len(lines) == 3


def test_scan_extended_gate(tmp_path):
    spec = tmp_path / "card.json"
    spec.write_text(json.dumps({"family": "cardshuffle", "N": 3}))
    with pytest.raises(SystemExit):
        main(["scan", "--spec", str(spec), "--n-list", "3,7"])


def test_ensemble_command(tmp_path, capsys):
    out = tmp_path / "tails.csv"
    code = main(
        ["ensemble", "--n", "101", "--k", "2", "--trials", "100",
         "--l-grid", "1,2", "--seed", "5", "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "L,fraction"
    assert len(lines) == 3


def test_audit_exit_code_on_failure(monkeypatch, walk_spec):
    from chaingap import cli
    from chaingap.audit import BoundAudit, make_check

    failing = BoundAudit((make_check("synthetic", 2.0, 1.0, "<="),))
    monkeypatch.setattr(cli, "inequality_audit", lambda *a, **k: failing)
    assert main(["audit", "--spec", walk_spec]) == 1
