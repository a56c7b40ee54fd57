import json
import math

import numpy as np
import pytest

import chaingap as cg
from chaingap.errors import InsufficientData, NotPrime
from chaingap.experiments import ExperimentRow, render_report


def lazy_right_template():
    return cg.ChainSpec.from_json(
        {"family": "circulant", "N": 4, "steps": [[0, 0.5], [1, 0.5]]}
    )


def test_scan_circulant_anchor_values():
    rows = cg.scan(lazy_right_template(), [4, 8])
    assert [r.N for r in rows] == [4, 8]
    assert rows[0].tau == pytest.approx(1.0 / math.sin(math.pi / 4), rel=1e-12)
    assert rows[1].tau == pytest.approx(1.0 / math.sin(math.pi / 8), rel=1e-12)
    assert all(r.method == "closed_form" for r in rows)
    assert all(r.gamma * r.tau == pytest.approx(1.0, rel=1e-9) for r in rows)


def test_scan_torus_values():
    spec = cg.ChainSpec.from_json(
        {
            "family": "torus",
            "N": 2,
            "d": 2,
            "probs": {"hold": 0, "plus": [0.5, 0.5], "minus": [0, 0]},
        }
    )
    rows = cg.scan(spec, [2, 4])
    assert rows[0].gamma == pytest.approx(1.0, abs=1e-12)
    assert rows[1].gamma == pytest.approx(math.sqrt(2.0) / 2.0, rel=1e-12)


def test_scan_empty():
    assert cg.scan(lazy_right_template(), []) == []


def test_scan_closed_form_agrees_with_dense_svd():
    # wherever both routes are feasible, the scan's closed form matches SVD
    for spec_json in (
        {"family": "circulant", "N": 4, "steps": [[0, 0.5], [1, 0.25], [2, 0.25]]},
        {
            "family": "torus",
            "N": 3,
            "d": 2,
            "probs": {"hold": 0.1, "plus": [0.4, 0.2], "minus": [0.1, 0.2]},
        },
    ):
        template = cg.ChainSpec.from_json(spec_json)
        for row in cg.scan(template, [3, 5, 9]):
            spec = template.with_size(row.N)
            dense = cg.weighted_singular_spectrum(spec.build()).gap
            assert row.method == "closed_form"
            assert row.gamma == pytest.approx(dense, rel=1e-9)


def test_scan_dense_families_use_svd():
    rows = cg.scan(cg.ChainSpec.from_json({"family": "cdg", "N": 5}), [5, 11])
    assert all(r.method == "weighted_svd" for r in rows)
    gamma, _ = cg.spectral_gap(cg.cdg_chain(5))
    assert rows[0].gamma == pytest.approx(gamma, rel=1e-12)


def test_fit_scaling_exact_power_law():
    rows = [
        ExperimentRow("synthetic", "x", n, 1.0 / n**2, float(n**2), "closed_form", 0.0)
        for n in (4, 8, 16, 32)
    ]
    fit = cg.fit_scaling(rows)
    assert fit.slope == pytest.approx(2.0, abs=1e-9)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.n_points == 4


def test_fit_scaling_constant():
    rows = [
        ExperimentRow("synthetic", "x", n, 1.0 / 7.0, 7.0, "closed_form", 0.0)
        for n in (4, 8, 16)
    ]
    fit = cg.fit_scaling(rows)
    assert fit.slope == pytest.approx(0.0, abs=1e-9)


def test_fit_scaling_log_mode():
    rows = [
        ExperimentRow("synthetic", "x", n, 1.0, 5.0 * math.log(n), "closed_form", 0.0)
        for n in (11, 101, 1009, 10007)
    ]
    fit = cg.fit_scaling(rows, mode="log")
    assert fit.slope == pytest.approx(1.0, abs=1e-9)


def test_fit_scaling_residual_orthogonality():
    rng = np.random.default_rng(5)
    rows = [
        ExperimentRow("synthetic", "x", n, 1.0, float(n ** 1.5 * rng.uniform(0.5, 2.0)), "m", 0.0)
        for n in (4, 8, 16, 32, 64)
    ]
    fit = cg.fit_scaling(rows)
    x = np.log([r.N for r in rows])
    y = np.log([r.tau for r in rows])
    resid = y - (fit.slope * x + fit.intercept)
    assert abs(resid.sum()) <= 1e-9
    assert abs((resid * x).sum()) <= 1e-9
    assert 0.0 <= fit.r_squared <= 1.0


def test_fit_scaling_requires_three_finite_rows():
    rows = [
        ExperimentRow("synthetic", "x", n, 1.0, float(n), "m", 0.0) for n in (2, 4)
    ]
    with pytest.raises(InsufficientData):
        cg.fit_scaling(rows)
    rows.append(ExperimentRow("synthetic", "x", 8, 0.0, math.inf, "m", 0.0))
    with pytest.raises(InsufficientData):
        cg.fit_scaling(rows)


def test_ensemble_requires_prime():
    with pytest.raises(NotPrime):
        cg.random_steps_ensemble(100, 2, [0.5, 0.5], 10, [1.0], seed=0)


def test_ensemble_monotone_and_deterministic():
    rows1 = cg.random_steps_ensemble(101, 2, [0.5, 0.5], 200, [1, 2, 4], seed=9)
    rows2 = cg.random_steps_ensemble(101, 2, [0.5, 0.5], 200, [1, 2, 4], seed=9)
    assert rows1 == rows2
    fractions = [r.fraction for r in rows1]
    assert all(0.0 <= f <= 1.0 for f in fractions)
    assert all(b <= a for a, b in zip(fractions, fractions[1:]))


def test_report_experiment_rows_csv(tmp_path):
    rows = cg.scan(lazy_right_template(), [4])
    path = tmp_path / "rows.csv"
    cg.emit_report(rows, path, "csv")
    text = path.read_text()
    lines = text.split("\n")
    assert lines[0] == "family,params_digest,N,gamma,tau,method,wall_ms"
    assert len(lines) == 3 and lines[2] == ""  # header + row + trailing LF
    assert "\r" not in text


def test_report_empty_table(tmp_path):
    path = tmp_path / "empty.csv"
    cg.emit_report([], path, "csv")
    assert path.read_text() == "family,params_digest,N,gamma,tau,method,wall_ms\n"


def test_report_byte_identical(tmp_path):
    rows = cg.scan(lazy_right_template(), [4, 8])
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    cg.emit_report(rows, a, "csv")
    cg.emit_report(rows, b, "csv")
    assert a.read_bytes() == b.read_bytes()
    ja, jb = tmp_path / "a.json", tmp_path / "b.json"
    cg.emit_report(rows, ja, "json")
    cg.emit_report(rows, jb, "json")
    assert ja.read_bytes() == jb.read_bytes()


def test_report_json_sorted_keys(tmp_path):
    rows = cg.scan(lazy_right_template(), [4])
    payload = json.loads(render_report(rows, "json"))
    assert list(payload[0].keys()) == sorted(payload[0].keys())


def test_report_seventeen_digit_floats():
    rows = [ExperimentRow("f", "d", 3, 1.0 / 3.0, 3.0, "m", 0.0)]
    text = render_report(rows, "csv")
    assert "0.33333333333333331" in text


def test_report_audit_and_curve(tmp_path):
    audit = cg.inequality_audit(cg.build_chain(np.full((2, 2), 0.5)))
    cg.emit_report(audit, tmp_path / "audit.json", "json")
    payload = json.loads((tmp_path / "audit.json").read_text())
    assert payload["all_pass"] is True
    cg.emit_report(audit, tmp_path / "audit.csv", "csv")
    assert (tmp_path / "audit.csv").read_text().startswith("name,lhs,relation,rhs")

    curve = cg.delta_curve(cg.build_chain([[0.0, 1.0], [1.0, 0.0]]), [1, 2])
    cg.emit_report(curve, tmp_path / "curve.csv", "csv")
    assert (tmp_path / "curve.csv").read_text().startswith("n,delta_exact")
