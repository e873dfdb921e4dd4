import csv
import json

import numpy as np
import pytest

from fracheat import cli


def _run(capsys, *argv):
    rc = cli.main(list(argv))
    out = capsys.readouterr()
    summary = json.loads(out.out.strip().splitlines()[-1]) if out.out.strip() \
        else None
    err = json.loads(out.err.strip().splitlines()[-1]) if out.err.strip() \
        else None
    return rc, summary, err


def test_bootstrap_supercritical_example(tmp_path, capsys):
    rc, summary, _ = _run(capsys, "bootstrap", "--n", "3", "--s", "0.5",
                          "--out", str(tmp_path))
    assert rc == 0
    assert summary["branch"] == "supercritical"
    assert summary["p"] == [2.0, 6.0]
    assert summary["N"] == 1
    assert summary["w"] == 3
    doc = json.loads((tmp_path / f"bootstrap-{summary['config']}.json")
                     .read_text())
    assert doc["w"] == 3 and doc["config"] == summary["config"]


def test_symbol_default_csv_asserts_a_of_two(tmp_path, capsys):
    rc, summary, _ = _run(capsys, "symbol", "--out", str(tmp_path))
    assert rc == 0 and summary["sandwich_ok"]
    path = tmp_path / f"symbol-{summary['config']}.csv"
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    by_xi = {row["xi0"]: row for row in rows}
    assert float(by_xi["2.0"]["symbol"]) == 2.0
    assert all(row["config"] == summary["config"] for row in rows)


def test_validation_failure_exits_one(tmp_path, capsys):
    rc, _, err = _run(capsys, "symbol", "--s", "1.5", "--out", str(tmp_path))
    assert rc == 1
    assert err["exit_code"] == 1
    assert err["error"]["type"] == "ValidationError"
    assert err["error"]["message"]


def test_unknown_flag_is_a_validation_failure(tmp_path, capsys):
    rc, _, err = _run(capsys, "symbol", "--nonsense")
    assert rc == 1
    assert err["error"]["type"] == "ValidationError"


def test_numerical_failure_exits_two(tmp_path, capsys):
    # far outside the quadrature envelope: the kernel refuses loudly
    rc, _, err = _run(capsys, "kernel", "--s", "0.05", "--out", str(tmp_path))
    assert rc == 2
    assert err["exit_code"] == 2
    assert err["error"]["type"] == "NumericalError"


def test_kernel_csv_golden_row(tmp_path, capsys):
    rc, summary, _ = _run(capsys, "kernel", "--s", "0.5", "--out",
                          str(tmp_path))
    assert rc == 0
    path = tmp_path / f"kernel-{summary['config']}.csv"
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    cauchy = {(r["x"], r["t"]): float(r["density"]) for r in rows}
    assert cauchy[("0.0", "1.0")] == pytest.approx(1 / np.pi, rel=1e-10)
    assert summary["mass_worst_defect"] < 1e-8


def test_evolve_artifacts_are_deterministic(tmp_path, capsys):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    rc1, s1, _ = _run(capsys, "evolve", "--h", "0.03125", "--out", str(d1))
    rc2, s2, _ = _run(capsys, "evolve", "--h", "0.03125", "--out", str(d2))
    assert rc1 == rc2 == 0
    assert s1["config"] == s2["config"]
    f1 = d1 / f"evolve-{s1['config']}.csv"
    f2 = d2 / f"evolve-{s2['config']}.csv"
    assert f1.read_bytes() == f2.read_bytes()


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"measure": {"n": 1, "s": 0.3,
                                           "atoms": [0.5, 0.5]}}))
    # flag overrides the config file value, so the resolved hash matches
    # the pure-flag run
    rc1, s1, _ = _run(capsys, "symbol", "--config", str(cfg), "--s", "0.5",
                      "--out", str(tmp_path))
    rc2, s2, _ = _run(capsys, "symbol", "--s", "0.5", "--out", str(tmp_path))
    assert rc1 == rc2 == 0
    assert s1["config"] == s2["config"]
    rc3, s3, _ = _run(capsys, "symbol", "--config", str(cfg), "--out",
                      str(tmp_path))
    assert s3["config"] != s1["config"]


def test_missing_config_file_is_validation(tmp_path, capsys):
    rc, _, err = _run(capsys, "symbol", "--config",
                      str(tmp_path / "nope.json"))
    assert rc == 1 and err["error"]["type"] == "ValidationError"


def test_eig_writes_csv_and_vectors(tmp_path, capsys):
    rc, summary, _ = _run(capsys, "eig", "--h", "0.0625", "--m", "4",
                          "--out", str(tmp_path))
    assert rc == 0
    csv_path, vec_path = summary["artifacts"]
    with open(csv_path) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4
    assert rows[0]["config"] == summary["config"]
    vecs = np.load(vec_path)
    assert vecs.shape[1] == 4
    assert summary["lambda1"] == pytest.approx(float(rows[0]["lambda"]))


def test_weyl_summary_report(tmp_path, capsys):
    rc, summary, _ = _run(capsys, "weyl", "--h", "0.015625", "--m", "25",
                          "--out", str(tmp_path))
    assert rc == 0
    doc = json.loads((tmp_path / f"weyl-{summary['config']}.json").read_text())
    assert doc["sandwich_ok"]
    assert doc["c0"] == pytest.approx(np.pi / 2, rel=1e-12)
    assert abs(doc["median"] - doc["c0"]) / doc["c0"] < 0.1


def test_pohozaev_report(tmp_path, capsys):
    rc, summary, _ = _run(capsys, "pohozaev", "--h", "0.00390625",
                          "--out", str(tmp_path))
    assert rc == 0
    doc = json.loads((tmp_path / f"pohozaev-{summary['config']}.json")
                     .read_text())
    assert doc["residual"] < 0.1
    assert doc["volume_term"] == 0.0


def test_boundary_scan_artifact(tmp_path, capsys):
    rc, summary, _ = _run(capsys, "boundary", "--out", str(tmp_path))
    assert rc == 0
    assert summary["trace_converged"]
    assert summary["trace_max"] == pytest.approx(np.sqrt(2.0), rel=0.05)
    path = tmp_path / f"boundary-{summary['config']}.csv"
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert {r["scan"] for r in rows} == {"interior", "quotient"}


def test_lp_check_report(tmp_path, capsys):
    rc, summary, _ = _run(capsys, "lp-check", "--s", "0.4",
                          "--out", str(tmp_path))
    assert rc == 0
    assert summary["case"] == "c"
    doc = json.loads((tmp_path / f"lp-check-{summary['config']}.json")
                     .read_text())
    assert doc["q"] == ["inf"]
    assert len(doc["empirical_c"]) == 1


def test_threads_flag_does_not_change_results(tmp_path, capsys):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    rc1, s1, _ = _run(capsys, "eig", "--h", "0.0625", "--m", "3",
                      "--out", str(d1))
    rc2, s2, _ = _run(capsys, "eig", "--h", "0.0625", "--m", "3",
                      "--threads", "1", "--out", str(d2))
    assert rc1 == rc2 == 0
    assert s1["config"] == s2["config"]
    a = (d1 / f"eig-{s1['config']}.csv").read_bytes()
    b = (d2 / f"eig-{s2['config']}.csv").read_bytes()
    assert a == b
