import csv
import json
import math

import jsonschema
import numpy as np
import pytest
from click.testing import CliRunner
from hypothesis import given, settings, strategies as st

from fhtsvd.cli import main
from fhtsvd.reports import (EIGS_HEADER, ORACLE_HEADER, ConfigError, RunConfig, fmt, load_schema,
                            optimal_shift, strip_timestamps)

N_MAX = 12


@pytest.fixture(scope="module")
def outdir(tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    runner = CliRunner()
    for cmd in ("periods", "eigs", "oracle", "compare"):
        res = runner.invoke(main, [cmd, "--n-max", str(N_MAX), "--out", str(out)])
        assert res.exit_code == 0, res.output
    return out


def _rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_periods_json(outdir):
    doc = json.loads((outdir / "periods.json").read_text())
    jsonschema.validate(doc, load_schema("periods"))
    tau = np.array(doc["tau_re"]) + 1j * np.array(doc["tau_im"])
    assert np.allclose(tau, tau.T) and np.allclose(tau.real, 0)
    assert doc["C0"][0] == pytest.approx(0, abs=1e-12)


def test_eigs_csv(outdir):
    rows = _rows(outdir / "eigs.csv")
    assert tuple(rows[0]) == EIGS_HEADER
    assert len(rows) - 1 == N_MAX
    assert [int(r[0]) for r in rows[1:]] == list(range(1, N_MAX + 1))
    for r in rows[1:]:
        assert all(len(v.split("e")[0].replace("-", "").replace(".", "")) == 17 for v in r[1:])
        assert float(r[3]) == 2 * float(r[2])


def test_oracle_csv(outdir):
    rows = _rows(outdir / "oracle.csv")
    assert tuple(rows[0]) == ORACLE_HEADER
    assert len(rows) - 1 == N_MAX
    kappas = [float(r[1]) for r in rows[1:]]
    gaps = [float(r[3]) for r in rows[1:-1]]
    assert np.allclose(np.diff(kappas), gaps)


def test_report(outdir):
    doc = json.loads((outdir / "report.json").read_text())
    jsonschema.validate(doc, load_schema("report"))
    assert doc["index_shift"] == 0
    rows = doc["rows"]
    assert [r["n"] for r in rows] == sorted(r["n"] for r in rows)
    for r in rows:
        assert r["abs_gap"] == pytest.approx(abs(r["kappa_exact"] - r["kappa_approx"]))
    assert doc["fit"]["slope_predicted"] == pytest.approx(-np.pi / doc["metadata"]["tau11_im"])


def test_rerun_is_byte_identical(outdir, tmp_path):
    runner = CliRunner()
    for cmd in ("eigs", "oracle", "compare"):
        assert runner.invoke(main, [cmd, "--n-max", str(N_MAX), "--out", str(tmp_path)]).exit_code == 0
    for name in ("eigs.csv", "oracle.csv", "report.json"):
        a, b = (outdir / name).read_text(), (tmp_path / name).read_text()
        assert strip_timestamps(a) == strip_timestamps(b)


def test_eigenfunctions_file(outdir):
    res = CliRunner().invoke(main, ["eigenfunctions", "--n", "12", "--samples", "400", "--out", str(outdir)])
    assert res.exit_code == 0, res.output
    rows = _rows(outdir / "fn_12.csv")
    assert rows[0] == ["z", "f_asym", "h_asym", "f_oracle_interp"]
    data = np.array([[float(v) for v in r] for r in rows[1:]])
    assert 390 <= len(data) <= 410
    inner = ~np.isnan(data[:, 1])
    assert np.all(np.isnan(data[inner, 2])) and np.all(~np.isnan(data[~inner, 2]))
    f, fo = data[inner, 1], data[inner, 3]
    assert abs(f @ fo) / np.linalg.norm(f) / np.linalg.norm(fo) > 0.95


def test_unsorted_endpoints_exit_2():
    res = CliRunner().invoke(main, ["periods", "--endpoints", "0,-1,2,3,4,5"])
    assert res.exit_code == 2
    assert "endpoints must be strictly increasing" in res.stderr
    assert len(res.stderr.strip().splitlines()) == 1


def test_genus_one_rejected():
    res = CliRunner().invoke(main, ["periods", "--endpoints", "0,1,2,3"])
    assert res.exit_code == 2


def test_bad_theta_eps_rejected(tmp_path):
    res = CliRunner().invoke(main, ["periods", "--theta-eps", "0.1", "--out", str(tmp_path)])
    assert res.exit_code == 2


def test_compare_without_oracle_exit_4(tmp_path):
    runner = CliRunner()
    assert runner.invoke(main, ["eigs", "--n-max", "4", "--out", str(tmp_path)]).exit_code == 0
    res = runner.invoke(main, ["compare", "--n-max", "4", "--out", str(tmp_path)])
    assert res.exit_code == 4 and "oracle file missing" in res.stderr


def test_compare_rejects_mismatched_n(tmp_path):
    runner = CliRunner()
    runner.invoke(main, ["eigs", "--n-max", "8", "--out", str(tmp_path)])
    runner.invoke(main, ["oracle", "--n-max", "7", "--out", str(tmp_path)])
    assert runner.invoke(main, ["compare", "--n-max", "8", "--out", str(tmp_path)]).exit_code == 2


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"n_max": 3, "quad_order": 64, "out": str(tmp_path / "a")}))
    config = RunConfig.from_sources(str(cfg), n_max=5)
    assert config.n_max == 5 and config.quad_order == 64
    res = CliRunner().invoke(main, ["eigs", "--config", str(cfg)])
    assert res.exit_code == 0
    assert len(_rows(tmp_path / "a" / "eigs.csv")) == 4


def test_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig(n_max=0)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nmax": 3}))
    with pytest.raises(ConfigError, match="unknown"):
        RunConfig.from_sources(str(bad))
    assert CliRunner().invoke(main, ["periods", "--config", str(tmp_path / "none.json")]).exit_code == 4


@settings(max_examples=200)
@given(st.floats(allow_nan=True, allow_infinity=False))
def test_fmt_roundtrip(x):
    s = fmt(x)
    assert (s == "nan") if math.isnan(x) else float(s) == x


@settings(max_examples=50, deadline=None)
@given(st.integers(-3, 3), st.lists(st.floats(-0.05, 0.05), min_size=12, max_size=12))
def test_optimal_shift_recovers_offset(shift, noise):
    # approx[n] sits next to exact[n + shift]; the shift must be recovered
    n = np.arange(0, 30)
    exact = 1.0 + 2.2 * n
    approx = np.full(n.size, np.nan)
    approx[5:17] = exact[5 + shift:17 + shift] + np.array(noise)
    assert optimal_shift(n, approx, exact) == shift
