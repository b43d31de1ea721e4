import csv
import json
import math

import pytest

from resetbm.cli import main


def run(args):
    return main(args)


class TestEval:
    def test_mean_fpt_exact(self, capsys):
        assert run(["eval", "mean-fpt-exact", "--lambda", "0.1", "--u", "1"]) == 0
        out = capsys.readouterr().out
        assert abs(float(out.split("=")[1]) - 5.639483) <= 1e-5

    def test_alpha(self, capsys):
        assert run(["eval", "alpha", "--lambda", "2", "--sigma", "1",
                    "--c", "0"]) == 0
        out = capsys.readouterr().out
        assert float(out.splitlines()[0].split("=")[1]) == pytest.approx(2.0)

    def test_optimize_lambda(self, capsys):
        assert run(["eval", "optimize-lambda", "--u", "1"]) == 0
        out = capsys.readouterr().out
        lam = float(out.splitlines()[0].split("=")[1])
        assert abs(lam - 1.2698) <= 1e-3

    def test_json_format(self, capsys):
        assert run(["eval", "l-func", "--z", "1", "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["value"] == pytest.approx(2.0 / math.e)

    def test_unknown_evaluator_exit_code(self, capsys):
        assert run(["eval", "does-not-exist"]) == 2

    def test_domain_error_exit_code(self, capsys):
        # stationary joint asymptotics at z=0 is an open case
        assert run(["eval", "stationary-joint-asym", "--u", "3", "--z", "0",
                    "--x0-stationary", "--lambda", "2", "--xr", "1"]) == 2


class TestSimulateCmd:
    def test_writes_trajectory_and_sidecar(self, tmp_path, capsys):
        out = tmp_path / "fig1.csv"
        assert run(["simulate", "--T", "3", "--step", "0.01", "--c", "1",
                    "--x0", "0", "--xr", "1", "--lambda", "2", "--seed", "9",
                    "--out", str(out)]) == 0
        rows = list(csv.reader(out.open()))
        assert rows[0] == ["t", "x"]
        assert float(rows[1][0]) == 0.0 and float(rows[1][1]) == 0.0
        side = tmp_path / "fig1.resets.csv"
        assert side.exists()

    def test_negligible_rate_gives_empty_sidecar(self, tmp_path, capsys):
        out = tmp_path / "t.csv"
        assert run(["simulate", "--T", "1", "--step", "0.01",
                    "--lambda", "1e-12", "--seed", "3", "--out",
                    str(out)]) == 0
        side = tmp_path / "t.resets.csv"
        assert len(side.read_text().strip().splitlines()) == 1  # header only

    def test_determinism(self, tmp_path, capsys):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        for path in (a, b):
            run(["simulate", "--T", "1", "--step", "0.01", "--lambda", "2",
                 "--seed", "11", "--out", str(path)])
        assert a.read_bytes() == b.read_bytes()


class TestSupCdfCmd:
    def test_curve_schema_and_monotone(self, tmp_path, capsys):
        out = tmp_path / "curve.csv"
        assert run(["sup-cdf", "--lambda-list", "2", "--u-min", "0.1",
                    "--u-max", "1.5", "--u-step", "0.1", "--mc-samples",
                    "500", "--n-max", "40", "--seed", "4", "--out",
                    str(out)]) == 0
        rows = list(csv.reader(out.open()))
        assert rows[0] == ["lambda", "u", "cdf", "mc_std_err",
                          "truncation_bound"]
        cdf = [float(r[2]) for r in rows[1:]]
        assert all(b >= a - 1e-12 for a, b in zip(cdf, cdf[1:]))


class TestTableCmds:
    def test_table1_exact_column(self, tmp_path, capsys):
        out = tmp_path / "t1.csv"
        assert run(["table1", "--scale", "0.01", "--seed", "2", "--workers",
                    "2", "--out", str(out)]) == 0
        rows = list(csv.reader(out.open()))
        exact = {float(r[0]): float(r[3]) for r in rows[1:]}
        assert abs(exact[0.1] - 5.639483) <= 1e-5
        assert abs(exact[1.269812] - 3.088277) <= 1e-5
        assert abs(exact[4.269812] - 4.118051) <= 1e-5

    def test_table2_schema(self, tmp_path, capsys):
        out = tmp_path / "t2.csv"
        assert run(["table2", "--scale", "0.02", "--seed", "5", "--out",
                    str(out)]) == 0
        rows = list(csv.reader(out.open()))
        assert rows[0] == ["u", "mcm", "mcm_half_width_95", "asym", "ratio"]
        assert len(rows) == 6
        asym = {float(r[0]): float(r[3]) for r in rows[1:]}
        assert asym[2.5] == pytest.approx(0.13677, abs=1e-4)

    def test_json_round_trip(self, tmp_path, capsys):
        out = tmp_path / "t2.json"
        assert run(["table3", "--scale", "0.02", "--seed", "5", "--format",
                    "json", "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert len(payload["rows"]) == 5
        assert {"u", "mcm", "mcm_half_width_95", "asym", "ratio"} <= set(
            payload["rows"][0])


class TestValidateCmd:
    FAST = ("analytic.stationary_tail_closed_form,numerics.quad_polynomials,"
            "numerics.poisson_tail_shape")

    def test_pass_subset(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        assert run(["validate", "--checks", self.FAST, "--out",
                    str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["passed"] is True
        assert {c["name"] for c in report["checks"]} == set(
            self.FAST.split(","))
        for c in report["checks"]:
            assert {"name", "passed", "observed", "tolerance", "detail",
                    "seconds"} <= set(c)

    def test_corrupted_tolerance_fails_with_named_check(self, tmp_path,
                                                        capsys):
        out = tmp_path / "report.json"
        assert run(["validate", "--checks", self.FAST, "--tol", "1e-30",
                    "--out", str(out)]) == 1
        report = json.loads(out.read_text())
        failed = [c["name"] for c in report["checks"] if not c["passed"]]
        assert failed

    def test_config_file_and_env(self, tmp_path, capsys, monkeypatch):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"checks": self.FAST}))
        monkeypatch.setenv("RESETBM_OUT", str(tmp_path / "r.json"))
        assert run(["validate", "--config", str(cfg)]) == 0
        assert (tmp_path / "r.json").exists()


class TestUsage:
    def test_missing_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as err:
            run([])
        assert err.value.code == 2

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as err:
            run(["--version"])
        assert err.value.code == 0
        assert "resetbm" in capsys.readouterr().out
