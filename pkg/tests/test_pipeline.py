import json
import os
import re
import shutil

import numpy as np
import pytest

from cumbreak import ConfigError, Series, __version__
from cumbreak.cli import main
from cumbreak.config import load_config, parse_bool, parse_config, parse_range, split_list
from cumbreak.fixtures import demo_directory, render_demo
from cumbreak.ingest import write_series_csv
from cumbreak.pipeline import REPORT_NAME, run_file

DEMO = demo_directory()
DEMO_CFG = os.path.join(DEMO, "demo.cfg")


def fixture_path(name):
    return os.path.join(DEMO, name)


@pytest.fixture(scope="module")
def demo_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("demo")
    status, outcomes = run_file(DEMO_CFG, str(out))
    return status, outcomes, out


class TestConfig:
    def test_demo_parses(self):
        cfg = load_config(DEMO_CFG)
        assert [s.role for s in cfg.sources.values()] == ["labour_force", "unemployment", "dgdp", "cpi"]
        assert cfg.tasks[0].type == "fit_univariate" and cfg.tasks[0].get("break") == "1991"
        assert os.path.isabs(cfg.sources["dgdp"].path)

    def test_quoted_and_comments(self):
        cfg = parse_config(
            'source dgdp d { path = "my file;#.csv"  # trailing\n frequency = quarterly }\n'
            'task unitroot u1 { series = d; title = "a { b }" }\n',
            "/base",
        )
        assert cfg.sources["d"].path == os.path.join("/base", "my file;#.csv")
        assert cfg.tasks[0].get("title") == "a { b }"

    @pytest.mark.parametrize(
        "text,fragment",
        [
            ("source gdp { path = a.csv }", "unknown source role"),
            ("source dgdp { path = a.csv; colour = red }", "unknown source key"),
            ("source dgdp { frequency = annual }", "no path"),
            ("source dgdp { path = a.csv; kind = log }", "kind"),
            ("source dgdp { path = a.csv }\nsource dgdp { path = b.csv }", "duplicate source name"),
            ("source dgdp a { path = a.csv }\nsource dgdp b { path = b.csv }", "already declared"),
            ("source dgdp { path = a.csv }\ntask fit_univariate f { response = dgdp; colour = red }", "unknown key"),
            ("task regress r { }", "unknown task type"),
            ("task unitroot u { series = missing }", "undeclared source"),
            ("source dgdp { path = a.csv }\ntask forecast_eval f { fit = later }", "not an earlier task"),
            ("source dgdp { path = a.csv }\ntask unitroot u { series = dgdp }\ntask unitroot u { series = dgdp }", "duplicate task id"),
            ("source dgdp { path = a.csv; path = b.csv }", "duplicate key"),
            ("source dgdp { path = }", "empty value"),
            ("task unitroot bad/id { }", "may only contain"),
            ("widget x { }", "expected 'source' or 'task'"),
        ],
    )
    def test_errors(self, text, fragment):
        with pytest.raises(ConfigError, match=fragment):
            parse_config(text, "/")

    def test_error_line_numbers(self):
        with pytest.raises(ConfigError, match="line 3"):
            parse_config("# c\n\nsource gdp { path = a }", "/")

    def test_helpers(self):
        assert split_list("adf, pp dfgls") == ["adf", "pp", "dfgls"]
        assert parse_range("0..5") == ("0", "5") and parse_range("3") == ("3", "3")
        with pytest.raises(ConfigError):
            parse_range("..5")
        assert parse_bool("Yes") and not parse_bool("off")
        with pytest.raises(ConfigError):
            parse_bool("maybe")

    def test_missing_config(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "none.cfg")


class TestRun:
    def test_demo_succeeds(self, demo_run):
        status, outcomes, out = demo_run
        assert status == 0 and all(o.ok for o in outcomes)
        report = (out / REPORT_NAME).read_text()
        assert report.startswith(f"cumbreak {__version__} run report\nconfig: demo.cfg\ntasks: 9, failed: 0\n")

    def test_fit_section(self, demo_run):
        _, outcomes, out = demo_run
        section = outcomes[1].report
        for label in ("break: 1990", "lag: 1", "segment 1 (initial): slope", "segment 2 (from 1990)",
                      "rms cumulative:", "rms dynamic:", "R2 dynamic:", "R2 cumulative:"):
            assert label in section
        rec = json.loads((out / "dgdp_fit.json").read_text())
        assert rec["break_year"] == "1990" and rec["lag"] == 1
        assert rec["files"] == ["dgdp_fit_dynamic.csv", "dgdp_fit_cumulative.csv", "dgdp_fit_gap.csv"]

    def test_artifacts_exist(self, demo_run):
        _, outcomes, out = demo_run
        for o in outcomes:
            assert (out / f"{o.id}.json").is_file()
            for f in o.files:
                assert (out / f).is_file()
        assert (out / "dgdp_cumulative.svg").read_text().startswith("<?xml")

    def test_report_numbers_in_records(self, demo_run):
        _, outcomes, out = demo_run
        for o in outcomes:
            numbers, tokens = set(), set()

            def walk(node):
                if isinstance(node, dict):
                    for k, v in node.items():
                        tokens.update(re.findall(r"\d+", k))
                        walk(v)
                elif isinstance(node, list):
                    for v in node:
                        walk(v)
                elif isinstance(node, bool) or node is None:
                    pass
                elif isinstance(node, (int, float)):
                    numbers.add(node)
                    tokens.add(str(node))
                elif isinstance(node, str):
                    tokens.update(re.findall(r"\d+", node))

            walk(json.loads((out / f"{o.id}.json").read_text()))
            body = "\n".join(o.report.splitlines()[1:])
            for tok in re.findall(r"(?<![\w.%-])-?\d+(?:\.\d+)?(?![\w%.])", body):
                if "." in tok:
                    d = len(tok.split(".")[1])
                    assert any(f"{x:.{d}f}" == tok for x in numbers), f"{o.id}: {tok} not in record"
                else:
                    assert tok.lstrip("-") in tokens or int(tok) in numbers, f"{o.id}: {tok} not in record"

    def test_deterministic(self, demo_run, tmp_path):
        _, _, out = demo_run
        run_file(DEMO_CFG, str(tmp_path))
        for name in os.listdir(out):
            assert (tmp_path / name).read_bytes() == (out / name).read_bytes(), name

    def test_missing_source(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text(
            "source dgdp { path = nowhere.csv }\n"
            f"source labour_force {{ path = {fixture_path('labour_force.csv')} }}\n"
            "task fit_univariate f { response = dgdp }\n"
            f"source unemployment {{ path = {fixture_path('unemployment.csv')} }}\n"
            "task unitroot u { series = unemployment }\n"
        )
        status, outcomes = run_file(str(cfg), str(tmp_path / "out"))
        assert status == 1
        assert not outcomes[0].ok and "nowhere.csv" in outcomes[0].report
        assert outcomes[1].ok
        rec = json.loads((tmp_path / "out" / "f.json").read_text())
        assert rec["status"] == "error" and "nowhere.csv" in rec["error"]

    def test_dependent_task_fails(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text(
            "source dgdp { path = nowhere.csv }\n"
            f"source labour_force {{ path = {fixture_path('labour_force.csv')} }}\n"
            "task fit_univariate f { response = dgdp }\n"
            "task forecast_eval g { fit = f; horizon = 1 }\n"
        )
        status, outcomes = run_file(str(cfg), str(tmp_path / "out"))
        assert status == 1 and "depends on failed task" in outcomes[1].report

    def test_unemployment_warning(self, tmp_path):
        lf = 0.05 + 0.03 * np.sin(np.arange(30.0))
        write_series_csv(Series.annual(1970, lf), tmp_path / "lf.csv")
        u = Series.annual(1970, -2.5 * lf + 0.15)
        write_series_csv(u, tmp_path / "u.csv")
        cfg = tmp_path / "c.cfg"
        cfg.write_text(
            "source labour_force { path = lf.csv; kind = rate }\n"
            "source unemployment { path = u.csv }\n"
            "task fit_univariate f { response = unemployment; kind = unemployment; lags = 0..0 }\n"
        )
        status, outcomes = run_file(str(cfg), str(tmp_path / "out"))
        expected = int(np.sum(-2.5 * lf + 0.15 < 0))
        assert status == 0 and expected > 0
        assert outcomes[0].record["negative_predictions"] == expected
        assert f"warning: {expected} negative predicted values" in outcomes[0].report


class TestCLI:
    def test_fit(self, tmp_path, capsys):
        rc = main(["fit", "--input", fixture_path("dgdp.csv"), "--driver", fixture_path("labour_force.csv"),
                   "--break", "1991", "--lags", "0..5", "--out", str(tmp_path)])
        assert rc == 0
        text = capsys.readouterr().out
        assert "break: 1990" in text and "lag: 1" in text
        assert (tmp_path / "fit.json").is_file() and (tmp_path / "fit_cumulative.csv").is_file()

    def test_unitroot_quiet(self, tmp_path, capsys):
        rc = main(["unitroot", "--input", fixture_path("dgdp.csv"), "--transform", "difference",
                   "--out", str(tmp_path), "--quiet"])
        assert rc == 0 and capsys.readouterr().out == ""
        rec = json.loads((tmp_path / "unitroot.json").read_text())
        assert {t["test_name"] for t in rec["tests"]} == {"ADF", "DF-GLS", "PP"}

    def test_generalized(self, tmp_path):
        rc = main(["generalized", "--input", fixture_path("cpi.csv"), "--driver", fixture_path("labour_force.csv"),
                   "--unemployment", fixture_path("unemployment.csv"), "--driver-lag", "3",
                   "--unemployment-lag", "3", "--out", str(tmp_path), "--quiet"])
        assert rc == 0
        rec = json.loads((tmp_path / "generalized.json").read_text())
        assert rec["model"]["c1"] == pytest.approx(3.40, abs=0.5)

    def test_cointegration_and_forecast(self, tmp_path):
        common = ["--input", fixture_path("dgdp.csv"), "--driver", fixture_path("labour_force.csv"),
                  "--break", "1991", "--quiet"]
        assert main(["cointegration", *common, "--out", str(tmp_path / "c")]) == 0
        assert (tmp_path / "c" / "cointegration.json").is_file()
        assert main(["forecast", *common, "--lags", "1..1", "--horizon", "1", "--out", str(tmp_path / "f")]) == 0
        rec = json.loads((tmp_path / "f" / "forecast.json").read_text())
        assert rec["model_rmsfe"] < rec["naive_rmsfe"]

    def test_forecast_horizon_too_long(self, tmp_path, capsys):
        rc = main(["forecast", "--input", fixture_path("dgdp.csv"), "--driver", fixture_path("labour_force.csv"),
                   "--lags", "0..0", "--horizon", "2", "--out", str(tmp_path), "--quiet"])
        assert rc == 1 and "failed" in capsys.readouterr().err

    def test_missing_input(self, tmp_path, capsys):
        rc = main(["fit", "--input", str(tmp_path / "absent.csv"), "--driver", fixture_path("labour_force.csv"),
                   "--out", str(tmp_path / "o"), "--quiet"])
        assert rc == 1
        assert "absent.csv" in (tmp_path / "o" / REPORT_NAME).read_text()

    def test_run_default_out(self, tmp_path, capsys):
        for name in os.listdir(DEMO):
            shutil.copy(os.path.join(DEMO, name), tmp_path)
        assert main(["run", str(tmp_path / "demo.cfg"), "--quiet"]) == 0
        assert (tmp_path / "out" / REPORT_NAME).is_file()

    def test_bad_config_exit_2(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("source nothing { }\n")
        assert main(["run", str(cfg)]) == 2
        assert "config error" in capsys.readouterr().err

    def test_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["fit"])
        assert exc.value.code == 2


def test_fixtures_match_generator():
    for name, text in render_demo().items():
        with open(fixture_path(name), encoding="utf-8") as fh:
            assert fh.read() == text, name
