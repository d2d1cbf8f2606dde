"""Command-line entry point.

Each subcommand other than ``run`` builds a small in-memory config and hands
it to :func:`cumbreak.pipeline.run`, so every path through the CLI produces
the same report, JSON records and curve files.

Exit status: 0 on success, 1 if any task failed, 2 for usage or config errors.
"""
from __future__ import annotations

import argparse
import os
import sys
from typing import Dict, List, Optional, Sequence

from . import __version__
from .config import DataSource, RunConfig, TaskSpec
from .errors import ConfigError, CumbreakError
from .pipeline import REPORT_NAME, run, run_file
from .series import Frequency


def _common(p: argparse.ArgumentParser, response: bool = True) -> None:
    if response:
        p.add_argument("--input", required=True, help="response CSV (period,value)")
    p.add_argument("--frequency", choices=("annual", "quarterly"), default="annual")
    p.add_argument("--out", default="cumbreak_out", help="output directory (default: %(default)s)")
    p.add_argument("--quiet", action="store_true", help="do not print the report")


def _fit_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--driver", required=True, help="labour-force CSV")
    p.add_argument("--driver-kind", choices=("level", "rate"), default="level",
                   help="whether --driver holds levels or growth rates (default: level)")
    p.add_argument("--kind", choices=("inflation", "unemployment"), default="inflation")
    p.add_argument("--break", dest="brk", metavar="PERIOD", help="candidate break period, e.g. 1991 or 1989Q1")
    p.add_argument("--window", type=int, default=4, help="periods searched either side of --break")
    p.add_argument("--lags", metavar="A..B", help="inclusive lag range (default 0..5 annual, 0..12 quarterly)")
    p.add_argument("--smooth", type=int, metavar="K", help="trailing moving-average window")
    p.add_argument("--counterfactual", metavar="A..B", help="report the gap to the pre-break relation over A..B")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cumbreak", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cumbreak {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="break/lag search on cumulative curves")
    _common(p)
    _fit_flags(p)

    p = sub.add_parser("generalized", help="fit pi = c1 l + c2 u + c3 on cumulative curves")
    _common(p)
    p.add_argument("--driver", required=True, help="labour-force CSV")
    p.add_argument("--driver-kind", choices=("level", "rate"), default="level")
    p.add_argument("--unemployment", required=True, help="unemployment CSV")
    p.add_argument("--driver-lag", type=int, default=0)
    p.add_argument("--unemployment-lag", type=int, default=0)
    p.add_argument("--smooth", type=int, metavar="K")

    p = sub.add_parser("unitroot", help="ADF, DF-GLS and PP tests")
    _common(p)
    p.add_argument("--transform", choices=("level", "difference", "growth", "growth_difference"), default="level")
    p.add_argument("--tests", default="adf,dfgls,pp")
    p.add_argument("--lags", type=int, default=1, help="ADF augmentation lags")
    p.add_argument("--dfgls-lags", type=int, default=2)
    p.add_argument("--bandwidth", type=int, help="PP Bartlett bandwidth")
    p.add_argument("--trend", default="constant", help="none, constant or constant_and_trend")

    p = sub.add_parser("cointegration", help="residual unit-root test and Johansen trace test of a fitted model")
    _common(p)
    _fit_flags(p)
    p.add_argument("--method", choices=("adf", "pp", "dfgls"), default="adf")
    p.add_argument("--test-lags", type=int, default=1)
    p.add_argument("--johansen-maxlag", type=int, default=1)
    p.add_argument("--johansen-trend", default="none")

    p = sub.add_parser("forecast", help="model RMSFE against the no-change forecast")
    _common(p)
    _fit_flags(p)
    p.add_argument("--horizon", type=int, default=1)

    p = sub.add_parser("run", help="run a config file")
    p.add_argument("config")
    p.add_argument("--out", default=None, help="output directory (default: <config dir>/out)")
    p.add_argument("--quiet", action="store_true")
    return parser


def _fit_params(args) -> Dict[str, str]:
    params = {"response": "response", "driver": "driver", "kind": args.kind}
    if args.brk:
        params["break"] = args.brk
        params["window"] = str(args.window)
    if args.lags:
        params["lags"] = args.lags
    if args.smooth:
        params["smooth"] = str(args.smooth)
    if args.counterfactual:
        params["counterfactual"] = args.counterfactual
    return params


def config_from_args(args) -> RunConfig:
    freq = Frequency.parse(args.frequency)
    role = "unemployment" if getattr(args, "kind", "inflation") == "unemployment" else "dgdp"
    sources: Dict[str, DataSource] = {"response": DataSource("response", role, os.path.abspath(args.input), freq)}
    tasks: List[TaskSpec] = []
    if getattr(args, "driver", None):
        sources["driver"] = DataSource("driver", "labour_force", os.path.abspath(args.driver), freq, args.driver_kind)

    cmd = args.command
    if cmd == "fit":
        tasks.append(TaskSpec("fit_univariate", "fit", _fit_params(args)))
    elif cmd == "generalized":
        sources["unemployment"] = DataSource("unemployment", "unemployment", os.path.abspath(args.unemployment), freq)
        params = {
            "response": "response",
            "driver": "driver",
            "unemployment": "unemployment",
            "driver_lag": str(args.driver_lag),
            "unemployment_lag": str(args.unemployment_lag),
        }
        if args.smooth:
            params["smooth"] = str(args.smooth)
        tasks.append(TaskSpec("fit_generalized", "generalized", params))
    elif cmd == "unitroot":
        params = {
            "series": "response",
            "transform": args.transform,
            "tests": args.tests,
            "lags": str(args.lags),
            "dfgls_lags": str(args.dfgls_lags),
            "trend": args.trend,
        }
        if args.bandwidth is not None:
            params["bandwidth"] = str(args.bandwidth)
        tasks.append(TaskSpec("unitroot", "unitroot", params))
    elif cmd == "cointegration":
        tasks.append(TaskSpec("fit_univariate", "fit", _fit_params(args)))
        tasks.append(TaskSpec("cointegration", "cointegration", {
            "fit": "fit",
            "method": args.method,
            "lags": str(args.test_lags),
            "johansen_maxlag": str(args.johansen_maxlag),
            "johansen_trend": args.johansen_trend,
        }))
    elif cmd == "forecast":
        tasks.append(TaskSpec("fit_univariate", "fit", _fit_params(args)))
        tasks.append(TaskSpec("forecast_eval", "forecast", {"fit": "fit", "horizon": str(args.horizon)}))
    return RunConfig(sources, tuple(tasks))


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            out = args.out or os.path.join(os.path.dirname(os.path.abspath(args.config)), "out")
            status, _ = run_file(args.config, out)
        else:
            out = args.out
            status, _ = run(config_from_args(args), out)
    except ConfigError as exc:
        print(f"cumbreak: config error: {exc}", file=sys.stderr)
        return 2
    except CumbreakError as exc:
        print(f"cumbreak: {exc}", file=sys.stderr)
        return 2
    with open(os.path.join(out, REPORT_NAME), encoding="utf-8") as fh:
        report = fh.read()
    if not args.quiet:
        sys.stdout.write(report)
    if status:
        print(f"cumbreak: one or more tasks failed; see {os.path.join(out, REPORT_NAME)}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
