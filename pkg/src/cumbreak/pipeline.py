"""Execute a :class:`~cumbreak.config.RunConfig` and write its artifacts.

Every task produces a section of ``report.txt`` and a ``<id>.json`` record;
fit tasks also write curve CSVs and figure tasks an SVG. Tasks run in
declaration order. A failing task is reported and the run continues; tasks
that depend on it fail in turn.

Text formatting: rates and coefficients to 4 decimals, test statistics to 2,
coefficients of determination to 3. The JSON records carry the same numbers
at full precision.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from . import __version__
from .calibrate import (
    CalibrationConfig,
    CalibrationResult,
    Metric,
    divergence_rate,
    evaluate_forecast,
    fit_generalized,
    search,
)
from .config import RunConfig, TaskSpec, load_config, parse_bool, parse_range, split_list
from .econometrics import (
    TrendSpec,
    adf_test,
    dfgls_test,
    johansen_trace,
    pp_test,
    residual_cointegration_test,
)
from .econometrics import tables
from .errors import CumbreakError, OutputError
from .ingest import emit_curves, load_csv, write_series_csv
from .models import GeneralizedModel, PiecewiseLinearModel, ResponseKind, counterfactual_gap
from .series import Frequency, Period, Series, cumulative_sum, first_difference, log_growth_rate, moving_average
from .svg import emit_svg

REPORT_NAME = "report.txt"


def rate(v: Optional[float]) -> str:
    if v is None or not math.isfinite(v):
        return "n/a"
    text = f"{v:.4f}"
    return "0.0000" if text == "-0.0000" else text


def stat(v: Optional[float]) -> str:
    if v is None or not math.isfinite(v):
        return "n/a"
    text = f"{v:.2f}"
    return "0.00" if text == "-0.00" else text


def r2(v: Optional[float]) -> str:
    if v is None or not math.isfinite(v):
        return "n/a"
    text = f"{v:.3f}"
    return "0.000" if text == "-0.000" else text


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, Period):
        return str(obj)
    return obj


def dump_json(record: Dict[str, Any]) -> str:
    return json.dumps(_jsonable(record), sort_keys=True, indent=2, allow_nan=False) + "\n"


class TaskError(CumbreakError):
    pass


@dataclass
class _Fit:
    """What later tasks need from a successful fit."""

    result: CalibrationResult
    l: Series
    u: Optional[Series]
    response: str


@dataclass
class TaskOutcome:
    id: str
    type: str
    ok: bool
    record: Dict[str, Any]
    report: str
    files: List[str] = field(default_factory=list)


class Runner:
    def __init__(self, config: RunConfig, out_dir: str):
        self.config = config
        self.out_dir = out_dir
        self._cache: Dict[str, Union[Series, Exception]] = {}
        self.fits: Dict[str, _Fit] = {}
        self.failed: set = set()

    # -- inputs -------------------------------------------------------------

    def source(self, name: str) -> Series:
        if name not in self._cache:
            src = self.config.sources[name]
            try:
                self._cache[name] = load_csv(src.path, src.frequency)
            except CumbreakError as exc:
                self._cache[name] = exc
        got = self._cache[name]
        if isinstance(got, Exception):
            raise TaskError(f"source {name!r}: {got}")
        return got

    def driver(self, name: str) -> Series:
        """Growth rate of a level source, or the rate series itself."""
        src = self.config.sources[name]
        s = self.source(name)
        if src.role == "labour_force" and src.kind == "level":
            return log_growth_rate(s)
        return s

    def _default_source(self, task: TaskSpec, key: str, role: str, frequency: Frequency) -> str:
        if task.get(key):
            return task.get(key)
        found = [s.name for s in self.config.sources_with_role(role) if s.frequency is frequency]
        if len(found) != 1:
            raise TaskError(f"'{key}' not given and {len(found)} {frequency.value} {role} sources are declared")
        return found[0]

    def _required(self, task: TaskSpec, key: str) -> str:
        value = task.get(key)
        if value is None:
            raise TaskError(f"missing required key '{key}'")
        return value

    def _fit_ref(self, task: TaskSpec) -> _Fit:
        ref = self._required(task, "fit")
        if ref in self.failed:
            raise TaskError(f"depends on failed task {ref!r}")
        if ref not in self.fits:
            raise TaskError(f"task {ref!r} is not a fit task")
        return self.fits[ref]

    def out(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    # -- tasks --------------------------------------------------------------

    def run_task(self, task: TaskSpec) -> TaskOutcome:
        handler = getattr(self, f"_task_{task.type}")
        header = f"== {task.type} {task.id} =="
        try:
            record, lines, files = handler(task)
        except (CumbreakError, ValueError) as exc:
            self.failed.add(task.id)
            record = {"task": task.id, "type": task.type, "status": "error", "error": str(exc)}
            return TaskOutcome(task.id, task.type, False, record, f"{header}\nERROR: {exc}\n")
        record = {"task": task.id, "type": task.type, "status": "ok", **record, "files": files}
        if files:
            lines.append("files: " + ", ".join(files))
        return TaskOutcome(task.id, task.type, True, record, header + "\n" + "\n".join(lines) + "\n", files)

    def _period(self, text: str, frequency: Frequency) -> Period:
        try:
            p = Period.parse(text)
        except ValueError:
            raise TaskError(f"cannot parse period {text!r}") from None
        if p.frequency is not frequency:
            raise TaskError(f"period {p} does not match the {frequency.value} data")
        return p

    def _int(self, task: TaskSpec, key: str, default: Optional[int]) -> Optional[int]:
        value = task.get(key)
        if value is None:
            return default
        try:
            return int(value)
        except ValueError:
            raise TaskError(f"'{key}' must be an integer, got {value!r}") from None

    def _window(self, task: TaskSpec, key: str, frequency: Frequency):
        value = task.get(key)
        if value is None:
            return None, None
        lo, hi = parse_range(value)
        return self._period(lo, frequency), self._period(hi, frequency)

    def _write_curves(self, task: TaskSpec, result: CalibrationResult) -> List[str]:
        if not parse_bool(task.get("curves", "yes")):
            return []
        files = []
        for kind in ("dynamic", "cumulative"):
            name = f"{task.id}_{kind}.csv"
            emit_curves(result.observed, result.predicted, kind, self.out(name))
            files.append(name)
        return files

    def _metric_lines(self, result: CalibrationResult) -> Tuple[Dict[str, Any], List[str]]:
        rec = {
            "rms_cumulative": result.rms_cumulative,
            "rms_dynamic": result.rms_dynamic,
            "r2_dynamic": result.r2_dynamic,
            "r2_cumulative": result.r2_cumulative,
            "l1_cumulative": result.l1_cumulative,
            "l1_dynamic": result.l1_dynamic,
        }
        lines = [
            f"rms cumulative: {rate(result.rms_cumulative)}",
            f"rms dynamic: {rate(result.rms_dynamic)}",
            f"l1 cumulative: {rate(result.l1_cumulative)}",
            f"l1 dynamic: {rate(result.l1_dynamic)}",
            f"R2 dynamic: {r2(result.r2_dynamic)}",
            f"R2 cumulative: {r2(result.r2_cumulative)}",
        ]
        return rec, lines

    def _task_fit_univariate(self, task: TaskSpec):
        resp_name = self._required(task, "response")
        response = self.source(resp_name)
        freq = response.frequency
        drv_name = self._default_source(task, "driver", "labour_force", freq)
        l = self.driver(drv_name)

        role = self.config.sources[resp_name].role
        kind = ResponseKind(task.get("kind", "unemployment" if role == "unemployment" else "inflation"))
        defaults = CalibrationConfig.default(freq)
        lo, hi = parse_range(task.get("lags", f"{defaults.lag_range[0]}..{defaults.lag_range[1]}"))
        try:
            lag_range = (int(lo), int(hi))
        except ValueError:
            raise TaskError(f"'lags' must be integers, got {task.get('lags')!r}") from None
        brk = task.get("break")
        cfg = CalibrationConfig(
            break_candidate=self._period(brk, freq) if brk else None,
            break_window=self._int(task, "window", 4),
            lag_range=lag_range,
            metric=Metric(task.get("metric", "L2").upper()),
            smoothing=self._int(task, "smooth", None),
            include_no_break=parse_bool(task.get("no_break", "yes")),
        )
        first, last = (self._period(task.get(k), freq) if task.get(k) else None for k in ("first", "last"))
        if first or last:
            response = response.window(first or response.start, last or response.end)
        result = search(cfg, l, response, kind)
        if cfg.smoothing and cfg.smoothing > 1:
            l = moving_average(l, cfg.smoothing)
        model = result.model
        self.fits[task.id] = _Fit(result, l, None, resp_name)

        segs = [
            {"break_start": s.break_start, "slope": s.slope, "intercept": s.intercept}
            for s in model.segments
        ]
        negative = int(np.count_nonzero(result.predicted.values < 0))
        rec: Dict[str, Any] = {
            "response": resp_name,
            "driver": drv_name,
            "frequency": freq.value,
            "first": result.first,
            "last": result.last,
            "nobs": result.nobs,
            "model": {"kind": "piecewise", "response_kind": model.response_kind.value, "lag": model.lag, "segments": segs},
            "break_year": result.break_year,
            "lag": result.lag,
            "negative_predictions": negative,
            "search": {
                "break_candidate": cfg.break_candidate,
                "break_window": cfg.break_window,
                "lag_range": list(cfg.lag_range),
                "smoothing": cfg.smoothing,
                "metric": cfg.metric.value,
            },
            "candidates": [
                {"break_start": c.break_start, "lag": c.lag, "rms_cumulative": c.rms_cumulative}
                for c in result.candidates
            ],
        }
        lines = [
            f"response: {resp_name} ({model.response_kind.value}), driver: {drv_name}",
            f"span: {result.first}..{result.last} ({result.nobs} periods)",
            f"break: {result.break_year if result.break_year is not None else 'none'}",
            f"lag: {result.lag}",
        ]
        for i, s in enumerate(model.segments):
            where = f"from {s.break_start}" if s.break_start is not None else "initial"
            lines.append(f"segment {i + 1} ({where}): slope {rate(s.slope)}, intercept {rate(s.intercept)}")
        mrec, mlines = self._metric_lines(result)
        rec.update(mrec)
        lines += mlines
        if negative and model.response_kind is ResponseKind.UNEMPLOYMENT:
            lines.append(f"warning: {negative} negative predicted values")

        cf = task.get("counterfactual")
        files = self._write_curves(task, result)
        if cf:
            lo, hi = self._window(task, "counterfactual", freq)
            gap = counterfactual_gap(result.observed, model, l, (lo, hi))
            crec = {"first": lo, "last": hi, "window_mean": gap.window_mean}
            lines.append(f"counterfactual gap mean {lo}..{hi}: {rate(gap.window_mean)}")
            if result.break_year is not None:
                slope = divergence_rate(gap.gap, result.break_year)
                crec["divergence_rate"] = slope
                lines.append(f"cumulative gap slope after {result.break_year}: {rate(slope)} per period")
            rec["counterfactual"] = crec
            name = f"{task.id}_gap.csv"
            write_series_csv(gap.gap, self.out(name))
            files.append(name)
        return rec, lines, files

    def _task_fit_generalized(self, task: TaskSpec):
        resp_name = self._required(task, "response")
        pi = self.source(resp_name)
        freq = pi.frequency
        drv_name = self._default_source(task, "driver", "labour_force", freq)
        u_name = self._default_source(task, "unemployment", "unemployment", freq)
        l = self.driver(drv_name)
        u = self.source(u_name)
        k = self._int(task, "smooth", None)
        if k and k > 1:
            l, u, pi = (moving_average(s, k) for s in (l, u, pi))
        first, last = (self._period(task.get(k), freq) if task.get(k) else None for k in ("first", "last"))
        result = fit_generalized(
            l, u, pi, self._int(task, "driver_lag", 0), self._int(task, "unemployment_lag", 0), first, last
        )
        self.fits[task.id] = _Fit(result, l, u, resp_name)
        m: GeneralizedModel = result.model
        rec = {
            "response": resp_name,
            "driver": drv_name,
            "unemployment": u_name,
            "frequency": freq.value,
            "first": result.first,
            "last": result.last,
            "nobs": result.nobs,
            "model": {
                "kind": "generalized",
                "c1": m.c1,
                "c2": m.c2,
                "c3": m.c3,
                "driver_lag": m.driver_lag,
                "unemployment_lag": m.unemployment_lag,
            },
            "smoothing": k,
        }
        lines = [
            f"response: {resp_name}, driver: {drv_name}, unemployment: {u_name}",
            f"span: {result.first}..{result.last} ({result.nobs} periods)",
            f"model: c1 {rate(m.c1)} (lag {m.driver_lag}), c2 {rate(m.c2)} (lag {m.unemployment_lag}), c3 {rate(m.c3)}",
        ]
        mrec, mlines = self._metric_lines(result)
        rec.update(mrec)
        lines += mlines
        return rec, lines, self._write_curves(task, result)

    _TRANSFORMS = ("level", "difference", "growth", "growth_difference")

    def _task_unitroot(self, task: TaskSpec):
        name = self._required(task, "series")
        transform = task.get("transform", "level")
        if transform not in self._TRANSFORMS:
            raise TaskError(f"unknown transform {transform!r}; expected one of {', '.join(self._TRANSFORMS)}")
        s = self.source(name)
        if transform.startswith("growth"):
            s = log_growth_rate(s)
        if transform.endswith("difference"):
            s = first_difference(s)
        trend = TrendSpec.parse(task.get("trend", "constant"))
        lags = self._int(task, "lags", 1)
        dfgls_lags = self._int(task, "dfgls_lags", 2)
        bandwidth = self._int(task, "bandwidth", None)
        reports = []
        for test in split_list(task.get("tests", "adf,dfgls,pp")):
            t = test.lower()
            if t == "adf":
                reports.append(adf_test(s, lags, trend))
            elif t in ("dfgls", "df-gls"):
                reports.append(dfgls_test(s, dfgls_lags, trend))
            elif t == "pp":
                reports.append(pp_test(s, trend, bandwidth))
            else:
                raise TaskError(f"unknown unit-root test {test!r}")
        rec = {
            "series": name,
            "transform": transform,
            "first": s.start,
            "last": s.end,
            "tests": [_test_record(r) for r in reports],
        }
        lines = [f"series: {name} ({transform}), {s.start}..{s.end}", _TEST_HEADER]
        for r in reports:
            lines += _test_lines(r)
        return rec, lines, []

    def _task_cointegration(self, task: TaskSpec):
        rec: Dict[str, Any] = {}
        lines: List[str] = []
        level = task.get("level", "5%")
        if level not in tables.LEVELS:
            raise TaskError(f"level must be one of {', '.join(tables.LEVELS)}")
        if task.get("fit"):
            fit = self._fit_ref(task)
            res = fit.result
            method = task.get("method", "adf")
            trend = TrendSpec.parse(task.get("trend", "constant"))
            rep = residual_cointegration_test(res.residual_dynamic, self._int(task, "lags", 1), method, trend)
            rec["fit"] = task.get("fit")
            rec["residual_test"] = _test_record(rep)
            lines += [f"residual of {task.get('fit')} ({res.first}..{res.last})", _TEST_HEADER] + _test_lines(rep)
            pair = [res.observed, res.predicted]
            labels = ["observed", "predicted"]
        else:
            names = split_list(self._required(task, "series"))
            pair = [self.source(n) for n in names]
            labels = names
        if parse_bool(task.get("johansen", "yes")):
            jt = TrendSpec.parse(task.get("johansen_trend", "none"))
            rank = johansen_trace(pair, self._int(task, "johansen_maxlag", 1), jt, level)
            rec["johansen"] = {
                "series": labels,
                "rank_hypotheses": list(range(len(rank.trace_statistics))),
                "trace_statistics": list(rank.trace_statistics),
                "eigenvalues": list(rank.eigenvalues),
                "critical_values": [dict(cv) for cv in rank.critical_values],
                "selected_rank": rank.selected_rank,
                "maxlag": rank.maxlag,
                "trend": rank.trend.value,
                "nobs": rank.nobs,
                "level": rank.level,
            }
            lines.append(
                f"johansen trace ({', '.join(labels)}; maxlag {rank.maxlag}, trend {rank.trend.value}, {rank.nobs} obs)"
            )
            for r, (tr, cv) in enumerate(zip(rank.trace_statistics, rank.critical_values)):
                lines.append(f"  r <= {r}: trace {stat(tr)}  cv {level} {stat(cv[level])}")
            lines.append(f"selected rank at {level}: {rank.selected_rank}")
        if not rec:
            raise TaskError("nothing to do: give 'fit' or enable 'johansen'")
        return rec, lines, []

    def _task_forecast_eval(self, task: TaskSpec):
        fit = self._fit_ref(task)
        horizon = self._int(task, "horizon", 1)
        ev = evaluate_forecast(fit.result.model, fit.result.observed, fit.l, horizon, fit.u)
        rec = {
            "fit": task.get("fit"),
            "horizon": ev.horizon,
            "model_rmsfe": ev.model_rmsfe,
            "naive_rmsfe": ev.naive_rmsfe,
            "nobs": ev.nobs,
            "first": ev.first,
            "last": ev.last,
        }
        lines = [
            f"model of {task.get('fit')}, horizon {ev.horizon}, {ev.first}..{ev.last} ({ev.nobs} periods)",
            f"model RMSFE: {rate(ev.model_rmsfe)}",
            f"naive RMSFE: {rate(ev.naive_rmsfe)}",
        ]
        return rec, lines, []

    def _task_figure(self, task: TaskSpec):
        kind = task.get("kind", "dynamic")
        title = task.get("title", task.id)
        if task.get("fit"):
            fit = self._fit_ref(task)
            res = fit.result
            if kind == "dynamic":
                curves = [("observed", res.observed), ("predicted", res.predicted)]
            elif kind == "cumulative":
                curves = [("observed", cumulative_sum(res.observed)), ("predicted", cumulative_sum(res.predicted))]
            elif kind == "gap":
                if not isinstance(res.model, PiecewiseLinearModel):
                    raise TaskError("gap figures need a piecewise fit")
                gap = counterfactual_gap(res.observed, res.model, fit.l, (res.first, res.last)).gap
                curves = [("observed - pre-break prediction", gap), ("cumulative", cumulative_sum(gap))]
            else:
                raise TaskError(f"unknown figure kind {kind!r}; expected dynamic, cumulative or gap")
        else:
            names = split_list(self._required(task, "series"))
            curves = [(n, self.source(n)) for n in names]
            if kind == "cumulative":
                curves = [(n, cumulative_sum(s)) for n, s in curves]
            elif kind != "dynamic":
                raise TaskError(f"figure kind {kind!r} needs a fit")
        lo_hi = task.get("window")
        if lo_hi:
            lo, hi = self._window(task, "window", curves[0][1].frequency)
            curves = [(n, s.window(lo, hi)) for n, s in curves]
        name = f"{task.id}.svg"
        emit_svg(curves, title, self.out(name))
        rec = {"kind": kind, "title": title, "curves": [n for n, _ in curves]}
        return rec, [f"{kind} figure: {', '.join(n for n, _ in curves)}"], [name]


_TEST_HEADER = f"{'test':<12}{'stat':>9}{'1%':>9}{'5%':>9}{'10%':>9}{'lag/bw':>8}{'nobs':>6}  reject"


def _test_record(r) -> Dict[str, Any]:
    return {
        "test_name": r.test_name,
        "statistics": dict(r.statistics) if not r.degenerate else {k: None for k in r.statistics},
        "primary": r.primary,
        "statistic": r.statistic,
        "lag_or_bandwidth": r.lag_or_bandwidth,
        "trend": r.trend.value,
        "critical_values": {k: dict(v) for k, v in r.critical_values.items()},
        "nobs": r.nobs,
        "degenerate": r.degenerate,
        "reject_at": {k: r.reject_at_for(k) for k in r.statistics},
    }


def _test_lines(r) -> List[str]:
    out = []
    for name in r.statistics:
        label = r.test_name if len(r.statistics) == 1 else f"{r.test_name} {name}"
        cv = r.critical_values[name]
        value = "perfect" if r.degenerate else stat(r.statistics[name])
        out.append(
            f"{label:<12}{value:>9}{stat(cv['1%']):>9}{stat(cv['5%']):>9}{stat(cv['10%']):>9}"
            f"{r.lag_or_bandwidth:>8}{r.nobs:>6}  {r.reject_at_for(name) or '-'}"
        )
    if r.degenerate:
        out.append("  (residuals vanish: perfect fit, statistic undefined)")
    return out


def run(config: RunConfig, out_dir: str, config_name: str = "") -> Tuple[int, List[TaskOutcome]]:
    """Run every task, write the artifacts, and return ``(exit_status, outcomes)``."""
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create output directory {out_dir}: {exc.strerror or exc}") from None
    runner = Runner(config, out_dir)
    outcomes = []
    for task in config.tasks:
        outcome = runner.run_task(task)
        with open(runner.out(f"{task.id}.json"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(dump_json(outcome.record))
        outcomes.append(outcome)
    failed = [o.id for o in outcomes if not o.ok]
    head = [f"cumbreak {__version__} run report"]
    if config_name:
        head.append(f"config: {config_name}")
    head.append(f"tasks: {len(outcomes)}, failed: {len(failed)}" + (f" ({', '.join(failed)})" if failed else ""))
    text = "\n".join(head) + "\n\n" + "\n".join(o.report for o in outcomes)
    with open(runner.out(REPORT_NAME), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return (1 if failed else 0), outcomes


def run_file(path: str, out_dir: str) -> Tuple[int, List[TaskOutcome]]:
    config = load_config(path)
    return run(config, out_dir, os.path.basename(path))
