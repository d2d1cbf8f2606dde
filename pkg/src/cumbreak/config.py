"""Plain-text run configuration.

A config is a sequence of blocks::

    # comment
    source labour_force { path = lf.csv; frequency = annual }
    task fit_univariate dgdp_fit {
        response = dgdp
        break = 1991
        lags = 0..5
    }

Statements inside a block end at a newline or ``;``. A value is everything
up to the end of its statement; double quotes protect spaces, ``;``, ``#``
and braces. Relative source paths are resolved against the config file's
directory.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Tuple

from .errors import ConfigError
from .series import Frequency

ROLES = ("labour_force", "unemployment", "dgdp", "cpi")

_SOURCE_KEYS = {"path", "frequency", "kind"}
_COMMON = {"title"}
TASK_KEYS = {
    "fit_univariate": {
        "response", "driver", "break", "window", "lags", "smooth", "first", "last",
        "kind", "metric", "no_break", "counterfactual", "curves",
    },
    "fit_generalized": {
        "response", "driver", "unemployment", "driver_lag", "unemployment_lag",
        "first", "last", "smooth", "curves",
    },
    "unitroot": {"series", "transform", "tests", "lags", "dfgls_lags", "bandwidth", "trend"},
    "cointegration": {"fit", "series", "method", "lags", "trend", "johansen", "johansen_maxlag", "johansen_trend", "level"},
    "forecast_eval": {"fit", "horizon"},
    "figure": {"fit", "series", "kind", "window"},
}
TASK_TYPES = tuple(TASK_KEYS)
# keys naming sources, and keys naming earlier tasks
_SOURCE_REFS = ("response", "driver", "unemployment", "series")
_TASK_REFS = ("fit",)

_TOKEN = re.compile(
    r"""(?P<ws>[ \t\r]+)|(?P<comment>\#[^\n]*)|(?P<nl>\n)|(?P<str>"(?:[^"\\\n]|\\.)*")|(?P<punct>[{}=;])|(?P<word>[^\s{}=;#"]+)"""
)


@dataclass(frozen=True)
class DataSource:
    name: str
    role: str
    path: str
    frequency: Frequency
    kind: str = "level"


@dataclass(frozen=True)
class TaskSpec:
    type: str
    id: str
    params: Mapping[str, str]
    line: int = 0

    def get(self, key: str, default: Optional[str] = None) -> Optional[str]:
        return self.params.get(key, default)


@dataclass(frozen=True)
class RunConfig:
    sources: Mapping[str, DataSource]
    tasks: Tuple[TaskSpec, ...]
    base_dir: str = "."

    def sources_with_role(self, role: str) -> List[DataSource]:
        return [s for s in self.sources.values() if s.role == role]


@dataclass
class _Tok:
    kind: str
    text: str
    line: int


def _tokenize(text: str) -> List[_Tok]:
    toks, pos, line = [], 0, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ConfigError(f"line {line}: unexpected character {text[pos]!r}")
        kind = m.lastgroup
        if kind == "str":
            body = m.group()[1:-1]
            toks.append(_Tok("word", re.sub(r"\\(.)", r"\1", body), line))
        elif kind in ("punct", "word"):
            toks.append(_Tok(m.group() if kind == "punct" else "word", m.group(), line))
        elif kind == "nl":
            toks.append(_Tok("nl", "\n", line))
            line += 1
        pos = m.end()
    toks.append(_Tok("eof", "", line))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def skip_newlines(self):
        while self.peek().kind in ("nl", ";"):
            self.i += 1

    def expect(self, kind: str, what: str) -> _Tok:
        tok = self.next()
        if tok.kind != kind:
            shown = "end of file" if tok.kind == "eof" else repr(tok.text)
            raise ConfigError(f"line {tok.line}: expected {what}, found {shown}")
        return tok

    def blocks(self):
        while True:
            self.skip_newlines()
            tok = self.peek()
            if tok.kind == "eof":
                return
            head = self.expect("word", "'source' or 'task'")
            if head.text not in ("source", "task"):
                raise ConfigError(f"line {head.line}: expected 'source' or 'task', found {head.text!r}")
            words = []
            while self.peek().kind == "word":
                words.append(self.next().text)
            self.expect("{", "'{'")
            yield head.text, words, self.body(), head.line

    def body(self) -> Dict[str, str]:
        out: Dict[str, str] = {}
        while True:
            self.skip_newlines()
            tok = self.peek()
            if tok.kind == "}":
                self.i += 1
                return out
            key = self.expect("word", "a key or '}'")
            self.expect("=", f"'=' after {key.text!r}")
            parts = []
            while self.peek().kind == "word":
                parts.append(self.next().text)
            end = self.peek()
            if end.kind not in ("nl", ";", "}"):
                shown = "end of file" if end.kind == "eof" else repr(end.text)
                raise ConfigError(f"line {end.line}: unexpected {shown} in value of {key.text!r}")
            if not parts:
                raise ConfigError(f"line {key.line}: empty value for {key.text!r}")
            if key.text in out:
                raise ConfigError(f"line {key.line}: duplicate key {key.text!r}")
            out[key.text] = " ".join(parts)


def parse_config(text: str, base_dir: str = ".") -> RunConfig:
    sources: Dict[str, DataSource] = {}
    tasks: List[TaskSpec] = []
    seen_pairs = set()
    for head, words, params, line in _Parser(text).blocks():
        if head == "source":
            if not 1 <= len(words) <= 2:
                raise ConfigError(f"line {line}: expected 'source <role> [name] {{'")
            role = words[0]
            name = words[-1]
            if role not in ROLES:
                raise ConfigError(f"line {line}: unknown source role {role!r}; expected one of {', '.join(ROLES)}")
            unknown = set(params) - _SOURCE_KEYS
            if unknown:
                raise ConfigError(f"line {line}: unknown source key(s) {', '.join(sorted(unknown))}")
            if "path" not in params:
                raise ConfigError(f"line {line}: source {name!r} has no path")
            try:
                freq = Frequency.parse(params.get("frequency", "annual"))
            except ValueError as exc:
                raise ConfigError(f"line {line}: {exc}") from None
            kind = params.get("kind", "level")
            if kind not in ("level", "rate"):
                raise ConfigError(f"line {line}: source kind must be 'level' or 'rate'")
            if name in sources:
                raise ConfigError(f"line {line}: duplicate source name {name!r}")
            if (role, freq) in seen_pairs:
                raise ConfigError(f"line {line}: a {freq.value} {role} source is already declared")
            seen_pairs.add((role, freq))
            path = params["path"]
            if not os.path.isabs(path):
                path = os.path.normpath(os.path.join(base_dir, path))
            sources[name] = DataSource(name, role, path, freq, kind)
        else:
            if len(words) != 2:
                raise ConfigError(f"line {line}: expected 'task <type> <id> {{'")
            ttype, tid = words
            if ttype not in TASK_KEYS:
                raise ConfigError(f"line {line}: unknown task type {ttype!r}; expected one of {', '.join(TASK_TYPES)}")
            unknown = set(params) - TASK_KEYS[ttype] - _COMMON
            if unknown:
                raise ConfigError(f"line {line}: task {tid!r}: unknown key(s) {', '.join(sorted(unknown))}")
            if any(t.id == tid for t in tasks):
                raise ConfigError(f"line {line}: duplicate task id {tid!r}")
            if not re.fullmatch(r"[A-Za-z0-9_.-]+", tid):
                raise ConfigError(f"line {line}: task id {tid!r} may only contain letters, digits, '_', '-' and '.'")
            tasks.append(TaskSpec(ttype, tid, dict(params), line))

    known_tasks = set()
    for t in tasks:
        for key in _SOURCE_REFS:
            if key in t.params:
                for ref in split_list(t.params[key]):
                    if ref not in sources:
                        raise ConfigError(f"line {t.line}: task {t.id!r} refers to undeclared source {ref!r}")
        for key in _TASK_REFS:
            if key in t.params and t.params[key] not in known_tasks:
                raise ConfigError(f"line {t.line}: task {t.id!r} refers to {t.params[key]!r}, which is not an earlier task")
        known_tasks.add(t.id)
    return RunConfig(sources, tuple(tasks), base_dir)


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {os.fspath(path)}: {exc.strerror or exc}") from None
    try:
        return parse_config(text, os.path.dirname(os.path.abspath(path)))
    except ConfigError as exc:
        raise ConfigError(f"{os.fspath(path)}: {exc}") from None


def split_list(value: str) -> List[str]:
    return [v for v in re.split(r"[,\s]+", value.strip()) if v]


def parse_range(value: str) -> Tuple[str, str]:
    """``"a..b"`` to ``("a", "b")``; a single value gives ``(a, a)``."""
    lo, sep, hi = value.partition("..")
    lo, hi = lo.strip(), hi.strip()
    if not sep:
        return lo, lo
    if not lo or not hi:
        raise ConfigError(f"malformed range {value!r}; expected 'a..b'")
    return lo, hi


def parse_bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("yes", "true", "on", "1"):
        return True
    if v in ("no", "false", "off", "0"):
        return False
    raise ConfigError(f"expected yes/no, found {value!r}")
