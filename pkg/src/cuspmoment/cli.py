"""Command-line front end writing CSV or JSON results.

Exit codes: 0 success, 2 configuration error, 3 computation error. Errors are
reported on stderr as a one-line JSON object.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import traceback
from dataclasses import dataclass
from typing import Sequence

from .errors import CuspMomentError, DomainError
from .exact_formula import CENTRAL, TruncationParams, WeightParam, twisted_moment_exact
from .identities import identity_table
from .legendre_asym import bg_error_scan
from .oracle import SUPPORTED_WEIGHTS, brute_force_twisted_moment
from .weight_average import (
    averaged_moment,
    error_exponent_fit,
    make_bump,
    mollified_first_moment,
)

COMMANDS = ("identities", "moment", "average", "sweep", "oracle-compare", "bg-scan", "mollify")
THREADS_ENV = "CUSPMOMENT_THREADS"
EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE = 0, 2, 3


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    l: int | None = None
    weight: int | None = None
    K: float | None = None
    theta1: float = 1.0
    theta2: float = 2.0
    tail_target: float = 1e-12
    output_path: str | None = None
    format: str | None = None
    threads: int = 1
    l_list: tuple[int, ...] = ()
    K_list: tuple[float, ...] = ()
    n_list: tuple[int, ...] = ()
    theta_list: tuple[float, ...] = ()
    m: int = 1
    M: int | None = None
    l_max: int = 30

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if not self.tail_target > 0:
            raise ConfigError("--tail-target must be positive")
        if self.threads < 1:
            raise ConfigError("--threads must be >= 1")
        if self.format not in (None, "csv", "json"):
            raise ConfigError("--format must be csv or json")
        required = {
            "moment": ("l", "weight"),
            "average": ("l", "K"),
            "sweep": ("l_list", "K_list"),
            "oracle-compare": ("weight",),
            "bg-scan": ("n_list", "theta_list"),
            "mollify": ("M", "K"),
        }.get(self.command, ())
        missing = [name for name in required if getattr(self, name) in (None, ())]
        if missing:
            flags = ", ".join("--" + n.replace("_", "-") for n in missing)
            raise ConfigError(f"{self.command} requires {flags}")
        if self.command == "oracle-compare" and self.weight not in SUPPORTED_WEIGHTS:
            raise ConfigError(f"--weight must be one of {SUPPORTED_WEIGHTS}")
        if self.command == "sweep" and len(self.K_list) < 3:
            raise ConfigError("sweep needs at least three --K-list entries")


# ----------------------------------------------------------------- output

def _num(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return format(x, ".17g") if math.isfinite(x) else "null"
    if x is None:
        return "null"
    return json.dumps(x)


def _csv_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def render(rows: list[dict], fmt: str) -> str:
    if fmt == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        header = list(rows[0]) if rows else []
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_cell(row[h]) for h in header])
        return out.getvalue()
    objs = ["{" + ", ".join(f"{json.dumps(k)}: {_num(v)}" for k, v in row.items()) + "}"
            for row in rows]
    body = objs[0] if len(objs) == 1 else "[\n  " + ",\n  ".join(objs) + "\n]"
    return body + "\n"


# --------------------------------------------------------------- commands

def _trunc(cfg: RunConfig) -> TruncationParams:
    return TruncationParams(tail_target=cfg.tail_target)


def _cmd_identities(cfg: RunConfig) -> tuple[list[dict], bool]:
    rows = [{"identity": r.name, "residual": r.residual, "threshold": r.threshold,
             "points": r.points, "passed": bool(r.passed)} for r in identity_table()]
    return rows, all(r["passed"] for r in rows)


def _cmd_moment(cfg: RunConfig) -> tuple[list[dict], bool]:
    try:
        w = WeightParam.from_weight(cfg.weight)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    r = twisted_moment_exact(cfg.l, w, CENTRAL, _trunc(cfg), threads=cfg.threads)
    v1 = complex(r.v1_value)
    return [{
        "l": r.l, "weight": w.weight, "value": float(r.value),
        "main_term_1": float(complex(r.main_term_1).real),
        "main_term_2": float(complex(r.main_term_2).real),
        "v1_re": v1.real, "v1_im": v1.imag,
        "certified_tail": r.certified_tail, "cn_max": r.cn_max,
    }], True


def _average_row(res, slope=None) -> dict:
    return {"l": res.l, "K": res.K, "value": res.value, "main_term": res.main_term,
            "abs_error": res.abs_error, "certified_tail_total": res.certified_tail_total,
            "slope": slope}


def _cmd_average(cfg: RunConfig) -> tuple[list[dict], bool]:
    h = make_bump(cfg.theta1, cfg.theta2)
    res = averaged_moment(cfg.l, cfg.K, h, _trunc(cfg), threads=cfg.threads)
    row = _average_row(res)
    row.pop("slope")
    row["H"] = h.H
    return [row], True


def _cmd_sweep(cfg: RunConfig) -> tuple[list[dict], bool]:
    h = make_bump(cfg.theta1, cfg.theta2)
    trunc = _trunc(cfg)
    rows = []
    for l in cfg.l_list:
        fit = error_exponent_fit(l, cfg.K_list, h, trunc)
        for K in cfg.K_list:
            res = averaged_moment(l, K, h, trunc, threads=cfg.threads)
            rows.append(_average_row(res, fit.slope))
    return rows, True


def _cmd_oracle_compare(cfg: RunConfig) -> tuple[list[dict], bool]:
    w = WeightParam.from_weight(cfg.weight)
    trunc = _trunc(cfg)
    rows, ok = [], True
    for l in range(1, cfg.l_max + 1):
        exact = twisted_moment_exact(l, w, CENTRAL, trunc, threads=cfg.threads)
        brute = brute_force_twisted_moment(l, cfg.weight, tail_target=cfg.tail_target)
        diff = abs(float(exact.value) - brute.value)
        allowed = exact.certified_tail + brute.tail_bound + 1e-8 * abs(brute.value)
        ok &= diff <= allowed
        rows.append({"l": l, "weight": cfg.weight, "exact": float(exact.value),
                     "oracle": brute.value, "abs_diff": diff,
                     "exact_certified_tail": exact.certified_tail,
                     "oracle_tail_bound": brute.tail_bound, "agree": diff <= allowed})
    return rows, ok


def _cmd_bg_scan(cfg: RunConfig) -> tuple[list[dict], bool]:
    scan = bg_error_scan(cfg.n_list, cfg.theta_list, cfg.m)
    rows = []
    for n, theta, err in scan.rows:
        slope = scan.fits.get(theta, (None, None))[0]
        rows.append({"n": n, "theta": theta, "m": cfg.m, "abs_error": err, "slope": slope})
    return rows, True


def _cmd_mollify(cfg: RunConfig) -> tuple[list[dict], bool]:
    h = make_bump(cfg.theta1, cfg.theta2)
    value = mollified_first_moment(cfg.M, cfg.K, h, _trunc(cfg))
    return [{"M": cfg.M, "K": cfg.K, "value": value, "HK": h.H * cfg.K,
             "ratio": value / (h.H * cfg.K)}], True


_HANDLERS = {
    "identities": (_cmd_identities, "csv"),
    "moment": (_cmd_moment, "json"),
    "average": (_cmd_average, "csv"),
    "sweep": (_cmd_sweep, "csv"),
    "oracle-compare": (_cmd_oracle_compare, "csv"),
    "bg-scan": (_cmd_bg_scan, "csv"),
    "mollify": (_cmd_mollify, "json"),
}


def _origin(exc: BaseException) -> str:
    """Module of the innermost package frame that raised ``exc``."""
    origin = "cli"
    for frame in traceback.extract_tb(exc.__traceback__):
        parts = frame.filename.replace("\\", "/").split("/")
        if "cuspmoment" in parts[:-1]:
            origin = parts[-1].removesuffix(".py")
    return origin


def _report(kind: str, exc: BaseException, module: str | None = None) -> None:
    payload = {"error": kind, "type": type(exc).__name__, "message": str(exc)}
    if module:
        payload["module"] = module
    sys.stderr.write(json.dumps(payload) + "\n")


def run(cfg: RunConfig) -> int:
    """Execute one configured command; returns the exit status."""
    try:
        cfg.validate()
        handler, default_fmt = _HANDLERS[cfg.command]
        rows, ok = handler(cfg)
    except ConfigError as exc:
        _report("config", exc)
        return EXIT_CONFIG
    except (CuspMomentError, ArithmeticError, ValueError) as exc:
        _report("computation", exc, _origin(exc))
        return EXIT_COMPUTE
    text = render(rows, cfg.format or default_fmt)
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_COMPUTE


# ----------------------------------------------------------------- parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _report("config", ConfigError(message))
        self.exit(EXIT_CONFIG)


def _csv_list(kind):
    def parse(text: str):
        try:
            return tuple(kind(x) for x in text.split(",") if x.strip())
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc
    return parse


def _default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env is None:
        return os.cpu_count() or 1
    try:
        return int(env)
    except ValueError:
        return -1     # rejected by validation


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cuspmoment", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--l", type=int)
    p.add_argument("--weight", type=int)
    p.add_argument("--K", type=float)
    p.add_argument("--M", type=int, help="mollifier length")
    p.add_argument("--theta1", type=float, default=1.0)
    p.add_argument("--theta2", type=float, default=2.0)
    p.add_argument("--tail-target", type=float, default=1e-12)
    p.add_argument("--output", dest="output_path")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--threads", type=int, default=None,
                   help=f"worker threads (fallback: ${THREADS_ENV}, then CPU count)")
    p.add_argument("--l-list", type=_csv_list(int), default=())
    p.add_argument("--K-list", type=_csv_list(float), default=())
    p.add_argument("--n-list", type=_csv_list(int), default=())
    p.add_argument("--theta-list", type=_csv_list(float), default=())
    p.add_argument("--m", type=int, default=1, help="expansion order for bg-scan")
    p.add_argument("--l-max", type=int, default=30)
    return p


def parse_config(argv: Sequence[str] | None = None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    values = vars(ns)
    if values["threads"] is None:
        values["threads"] = _default_threads()
    return RunConfig(**values)


def main(argv: Sequence[str] | None = None) -> int:
    return run(parse_config(argv))


if __name__ == "__main__":
    sys.exit(main())
