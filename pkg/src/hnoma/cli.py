"""Configuration loading, experiment driver and result files.

Configuration documents are INI files with three flat sections::

    [system]            ; SystemConfig fields, powers in dBm
    M = 4
    a_U = 0.0005
    P_B_dBm = 6.4

    [run]
    schemes = ul-oma, ul-punct
    trials = 500
    seed = 0
    output = results.csv
    format = csv

    [sweep]
    axis = a_U
    values = 1e-4, 5e-4, 1e-3

Every key is optional; omitted keys take the evaluation defaults.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field, fields, replace
from typing import Optional, Tuple

from .engine import (FLAG_FRONTHAUL, SWEEP_AXES, RateReport, Scenario, resolve_workers,
                     run_experiment, with_axis)
from .errors import InfeasibleFronthaulError, InvalidParameterError, PrecoderConvergenceError
from .model import SystemConfig, db2lin, lin2db
from .schemes import SCHEME_NAMES, SchemeConfig

log = logging.getLogger("hnoma")

POWER_KEYS = {"P_B_dBm": "P_B", "P_U_dBm": "P_U", "P_dBm": "P", "urllc_ref_power_dBm": "urllc_ref_power"}
INT_FIELDS = {"M", "n_F", "n_F_B", "n_T", "l_F", "l_T", "L_U"}
CSV_COLUMNS = ("axis_value", "scheme", "direction", "embb_rate", "embb_stderr", "urllc_rate",
               "eps_D", "infeasible_flag", "n_trials", "seed")
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class RunSpec:
    system: SystemConfig = field(default_factory=SystemConfig)
    schemes: Tuple[str, ...] = SCHEME_NAMES
    axis: Optional[str] = None
    values: Tuple[float, ...] = ()
    output: Optional[str] = None
    format: str = "csv"
    seed: int = 0
    trials: int = 500
    workers: int = 1
    max_urllc_samples: int = 1_000_000
    tin_minislots: Optional[int] = None

    def scenarios(self):
        """(axis value, scenario) pairs in emission order."""
        values = self.values if self.axis else (None,)
        for value in values:
            for name in self.schemes:
                base = Scenario(system=self.system, scheme=SchemeConfig.parse(name),
                                n_trials=self.trials, seed=self.seed, workers=self.workers,
                                max_urllc_samples=self.max_urllc_samples,
                                tin_minislots=self.tin_minislots)
                if value is None:
                    yield None, base
                else:
                    engine_value = db2lin(value) if self.axis == "P_U" else value
                    yield value, with_axis(base, self.axis, engine_value)


def _number(section, key, raw, kind=float):
    try:
        value = kind(raw) if kind is float else int(float(raw))
        if kind is int and float(raw) != value:
            raise ValueError
    except ValueError:
        raise InvalidParameterError(f"[{section}] {key}={raw!r}: expected {kind.__name__}") from None
    return value


def _list(raw):
    return [item.strip() for item in raw.replace("\n", ",").split(",") if item.strip()]


def parse_config(document: str) -> RunSpec:
    """Validated :class:`RunSpec` from an INI document (may be empty)."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    parser.optionxform = str
    try:
        parser.read_string(document)
    except configparser.Error as exc:
        raise InvalidParameterError(f"malformed configuration: {exc}") from None
    unknown = set(parser.sections()) - {"system", "run", "sweep"}
    if unknown:
        raise InvalidParameterError(f"unknown section(s) {sorted(unknown)}; expected system, run, sweep")

    sys_fields = {f.name for f in fields(SystemConfig)} - set(POWER_KEYS.values())
    kwargs = {}
    if parser.has_section("system"):
        for key, raw in parser.items("system"):
            if key in POWER_KEYS:
                kwargs[POWER_KEYS[key]] = db2lin(_number("system", key, raw))
            elif key in sys_fields:
                kwargs[key] = _number("system", key, raw, int if key in INT_FIELDS else float)
            else:
                raise InvalidParameterError(f"[system] unknown key {key!r}")
    system = SystemConfig(**kwargs)

    options = {}
    if parser.has_section("run"):
        run = dict(parser.items("run"))
        known = {"schemes", "trials", "seed", "workers", "output", "format", "max_urllc_samples",
                 "tin_minislots"}
        extra = set(run) - known
        if extra:
            raise InvalidParameterError(f"[run] unknown key(s) {sorted(extra)}")
        if "schemes" in run:
            names = _list(run["schemes"])
            bad = [n for n in names if n.lower() not in SCHEME_NAMES]
            if bad or not names:
                raise InvalidParameterError(
                    f"[run] schemes: unknown {bad or 'empty list'}; valid schemes: {', '.join(SCHEME_NAMES)}")
            options["schemes"] = tuple(n.lower() for n in names)
        for key in ("trials", "seed", "workers", "max_urllc_samples", "tin_minislots"):
            if run.get(key, "").strip():
                options[key] = _number("run", key, run[key], int)
        if run.get("output", "").strip():
            options["output"] = run["output"].strip()
        if run.get("format", "").strip():
            options["format"] = run["format"].strip().lower()

    if parser.has_section("sweep"):
        sweep = dict(parser.items("sweep"))
        extra = set(sweep) - {"axis", "values"}
        if extra:
            raise InvalidParameterError(f"[sweep] unknown key(s) {sorted(extra)}")
        axis = sweep.get("axis", "").strip()
        if axis:
            options["axis"] = axis
            options["values"] = tuple(_number("sweep", "values", v) for v in _list(sweep.get("values", "")))

    return validate(RunSpec(system=system, **options))


def validate(run_spec: RunSpec) -> RunSpec:
    if run_spec.format not in FORMATS:
        raise InvalidParameterError(f"format={run_spec.format!r}: must be one of {', '.join(FORMATS)}")
    if run_spec.trials < 1:
        raise InvalidParameterError(f"trials={run_spec.trials}: must be >= 1")
    if run_spec.seed < 0:
        raise InvalidParameterError(f"seed={run_spec.seed}: must be >= 0")
    if run_spec.workers < 1:
        raise InvalidParameterError(f"workers={run_spec.workers}: must be >= 1")
    if run_spec.max_urllc_samples < 1:
        raise InvalidParameterError(f"max_urllc_samples={run_spec.max_urllc_samples}: must be >= 1")
    if run_spec.tin_minislots is not None and not 1 <= run_spec.tin_minislots <= run_spec.system.n_T:
        raise InvalidParameterError(f"tin_minislots={run_spec.tin_minislots}: must lie in [1, n_T]")
    if run_spec.axis is not None:
        if run_spec.axis not in SWEEP_AXES:
            raise InvalidParameterError(f"sweep axis {run_spec.axis!r}: must be one of {', '.join(SWEEP_AXES)}")
        if not run_spec.values:
            raise InvalidParameterError("sweep values: at least one value is required")
        for value in run_spec.values:
            with_axis(Scenario(system=run_spec.system), run_spec.axis,
                      db2lin(value) if run_spec.axis == "P_U" else value)
    if run_spec.output is not None:
        parent = os.path.dirname(os.path.abspath(run_spec.output))
        if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
            raise InvalidParameterError(f"output={run_spec.output!r}: directory {parent} is not writable")
    return run_spec


def dump_config(run_spec: RunSpec) -> str:
    """INI document that :func:`parse_config` maps back to ``run_spec``."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    system = {}
    for f in fields(SystemConfig):
        value = getattr(run_spec.system, f.name)
        power_key = next((k for k, v in POWER_KEYS.items() if v == f.name), None)
        system[power_key or f.name] = repr(float(lin2db(value))) if power_key else repr(value)
    parser["system"] = system
    run = {"schemes": ", ".join(run_spec.schemes), "trials": str(run_spec.trials), "seed": str(run_spec.seed),
           "workers": str(run_spec.workers), "format": run_spec.format,
           "max_urllc_samples": str(run_spec.max_urllc_samples)}
    if run_spec.output:
        run["output"] = run_spec.output
    if run_spec.tin_minislots is not None:
        run["tin_minislots"] = str(run_spec.tin_minislots)
    parser["run"] = run
    if run_spec.axis:
        parser["sweep"] = {"axis": run_spec.axis, "values": ", ".join(repr(float(v)) for v in run_spec.values)}
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def _fmt(value):
    if isinstance(value, float):
        return "" if math.isnan(value) else f"{value:.12g}"
    return str(value)


def format_results(reports, fmt: str = "csv") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in reports:
            writer.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
        return buf.getvalue()
    if fmt == "json":
        rows = [{k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in r.to_dict().items()}
                for r in reports]
        return json.dumps(rows, indent=2) + "\n"
    raise InvalidParameterError(f"format={fmt!r}: must be one of {', '.join(FORMATS)}")


def read_json_reports(text: str):
    out = []
    for row in json.loads(text):
        out.append(RateReport.from_dict({k: (float("nan") if v is None else v) for k, v in row.items()}))
    return out


def emit_results(reports, fmt: str, path: str) -> str:
    """Write ``reports`` to ``path``; returns the written text."""
    text = format_results(reports, fmt)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc.strerror}") from exc
    return text


def _failed_report(scenario: Scenario, exc) -> RateReport:
    nan = float("nan")
    return RateReport(scheme=scenario.scheme.name, direction=scenario.scheme.direction,
                      embb_rate=nan, embb_stderr=nan, urllc_rate=nan, urllc_stderr=nan, eps_D=nan,
                      L_U=int(scenario.system.L_U) if scenario.scheme.orthogonal else 1,
                      infeasible_flag=FLAG_FRONTHAUL, n_trials=scenario.n_trials, seed=scenario.seed)


def execute(run_spec: RunSpec):
    """Run every (axis value, scheme) pair; returns (reports, number failed)."""
    reports, failed = [], 0
    for value, scenario in run_spec.scenarios():
        try:
            report = run_experiment(scenario)
        except (InfeasibleFronthaulError, PrecoderConvergenceError) as exc:
            log.warning("%s: %s", scenario.scheme.name, exc)
            report = _failed_report(scenario, exc)
            failed += 1
        if value is not None:
            report.axis, report.axis_value = run_spec.axis, float(value)
        reports.append(report)
    return reports, failed


def build_parser():
    parser = argparse.ArgumentParser(prog="hnoma", description="eMBB/URLLC coexistence link-level simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the configured experiment or sweep")
    run.add_argument("--config", help="INI configuration document")
    run.add_argument("--out", help="output file (overrides [run] output)")
    run.add_argument("--format", choices=FORMATS, help="output format (overrides [run] format)")
    run.add_argument("--seed", type=int, help="RNG seed")
    run.add_argument("--trials", type=int, help="channel draws per point")
    run.add_argument("--workers", type=int,
                     help="worker processes (the HNOMA_WORKERS environment variable takes precedence)")
    run.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        text = ""
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        run_spec = parse_config(text)
        overrides = {k: v for k, v in (("output", args.out), ("format", args.format), ("seed", args.seed),
                                       ("trials", args.trials), ("workers", args.workers)) if v is not None}
        run_spec = validate(replace(run_spec, **overrides))
        if run_spec.output is None:
            raise InvalidParameterError("no output path: pass --out or set [run] output")
        run_spec = replace(run_spec, workers=resolve_workers(run_spec.workers))
    except (InvalidParameterError, OSError) as exc:
        print(f"hnoma: error: {exc}", file=sys.stderr)
        return 1

    reports, failed = execute(run_spec)
    try:
        emit_results(reports, run_spec.format, run_spec.output)
    except OSError as exc:
        print(f"hnoma: error: {exc}", file=sys.stderr)
        return 1
    if reports and failed == len(reports):
        print("hnoma: every scheme was infeasible", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
