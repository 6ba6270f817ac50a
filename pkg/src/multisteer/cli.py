"""Command-line interface: ``multisteer {evaluate,sweep,oracle,threshold}``.

Scenario files are JSON or YAML documents. Site indices in files are
1-based.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
import yaml

from .criteria import qubit_bound
from .errors import MultisteerError
from .experiment import Experiment
from .ghz import Encoding
from .loss import LossModel
from .observables import FSpec, Selector
from .oracle import lhs_max, lhv_max
from .thresholds import (
    ANY,
    NONE,
    ThresholdResult,
    agree,
    bisection_threshold,
    cabello_reference,
    cv_steering_threshold,
    mabk_threshold,
    qubit_threshold,
)

EXIT_OK, EXIT_DISAGREE, EXIT_INVALID = 0, 1, 2
SCENARIO_KEYS = {"encoding", "N", "r", "phi", "trusted", "site_order", "settings", "selector", "loss", "bell_bound"}
LOSS_KEYS = {"eta_t", "eta_u", "overrides"}
SPEC_KEYS = {"theta", "sign", "y_theta"}
SWEEP_COLUMNS = ["axis_value", "left", "bound", "ratio", "violated"]


class InputError(MultisteerError):
    pass


# -- scenario files ---------------------------------------------------------


def load_document(path: str | Path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise InputError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{path}: top level must be a mapping")
    return doc


def _reject_unknown(doc: dict, allowed: set, where: str) -> None:
    extra = sorted(set(doc) - allowed)
    if extra:
        raise InputError(f"unknown keys in {where}: {', '.join(map(str, extra))}")


def _int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise InputError(f"{name} must be an integer, got {value!r}")
    return int(value)


def _sites(values, N: int, name: str) -> tuple[int, ...]:
    if not isinstance(values, list):
        raise InputError(f"{name} must be a list of 1-based site indices")
    out = tuple(_int(v, name) - 1 for v in values)
    bad = [j + 1 for j in out if not 0 <= j < N]
    if bad:
        raise InputError(f"{name}: sites {bad} outside 1..{N}")
    return out


def _settings(value, N: int):
    if isinstance(value, str):
        return value
    if not isinstance(value, list):
        raise InputError("settings must be 'mermin', 'ardehali' or a list of {theta, sign}")
    specs = []
    for k, item in enumerate(value):
        if not isinstance(item, dict):
            raise InputError(f"settings[{k}] must be a mapping")
        _reject_unknown(item, SPEC_KEYS, f"settings[{k}]")
        specs.append(FSpec(item.get("sign", "+"), float(item.get("theta", 0.0)), item.get("y_theta")))
    return tuple(specs)


def _loss(value, N: int) -> LossModel | None:
    if value is None:
        return None
    if not isinstance(value, dict):
        raise InputError("loss must be a mapping")
    _reject_unknown(value, LOSS_KEYS, "loss")
    if not isinstance(value.get("overrides") or {}, dict):
        raise InputError("loss.overrides must map 1-based sites to efficiencies")
    overrides = {}
    for site, eta in (value.get("overrides") or {}).items():
        j = _int(int(site) if isinstance(site, str) and site.isdigit() else site, "loss override site") - 1
        if not 0 <= j < N:
            raise InputError(f"loss override on nonexistent site {j + 1}")
        overrides[j] = float(eta)
    return LossModel(float(value.get("eta_t", 1.0)), float(value.get("eta_u", 1.0)), overrides)


def experiment_from_doc(doc: dict) -> Experiment:
    _reject_unknown(doc, SCENARIO_KEYS, "scenario")
    for key in ("encoding", "N"):
        if key not in doc:
            raise InputError(f"scenario is missing required key {key!r}")
    N = _int(doc["N"], "N")
    try:
        return Experiment(
            encoding=Encoding(doc["encoding"]),
            N=N,
            r=None if doc.get("r") is None else _int(doc["r"], "r"),
            phi=float(doc.get("phi", 0.0)),
            trusted=_sites(doc.get("trusted", []), N, "trusted"),
            site_order=None if doc.get("site_order") is None else _sites(doc["site_order"], N, "site_order"),
            settings=_settings(doc.get("settings", "mermin"), N),
            selector=Selector(doc.get("selector", "Re")),
            loss=_loss(doc.get("loss"), N),
            bell_bound=doc.get("bell_bound", "mabk"),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, MultisteerError):
            raise
        raise InputError(str(exc)) from exc


# -- formatting -------------------------------------------------------------


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.9g}"
    return str(value)


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (float, np.floating)) and not math.isfinite(value):
        return fmt(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def to_json(doc) -> str:
    return json.dumps(_jsonable(doc), indent=2, sort_keys=False) + "\n"


def to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- thresholds for an arbitrary experiment ---------------------------------


def closed_form_threshold(exp: Experiment) -> ThresholdResult | None:
    """Analytic threshold for ``exp`` where one is known, else ``None``."""
    r = exp.ghz_spec().r
    if exp.encoding is Encoding.CV_FOCK:
        if exp.T != 1 or exp.N < 3:
            return None
        block = {j for j, b in enumerate(exp.ghz_spec().bits()[0]) if b == 0}
        if not set(exp.trusted) <= block:
            return None
        return cv_steering_threshold(exp.N, r)
    if exp.encoding is not Encoding.DUAL_RAIL or r != exp.N or not isinstance(exp.settings, str):
        return None
    if exp.selector not in (Selector.RE, Selector.RE_PLUS_IM, Selector.MOD):
        return None
    if exp.T == exp.N:
        return None
    tight = (exp.settings == "mermin" and exp.selector is Selector.RE and exp.N % 2 == 1) or (
        exp.settings == "ardehali" and exp.selector is Selector.RE_PLUS_IM and exp.N % 2 == 0
    )
    if exp.T == 0 and exp.bell_bound == "mabk" and tight:
        return mabk_threshold(exp.N)
    return qubit_threshold(exp.N, exp.T)


def threshold_report(exp: Experiment) -> dict:
    if exp.T == exp.N:
        raise InputError("no untrusted site: the threshold is defined on untrusted efficiency")
    numeric = bisection_threshold(exp)
    closed = closed_form_threshold(exp)
    doc = {"bisection": numeric.to_dict(), "closed_form": None if closed is None else closed.to_dict()}
    doc["agree"] = None if closed is None else agree(closed, numeric)
    if exp.encoding is Encoding.DUAL_RAIL:
        doc["cabello_reference"] = cabello_reference(exp.N)
    return doc


# -- sweeps -----------------------------------------------------------------


def axis_values(start: float, stop: float, step: float) -> list[float]:
    if step <= 0:
        raise InputError("--step must be positive")
    if stop < start:
        return []
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(count)]


def _point(exp: Experiment, axis: str, value: float) -> Experiment:
    if axis == "eta_u":
        return exp.with_eta_u(value)
    ivalue = _int(value, axis)
    if axis == "N":
        if exp.site_order is not None:
            raise InputError("an N sweep cannot keep an explicit site_order")
        if not isinstance(exp.settings, str):
            raise InputError("an N sweep needs named settings (mermin or ardehali)")
        return exp.replace(N=ivalue)
    if axis == "T":
        return exp.replace(trusted=tuple(range(ivalue)))
    if axis == "r":
        return exp.replace(r=ivalue)
    raise InputError(f"unknown axis {axis!r}")


def sweep_row(args) -> dict:
    exp, axis, value = args
    point = _point(exp, axis, value)
    report = point.evaluate()
    row = {"axis_value": value if axis == "eta_u" else int(value)}
    row.update({k: getattr(report, k) for k in ("left", "bound", "ratio", "violated")})
    if axis == "N":
        if point.T < point.N:
            numeric = bisection_threshold(point)
            closed = closed_form_threshold(point)
            row["eta_min"] = numeric.eta_min
            row["eta_status"] = numeric.status
            row["eta_closed"] = None if closed is None or closed.status in (ANY, NONE) else closed.eta_min
        else:
            row["eta_status"] = "no-untrusted-site"
    return row


def sweep(exp: Experiment, axis: str, start: float, stop: float, step: float, jobs: int = 1) -> tuple[list[dict], list[str]]:
    values = axis_values(start, stop, step)
    columns = list(SWEEP_COLUMNS)
    if axis == "N":
        columns += ["eta_min", "eta_status", "eta_closed"]
    tasks = [(exp, axis, v) for v in values]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(sweep_row, tasks))
    else:
        rows = [sweep_row(t) for t in tasks]
    return rows, columns


# -- commands ---------------------------------------------------------------


def cmd_evaluate(args) -> int:
    exp = experiment_from_doc(load_document(args.scenario))
    doc = exp.evaluate().to_dict()
    if args.format == "csv":
        _emit(to_csv([doc], list(doc)), args.out)
    else:
        _emit(to_json(doc), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    exp = experiment_from_doc(load_document(args.scenario))
    rows, columns = sweep(exp, args.axis, args.start, args.stop, args.step, args.jobs)
    if args.format == "json":
        _emit(to_json(rows), args.out)
    else:
        _emit(to_csv(rows, columns), args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    N, T, selector = args.N, args.T, args.selector
    if args.scenario:
        exp = experiment_from_doc(load_document(args.scenario))
        N, T, selector = exp.N, exp.T, exp.selector.value
    if N is None or T is None:
        raise InputError("oracle needs --N and --T (or --scenario)")
    sel = Selector(selector)
    if T == 0:
        brute = lhv_max(N, sel)
    else:
        brute = lhs_max(N, T, sel, args.phase_resolution)
    closed = qubit_bound(N, T, sel)
    ok = abs(brute - closed) <= 1e-6
    doc = {"N": N, "T": T, "selector": sel.value, "brute_force": brute, "closed_form": closed, "agree": ok}
    if args.format == "csv":
        _emit(to_csv([doc], list(doc)), args.out)
    else:
        _emit(to_json(doc), args.out)
    return EXIT_OK if ok else EXIT_DISAGREE


def cmd_threshold(args) -> int:
    exp = experiment_from_doc(load_document(args.scenario))
    doc = threshold_report(exp)
    if args.format == "csv":
        rows = [r for r in (doc["closed_form"], doc["bisection"]) if r is not None]
        _emit(to_csv(rows, ["method", "status", "eta_min", "residual", "N", "T", "r", "encoding"]), args.out)
    else:
        _emit(to_json(doc), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multisteer", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt_default):
        p.add_argument("--out", help="write output to this file instead of stdout")
        p.add_argument("--format", choices=("csv", "json"), default=fmt_default)

    p = sub.add_parser("evaluate", help="evaluate one scenario file")
    p.add_argument("--scenario", required=True)
    common(p, "json")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="sweep one parameter of a scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--axis", choices=("eta_u", "N", "T", "r"), required=True)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--jobs", type=int, default=1, help="worker processes; output order is unchanged")
    common(p, "csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="brute-force a classical bound and compare with the closed form")
    p.add_argument("--scenario")
    p.add_argument("--N", type=int)
    p.add_argument("--T", type=int)
    p.add_argument("--selector", choices=[s.value for s in Selector], default="Re")
    p.add_argument("--phase-resolution", type=int, default=256)
    common(p, "json")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("threshold", help="minimum untrusted efficiency for a scenario")
    p.add_argument("--scenario", required=True)
    common(p, "json")
    p.set_defaults(func=cmd_threshold)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return args.func(args)
    except MultisteerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
