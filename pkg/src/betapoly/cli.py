"""Command-line front end.

Subcommands: exact, curve, compare, vertices, wendel, intrinsic.

Exit codes: 0 success, 2 usage or domain error, 3 statistical regression
(|z| > 4), 4 quadrature tolerance not reached. Output is JSON lines by
default; ``--format csv`` switches to CSV. Floats are written with 17
significant digits.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from . import asympt
from .exactvol import BetaModel, ToleranceNotReached, expected_volume_ratio
from .intrinsics import expected_intrinsic_ratio
from .logreal import SampleSize
from .mcgeom import (
    mc_origin_containment,
    mc_vertex_count,
    mc_volume_ratio,
    wendel_identity,
    wendel_probability,
)

DEFAULT_SEED = 20200101
CURVE_COLUMNS = ("d", "beta", "log_n", "x", "ratio_exact", "ratio_predicted", "rel_error_estimate", "error")
MC_MAX_D = 12
MC_MAX_N = 500
Z_LIMIT = 4.0


class UsageError(ValueError):
    pass


@dataclass
class RunRecord:
    command: str
    params: dict
    seed: Optional[int]
    outputs: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    wall_time: float = 0.0

    def as_dict(self) -> dict:
        out = {"command": self.command, "params": self.params, "seed": self.seed}
        out.update(self.outputs)
        out["wall_time"] = self.wall_time
        return out


def format_float(x) -> str:
    """17 significant digits; integral values keep a ".0" so they read back as floats."""
    text = format(x, ".17g")
    if math.isfinite(x) and not any(ch in text for ch in ".e"):
        text += ".0"
    return text


def _json_value(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format_float(v) if math.isfinite(v) else "null"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{_json_value(str(k))}: {_json_value(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def to_json(obj) -> str:
    return _json_value(obj)


def to_csv(rows, columns) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(
            "" if row.get(c) is None else (format_float(row[c]) if isinstance(row.get(c), float) else row[c])
            for c in columns
        )
    return buf.getvalue()


def _flatten(d, prefix=""):
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, (list, tuple)):
            out[key] = ";".join(format_float(x) if isinstance(x, float) else str(x) for x in v)
        else:
            out[key] = v
    return out


# argument helpers ----------------------------------------------------------------


def _size_from_args(args, d: int, beta: float) -> SampleSize:
    given = [v is not None for v in (args.n, args.log_n, args.x)]
    if sum(given) != 1:
        raise UsageError("exactly one of --n, --log-n, --x is required")
    if args.n is not None:
        return SampleSize.exact(args.n)
    if args.log_n is not None:
        return SampleSize.from_log(args.log_n)
    return SampleSize.from_log(asympt.threshold_log_n(d, beta, args.x))


def _model(d, beta) -> BetaModel:
    try:
        return BetaModel(d, beta)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _float_list(text):
    if text is None:
        return None
    items = [s for s in text.replace(",", " ").split() if s]
    try:
        return [float(s) for s in items]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from None


def _int_list(text):
    vals = _float_list(text)
    if any(v != int(v) for v in vals):
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}")
    return [int(v) for v in vals]


# commands ----------------------------------------------------------------------------


def cmd_exact(args) -> RunRecord:
    model = _model(args.d, args.beta)
    size = _size_from_args(args, model.d, model.beta)
    ratio, report = expected_volume_ratio(model, size, args.rel_tol)
    outputs = {"ratio": ratio, "log_ratio": report.log_ratio}
    outputs.update(report.as_dict())
    outputs["log_n"] = size.log_n
    outputs["ratio_predicted"] = _predicted(model, size)
    params = {"d": model.d, "beta": model.beta, "n": size.exact_n, "log_n": args.log_n, "x": args.x,
              "rel_tol": args.rel_tol}
    return RunRecord("exact", params, None, outputs)


def _predicted(model, size):
    try:
        return asympt.predicted_ratio(model.d, model.beta, size.log_n)
    except ValueError:
        return None


def curve_row(d, beta, log_n, x, rel_tol):
    """One row of the phase curve; failures are reported in the error column."""
    row = dict.fromkeys(CURVE_COLUMNS)
    row.update(d=d, beta=beta)
    try:
        if log_n is None:
            log_n = asympt.threshold_log_n(d, beta, x)
        if x is None:
            x = asympt.x_of(d, beta, log_n)
        row.update(log_n=log_n, x=x, ratio_predicted=math.exp(-x))
        ratio, report = expected_volume_ratio(BetaModel(d, beta), SampleSize.from_log(log_n), rel_tol)
        row.update(ratio_exact=ratio, rel_error_estimate=report.rel_error_estimate)
    except (ValueError, ArithmeticError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _curve_task(task):
    return curve_row(*task)


def cmd_curve(args) -> RunRecord:
    if not args.d:
        raise UsageError("--d list is empty")
    xs, lns = args.x, args.log_n
    if (xs is None) == (lns is None):
        raise UsageError("exactly one of --x and --log-n lists is required")
    values = xs if xs is not None else lns
    if not values:
        raise UsageError("empty parameter list")
    tasks = [
        (d, args.beta, None if xs is not None else v, v if xs is not None else None, args.rel_tol)
        for d in args.d for v in values
    ]
    if args.workers and args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_curve_task, tasks))
    else:
        rows = [_curve_task(t) for t in tasks]
    params = {"d": args.d, "beta": args.beta, "x": xs, "log_n": lns, "rel_tol": args.rel_tol}
    ok = sum(r["error"] is None for r in rows)
    return RunRecord("curve", params, None, {"rows_ok": ok}, rows)


def _mc_guard(args, d, n):
    if not args.force and (d > MC_MAX_D or n > MC_MAX_N):
        raise UsageError(f"Monte Carlo refused for d={d}, n={n} (limits d<={MC_MAX_D}, n<={MC_MAX_N}); use --force")


def cmd_compare(args) -> RunRecord:
    model = _model(args.d, args.beta)
    if args.n < model.d + 1:
        raise UsageError("n must be at least d+1")
    _mc_guard(args, model.d, args.n)
    exact, report = expected_volume_ratio(model, args.n, args.rel_tol)
    est = mc_volume_ratio(model, args.n, args.trials, args.probes, args.seed, workers=args.workers)
    z = est.z_score(exact, exact * report.rel_error_estimate)
    params = {"d": model.d, "beta": model.beta, "n": args.n, "trials": args.trials, "probes": args.probes}
    outputs = {"ratio_exact": exact, "mc_value": est.value, "mc_std_error": est.std_error, "z_score": z}
    return RunRecord("compare", params, args.seed, outputs)


def cmd_vertices(args) -> RunRecord:
    if args.beta != 0.0:
        raise UsageError("vertex counts are only available for beta = 0")
    model = _model(args.d, 0.0)
    if args.n < model.d + 1:
        raise UsageError("n must be at least d+1")
    _mc_guard(args, model.d, args.n)
    est = mc_vertex_count(model, args.n, args.trials, args.seed, workers=args.workers)
    if args.n - 1 >= model.d + 1:
        prev, report = expected_volume_ratio(model, args.n - 1, args.rel_tol)
        pred_err = args.n * prev * report.rel_error_estimate
    else:
        prev, pred_err = 0.0, 0.0  # d points span no volume
    predicted = args.n * (1.0 - prev)
    z = est.z_score(predicted, pred_err)
    params = {"d": model.d, "beta": 0.0, "n": args.n, "trials": args.trials}
    outputs = {"mc_value": est.value, "mc_std_error": est.std_error, "efron_prediction": predicted, "z_score": z}
    return RunRecord("vertices", params, args.seed, outputs)


def cmd_wendel(args) -> RunRecord:
    if not args.n > args.d >= 1:
        raise UsageError("need n > d >= 1")
    bound = wendel_probability(args.n, args.d)
    identity = wendel_identity(args.n, args.d)
    outputs = {"bound": bound, "identity": identity}
    if args.trials > 0:
        model = _model(args.d, args.beta)
        _mc_guard(args, model.d, args.n)
        est = mc_origin_containment(model, args.n, args.trials, args.seed, workers=args.workers)
        outputs.update(mc_value=est.value, mc_std_error=est.std_error, z_score=est.z_score(identity))
    params = {"n": args.n, "d": args.d, "beta": args.beta, "trials": args.trials}
    return RunRecord("wendel", params, args.seed, outputs)


def cmd_intrinsic(args) -> RunRecord:
    model = _model(args.d, args.beta)
    if not 1 <= args.k <= model.d:
        raise UsageError("need 1 <= k <= d")
    size = _size_from_args(args, args.k, 0.5 * (model.d - args.k) + model.beta)
    if not size.at_least(args.k + 1):
        raise UsageError("n must be at least k+1")
    ratio = expected_intrinsic_ratio(model.d, args.k, model.beta, size, args.rel_tol)
    params = {"d": model.d, "k": args.k, "beta": model.beta, "n": size.exact_n, "log_n": size.log_n,
              "rel_tol": args.rel_tol}
    return RunRecord("intrinsic", params, None, {"ratio": ratio})


# parser ------------------------------------------------------------------------------


def _add_size(p):
    p.add_argument("--n", type=int)
    p.add_argument("--log-n", type=float, dest="log_n")
    p.add_argument("--x", type=float)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--workers", type=int, default=None)
    common.add_argument("--rel-tol", type=float, default=1e-9, dest="rel_tol")
    common.add_argument("--force", action="store_true")

    parser = argparse.ArgumentParser(prog="betapoly", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", parents=[common], help="exact expected volume ratio")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--beta", type=float, required=True)
    _add_size(p)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("curve", parents=[common], help="phase-curve sweep")
    p.add_argument("--d", type=_int_list, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--x", type=_float_list)
    p.add_argument("--log-n", type=_float_list, dest="log_n")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("compare", parents=[common], help="exact ratio vs Monte Carlo")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--probes", type=int, default=100)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("vertices", parents=[common], help="vertex count vs Efron's identity")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--trials", type=int, default=10000)
    p.set_defaults(func=cmd_vertices)

    p = sub.add_parser("wendel", parents=[common], help="Wendel bound and origin containment")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--trials", type=int, default=10000)
    p.set_defaults(func=cmd_wendel)

    p = sub.add_parser("intrinsic", parents=[common], help="intrinsic volume ratio")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--beta", type=float, required=True)
    _add_size(p)
    p.set_defaults(func=cmd_intrinsic)
    return parser


def render(record: RunRecord, fmt: str) -> str:
    if record.command == "curve":
        if fmt == "csv":
            return to_csv(record.rows, CURVE_COLUMNS)
        return "".join(to_json(r) + "\n" for r in record.rows)
    data = record.as_dict()
    if fmt == "csv":
        flat = _flatten(data)
        return to_csv([flat], list(flat))
    return to_json(data) + "\n"


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        record = args.func(args)
    except ToleranceNotReached as exc:
        print(f"betapoly: tolerance not reached: {exc} (estimate {exc.estimate!r})", file=stderr)
        return 4
    except (UsageError, ValueError) as exc:
        print(f"betapoly: {exc}", file=stderr)
        return 2
    record.wall_time = time.perf_counter() - start
    stdout.write(render(record, args.format))
    if record.command == "curve" and record.outputs["rows_ok"] == 0:
        return 2
    z = record.outputs.get("z_score")
    if z is not None and abs(z) > Z_LIMIT:
        print(f"betapoly: statistical regression, |z| = {abs(z):.2f} > {Z_LIMIT}", file=stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
