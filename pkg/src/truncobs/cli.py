"""Command-line front end.

Usage::

    truncobs auc    CONFIG [--seed N] [--sigma S] [--tau T ...] [-o OUT]
    truncobs sweep  CONFIG ...
    truncobs roc    CONFIG ...
    truncobs oracle CONFIG ...

CONFIG is a JSON file (``-`` reads stdin).  Exit codes: 0 success, 2 bad
configuration or arguments, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import io
import json
import math
import os
import sys
from importlib.metadata import PackageNotFoundError, version

import jsonschema

from .distributions import DegenerateTruncationError
from .extraction import TruncationVector
from .observer import FeatureModel
from .oracle import forced_choice_auc
from .roc import EstimationError, MonteCarlo, Quadrature, asymptotic_auc, roc_curve, total_auc
from .sweep import Axis, DegenerateModelError, SweepGrid, sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
WORKERS_ENV = "TRUNCOBS_WORKERS"

_threshold = {"oneOf": [{"type": "number"}, {"type": "string", "enum": ["-inf"]}]}
_vector = {"type": "array", "items": {"type": "number"}, "minItems": 1}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["model"],
    "additionalProperties": False,
    "properties": {
        "model": {
            "type": "object",
            "required": ["class0", "class1"],
            "additionalProperties": False,
            "properties": {
                "class0": {
                    "type": "object",
                    "required": ["means", "stddevs"],
                    "additionalProperties": False,
                    "properties": {"means": _vector, "stddevs": _vector},
                },
                "class1": {"$ref": "#/properties/model/properties/class0"},
                "sigma": {"type": "number", "minimum": 0},
            },
        },
        "taus": {"oneOf": [_threshold, {"type": "array", "items": _threshold, "minItems": 1}]},
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "axes": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "required": ["lo", "hi", "n_steps"],
                        "additionalProperties": False,
                        "properties": {
                            "lo": {"type": "number"},
                            "hi": {"type": "number"},
                            "n_steps": {"type": "integer", "minimum": 2},
                        },
                    },
                },
                "include_neg_infinity": {"type": "boolean"},
                "shared": {"type": "boolean"},
            },
        },
        "method": {
            "type": "object",
            "required": ["kind"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["quadrature", "monte_carlo"]},
                "n_points": {"type": "integer", "minimum": 64},
                "n": {"type": "integer", "minimum": 10000},
                "seed": {"type": "integer", "minimum": 0},
            },
        },
        "oracle": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_pairs": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0},
                "literal_guess": {"type": "boolean"},
            },
        },
        "roc": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_thresholds": {"type": "integer", "minimum": 2},
                "complete": {"type": "boolean"},
            },
        },
        "outputs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "path": {"type": ["string", "null"]},
                "format": {"enum": ["csv", "json"]},
            },
        },
    },
}


class ConfigError(ValueError):
    pass


def artifact_version() -> str:
    try:
        return version("truncobs")
    except PackageNotFoundError:  # running from a source tree
        return "0+unknown"


def fmt(x) -> str:
    """Shortest round-trip repr, locale independent; infinities as ``-inf``/``inf``."""
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "-inf" if x < 0 else "inf"
    return repr(x)


def load_config(path: str) -> dict:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    validate_config(cfg, path)
    return cfg


def validate_config(cfg: dict, source: str = "<config>") -> None:
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        lines = []
        for err in errors:
            where = "/".join(str(p) for p in err.absolute_path) or "<root>"
            lines.append(f"{source}: field {where}: {err.message}")
        raise ConfigError("\n".join(lines))


def _taus_list(raw, M: int) -> list:
    if raw is None:
        return ["-inf"] * M
    if not isinstance(raw, list):
        raw = [raw] * M
    if len(raw) == 1 and M > 1:
        raw = raw * M
    if len(raw) != M:
        raise ConfigError(f"field taus: expected {M} thresholds, got {len(raw)}")
    return raw


def resolve(cfg: dict, args: argparse.Namespace) -> dict:
    """Apply command-line overrides and defaults; the result is what gets hashed."""
    cfg = copy.deepcopy(cfg)
    model = cfg["model"]
    M = len(model["class0"]["means"])
    for c in ("class0", "class1"):
        if len(model[c]["means"]) != M or len(model[c]["stddevs"]) != M:
            raise ConfigError(f"field model/{c}: means and stddevs must all have length {M}")
    if args.sigma is not None:
        model["sigma"] = args.sigma
    model.setdefault("sigma", 0.0)

    if args.tau:
        cfg["taus"] = [t if t == "-inf" else _float_arg(t) for t in args.tau]
    cfg["taus"] = _taus_list(cfg.get("taus"), M)

    method = cfg.setdefault("method", {"kind": "quadrature" if M == 1 else "monte_carlo"})
    if args.method:
        method["kind"] = args.method
    if args.n is not None:
        method["n"] = args.n
    if args.seed is not None:
        method["seed"] = args.seed
    given_seed = method.get("seed")
    if method["kind"] == "monte_carlo":
        method.setdefault("n", 1_000_000)
        if "seed" not in method:
            raise ConfigError("monte_carlo runs need a seed (method.seed or --seed)")
        method.pop("n_points", None)
    else:
        if M != 1:
            raise ConfigError("field method/kind: quadrature needs a single feature; use monte_carlo")
        method.setdefault("n_points", 1 << 17)
        method.pop("n", None)
        method.pop("seed", None)

    grid = cfg.setdefault("grid", {})
    grid.setdefault("shared", False)
    grid.setdefault("include_neg_infinity", True)
    if "axes" not in grid:
        steps = 141 if (M == 1 or grid["shared"]) else 71
        n_axes = 1 if (M == 1 or grid["shared"]) else M
        grid["axes"] = [{"lo": -3.0, "hi": 4.0, "n_steps": steps} for _ in range(n_axes)]

    oracle = cfg.setdefault("oracle", {})
    if args.n_pairs is not None:
        oracle["n_pairs"] = args.n_pairs
    oracle.setdefault("n_pairs", 1_000_000)
    oracle.setdefault("literal_guess", False)
    if args.seed is not None:
        oracle["seed"] = args.seed
    if "seed" not in oracle and given_seed is not None:
        oracle["seed"] = given_seed

    roc = cfg.setdefault("roc", {})
    if args.n_thresholds is not None:
        roc["n_thresholds"] = args.n_thresholds
    roc.setdefault("n_thresholds", 201)
    roc.setdefault("complete", True)

    outputs = cfg.setdefault("outputs", {})
    if args.output is not None:
        outputs["path"] = args.output
    if args.format is not None:
        outputs["format"] = args.format
    outputs.setdefault("path", None)
    outputs.setdefault("format", "csv")
    validate_config(cfg, "<resolved config>")
    return cfg


def _float_arg(text: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"--tau: not a number: {text!r}") from exc


def build_model(cfg: dict) -> FeatureModel:
    m = cfg["model"]
    try:
        return FeatureModel.from_arrays(
            m["class0"]["means"], m["class0"]["stddevs"], m["class1"]["means"], m["class1"]["stddevs"], m["sigma"]
        )
    except ValueError as exc:
        raise ConfigError(f"field model: {exc}") from exc


def build_method(cfg: dict, workers: int):
    m = cfg["method"]
    if m["kind"] == "monte_carlo":
        return MonteCarlo(n=m["n"], seed=m["seed"], workers=workers)
    return Quadrature(n_points=m["n_points"])


def build_taus(cfg: dict) -> TruncationVector:
    try:
        return TruncationVector(tuple(cfg["taus"]))
    except ValueError as exc:
        raise ConfigError(f"field taus: {exc}") from exc


def build_grid(cfg: dict, M: int) -> SweepGrid:
    g = cfg["grid"]
    try:
        grid = SweepGrid(tuple(Axis(a["lo"], a["hi"], a["n_steps"]) for a in g["axes"]),
                         g["include_neg_infinity"], g["shared"])
        grid.points(M)
    except ValueError as exc:
        raise ConfigError(f"field grid: {exc}") from exc
    return grid


def config_hash(cfg: dict) -> str:
    canonical = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def header_lines(command: str, cfg: dict) -> list[str]:
    seed = cfg["method"].get("seed", "none")
    if command == "oracle":
        seed = cfg["oracle"].get("seed", "none")
    return [
        f"# truncobs {artifact_version()} {command}",
        f"# config_sha256={config_hash(cfg)} seed={seed}",
    ]


def _tau_columns(M: int) -> list[str]:
    return [f"tau_{i + 1}" for i in range(M)]


def _decomposition_row(taus, auc, asymptote) -> list[str]:
    return [fmt(t) for t in taus] + [fmt(v) for v in (auc.az, auc.az1, auc.az2, auc.az3, asymptote,
                                                        auc.rej0, auc.rej1, auc.se)]


DECOMP_COLUMNS = ["az", "az1", "az2", "az3", "asymptote", "rej0", "rej1", "se"]


def _csv_text(header: list[str], columns: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    for line in header:
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buf.getvalue()


def _json_text(header: list[str], columns: list[str], rows: list[list[str]]) -> str:
    doc = {"header": [h.lstrip("# ") for h in header], "columns": columns, "rows": rows}
    return json.dumps(doc, indent=2) + "\n"


def _emit(cfg, header, columns, rows, stdout) -> None:
    render = _json_text if cfg["outputs"]["format"] == "json" else _csv_text
    text = render(header, columns, rows)
    path = cfg["outputs"]["path"]
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def cmd_auc(cfg: dict, workers: int, stdout) -> int:
    model = build_model(cfg)
    taus = build_taus(cfg)
    auc = total_auc(model, taus, build_method(cfg, workers))
    rows = [_decomposition_row(taus, auc, asymptotic_auc(model, taus))]
    _emit(cfg, header_lines("auc", cfg), _tau_columns(model.M) + DECOMP_COLUMNS, rows, stdout)
    return EXIT_OK


def cmd_sweep(cfg: dict, workers: int, stdout) -> int:
    model = build_model(cfg)
    grid = build_grid(cfg, model.M)
    records = sweep(model, grid, build_method(cfg, workers), workers=workers)
    rows = [_decomposition_row(r.taus, r.auc, r.asymptote) for r in records]
    _emit(cfg, header_lines("sweep", cfg), _tau_columns(model.M) + DECOMP_COLUMNS, rows, stdout)
    return EXIT_OK


def cmd_roc(cfg: dict, workers: int, stdout) -> int:
    model = build_model(cfg)
    taus = build_taus(cfg)
    curve = roc_curve(model, taus, build_method(cfg, workers), cfg["roc"]["n_thresholds"],
                      complete=cfg["roc"]["complete"])
    rows = []
    last = len(curve.points) - 1
    for k, ((fpf, tpf), t) in enumerate(zip(curve.points, curve.thresholds)):
        rows.append(["endpoint" if k == last else "rated", fmt(fpf), fmt(tpf), fmt(t)])
    for tag, seg in (("gist_extension", curve.gist_extension), ("guess_segment", curve.guess_segment)):
        for fpf, tpf in seg[1:]:
            rows.append([tag, fmt(fpf), fmt(tpf), "-inf"])
    header = header_lines("roc", cfg) + [f"# area={fmt(curve.area())}"]
    _emit(cfg, header, ["segment", "fpf", "tpf", "threshold"], rows, stdout)
    return EXIT_OK


def cmd_oracle(cfg: dict, workers: int, stdout) -> int:
    model = build_model(cfg)
    taus = build_taus(cfg)
    oc = cfg["oracle"]
    if "seed" not in oc:
        raise ConfigError("oracle runs need a seed (oracle.seed, method.seed or --seed)")
    analytic = total_auc(model, taus, build_method(cfg, workers))
    fc = forced_choice_auc(model, taus, oc["n_pairs"], oc["seed"], literal_guess=oc["literal_guess"],
                           workers=workers)
    combined = math.hypot(analytic.se, fc.se)
    diff = fc.auc_hat - analytic.az
    z = diff / combined if combined > 0 else (0.0 if diff == 0 else math.copysign(math.inf, diff))
    flag = "DISAGREE" if abs(z) > 3 else "ok"
    rows = [[fmt(t) for t in taus] + [fmt(analytic.az), fmt(analytic.se), fmt(fc.auc_hat), fmt(fc.se),
                                      str(fc.n_pairs), fmt(z), flag]]
    columns = _tau_columns(model.M) + ["az", "az_se", "forced_choice", "forced_choice_se", "n_pairs", "z", "flag"]
    _emit(cfg, header_lines("oracle", cfg), columns, rows, stdout)
    return EXIT_OK


COMMANDS = {"auc": cmd_auc, "sweep": cmd_sweep, "roc": cmd_roc, "oracle": cmd_oracle}


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="truncobs", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {artifact_version()}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("auc", "area decomposition at one threshold vector"),
        ("sweep", "decomposition over a threshold grid (CSV)"),
        ("roc", "ROC curve points with completion segments (CSV)"),
        ("oracle", "forced-choice simulation vs. the decomposition"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="JSON config file, or - for stdin")
        p.add_argument("--seed", type=int, help="random seed (required for Monte Carlo unless in config)")
        p.add_argument("--sigma", type=float, help="internal noise standard deviation")
        p.add_argument("--tau", action="append", help="threshold, repeat per feature; '-inf' for none")
        p.add_argument("--method", choices=["quadrature", "monte_carlo"])
        p.add_argument("--n", type=int, help="Monte Carlo samples per class")
        p.add_argument("--n-pairs", type=int, dest="n_pairs")
        p.add_argument("--n-thresholds", type=int, dest="n_thresholds")
        p.add_argument("-o", "--output", help="output path (default stdout)")
        p.add_argument("--format", choices=["csv", "json"])
        p.add_argument("--workers", type=int, default=None,
                       help=f"parallel workers (default ${WORKERS_ENV} or CPU count); never changes results")
    return parser


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    workers = args.workers if args.workers and args.workers > 0 else default_workers()
    try:
        cfg = resolve(load_config(args.config), args)
        return COMMANDS[args.command](cfg, workers, stdout)
    except ConfigError as exc:
        print(f"truncobs: config error: {exc}", file=stderr)
        return EXIT_CONFIG
    except (DegenerateTruncationError, EstimationError, DegenerateModelError, ArithmeticError) as exc:
        print(f"truncobs: numerical failure: {exc}", file=stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
