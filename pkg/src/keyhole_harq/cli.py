"""Command-line entry point: ``keyhole-harq {sweep,preset,self-test,eval}``.

Config files are flat JSON objects with keys ``n_t``, ``n_r``, ``k``,
``rate_bps_hz``, ``snr_db`` (number or per-round list), ``schemes``,
``methods``, ``trials``, ``seed``, ``axis``, ``grid`` (list or
``"start:stop:step"``), ``out`` and ``format``. Command-line flags override
file values.

Exit codes: 0 success, 1 invalid input, 2 numerical failure (a failed
cell under ``--strict``, or a failed self-test criterion).
"""

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from . import experiments as ex
from .core import SystemConfig

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2

CONFIG_KEYS = {"n_t", "n_r", "k", "rate_bps_hz", "snr_db", "schemes", "scheme", "methods",
               "trials", "seed", "axis", "grid", "out", "format"}


class InputError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _csv_list(text):
    return tuple(t.strip() for t in text.split(",") if t.strip())


def parse_grid(value):
    """``[a, b, ...]``, ``"a,b,..."`` or ``"start:stop:step"`` (inclusive)."""
    if isinstance(value, str):
        if ":" in value:
            start, stop, step = (float(t) for t in value.split(":"))
            if step <= 0:
                raise InputError("grid step must be positive")
            return tuple(np.round(np.arange(start, stop + step / 2, step), 10))
        return tuple(float(t) for t in value.split(","))
    if isinstance(value, (int, float)):
        return (float(value),)
    return tuple(float(v) for v in value)


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read config {path!r}: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError("config must be a JSON object")
    unknown = set(data) - CONFIG_KEYS
    if unknown:
        raise InputError(f"unknown config keys: {sorted(unknown)}")
    return data


def _spec_from(values, base_spec=None):
    """Merge flat ``values`` into ``base_spec`` (or build a spec from scratch)."""
    if base_spec is None:
        missing = {"n_t", "n_r", "k", "rate_bps_hz", "snr_db", "axis", "grid"} - set(values)
        if missing:
            raise InputError(f"missing config keys: {sorted(missing)}")
        base = SystemConfig.from_db(values["n_t"], values["n_r"], values["k"],
                                    values["snr_db"], values["rate_bps_hz"])
        return ex.SweepSpec(base, values["axis"], parse_grid(values["grid"]),
                            **_spec_extras(values))
    b = base_spec.base
    if {"n_t", "n_r", "k", "rate_bps_hz", "snr_db"} & set(values):
        snr = values.get("snr_db", b.snr_db if not b.equal_rounds else b.snr_db[0])
        b = SystemConfig.from_db(values.get("n_t", b.n_t), values.get("n_r", b.n_r),
                                 values.get("k", b.k_max), snr,
                                 values.get("rate_bps_hz", b.rate))
    changes = _spec_extras(values)
    if "axis" in values:
        changes["axis"] = values["axis"]
    if "grid" in values:
        changes["grid"] = parse_grid(values["grid"])
    return replace(base_spec, base=b, **changes)


def _spec_extras(values):
    out = {}
    schemes = values.get("schemes", values.get("scheme"))
    if schemes is not None:
        out["schemes"] = _csv_list(schemes) if isinstance(schemes, str) else tuple(schemes)
    if "methods" in values:
        m = values["methods"]
        out["methods"] = _csv_list(m) if isinstance(m, str) else tuple(m)
    for key, name in (("trials", "trials"), ("seed", "seed"), ("out", "out"), ("format", "fmt")):
        if key in values:
            out[name] = values[key]
    return out


def _flag_values(args):
    vals = {}
    for key in ("trials", "seed", "methods", "out", "format", "schemes", "axis", "grid"):
        v = getattr(args, key, None)
        if v is not None:
            vals[key] = v
    return vals


def _emit(rows, spec, args):
    text = ex.to_csv(rows) if spec.fmt == "csv" else ex.to_json(rows)
    if spec.out:
        ex.write_rows(rows, spec.out, spec.fmt)
    else:
        sys.stdout.write(text)
    failed = [r for r in rows if r.error]
    for r in failed:
        print(f"cell {r.axis_name}={r.axis} {r.scheme}/{r.method}: {r.error}", file=sys.stderr)
    return EXIT_NUMERIC if failed and args.strict else EXIT_OK


def cmd_sweep(args):
    values = load_config(args.config) if args.config else {}
    values.update(_flag_values(args))
    base_spec = ex.preset(args.preset) if args.preset else None
    spec = _spec_from(values, base_spec)
    return _emit(ex.run_sweep(spec, timing=args.timing), spec, args)


def cmd_preset(args):
    spec = _spec_from(_flag_values(args), ex.preset(args.name))
    return _emit(ex.run_sweep(spec, timing=args.timing), spec, args)


def cmd_eval(args):
    base = SystemConfig.from_db(args.n_t, args.n_r, args.k, parse_grid(args.snr_db), args.rate)
    methods = _csv_list(args.methods) if args.methods else ("exact", "asymptotic", "monte-carlo")
    schemes = _csv_list(args.schemes) if args.schemes else ex.SCHEMES
    spec = ex.SweepSpec(base, "rate", (base.rate,), methods, schemes,
                        args.trials or 100_000, ex.RngSpec.seed if args.seed is None else args.seed)
    rows = ex.run_sweep(spec, timing=args.timing)
    width = max(len(r.scheme) for r in rows)
    for r in rows:
        val = "" if r.value is None else f"{r.value:.6g}"
        se = "" if r.stderr is None else f" +- {r.stderr:.2g}"
        ms = "" if r.wall_time_ms is None else f"  [{r.wall_time_ms:.1f} ms]"
        err = f"  ERROR {r.error}" if r.error else ""
        print(f"{r.scheme:<{width}}  {r.method:<18} {val}{se}{ms}{err}")
    return EXIT_NUMERIC if args.strict and any(r.error for r in rows) else EXIT_OK


def cmd_self_test(args):
    from .acceptance import report_json, run_acceptance

    results = run_acceptance(args.level, seed=args.seed)
    for r in results:
        print(r.line())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report_json(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERIC


def _add_common(p):
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=ex.FORMATS)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--methods", help="comma list of " + ", ".join(ex.METHODS))
    p.add_argument("--schemes", help="comma list of " + ", ".join(ex.SCHEMES)
                   + "; NAME@DB pins an SNR")
    p.add_argument("--strict", action="store_true", help="exit 2 if any cell fails")
    p.add_argument("--timing", action="store_true", help="fill wall_time_ms")


def build_parser():
    parser = _Parser(prog="keyhole-harq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sweep", help="run a sweep from a config file and/or flags")
    p.add_argument("--config", help="flat JSON config file")
    p.add_argument("--preset", choices=ex.PRESETS, help="start from a preset")
    p.add_argument("--axis", choices=ex.AXES)
    p.add_argument("--grid", help='"a,b,c" or "start:stop:step"')
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("preset", help="run a figure preset")
    p.add_argument("name", choices=ex.PRESETS)
    p.add_argument("--grid", help="override the preset grid")
    _add_common(p)
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("eval", help="all methods at one operating point")
    p.add_argument("--n-t", type=int, required=True)
    p.add_argument("--n-r", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--snr-db", required=True, help="dB, one value or a comma list per round")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--methods")
    p.add_argument("--schemes")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--timing", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("self-test", help="run the acceptance battery")
    p.add_argument("--level", choices=("fast", "full"), default="fast")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=cmd_self_test)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValueError, TypeError) as exc:
        print(f"keyhole-harq: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
