"""Batch command-line front end.

Subcommands: ``validate``, ``pe-table``, ``construct``, ``thresholds``,
``simulate``.  Exit codes: 0 success, 1 domain failure (labeler or parameter
validation), 2 usage or parse error.  All numeric CSV output uses 17
significant digits and newline-terminated rows, so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import channels as ch_mod
from . import decoder as dec_mod
from . import synthesis as syn_mod
from . import thresholds as thr_mod
from .posynomial import label_distribution, mutual_information

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


@dataclass
class RunConfig:
    subcommand: str
    channel: dict
    out: str = None
    fmt: str = None
    seed: int = 0
    params: dict = None


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _load_channel_spec(spec: str) -> dict:
    spec = spec.strip()
    if spec.startswith("{"):
        return json.loads(spec)
    with open(spec, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_grid(spec: str):
    try:
        start, stop, step = (float(v) for v in spec.split(":"))
    except ValueError as exc:
        raise UsageError(f"grid must be start:stop:step, got {spec!r}") from exc
    if step <= 0 or stop < start:
        raise UsageError(f"grid must be monotone increasing, got {spec!r}")
    values = []
    k = 0
    while True:
        v = start + k * step
        if v > stop + 1e-12:
            break
        values.append(round(v, 12))
        k += 1
    return values


class UsageError(Exception):
    pass


def cmd_validate(cfg: RunConfig) -> int:
    channel = ch_mod.from_config(cfg.channel)
    report = ch_mod.validate_labeler(channel)
    payload = {
        "is_fair": report.is_fair,
        "is_good": report.is_good,
        "violations": [
            {"property": name, "t": t, "values": list(np.atleast_1d(vals)) if not isinstance(vals, str) else vals}
            for name, t, vals in report.violations
        ],
    }
    _emit(json.dumps(payload, default=float) + "\n", cfg.out)
    return EXIT_OK if report.is_good else EXIT_DOMAIN


def cmd_pe_table(cfg: RunConfig) -> int:
    channel = ch_mod.from_config(cfg.channel)
    report = syn_mod.synthesize_all(channel, cfg.params["n"])
    if (cfg.fmt or "csv") == "csv":
        _emit(report.to_csv(), cfg.out)
    else:
        rows = [
            {
                "i": i,
                "wt": int(report.wt[i]),
                "pe": report.pe[i],
                "z_star": report.z_star[i],
                "mi": report.mi[i],
                "support_size": int(report.support_size[i]),
            }
            for i in range(report.block_length)
        ]
        _emit(json.dumps(rows) + "\n", cfg.out)
    return EXIT_OK


def cmd_construct(cfg: RunConfig) -> int:
    channel = ch_mod.from_config(cfg.channel)
    code = syn_mod.construct_code(
        channel, cfg.params["n"], cfg.params["k"], rank_by=cfg.params["rank_by"]
    )
    _emit(json.dumps(code.to_json_dict()) + "\n", cfg.out)
    return EXIT_OK


def _threshold_row(channel, d_g, d_e, eps):
    tree = thr_mod.compute_thresholds(channel, d_g, d_e, eps)
    capacity = mutual_information(label_distribution(channel))
    return capacity, tree


def cmd_thresholds(cfg: RunConfig) -> int:
    base = dict(cfg.channel)
    kind = base.get("kind")
    d_g, d_e, eps = cfg.params["dg"], cfg.params["de"], cfg.params["eps"]
    grid = cfg.params["grid"]
    awgn_family = kind == "biawgn8"

    if grid is None:
        if kind == "bsc":
            grid = [float(base["p"])]
        elif kind == "biawgn8":
            grid = [float(base["sigma"])]
        else:
            grid = [float("nan")]

    header = "param,C,R_U,R_L"
    if awgn_family:
        header += ",C_biawgn,C_awgn"
    lines = [header]
    rows = []
    for value in grid:
        spec = dict(base)
        if kind == "bsc" and not math.isnan(value):
            spec["p"] = value
        elif kind == "biawgn8":
            spec["sigma"] = value
        channel = ch_mod.from_config(spec)
        capacity, tree = _threshold_row(channel, d_g, d_e, eps)
        row = [value, capacity, tree.r_u, tree.r_l]
        if awgn_family:
            row.append(float(ch_mod.reference_capacities("biawgn-unquantized", [value])[0]))
            row.append(float(ch_mod.reference_capacities("awgn", [value])[0]))
        rows.append(row)
        lines.append(",".join(_fmt(v) for v in row))
    if (cfg.fmt or "csv") == "csv":
        _emit("\n".join(lines) + "\n", cfg.out)
    else:
        keys = header.split(",")
        _emit(json.dumps([dict(zip(keys, row)) for row in rows]) + "\n", cfg.out)
    return EXIT_OK


def cmd_simulate(cfg: RunConfig) -> int:
    channel = ch_mod.from_config(cfg.channel)
    n = cfg.params["n"]
    decoder = cfg.params["decoder"]
    code = None
    g_set = None
    if decoder == "blockgenie":
        depth = cfg.params["g_depth"]
        if depth is None:
            depth = n
        g_set = {(depth, j) for j in range(1 << depth)}
    elif cfg.params["k"] is not None:
        code = syn_mod.construct_code(channel, n, cfg.params["k"])
    result = dec_mod.simulate(
        channel,
        trials=cfg.params["trials"],
        seed=cfg.seed,
        decoder=decoder,
        n=n,
        code=code,
        g_set=g_set,
    )
    print(f"simulated {result.trials} trials ({decoder})", file=sys.stderr)
    _emit(result.to_json() + "\n", cfg.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minsum-polar",
        description="Exact analytics and simulation of min-sum decoded polar codes",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p):
        p.add_argument("--channel", required=True, help="channel config: inline JSON or a path")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("validate", help="check the labeler axioms")
    add_common(p)

    p = sub.add_parser("pe-table", help="exact per-index error probabilities")
    add_common(p)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("construct", help="pick the information set of a code")
    add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--rank-by", choices=("pe", "z_star"), default="pe")

    p = sub.add_parser("thresholds", help="rate thresholds, optionally swept over a grid")
    add_common(p)
    p.add_argument("--dg", type=int, default=thr_mod.DEFAULT_D_G)
    p.add_argument("--de", type=int, default=thr_mod.DEFAULT_D_E)
    p.add_argument("--eps", type=float, default=thr_mod.DEFAULT_EPS)
    p.add_argument("--grid", default=None, help="start:stop:step over p (bsc) or sigma (biawgn8)")

    p = sub.add_parser("simulate", help="seeded Monte Carlo decoding run")
    add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--decoder", choices=("minsum", "exact", "blockgenie"), default="minsum")
    p.add_argument("--g-depth", type=int, default=None, help="genie block depth (blockgenie)")
    p.add_argument("--trials", type=int, default=1000)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE

    try:
        channel_spec = _load_channel_spec(args.channel)
    except (json.JSONDecodeError, OSError) as exc:
        print(f"error: cannot read channel config: {exc}", file=sys.stderr)
        return EXIT_USAGE

    params = {}
    for key in ("n", "k", "trials", "g_depth", "decoder", "rank_by", "dg", "de", "eps"):
        if hasattr(args, key):
            params[key] = getattr(args, key)
    if hasattr(args, "grid"):
        try:
            params["grid"] = _parse_grid(args.grid) if args.grid else None
        except UsageError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE

    cfg = RunConfig(
        subcommand=args.subcommand,
        channel=channel_spec,
        out=args.out,
        fmt=args.fmt,
        seed=args.seed,
        params=params,
    )
    handlers = {
        "validate": cmd_validate,
        "pe-table": cmd_pe_table,
        "construct": cmd_construct,
        "thresholds": cmd_thresholds,
        "simulate": cmd_simulate,
    }
    try:
        return handlers[cfg.subcommand](cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
