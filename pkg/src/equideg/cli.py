"""Command-line interface.

Exit codes: 0 success, 2 configuration error, 3 computation error (including
cross-check mismatches and stabilization failures).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import bifurcation as bif
from .degrees import basic_degree
from .errors import ComputationError, ConfigError
from .model_io import (
    bundled_config,
    load_model,
    model_kernel_mode,
    report_json,
    run_report,
)
from .orbit_types import parse_symbol
from .spectrum import BesselZeroTable


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS keeps a subcommand-position flag from clobbering one given
    # before the subcommand
    common.add_argument("--config", default=argparse.SUPPRESS,
                        help="path to a model config JSON, or 'bundled:NAME'")
    common.add_argument("--format", choices=("json", "text"), default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS,
                        help="write output to this path instead of stdout")
    p = argparse.ArgumentParser(prog="equideg", parents=[common],
                                description="Equivariant-degree bifurcation toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("decompose", parents=[common],
                   help="isotypic decomposition of the model action")

    b = sub.add_parser("bessel", parents=[common], help="table of squared Bessel zeros")
    b.add_argument("--m-max", type=int, default=10)
    b.add_argument("--n-max", type=int, default=9)

    sub.add_parser("critical-points", parents=[common],
                   help="critical parameter values of the model")

    d = sub.add_parser("basic-degree", parents=[common],
                       help="basic degree of one irreducible block")
    d.add_argument("--m", type=int, required=True)
    d.add_argument("--j", type=int, required=True)

    i = sub.add_parser("invariant", parents=[common],
                       help="local bifurcation invariant at a critical point")
    i.add_argument("--id", required=True, help="critical point id n,m,j")
    i.add_argument("--mode", choices=("full", "relative"), default=None)

    g = sub.add_parser("global", parents=[common],
                       help="global verdict for one maximal orbit type")
    g.add_argument("--orbit-type", required=True)

    sub.add_parser("report", parents=[common], help="full bifurcation report")

    k = sub.add_parser("kernel-grid", parents=[common],
                       help="kernel eigenmode sampled on a polar grid (CSV)")
    k.add_argument("--id", required=True, help="critical point id n,m,j")
    k.add_argument("--orbit-type", default=None)
    k.add_argument("--resolution", type=int, default=64)
    return p


def _load(args):
    if not args.config:
        raise ConfigError("--config is required for this command")
    if args.config.startswith("bundled:"):
        return load_model(bundled_config(args.config.split(":", 1)[1]))
    return load_model(args.config)


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _terms_text(terms) -> str:
    bits = []
    for sym, c in terms:
        if c == 1:
            bits.append(f"+ {sym}")
        elif c == -1:
            bits.append(f"- {sym}")
        elif c >= 0:
            bits.append(f"+ {c}{sym}")
        else:
            bits.append(f"- {-c}{sym}")
    out = " ".join(bits) if bits else "0"
    return out[2:] if out.startswith("+ ") else out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for name, default in (("config", None), ("format", "text"), ("out", None)):
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        return _dispatch(args)
    except (ConfigError, FileNotFoundError, KeyError, ValueError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except ComputationError as e:
        print(f"computation error: {e}", file=sys.stderr)
        return 3


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "bessel":
        table = BesselZeroTable(args.m_max, args.n_max)
        if args.format == "json":
            _emit(args, json.dumps({"m_max": args.m_max, "n_max": args.n_max,
                                    "entries": table.entries}, indent=2) + "\n")
        else:
            lines = ["m\\n " + " ".join(f"{n:>10d}" for n in range(1, args.n_max + 1))]
            for m in range(args.m_max + 1):
                lines.append(f"m={m:<2d} " + " ".join(f"{v:10.3f}" for v in table.entries[m]))
            _emit(args, "\n".join(lines) + "\n")
        return 0

    model = _load(args)

    if cmd == "decompose":
        rows = [{"j": c.j, "label": c.label, "irrep_dim": c.irrep_dim,
                 "multiplicity": c.multiplicity, "weight": model.weights[c.j]}
                for c in model.components]
        if args.format == "json":
            _emit(args, json.dumps(rows, indent=2) + "\n")
        else:
            _emit(args, "\n".join(
                f"j={r['j']} {r['label']}: dim {r['irrep_dim']} x{r['multiplicity']}, "
                f"weight {r['weight']:g}" for r in rows) + "\n")
        return 0

    if cmd == "critical-points":
        rows = [{"id": list(cp.id), "alpha": cp.alpha, "zeta_level": cp.zeta_level}
                for cp in model.critical]
        if args.format == "json":
            _emit(args, json.dumps(rows, indent=2) + "\n")
        else:
            _emit(args, "\n".join(
                f"(n,m,j)=({r['id'][0]},{r['id'][1]},{r['id'][2]}) alpha={r['alpha']:.9f} "
                f"level={r['zeta_level']:.9f}" for r in rows) + "\n")
        return 0

    if cmd == "basic-degree":
        deg = basic_degree(model.ctx, args.m, args.j)
        terms = deg.value.sorted_terms()
        if args.format == "json":
            _emit(args, json.dumps({"m": args.m, "j": args.j,
                                    "terms": [[s, c] for s, c in terms]}, indent=2) + "\n")
        else:
            _emit(args, _terms_text(terms) + "\n")
        return 0

    if cmd == "invariant":
        cid = tuple(int(x) for x in args.id.split(","))
        cp = model.critical_by_id(cid)
        inv = bif.local_invariant(model.problem, cp, mode=args.mode)
        terms = inv.value.sorted_terms()
        if args.format == "json":
            _emit(args, json.dumps({"id": list(cid), "mode": inv.mode,
                                    "k_fixed": inv.k_fixed,
                                    "terms": [[s, c] for s, c in terms]}, indent=2) + "\n")
        else:
            _emit(args, _terms_text(terms) + "\n")
        return 0

    if cmd == "global":
        h = parse_symbol(model.ctx, args.orbit_type)
        v = bif.global_verdict(model.problem, h)
        payload = {"orbit_type": v.orbit_type_symbol, "s_bar": v.s_bar,
                   "members": [list(m) for m in v.members],
                   "parity_odd": v.parity_odd, "conclusion": v.conclusion,
                   "folded": v.folded_symbol, "direction": v.direction}
        if args.format == "json":
            _emit(args, json.dumps(payload, indent=2) + "\n")
        else:
            _emit(args, f"{payload['orbit_type']}: {payload['conclusion']}"
                        f" (s_bar={payload['s_bar']}, members={payload['members']},"
                        f" symmetry at least {payload['folded']})\n")
        return 0

    if cmd == "report":
        rep = run_report(model)
        if args.format == "json":
            _emit(args, report_json(rep))
        else:
            lines = [f"model: {rep['model']['name']} (mode {rep['model']['mode']},"
                     f" k_fixed {rep['model']['k_fixed']})"]
            lines.append("critical points: " + ", ".join(
                str(tuple(r["id"])) for r in rep["critical_points"]))
            for inv in rep["invariants"]:
                if inv["mode"] != rep["model"]["mode"]:
                    continue
                lines.append(f"omega{tuple(inv['id'])} = {_terms_text(inv['terms'])}")
            for v in rep["verdicts"]:
                lines.append(f"{v['orbit_type']}: {v['conclusion']} -> {v['folded']}")
            lines.append("rabinowitz sum = " + _terms_text(rep["rabinowitz_sum"]["terms"]))
            bad = [e for e in rep["fast_path_checks"] if e["status"] != "ok"]
            lines.append(f"fast-path checks: {len(rep['fast_path_checks'])} run, "
                         f"{len(bad)} flagged")
            _emit(args, "\n".join(lines) + "\n")
        bad = [e for e in rep["fast_path_checks"] if e["status"] != "ok"]
        return 3 if bad else 0

    if cmd == "kernel-grid":
        cid = tuple(int(x) for x in args.id.split(","))
        mode = model_kernel_mode(model, cid, args.orbit_type)
        rows = mode.grid(args.resolution)
        k = model.action.dimension
        header = "r,theta," + ",".join(f"u{i+1}" for i in range(k))
        body = "\n".join(",".join(repr(v) for v in row) for row in rows)
        _emit(args, header + "\n" + body + "\n")
        return 0

    raise ConfigError(f"unknown command {cmd!r}")


if __name__ == "__main__":
    sys.exit(main())
