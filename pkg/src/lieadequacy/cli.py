"""Command-line front end.

    lieadequacy adequacy --p 7 --b 1 --a 5
    lieadequacy sweep --p 3,5 --b 2 --a-max 3 --format csv
    lieadequacy weights-audit --type A --rank 1 --lambda 5 --p 7 --r 1 --s 2 --cross-check
    lieadequacy h1 --p 11 --b 1 --module end --a 5

Exit codes: 0 verdict reached, 2 invalid input, 3 undetermined because of caps.
The global element cap can also be set with LIEADEQUACY_ELEMENT_CAP.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import adequacy as adq
from . import weights
from .cohom import DEFAULT_FULL_CAP, H1CapExceeded, ModuleAction, h1_dimension, trivial_module
from .gf import FieldError, is_prime
from .matgrp import DEFAULT_ELEMENT_CAP, GroupCapExceeded
from .rep import DEFAULT_MEMORY_BUDGET, end_module, sym_power_of

EXIT_OK, EXIT_INPUT, EXIT_UNDETERMINED = 0, 2, 3
FORMATS = ("json", "csv", "text")


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    max_order: int = DEFAULT_ELEMENT_CAP
    full_cap: int = DEFAULT_FULL_CAP
    memory_budget: int = DEFAULT_MEMORY_BUDGET
    format: str = "json"
    out: str | None = None

    def __post_init__(self):
        for name in ("max_order", "full_cap", "memory_budget"):
            if getattr(self, name) < 1:
                raise InputError(f"{name} must be positive")
        if self.format not in FORMATS:
            raise InputError(f"format must be one of {FORMATS}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _weight(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="lieadequacy", description="Adequacy checks for SL2/GL2 symmetric powers.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--max-order", type=int, default=DEFAULT_ELEMENT_CAP, help="group enumeration cap")
        sp.add_argument("--full-cap", type=int, default=DEFAULT_FULL_CAP,
                        help="largest group order for exact (non-certifying) H^1")
        sp.add_argument("--memory-budget", type=int, default=DEFAULT_MEMORY_BUDGET,
                        help="bytes allowed for cached image tables")
        sp.add_argument("--format", choices=FORMATS, default="json")
        sp.add_argument("--out", help="write the report here instead of stdout")

    sp = sub.add_parser("adequacy", help="decide (A1)-(A4) for V(a)")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--b", type=int, default=1)
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--family", choices=adq.FAMILIES, default="SL2")
    common(sp)

    sp = sub.add_parser("sweep", help="adequacy table over p, b and a")
    sp.add_argument("--p", type=_int_list, required=True)
    sp.add_argument("--b", type=_int_list, default=[1])
    sp.add_argument("--a-max", type=int, required=True)
    sp.add_argument("--family", choices=adq.FAMILIES, default="SL2")
    sp.add_argument("--jobs", type=int, default=None, help="parallel workers (default: all CPUs)")
    common(sp)

    sp = sub.add_parser("weights-audit", help="hypotheses of the large-p criterion")
    sp.add_argument("--type", required=True)
    sp.add_argument("--rank", type=int, required=True)
    sp.add_argument("--lambda", dest="lam", type=_weight, required=True,
                    help="fundamental coordinates, comma separated")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--r", type=int, default=1)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--cross-check", action="store_true", help="direct computation for type A1")
    common(sp)

    sp = sub.add_parser("h1", help="dim H^1(SL2(q), M)")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--b", type=int, default=1)
    sp.add_argument("--module", choices=("trivial", "end"), default="trivial")
    sp.add_argument("--a", type=int, default=1)
    sp.add_argument("--family", choices=adq.FAMILIES, default="SL2")
    sp.add_argument("--mode", choices=("auto", "full", "certify_zero"), default="auto")
    common(sp)
    return ap


# -- rendering -----------------------------------------------------------------

def _text_lines(obj, prefix="") -> list[str]:
    if isinstance(obj, dict):
        out = []
        for k in sorted(obj):
            out += _text_lines(obj[k], f"{prefix}{k}." if isinstance(obj[k], dict) else f"{prefix}{k}")
        return out
    if isinstance(obj, list) and obj and isinstance(obj[0], dict):
        out = []
        for i, item in enumerate(obj):
            out += _text_lines(item, f"{prefix}[{i}].")
        return out
    return [f"{prefix}: {obj if isinstance(obj, str) else json.dumps(obj, sort_keys=True)}"]


def render(obj, fmt: str) -> str:
    if fmt == "json":
        return adq.to_json(obj)
    if fmt == "csv":
        cells = obj if isinstance(obj, list) else [obj]
        if cells and all("a1" in c or "error" in c for c in cells):
            return adq.to_csv(cells)
        raise InputError("csv output is only available for adequacy reports")
    return "\n".join(_text_lines(obj)) + "\n"


def _emit(cfg: RunConfig, obj) -> None:
    text = render(obj, cfg.format)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- commands --------------------------------------------------------------------

def _check_group_input(p: int, b: int) -> None:
    if not is_prime(p):
        raise InputError(f"p={p} is not prime")
    if b < 1:
        raise InputError("b must be >= 1")


def cmd_adequacy(args, cfg: RunConfig) -> int:
    _check_group_input(args.p, args.b)
    rep = adq.check_adequacy(args.p, args.b, args.a, args.family, full_cap=cfg.full_cap,
                             element_cap=cfg.max_order, memory_budget=cfg.memory_budget).to_dict()
    _emit(cfg, rep)
    return EXIT_UNDETERMINED if adq.cell_undetermined(rep) else EXIT_OK


def cmd_sweep(args, cfg: RunConfig) -> int:
    for p in args.p:
        _check_group_input(p, 1)
    if any(b < 1 for b in args.b):
        raise InputError("b must be >= 1")
    if args.a_max < 0:
        raise InputError("a-max must be >= 0")
    cells = adq.sweep(args.p, args.b, args.a_max, args.family, jobs=args.jobs,
                      full_cap=cfg.full_cap, element_cap=cfg.max_order, memory_budget=cfg.memory_budget)
    _emit(cfg, cells)
    return EXIT_UNDETERMINED if any(adq.cell_undetermined(c) for c in cells) else EXIT_OK


def _cross_check(audit: weights.PLargeAudit, cfg: RunConfig) -> dict:
    if audit.type != "A" or audit.rank != 1:
        return {"status": "skipped", "reason": "direct computation only for type A1"}
    a = audit.lam[0]
    if a >= audit.p:
        return {"status": "skipped", "reason": "V(a) with a >= p is not a symmetric power"}
    try:
        rep = adq.check_adequacy(audit.p, audit.s, a, "SL2", full_cap=cfg.full_cap,
                                 element_cap=cfg.max_order, memory_budget=cfg.memory_budget)
    except (FieldError, GroupCapExceeded) as exc:
        return {"status": "skipped", "reason": str(exc)}
    computed = rep.adequate
    predicted = {"theorem applies: adequate": True,
                 "theorem applies: not adequate (p | dim)": False}.get(audit.verdict)
    agree = None if predicted is None or computed == adq.UNKNOWN else predicted == computed
    return {"status": "computed", "q": rep.q, "computed_adequate": computed, "agree": agree}


def cmd_weights_audit(args, cfg: RunConfig) -> int:
    try:
        audit = weights.audit_p_large(args.type, args.rank, args.lam, args.p, args.r, args.s)
    except weights.RootDataError as exc:
        raise InputError(str(exc))
    if args.cross_check:
        audit.cross_check = _cross_check(audit, cfg)
    _emit(cfg, audit.to_dict())
    cc = audit.cross_check
    if cc and cc.get("status") == "computed" and cc["computed_adequate"] == adq.UNKNOWN:
        return EXIT_UNDETERMINED
    return EXIT_OK


def cmd_h1(args, cfg: RunConfig) -> int:
    _check_group_input(args.p, args.b)
    ctx = adq.group_for(args.p, args.b, args.family, cfg.max_order)
    F = ctx.field
    if args.module == "trivial":
        action = trivial_module(F, ctx.k)
    else:
        if not 0 <= args.a < args.p:
            raise InputError(f"need 0 <= a < p, got a={args.a}")
        action = ModuleAction.from_representation(end_module(sym_power_of(ctx.gens, args.a)))
    mode = args.mode
    if mode == "auto":
        mode = "full" if ctx.order <= cfg.full_cap else "certify_zero"
    res = h1_dimension(ctx, action, mode=mode, full_cap=cfg.full_cap)
    out = {"family": args.family, "p": args.p, "b": args.b, "q": F.q, "order": ctx.order,
           "modulus": F.modulus_str(), "module": args.module,
           "a": args.a if args.module == "end" else None, **res.to_dict()}
    _emit(cfg, out)
    return EXIT_OK


COMMANDS = {"adequacy": cmd_adequacy, "sweep": cmd_sweep, "weights-audit": cmd_weights_audit, "h1": cmd_h1}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.command, args.max_order, args.full_cap, args.memory_budget, args.format, args.out)
        return COMMANDS[args.command](args, cfg)
    except (InputError, adq.AdequacyInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FieldError as exc:
        # primality is validated up front, so this is the field-size cap
        print(f"undetermined: {exc}", file=sys.stderr)
        return EXIT_UNDETERMINED
    except (GroupCapExceeded, H1CapExceeded) as exc:
        print(f"undetermined: {exc}", file=sys.stderr)
        return EXIT_UNDETERMINED


if __name__ == "__main__":
    sys.exit(main())
