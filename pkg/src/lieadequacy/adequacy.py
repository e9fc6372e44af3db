"""Adequacy verdicts for V(a) over SL2(q) and GL2(q).

The four conditions are decided independently so the report always shows
the full vector:

  a1  p does not divide dim V
  a2  H^1(G, k) = 0
  a3  Ext^1_G(V, V) = H^1(G, End V) = 0
  a4  the p-regular images span End(V)
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Any, Iterable, Sequence

from .cohom import DEFAULT_FULL_CAP, H1CapExceeded, ModuleAction, h1_dimension, trivial_module
from .gf import FieldError, field_new, is_prime
from .matgrp import GroupCtx, enumerate_group, gl2_generators, sl2_generators
from .rep import DEFAULT_MEMORY_BUDGET, ImageTable, end_module, envelope_dimension, kernel_order, sym_power_of
from . import weights

FAMILIES = ("SL2", "GL2")
UNKNOWN = "unknown"
CSV_COLUMNS = ["p", "b", "a", "order", "dim", "a1", "a2", "a3", "a4", "ext_dim", "span_dim", "adequate"]


class AdequacyInputError(ValueError):
    pass


@lru_cache(maxsize=8)
def group_for(p: int, b: int, family: str = "SL2", cap: int | None = None) -> GroupCtx:
    F = field_new(p, b)
    gens = sl2_generators(F) if family == "SL2" else gl2_generators(F)
    return enumerate_group(gens, cap)


@dataclass
class AdequacyReport:
    family: str
    p: int
    b: int
    q: int
    order: int
    modulus: str
    a: int
    dim: int
    a1: dict
    a2: dict
    a3: dict
    a4: dict
    adequate: Any
    hypothesis_notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _combine(flags: Sequence[bool | None]):
    if any(f is False for f in flags):
        return False
    if any(f is None for f in flags):
        return UNKNOWN
    return True


def _h1(ctx: GroupCtx, action: ModuleAction, full_cap: int) -> tuple[int | None, dict]:
    """H^1 dimension, or None when the caps prevent a verdict.

    certify_zero mode that runs out of relators without an early exit has
    imposed every constraint, so its answer is the exact full-mode answer.
    """
    try:
        res = h1_dimension(ctx, action, mode="certify_zero", full_cap=full_cap)
    except H1CapExceeded as exc:
        return None, {"mode": "certify_zero", "early_exit": False, "status": "undetermined", "reason": str(exc)}
    info = {"mode": res.mode, "early_exit": res.early_exit, "relators_processed": res.relators_processed}
    return res.dim_h1, info


def check_adequacy(p: int, b: int, a: int, family: str = "SL2", *, full_cap: int | None = None,
                   element_cap: int | None = None,
                   memory_budget: int = DEFAULT_MEMORY_BUDGET) -> AdequacyReport:
    if family not in FAMILIES:
        raise AdequacyInputError(f"family must be one of {FAMILIES}")
    if not is_prime(p):
        raise AdequacyInputError(f"p={p} is not prime")
    if b < 1:
        raise AdequacyInputError("b must be >= 1")
    if not 0 <= a < p:
        raise AdequacyInputError(f"need 0 <= a < p, got a={a}, p={p}")
    full_cap = DEFAULT_FULL_CAP if full_cap is None else full_cap
    ctx = group_for(p, b, family, element_cap)
    F = ctx.field
    q = F.q
    rep = sym_power_of(ctx.gens, a)
    dim = rep.dim

    a1 = dim % p != 0

    h1k, info2 = _h1(ctx, trivial_module(F, ctx.k), full_cap)
    a2 = None if h1k is None else h1k == 0

    ext, info3 = _h1(ctx, ModuleAction.from_representation(end_module(rep)), full_cap)
    a3 = None if ext is None else ext == 0

    table = ImageTable(rep, ctx, memory_budget)
    span = envelope_dimension(rep, ctx, filter="p_regular", table=table)
    a4 = span == dim * dim

    ok, collision = weights.distinct_mod(weights.end_weights(a), q - 1)
    notes = {
        "end_weights_distinct_mod_q_minus_1": ok,
        "end_weight_collision": list(collision) if collision else None,
        "kernel_order": kernel_order(rep, ctx, table),
    }
    return AdequacyReport(
        family=family, p=p, b=b, q=q, order=ctx.order, modulus=F.modulus_str(), a=a, dim=dim,
        a1={"pass": a1, "dim_mod_p": dim % p},
        a2={"pass": a2, "h1_dim": h1k, **info2},
        a3={"pass": a3, "ext_dim": ext, **info3},
        a4={"pass": a4, "span_dim": span, "ambient": dim * dim},
        adequate=_combine([a1, a2, a3, a4]),
        hypothesis_notes=notes,
    )


def adequacy_from_normal(h_adequate: bool, g_h1_trivial_dim: int) -> bool:
    """Adequacy of a normal subgroup's image plus H^1(G, k) = 0 gives adequacy for G."""
    return bool(h_adequate) and g_h1_trivial_dim == 0


@dataclass
class BigVerdictSL2:
    p: int
    a: int
    b: int
    inequality_pass: bool
    proof_conditions: dict

    def to_dict(self) -> dict:
        return asdict(self)


def big_inequality(p: int, a: int, b: int) -> bool:
    return p > 2 * a + 3 if b == 1 else p > a + 1


def check_big_sl2(p: int, a: int, b: int, *, full_cap: int | None = None) -> BigVerdictSL2:
    if a < 0:
        raise AdequacyInputError("a must be >= 0")
    if not is_prime(p):
        raise AdequacyInputError(f"p={p} is not prime")
    if b < 1:
        raise AdequacyInputError("b must be >= 1")
    q = p**b
    a1 = weights.root_system("A", 1)
    mults = weights.freudenthal(a1, (a,))
    one_dim = all(m == 1 for _, m in mults.entries)
    distinct, _ = weights.distinct_mod(weights.tensor_weights(a), q - 1)
    ext = None
    if a < p:
        try:
            ctx = group_for(p, b, "SL2")
            rep = sym_power_of(ctx.gens, a)
            ext_dim = h1_dimension(ctx, ModuleAction.from_representation(end_module(rep)),
                                   mode="certify_zero",
                                   full_cap=DEFAULT_FULL_CAP if full_cap is None else full_cap).dim_h1
            ext = ext_dim == 0
        except (FieldError, H1CapExceeded, RuntimeError):
            ext = None
    return BigVerdictSL2(p, a, b, big_inequality(p, a, b), {
        "ext_vanishes": ext,
        "weight_spaces_all_dim_one": one_dim,
        "weights_distinct_mod": distinct,
    })


def _error_cell(p: int, b: int, a: int, family: str, exc: Exception) -> dict:
    return {"family": family, "p": p, "b": b, "a": a, "error": f"{type(exc).__name__}: {exc}"}


def _run_group(task) -> list[dict]:
    p, b, amax, family, opts = task
    out = []
    for a in range(0, min(amax, p - 1) + 1):
        try:
            out.append(check_adequacy(p, b, a, family, **opts).to_dict())
        except Exception as exc:  # recorded per cell; the sweep continues
            out.append(_error_cell(p, b, a, family, exc))
    return out


def sweep(p_list: Iterable[int], b_list: Iterable[int], a_max: int, family: str = "SL2", *,
          jobs: int | None = 1, **opts) -> list[dict]:
    """One report dict per (p, b, a <= min(a_max, p-1)), ordered by (p, b, a).

    Failed cells carry an ``error`` field instead of verdicts.
    """
    tasks = [(p, b, a_max, family, opts) for p in p_list for b in b_list]
    if jobs is None:
        jobs = os.cpu_count() or 1
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            results = list(pool.map(_run_group, tasks))
    else:
        results = [_run_group(t) for t in tasks]
    return [cell for group in results for cell in group]


def cell_undetermined(cell: dict) -> bool:
    return "error" in cell or cell.get("adequate") == UNKNOWN


def _csv_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def to_csv(cells: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS + ["error"])
    for c in cells:
        if "error" in c:
            row = {k: c.get(k) for k in ("p", "b", "a")}
        else:
            row = {
                "p": c["p"], "b": c["b"], "a": c["a"], "order": c["order"], "dim": c["dim"],
                "a1": c["a1"]["pass"], "a2": c["a2"]["pass"], "a3": c["a3"]["pass"], "a4": c["a4"]["pass"],
                "ext_dim": c["a3"]["ext_dim"], "span_dim": c["a4"]["span_dim"], "adequate": c["adequate"],
            }
        w.writerow([_csv_value(row.get(k)) for k in CSV_COLUMNS] + [c.get("error", "")])
    return buf.getvalue()


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
