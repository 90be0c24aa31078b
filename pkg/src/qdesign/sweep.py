"""Sweep configs (TOML) and run reports (JSON).

A config lists entries; each entry names a family and the checks to run::

    [[entry]]
    p = 2
    m = [3, 4, 5]          # int or list
    l = "coprime"          # int, list, "all" or "coprime"
    ops = ["bluher", "image", "bounds", "design"]
    mode = "exact"         # design verification mode
    seed = 0

Each check ends in ``pass``, ``fail`` (a proven statement was contradicted)
or ``finding`` (an outcome recorded without an expectation to hold it to).
"""

from __future__ import annotations

import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from math import gcd
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import __version__, curves, designs, family, groups, kernels
from .family import FAIL, FINDING, PASS, FamilySpec

SCHEMA_VERSION = 1
OPS = ("bluher", "image", "bounds", "design", "stabilizer", "equality", "homogeneity")
BUNDLED = ("lemma-suite", "conjecture1", "conjecture2")


class ConfigError(ValueError):
    pass


@dataclass
class Entry:
    spec: FamilySpec
    ops: tuple[str, ...]
    mode: str = "exact"
    seed: int = 0
    samples: int = 10**6
    force: bool = False
    budget: int | None = None


@dataclass
class SweepConfig:
    name: str
    entries: list[Entry]
    output: str | None = None
    raw: dict = field(default_factory=dict)


def _as_list(value, what: str) -> list[int]:
    if isinstance(value, int):
        return [value]
    if isinstance(value, list) and value and all(isinstance(v, int) for v in value):
        return value
    raise ConfigError(f"{what} must be an integer or a non-empty list of integers")


def parse_config(data: dict, name: str = "sweep") -> SweepConfig:
    """Validate every entry before any work starts."""
    raw_entries = data.get("entry", [])
    if not raw_entries:
        raise ConfigError("config has no [[entry]] tables")
    sweep = data.get("sweep", {})
    budget = data.get("budget", {}).get("exact_increments")
    budget = None if budget is None else int(budget)
    entries = []
    for i, e in enumerate(raw_entries):
        where = f"entry {i}"
        try:
            p = e["p"]
            ms = _as_list(e["m"], f"{where}: m")
            ops = tuple(e.get("ops", ("bluher", "image")))
            unknown = set(ops) - set(OPS)
            if unknown:
                raise ConfigError(f"{where}: unknown ops {sorted(unknown)}")
            mode = e.get("mode", "exact")
            if mode not in ("exact", "sampled"):
                raise ConfigError(f"{where}: mode must be exact or sampled")
            for m in ms:
                lsel = e.get("l", "coprime")
                if lsel == "all":
                    ls = list(range(1, m))
                elif lsel == "coprime":
                    ls = [l for l in range(1, m) if gcd(l, m) == 1]
                else:
                    ls = _as_list(lsel, f"{where}: l")
                for l in ls:
                    entries.append(Entry(FamilySpec(p, m, l), ops, mode,
                                         int(e.get("seed", 0)),
                                         int(e.get("samples", 10**6)),
                                         bool(e.get("force", False)), budget))
        except KeyError as exc:
            raise ConfigError(f"{where}: missing key {exc}") from None
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"{where}: {exc}") from None
    if not entries:
        raise ConfigError("config expands to no entries")
    return SweepConfig(sweep.get("name", name), entries, sweep.get("output"), data)


def load_config(path: str | Path) -> SweepConfig:
    """Load a TOML config; bundled names (e.g. ``conjecture1``) also work."""
    path = Path(path)
    if not path.exists() and path.stem in BUNDLED and path.parent == Path("."):
        text = resources.files("qdesign").joinpath(f"configs/{path.stem}.toml").read_text()
    else:
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from None
    return parse_config(data, path.stem)


# -- individual checks ---------------------------------------------------------

def _group_for(spec: FamilySpec) -> str:
    if spec.p % 4 == 3 and spec.m % 2 == 1:
        return groups.QR
    return groups.FULL


def op_bluher(spec: FamilySpec, entry: Entry) -> dict:
    rep = family.bluher_bruteforce(spec).to_dict()
    if rep["agrees"] is None:
        rep["status"] = FINDING
    else:
        rep["status"] = PASS if rep["agrees"] else FAIL
    return rep


def op_image(spec: FamilySpec, entry: Entry) -> dict:
    size = len(family.image_set(spec))
    rootless = family.rootless_count(spec)
    out = {"size": size, "q_minus_rootless": spec.q - rootless,
           "predicted": family.predicted_k(spec) if spec.coprime else None}
    ok = size == spec.q - rootless
    if out["predicted"] is not None:
        ok = ok and size == out["predicted"]
    out["status"] = PASS if ok else FAIL
    return out


def op_bounds(spec: FamilySpec, entry: Entry) -> dict:
    out = curves.bounds_sweep(spec).to_dict()
    out["status"] = PASS if out["ok"] else FAIL
    return out


def op_design(spec: FamilySpec, entry: Entry, threads: int) -> dict:
    rep = family.check_case(spec, entry.mode, samples=entry.samples,
                            seed=entry.seed if entry.mode == "sampled" else None,
                            threads=threads, force=entry.force, budget=entry.budget)
    return rep.to_dict()


def op_stabilizer(spec: FamilySpec, entry: Entry) -> dict:
    variant = _group_for(spec)
    rep = groups.stabilizer(groups.AffineGroup(spec.field, variant),
                            family.image_set(spec))
    out = {"group": variant, "mu": rep.mu, "group_order": rep.group_order,
           "orbit_size": rep.orbit_size,
           "elements": [[g.u, g.v] for g in rep.elements]}
    if family.trivial_stabilizer_condition(spec):
        out["status"] = PASS if rep.mu == 1 else FAIL
    else:
        out["status"] = FINDING
    return out


def equality_status(spec: FamilySpec, rep: groups.EqualityReport) -> str:
    """Hold the block-set equalities to their stated hypotheses.

    For p = 2 the statement carries no parity condition on m, and even m
    contradicts it (A1 is then a third of A2); that is reported as a fail.
    """
    if spec.coprime and spec.p == 2:
        return PASS if rep.a1_eq_a2 else FAIL
    if spec.coprime and spec.p % 4 == 3 and spec.m % 2 == 1:
        return PASS if rep.a1_eq_a3 else FAIL
    return FINDING


def op_equality(spec: FamilySpec, entry: Entry) -> dict:
    rep = groups.block_set_equality(spec)
    return {**rep.to_dict(), "status": equality_status(spec, rep)}


def op_homogeneity(spec: FamilySpec, entry: Entry) -> dict:
    out = {}
    for variant in (groups.FULL, groups.QR):
        if variant == groups.QR and spec.p == 2:
            continue
        out[variant] = groups.is_2_homogeneous(
            groups.AffineGroup(spec.field, variant)).to_dict()
    ok = out[groups.FULL]["homogeneous"]
    if spec.p % 4 == 3 and spec.m % 2 == 1:
        ok = ok and out[groups.QR]["homogeneous"]
    if spec.p != 2 and spec.q % 4 == 1:
        # -1 is a square, so {x, y} and {y, x} cannot be swapped by a square
        ok = ok and not out[groups.QR]["homogeneous"]
    out["status"] = PASS if ok else FAIL
    return out


def run_entry(entry: Entry, threads: int) -> tuple[dict, float]:
    spec = entry.spec
    t0 = time.perf_counter()
    results = {}
    for op in entry.ops:
        try:
            if op == "design":
                results[op] = op_design(spec, entry, threads)
            else:
                results[op] = globals()[f"op_{op}"](spec, entry)
        except (designs.BudgetExceeded, designs.NoBlocks, ValueError) as exc:
            results[op] = {"status": FINDING, "error": f"{type(exc).__name__}: {exc}"}
    statuses = [r["status"] for r in results.values()]
    status = FAIL if FAIL in statuses else (FINDING if FINDING in statuses else PASS)
    record = {
        "p": spec.p, "m": spec.m, "l": spec.ell, "q": spec.q,
        "modulus": list(spec.field.modulus),
        "range": family.range_flag(spec),
        "mode": entry.mode, "seed": entry.seed if entry.mode == "sampled" else None,
        "results": results, "status": status,
    }
    return record, time.perf_counter() - t0


def summary_row(record: dict) -> dict:
    res = record["results"]
    row = {"spec": f"({record['p']},{record['m']},{record['l']})",
           "range": record["range"], "status": record["status"]}
    if "design" in res and "prediction" in res["design"]:
        d, pr = res["design"]["design"], res["design"]["prediction"]
        row.update(k_pred=pr["k"], k=d["k"], lambda_pred=pr["lambda"], **{"lambda": d["lambda"]},
                   b_pred=pr["b"], b=d["b"], is_design=d["is_design"])
    if "stabilizer" in res and "mu" in res["stabilizer"]:
        row["mu"] = res["stabilizer"]["mu"]
    if "bluher" in res:
        row["bluher_agrees"] = res["bluher"].get("agrees")
    return row


def run_sweep(config: SweepConfig, threads: int | None = None) -> dict:
    threads = threads or kernels.default_threads()
    if threads > 1 and len(config.entries) > 1:
        with ThreadPoolExecutor(threads) as pool:
            done = list(pool.map(lambda e: run_entry(e, 1), config.entries))
    else:
        done = [run_entry(e, threads) for e in config.entries]
    records = [r for r, _ in done]
    timings = {f"({r['p']},{r['m']},{r['l']})": round(s, 6) for r, s in done}
    statuses = [r["status"] for r in records]
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": "qdesign",
        "version": __version__,
        "config": {"name": config.name, "data": config.raw},
        "entries": records,
        "summary": [summary_row(r) for r in records],
        "totals": {s: statuses.count(s) for s in (PASS, FAIL, FINDING)},
        "timings": timings,
    }


def dump_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def format_summary(report: dict) -> str:
    cols = ["spec", "range", "k_pred", "k", "lambda_pred", "lambda", "b_pred", "b",
            "mu", "bluher_agrees", "status"]
    rows = report["summary"]
    used = [c for c in cols if any(c in r for r in rows)]
    table = [used] + [[str(r.get(c, "")) for c in used] for r in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(used))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)) for row in table]
    t = report["totals"]
    lines.append(f"pass={t['pass']} fail={t['fail']} finding={t['finding']}")
    return "\n".join(lines) + "\n"
