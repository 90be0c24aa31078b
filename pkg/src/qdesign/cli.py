"""Command-line driver.

Exit codes: 0 = completed and consistent with the classification,
1 = a proven statement was contradicted, 2 = usage or validation error.
Field elements are integer indices (base-p digits are polynomial
coefficients); every JSON report embeds the modulus.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, curves, designs, family, groups, kernels, sweep
from .family import FAIL, FamilySpec
from .field import field_new

SCHEMA_VERSION = sweep.SCHEMA_VERSION


class UsageError(Exception):
    pass


def _emit(payload: dict, out: str | None = None) -> None:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    sys.stdout.write(text)


def _spec(args) -> FamilySpec:
    try:
        return FamilySpec(args.p, args.m, args.l)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _field_info(ctx) -> dict:
    return {"p": ctx.p, "m": ctx.m, "q": ctx.q, "modulus": list(ctx.modulus)}


def _family_args(sub, with_l: bool = True):
    sub.add_argument("-p", type=int, required=True, help="characteristic (prime)")
    sub.add_argument("-m", type=int, required=True, help="extension degree")
    if with_l:
        sub.add_argument("-l", type=int, required=True, help="Frobenius exponent, 1 <= l < m")


def cmd_field(args) -> int:
    try:
        ctx = field_new(args.p, args.m)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    info = _field_info(ctx)
    info["primitive_element"] = ctx.primitive_element if ctx.q > 1 else None
    if args.elements:
        info["elements"] = [ctx.to_digits(a) for a in range(ctx.q)]
    _emit({"field": info}, args.out)
    return 0


def cmd_spectrum(args) -> int:
    spec = _spec(args)
    spectrum = designs.value_spectrum(spec.field, spec.power_map())
    csv = spectrum.to_csv()
    if args.out:
        Path(args.out).write_text(csv)
    sys.stdout.write(csv)
    sizes = ", ".join(f"{s}x{n}" for s, n in sorted(spectrum.counts.items()))
    print(f"# {spec.label()} q={spec.q} pairs={spectrum.total} sizes: {sizes}",
          file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    spec = _spec(args)
    mode = args.mode
    if mode == "auto":
        k = args.k or len(family.image_set(spec))
        structure = designs.build_structure(spec.field, spec.power_map(), k)
        budget_ok = designs.exact_cost(structure, args.t) <= designs.EXACT_BUDGET
        mode = "exact" if budget_ok or args.force else "sampled"
    seed = args.seed if mode == "sampled" else None
    rep = family.check_case(spec, mode, k=args.k, t=args.t, samples=args.samples,
                            seed=seed, threads=args.threads, force=args.force)
    out = {"field": _field_info(spec.field), **rep.to_dict(),
           "summary": rep.design.describe(), "kernel_backend": kernels.BACKEND}
    if rep.status == "finding":
        out["finding"] = rep.note or "outcome recorded without expectation"
    _emit(out, args.out)
    return 1 if rep.status == FAIL else 0


def cmd_bluher(args) -> int:
    spec = _spec(args)
    rep = family.bluher_bruteforce(spec)
    out = {"field": _field_info(spec.field), "p": spec.p, "m": spec.m, "l": spec.ell,
           **rep.to_dict(), "image_size": len(family.image_set(spec))}
    if not spec.coprime:
        out["flag"] = "gcd(l, m) != 1: no closed-form prediction"
    _emit(out, args.out)
    return 1 if rep.agrees is False else 0


def _group(args, ctx) -> groups.AffineGroup:
    try:
        return groups.AffineGroup(ctx, args.group)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_stabilizer(args) -> int:
    spec = _spec(args)
    rep = groups.stabilizer(_group(args, spec.field), family.image_set(spec))
    out = {"field": _field_info(spec.field), "group": args.group, **rep.to_dict()}
    status = 0
    if family.trivial_stabilizer_condition(spec) and args.group == sweep._group_for(spec):
        out["expected_mu"] = 1
        status = 0 if rep.mu == 1 else 1
    _emit(out, args.out)
    return status


def cmd_orbit(args) -> int:
    spec = _spec(args)
    base = family.image_set(spec)
    orb = groups.orbit(_group(args, spec.field), base)
    out = {"field": _field_info(spec.field), "group": args.group,
           "base_block": list(base.members), "orbit_size": orb.b,
           "mu": int(orb.multiplicity[0])}
    if args.blocks:
        out["blocks"] = [list(b.members) for b in orb.blocks()]
    _emit(out, args.out)
    return 0


def cmd_homogeneity(args) -> int:
    try:
        ctx = field_new(args.p, args.m)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep = groups.is_2_homogeneous(_group(args, ctx))
    _emit({"field": _field_info(ctx), "group": args.group, **rep.to_dict()}, args.out)
    return 0


def cmd_equality(args) -> int:
    spec = _spec(args)
    rep = groups.block_set_equality(spec)
    status = sweep.equality_status(spec, rep)
    _emit({"field": _field_info(spec.field), "p": spec.p, "m": spec.m, "l": spec.ell,
           **rep.to_dict(), "status": status}, args.out)
    return 1 if status == FAIL else 0


def cmd_curve(args) -> int:
    spec = _spec(args)
    try:
        curve = curves.CurveSpec(spec, args.a, args.b)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep = curves.certify_bounds(curve)
    _emit({"field": _field_info(spec.field), "p": spec.p, "m": spec.m, "l": spec.ell,
           **rep.to_dict()}, args.out)
    return 1 if rep.within_bounds is False else 0


def cmd_sweep(args) -> int:
    try:
        config = sweep.load_config(args.config)
    except sweep.ConfigError as exc:
        raise UsageError(str(exc)) from None
    report = sweep.run_sweep(config, args.threads)
    out = args.out
    if out is None and config.output:
        Path(config.output).mkdir(parents=True, exist_ok=True)
        out = str(Path(config.output) / f"{config.name}.json")
    if out:
        Path(out).write_text(sweep.dump_report(report))
    sys.stdout.write(sweep.format_summary(report))
    return 1 if report["totals"]["fail"] else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdesign",
        description="2-designs from x^(p^l+1) over GF(p^m): construction and verification")
    parser.add_argument("--version", action="version", version=f"qdesign {__version__}")
    parser.add_argument("--threads", type=int, default=None,
                        help="parallelism cap (default: $QDESIGN_THREADS or CPU count)")
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("field", help="describe GF(p^m)")
    _family_args(s, with_l=False)
    s.add_argument("--elements", action="store_true", help="list digit vectors")
    s.set_defaults(func=cmd_field)

    s = subs.add_parser("spectrum", help="value spectrum of x^(p^l+1) as CSV")
    _family_args(s)
    s.set_defaults(func=cmd_spectrum)

    s = subs.add_parser("verify", help="build D(f, k) and verify the t-design property")
    _family_args(s)
    s.add_argument("-k", type=int, default=None, help="block size (default |B_l|)")
    s.add_argument("-t", type=int, default=2)
    s.add_argument("--mode", choices=("auto", "exact", "sampled"), default="auto")
    s.add_argument("--samples", type=int, default=10**6)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--force", action="store_true", help="run exact mode past the budget")
    s.set_defaults(func=cmd_verify)

    s = subs.add_parser("bluher", help="count rootless constants and compare")
    _family_args(s)
    s.set_defaults(func=cmd_bluher)

    for name, func, helptext in (("stabilizer", cmd_stabilizer, "stabilizer of B_l"),
                                 ("orbit", cmd_orbit, "orbit of B_l")):
        s = subs.add_parser(name, help=helptext)
        _family_args(s)
        s.add_argument("--group", choices=(groups.FULL, groups.QR), default=groups.FULL)
        if name == "orbit":
            s.add_argument("--blocks", action="store_true", help="list the blocks")
        s.set_defaults(func=func)

    s = subs.add_parser("homogeneity", help="2-homogeneity of an affine group")
    _family_args(s, with_l=False)
    s.add_argument("--group", choices=(groups.FULL, groups.QR), default=groups.QR)
    s.set_defaults(func=cmd_homogeneity)

    s = subs.add_parser("equality", help="compare the block sets A1, A2, A3")
    _family_args(s)
    s.set_defaults(func=cmd_equality)

    s = subs.add_parser("curve", help="count points and certify bounds")
    _family_args(s)
    s.add_argument("-a", type=int, required=True, help="alpha (nonzero element index)")
    s.add_argument("-b", type=int, required=True, help="beta (element index)")
    s.set_defaults(func=cmd_curve)

    s = subs.add_parser("sweep", help="run a TOML sweep config")
    s.add_argument("config", help="path, or a bundled name: " + ", ".join(sweep.BUNDLED))
    s.set_defaults(func=cmd_sweep)

    for sub in subs.choices.values():
        sub.add_argument("-o", "--out", default=None, help="also write output here")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None and args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qdesign {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (designs.BudgetExceeded, designs.NoBlocks) as exc:
        print(f"qdesign {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
