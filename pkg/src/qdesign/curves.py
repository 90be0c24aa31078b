"""Rational points on x^(p^l+1) + x = alpha*(y^(p^l+1) + y) + beta.

Counting uses a frequency table of ``h(x) = x^(p^l+1) + x``: the number of
affine solutions is the sum over y of the number of x with
``h(x) = alpha*h(y) + beta``.  All bound checks are integer-exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt

import numpy as np

from .designs import BudgetExceeded
from .family import FamilySpec
from .field import gcd_delta

COUNT_BUDGET = 10**8
NAIVE_MAX_Q = 64


@dataclass(frozen=True)
class CurveSpec:
    family: FamilySpec
    alpha: int
    beta: int

    def __post_init__(self):
        q = self.family.q
        if not 0 < self.alpha < q:
            raise ValueError("alpha must be a nonzero field element")
        if not 0 <= self.beta < q:
            raise ValueError("beta must be a field element")

    @property
    def degree(self) -> int:
        return self.family.exponent


def genus_plucker(d: int) -> int:
    if d < 1:
        raise ValueError("degree must be positive")
    return (d - 1) * (d - 2) // 2


def _check_budget(spec: FamilySpec) -> None:
    if spec.q**2 > COUNT_BUDGET:
        raise BudgetExceeded(f"q^2 = {spec.q**2} exceeds the counting budget")


def affine_count(curve: CurveSpec) -> int:
    spec = curve.family
    _check_budget(spec)
    ctx = spec.field
    h = spec.h_values()
    freq = np.bincount(h, minlength=ctx.q)
    return int(freq[ctx.vadd(ctx.vmul(curve.alpha, h), curve.beta)].sum())


def affine_count_naive(curve: CurveSpec) -> int:
    """Evaluate the defining polynomial on all of GF(q)^2; small q only."""
    spec = curve.family
    ctx = spec.field
    if ctx.q > NAIVE_MAX_Q:
        raise BudgetExceeded(f"naive count is limited to q <= {NAIVE_MAX_Q}")
    x = ctx.elements()[:, None]
    y = ctx.elements()[None, :]
    e = spec.exponent
    lhs = ctx.vadd(ctx.vpow(x, e), x)
    rhs = ctx.vadd(ctx.vmul(curve.alpha, ctx.vadd(ctx.vpow(y, e), y)), curve.beta)
    return int((ctx.vsub(lhs, rhs) == 0).sum())


def points_at_infinity(curve: CurveSpec) -> int:
    """``|{x : x^(p^l+1) = alpha}|``, the points ``(x : 1 : 0)``."""
    spec = curve.family
    return int((spec.power_map() == curve.alpha).sum())


def projective_count(curve: CurveSpec) -> int:
    return affine_count(curve) + points_at_infinity(curve)


@dataclass
class CurveReport:
    alpha: int
    beta: int
    N: int
    N_proj: int
    delta: int
    genus: int
    bound_low: int | None
    bound_high: int | None
    bound_kind: str
    within_bounds: bool | None
    checks: dict[str, bool] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "N": self.N,
                "N_proj": self.N_proj, "delta": self.delta, "genus": self.genus,
                "bound_low": self.bound_low, "bound_high": self.bound_high,
                "bound_kind": self.bound_kind, "within_bounds": self.within_bounds,
                "checks": self.checks}


def _half_width(g: int, q: int) -> int:
    """``floor(2g*sqrt(q))``.  N is an integer, so ``N - A <= 2g*sqrt(q)``
    holds exactly when ``N - A <= floor(2g*sqrt(q))``."""
    return isqrt(4 * g * g * q)


def _certify(spec: FamilySpec, alpha: int, beta: int, n: int, at_inf: int,
             fixes_image: bool, image_size: int) -> CurveReport:
    q = spec.q
    pl = spec.p**spec.ell
    delta = gcd_delta(spec.p, spec.m, spec.ell)
    g = genus_plucker(pl + 1)
    hw = _half_width(g, q)
    intervals: dict[str, tuple[int | None, int | None]] = {}
    checks = {"points_at_infinity": 0 <= at_inf <= delta}
    if beta != 0:
        intervals["hasse_weil"] = (q + 1 - delta - hw, q + 1 + hw)
    elif alpha != 1:
        intervals["beta_zero"] = (q + 1 - delta, q + 1)
        checks["projective_exact"] = n + at_inf == q + 1
    if (alpha, beta) != (1, 0):
        intervals["uniform"] = (q - pl - hw, q + 1 + hw)
    if fixes_image and (alpha, beta) != (1, 0):
        intervals["stabilizer"] = (2 * q - image_size, None)
    for name, (lo, hi) in intervals.items():
        checks[name] = (lo is None or lo <= n) and (hi is None or n <= hi)
    lows = [lo for lo, _ in intervals.values() if lo is not None]
    highs = [hi for _, hi in intervals.values() if hi is not None]
    kind = next((k for k in ("beta_zero", "hasse_weil", "uniform", "stabilizer")
                 if k in intervals), "none")
    return CurveReport(
        alpha=alpha, beta=beta, N=n, N_proj=n + at_inf, delta=delta, genus=g,
        bound_low=max(lows) if lows else None,
        bound_high=min(highs) if highs else None,
        bound_kind=kind,
        within_bounds=all(checks.values()) if intervals else None,
        checks=checks,
    )


def certify_bounds(curve: CurveSpec) -> CurveReport:
    """Count points and test every bound that applies to ``(alpha, beta)``."""
    spec = curve.family
    ctx = spec.field
    n = affine_count(curve)
    image = np.unique(spec.h_values())
    mask = np.zeros(ctx.q, dtype=bool)
    mask[image] = True
    moved = ctx.vadd(ctx.vmul(curve.alpha, image), curve.beta)
    return _certify(spec, curve.alpha, curve.beta, n, points_at_infinity(curve),
                    bool(mask[moved].all()), len(image))


def certify_all(spec: FamilySpec) -> list[CurveReport]:
    """:func:`certify_bounds` for every ``alpha != 0`` and every ``beta``."""
    _check_budget(spec)
    ctx = spec.field
    q = ctx.q
    h = spec.h_values()
    freq = np.bincount(h, minlength=q)
    fpow = spec.power_map()
    inf_counts = np.bincount(fpow, minlength=q)
    image = np.unique(h)
    mask = np.zeros(q, dtype=bool)
    mask[image] = True
    betas = ctx.elements()
    out = []
    for alpha in range(1, q):
        ah = ctx.vmul(alpha, h)
        counts = freq[ctx.vadd(ah[None, :], betas[:, None])].sum(axis=1)
        fixes = mask[ctx.vadd(ctx.vmul(alpha, image)[None, :], betas[:, None])].all(axis=1)
        for beta in range(q):
            out.append(_certify(spec, alpha, beta, int(counts[beta]),
                                int(inf_counts[alpha]), bool(fixes[beta]), len(image)))
    return out


@dataclass
class BoundsSummary:
    """Aggregate of all bound checks over every ``(alpha, beta)``, alpha != 0."""

    curves: int
    applicable: dict[str, int]
    violations: dict[str, int]
    first_violation: dict | None

    @property
    def ok(self) -> bool:
        return not any(self.violations.values())

    def to_dict(self) -> dict:
        return {"curves": self.curves, "applicable": self.applicable,
                "violations": self.violations, "first_violation": self.first_violation,
                "ok": self.ok}


def bounds_sweep(spec: FamilySpec) -> BoundsSummary:
    """Vectorized counterpart of :func:`certify_all` that keeps only totals."""
    _check_budget(spec)
    ctx = spec.field
    q = ctx.q
    pl = spec.p**spec.ell
    delta = gcd_delta(spec.p, spec.m, spec.ell)
    hw = _half_width(genus_plucker(pl + 1), q)
    h = spec.h_values()
    freq = np.bincount(h, minlength=q)
    inf_counts = np.bincount(spec.power_map(), minlength=q)
    image = np.unique(h)
    mask = np.zeros(q, dtype=bool)
    mask[image] = True
    betas = ctx.elements()

    kinds = ("points_at_infinity", "hasse_weil", "beta_zero", "projective_exact",
             "uniform", "stabilizer")
    applicable = dict.fromkeys(kinds, 0)
    violations = dict.fromkeys(kinds, 0)
    first = None
    for alpha in range(1, q):
        n = freq[ctx.vadd(ctx.vmul(alpha, h)[None, :], betas[:, None])].sum(axis=1)
        fixes = mask[ctx.vadd(ctx.vmul(alpha, image)[None, :], betas[:, None])].all(axis=1)
        at_inf = int(inf_counts[alpha])
        not_id = np.ones(q, dtype=bool) if alpha != 1 else betas != 0
        tests = {
            "points_at_infinity": (np.ones(q, bool), np.full(q, at_inf <= delta)),
            "hasse_weil": (betas != 0, (q + 1 - delta - hw <= n) & (n <= q + 1 + hw)),
            "beta_zero": ((betas == 0) & (alpha != 1), (q + 1 - delta <= n) & (n <= q + 1)),
            "projective_exact": ((betas == 0) & (alpha != 1), n + at_inf == q + 1),
            "uniform": (not_id, (q - pl - hw <= n) & (n <= q + 1 + hw)),
            "stabilizer": (fixes & not_id, n >= 2 * q - len(image)),
        }
        for kind, (app, ok) in tests.items():
            applicable[kind] += int(app.sum())
            bad = app & ~ok
            violations[kind] += int(bad.sum())
            if first is None and bad.any():
                beta = int(np.flatnonzero(bad)[0])
                first = {"kind": kind, "alpha": alpha, "beta": beta, "N": int(n[beta])}
    return BoundsSummary(q * (q - 1), applicable, violations, first)
