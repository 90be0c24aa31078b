"""Affine groups x -> u*x + v acting on GF(q) and on blocks."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .designs import (Block, BudgetExceeded, IncidenceStructure, pack_masks,
                      translate_rows, unique_rows)
from .family import FamilySpec
from .field import FieldCtx

#: largest group enumerated explicitly
GROUP_BUDGET = 10**7
HOMOGENEITY_MAX_Q = 512
ALL_PAIRS_MAX_Q = 64
EQUALITY_MAX_Q = 2048

FULL = "full"
QR = "qr"


@dataclass(frozen=True, order=True)
class AffineMap:
    u: int
    v: int

    def __call__(self, ctx: FieldCtx, x: int) -> int:
        return ctx.add(ctx.mul(self.u, x), self.v)


IDENTITY = AffineMap(1, 0)


def compose(ctx: FieldCtx, g: AffineMap, h: AffineMap) -> AffineMap:
    """``g after h``."""
    return AffineMap(ctx.mul(g.u, h.u), ctx.add(ctx.mul(g.u, h.v), g.v))


def inverse(ctx: FieldCtx, g: AffineMap) -> AffineMap:
    ui = ctx.inv(g.u)
    return AffineMap(ui, ctx.neg(ctx.mul(ui, g.v)))


class AffineGroup:
    """``{u*x + v}`` with u ranging over all nonzero elements (``full``) or
    over the nonzero squares (``qr``, odd q only).  Enumerated implicitly."""

    def __init__(self, ctx: FieldCtx, variant: str = FULL):
        if variant == FULL:
            mults = np.arange(1, ctx.q, dtype=np.int64)
        elif variant == QR:
            mults = ctx.squares  # raises for even q
        else:
            raise ValueError(f"unknown group variant {variant!r}")
        self.ctx = ctx
        self.variant = variant
        self.multipliers = mults

    @property
    def order(self) -> int:
        return len(self.multipliers) * self.ctx.q

    def __contains__(self, g: AffineMap) -> bool:
        return 0 <= g.v < self.ctx.q and bool(np.isin(g.u, self.multipliers))

    def __iter__(self):
        for u in self.multipliers:
            for v in range(self.ctx.q):
                yield AffineMap(int(u), v)

    def _check_budget(self) -> None:
        if self.order > GROUP_BUDGET:
            raise BudgetExceeded(f"group order {self.order} exceeds {GROUP_BUDGET}")


def apply(ctx: FieldCtx, g: AffineMap, block: Block) -> Block:
    pts = ctx.vadd(ctx.vmul(g.u, block.as_array()), g.v)
    return Block.of(pts.tolist())


def orbit(group: AffineGroup, base: Block) -> IncidenceStructure:
    """Distinct images of ``base``; each block's multiplicity is the number of
    group elements producing it, i.e. the stabilizer order."""
    group._check_budget()
    ctx = group.ctx
    s = base.as_array()
    rows = [translate_rows(ctx, ctx.vmul(int(u), s)) for u in group.multipliers]
    return IncidenceStructure.from_rows(ctx.q, np.concatenate(rows))


@dataclass
class StabilizerReport:
    mu: int
    elements: list[AffineMap]
    group_order: int

    @property
    def orbit_size(self) -> int:
        return self.group_order // self.mu

    def to_dict(self) -> dict:
        return {"mu": self.mu, "group_order": self.group_order,
                "orbit_size": self.orbit_size,
                "elements": [[g.u, g.v] for g in self.elements]}


def stabilizer(group: AffineGroup, base: Block) -> StabilizerReport:
    """All group elements with ``u*B + v = B``."""
    group._check_budget()
    ctx = group.ctx
    q = ctx.q
    mask = np.zeros(q, dtype=bool)
    mask[base.as_array()] = True
    # g fixes B iff it fixes the complement; test whichever is smaller
    if mask.sum() > q // 2:
        mask = ~mask
    target = np.flatnonzero(mask)
    found: list[AffineMap] = []
    if len(target) == 0:
        found = list(group)
    else:
        for u in group.multipliers:
            ut = ctx.vmul(int(u), target)
            # the image of target[0] must land somewhere in target
            cands = ctx.vsub(target, ut[0])
            imgs = ctx.vadd(ut[None, :], cands[:, None])
            for v in cands[mask[imgs].all(axis=1)]:
                found.append(AffineMap(int(u), int(v)))
    found.sort()
    return StabilizerReport(len(found), found, group.order)


@dataclass
class HomogeneityReport:
    homogeneous: bool
    reached: int
    total: int
    witness: tuple[int, int] | None

    def to_dict(self) -> dict:
        return {"homogeneous": self.homogeneous, "pairs_reached": self.reached,
                "pairs_total": self.total,
                "witness": list(self.witness) if self.witness else None}


def _pair_orbit(ctx: FieldCtx, mults: np.ndarray, x1: int, x2: int) -> np.ndarray:
    """Triangular indices of the images of ``{x1, x2}``."""
    v = np.arange(ctx.q, dtype=np.int64)
    a = ctx.vadd(ctx.vmul(mults[:, None], x1), v[None, :]).ravel()
    b = ctx.vadd(ctx.vmul(mults[:, None], x2), v[None, :]).ravel()
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    return np.unique(hi * (hi - 1) // 2 + lo)


def _first_missing_pair(q: int, reached: np.ndarray) -> tuple[int, int]:
    seen = np.zeros(comb(q, 2), dtype=bool)
    seen[reached] = True
    idx = int(np.flatnonzero(~seen)[0])
    j = 1
    while j * (j + 1) // 2 <= idx:
        j += 1
    return idx - j * (j - 1) // 2, j


def is_2_homogeneous(group: AffineGroup) -> HomogeneityReport:
    """Orbit of the pair {0, 1}; the group is 2-homogeneous iff it covers
    every 2-subset."""
    ctx = group.ctx
    if ctx.q > HOMOGENEITY_MAX_Q:
        raise BudgetExceeded(f"2-homogeneity check is limited to q <= {HOMOGENEITY_MAX_Q}")
    total = comb(ctx.q, 2)
    reached = _pair_orbit(ctx, group.multipliers, 0, 1)
    witness = None if len(reached) == total else _first_missing_pair(ctx.q, reached)
    return HomogeneityReport(len(reached) == total, len(reached), total, witness)


def is_2_homogeneous_all_pairs(group: AffineGroup) -> bool:
    """Check every 2-subset's orbit separately; small q only."""
    ctx = group.ctx
    if ctx.q > ALL_PAIRS_MAX_Q:
        raise BudgetExceeded(f"all-pairs check is limited to q <= {ALL_PAIRS_MAX_Q}")
    total = comb(ctx.q, 2)
    return all(len(_pair_orbit(ctx, group.multipliers, x1, x2)) == total
               for x1 in range(ctx.q) for x2 in range(x1 + 1, ctx.q))


# -- block-set equalities -------------------------------------------------------

def _translation_classes(ctx: FieldCtx, bases: list[np.ndarray]) -> dict[bytes, int]:
    """Map each translation class ``{S + c}`` met by ``bases`` to its size,
    keyed by the byte-smallest translate."""
    if not bases:
        return {}
    masks = np.zeros((len(bases), ctx.q), dtype=bool)
    for i, s in enumerate(bases):
        masks[i, s] = True
    uniq, _ = unique_rows(pack_masks(masks))
    classes: dict[bytes, int] = {}
    for row in uniq:
        members = np.flatnonzero(np.unpackbits(row, count=ctx.q, bitorder="little"))
        translates, _ = unique_rows(translate_rows(ctx, members))
        classes.setdefault(translates[0].tobytes(), len(translates))
    return classes


@dataclass
class EqualityReport:
    size_a1: int
    size_a2: int
    size_a3: int | None
    a1_eq_a2: bool
    a1_eq_a3: bool | None
    a3_subset_a2: bool | None

    def to_dict(self) -> dict:
        return {"size_A1": self.size_a1, "size_A2": self.size_a2,
                "size_A3": self.size_a3, "A1_eq_A2": self.a1_eq_a2,
                "A1_eq_A3": self.a1_eq_a3, "A3_subset_A2": self.a3_subset_a2}


def block_set_equality(spec: FamilySpec) -> EqualityReport:
    """Compare ``A1 = {B(b, c) : b != 0}``, ``A2 = {u*B_l + v : u != 0}`` and
    ``A3 = {u*B_l + v : u a nonzero square}``.

    All three sets are closed under translation, so they are compared as sets
    of translation classes; sizes are sums of class sizes.
    """
    ctx = spec.field
    if ctx.q > EQUALITY_MAX_Q:
        raise BudgetExceeded(f"block-set comparison is limited to q <= {EQUALITY_MAX_Q}")
    f = spec.power_map()
    x = ctx.elements()
    a1_bases = [np.unique(ctx.vadd(f, ctx.vmul(b, x))) for b in range(1, ctx.q)]
    b_ell = np.unique(spec.h_values())
    a2_bases = [np.unique(ctx.vmul(u, b_ell)) for u in range(1, ctx.q)]
    a1 = _translation_classes(ctx, a1_bases)
    a2 = _translation_classes(ctx, a2_bases)
    size_a3 = a1_eq_a3 = a3_sub = None
    if ctx.p != 2:
        a3 = _translation_classes(ctx, [a2_bases[int(u) - 1] for u in ctx.squares])
        size_a3 = sum(a3.values())
        a1_eq_a3 = a1.keys() == a3.keys()
        a3_sub = a3.keys() <= a2.keys()
    return EqualityReport(sum(a1.values()), sum(a2.values()), size_a3,
                          a1.keys() == a2.keys(), a1_eq_a3, a3_sub)
