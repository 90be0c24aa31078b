"""Incidence structures built from image sets, and t-design verification.

A point map ``f`` is an integer array of length ``q`` with ``f[x]`` the image
of ``x``.  Blocks are stored as packed little-endian bitsets (one row per
block), which makes deduplication a row-``unique`` and keeps structures with
hundreds of thousands of blocks small.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Iterator

import numpy as np

from . import kernels
from .field import FieldCtx

#: largest total pair-increment count exact mode runs without ``force``
EXACT_BUDGET = 2 * 10**10
#: largest v for exact verification of t >= 3
EXACT_HIGH_T_MAX_V = 64
#: memory ceiling for materialized bitset rows, in bytes
ROW_BUDGET = 1 << 30
#: blocks unpacked per kernel call
_CHUNK_BLOCKS = 8192


class BudgetExceeded(RuntimeError):
    """Work or memory would exceed a configured budget."""


class NoBlocks(ValueError):
    """No parameter pair produced a block of the requested size."""


@dataclass(frozen=True)
class Block:
    """A set of points in canonical (strictly increasing) form."""

    members: tuple[int, ...]

    def __post_init__(self):
        ms = self.members
        if any(a >= b for a, b in zip(ms, ms[1:])):
            raise ValueError("block members must be strictly increasing")

    @classmethod
    def of(cls, points: Iterable[int]) -> "Block":
        return cls(tuple(sorted({int(x) for x in points})))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, x) -> bool:
        return x in set(self.members)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.members, dtype=np.int64)


# -- bitset rows ---------------------------------------------------------------

def row_bytes(v: int) -> int:
    return (v + 7) // 8


def pack_masks(masks: np.ndarray) -> np.ndarray:
    return np.packbits(np.asarray(masks, dtype=bool), axis=-1, bitorder="little")


def unpack_rows(rows: np.ndarray, v: int) -> np.ndarray:
    return np.unpackbits(rows, axis=-1, count=v, bitorder="little").astype(bool)


def unique_rows(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Distinct rows of a 2-D uint8 array, byte-lexicographically sorted,
    with their multiplicities."""
    rows = np.ascontiguousarray(rows, dtype=np.uint8)
    if len(rows) == 0:
        return rows, np.zeros(0, dtype=np.int64)
    view = rows.view(np.dtype((np.void, rows.shape[1]))).ravel()
    uniq, counts = np.unique(view, return_counts=True)
    return uniq.view(np.uint8).reshape(-1, rows.shape[1]), counts.astype(np.int64)


def translate_rows(ctx: FieldCtx, members: np.ndarray) -> np.ndarray:
    """Bitset rows of ``S + c`` for every ``c`` in GF(q), in index order of c."""
    q = ctx.q
    pts = ctx.vadd(np.asarray(members, dtype=np.int64)[None, :],
                   np.arange(q, dtype=np.int64)[:, None])
    masks = np.zeros((q, q), dtype=bool)
    masks[np.arange(q)[:, None], pts] = True
    return pack_masks(masks)


def _check_row_budget(nrows: int, v: int) -> None:
    if nrows * row_bytes(v) > ROW_BUDGET:
        raise BudgetExceeded(
            f"{nrows} blocks over {v} points need more than {ROW_BUDGET >> 20} MiB")


# -- incidence structures ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class IncidenceStructure:
    """A simple incidence structure on points ``0..v-1``.

    ``rows`` holds one distinct block per row; ``multiplicity[i]`` counts how
    many generating parameters produced block ``i``.  ``zero_b_pairs`` is set
    by :func:`build_structure` to the number of ``(0, c)`` pairs whose block
    passed the size filter.
    """

    v: int
    rows: np.ndarray
    multiplicity: np.ndarray
    zero_b_pairs: int = 0
    _sizes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.rows.ndim != 2 or self.rows.shape[1] != row_bytes(self.v):
            raise ValueError("rows must have shape (b, ceil(v/8))")
        if len(self.multiplicity) != len(self.rows):
            raise ValueError("one multiplicity per block is required")
        sizes = np.bitwise_count(self.rows).sum(axis=1, dtype=np.int64)
        object.__setattr__(self, "_sizes", sizes)

    @classmethod
    def from_rows(cls, v: int, rows: np.ndarray, **kw) -> "IncidenceStructure":
        uniq, counts = unique_rows(rows)
        return cls(v, uniq, counts, **kw)

    @classmethod
    def from_blocks(cls, v: int, blocks: Iterable[Iterable[int]]) -> "IncidenceStructure":
        masks = []
        for blk in blocks:
            mask = np.zeros(v, dtype=bool)
            pts = list(blk)
            if any(not 0 <= x < v for x in pts):
                raise ValueError(f"block member out of range [0, {v})")
            mask[pts] = True
            masks.append(mask)
        rows = pack_masks(np.array(masks).reshape(len(masks), v))
        return cls.from_rows(v, rows)

    @property
    def b(self) -> int:
        return len(self.rows)

    @property
    def sizes(self) -> np.ndarray:
        return self._sizes

    @property
    def block_size(self) -> int | None:
        """Common block size, or None when sizes vary."""
        if self.b == 0:
            return None
        k = int(self._sizes[0])
        return k if (self._sizes == k).all() else None

    def blocks(self) -> Iterator[Block]:
        for start in range(0, self.b, _CHUNK_BLOCKS):
            masks = unpack_rows(self.rows[start:start + _CHUNK_BLOCKS], self.v)
            for mask in masks:
                yield Block(tuple(int(x) for x in np.flatnonzero(mask)))

    def csr(self, start: int = 0, stop: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Ascending member lists of blocks ``start:stop`` in CSR form."""
        masks = unpack_rows(self.rows[start:stop], self.v)
        r, c = np.nonzero(masks)
        indptr = np.zeros(len(masks) + 1, dtype=np.int64)
        np.cumsum(np.bincount(r, minlength=len(masks)), out=indptr[1:])
        return indptr, c.astype(np.int32)

    def point_bits(self) -> np.ndarray:
        """Per point, the set of blocks containing it as a uint64 bitset."""
        words = (self.b + 63) // 64
        out = np.zeros((self.v, words * 8), dtype=np.uint8)
        step = _CHUNK_BLOCKS  # multiple of 64, so chunks land on whole words
        for start in range(0, self.b, step):
            masks = unpack_rows(self.rows[start:start + step], self.v)
            packed = np.packbits(masks.T, axis=1, bitorder="little")
            out[:, start // 8:start // 8 + packed.shape[1]] = packed
        return out.view(np.uint64)

    def same_blocks(self, other: "IncidenceStructure") -> bool:
        return (self.v == other.v and self.rows.shape == other.rows.shape
                and bool((self.rows == other.rows).all()))


# -- image sets and spectra ----------------------------------------------------

def point_map(ctx: FieldCtx, f) -> np.ndarray:
    """Normalize ``f`` (array or callable on index arrays) to an index array."""
    if callable(f):
        f = f(ctx.elements())
    f = np.asarray(f, dtype=np.int64)
    if f.shape != (ctx.q,) or f.min(initial=0) < 0 or f.max(initial=0) >= ctx.q:
        raise ValueError("point map must assign an element of GF(q) to every x")
    return f


def power_map(ctx: FieldCtx, e: int) -> np.ndarray:
    return ctx.vpow(ctx.elements(), e)


def _image_mask(ctx: FieldCtx, f: np.ndarray, b: int, c: int = 0) -> np.ndarray:
    x = ctx.elements()
    vals = ctx.vadd(f, ctx.vmul(b, x))
    if c:
        vals = ctx.vadd(vals, c)
    mask = np.zeros(ctx.q, dtype=bool)
    mask[vals] = True
    return mask


def block_of(ctx: FieldCtx, f, b: int, c: int) -> Block:
    """The image set ``{f(x) + b*x + c : x in GF(q)}``."""
    f = point_map(ctx, f)
    ctx._check(b, c)
    return Block(tuple(int(x) for x in np.flatnonzero(_image_mask(ctx, f, b, c))))


def _image_sizes(ctx: FieldCtx, f: np.ndarray) -> np.ndarray:
    """``|{f(x) + b*x}|`` for every b, indexed by b."""
    q = ctx.q
    x = ctx.elements()
    sizes = np.empty(q, dtype=np.int64)
    step = max(1, (1 << 22) // q)
    for s in range(0, q, step):
        bs = np.arange(s, min(q, s + step), dtype=np.int64)
        vals = np.sort(ctx.vadd(f[None, :], ctx.vmul(bs[:, None], x[None, :])), axis=1)
        sizes[s:s + len(bs)] = 1 + (np.diff(vals, axis=1) != 0).sum(axis=1)
    return sizes


@dataclass(frozen=True)
class Spectrum:
    """Multiset of block sizes over all ``q**2`` parameter pairs."""

    counts: dict[int, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def to_csv(self) -> str:
        lines = ["size,count"]
        lines += [f"{s},{n}" for s, n in sorted(self.counts.items())]
        return "\n".join(lines) + "\n"


def value_spectrum(ctx: FieldCtx, f) -> Spectrum:
    # |B(b, c)| = |B(b, 0)|, so each b stands for q pairs
    f = point_map(ctx, f)
    sizes, counts = np.unique(_image_sizes(ctx, f), return_counts=True)
    return Spectrum({int(s): int(n) * ctx.q for s, n in zip(sizes, counts)})


def build_structure(ctx: FieldCtx, f, k: int) -> IncidenceStructure:
    """All distinct blocks ``B(b, c)`` of size exactly ``k``."""
    if not 2 <= k <= ctx.q:
        raise ValueError(f"block size must satisfy 2 <= k <= q, got {k}")
    f = point_map(ctx, f)
    q = ctx.q
    sizes = _image_sizes(ctx, f)
    hits = np.flatnonzero(sizes == k)
    if len(hits) == 0:
        raise NoBlocks(f"no parameter pair gives a block of size {k}")
    _check_row_budget(len(hits) * q, q)
    parts = []
    for b in hits:
        members = np.flatnonzero(_image_mask(ctx, f, int(b)))
        parts.append(translate_rows(ctx, members))
    zero_b = q if sizes[0] == k else 0
    return IncidenceStructure.from_rows(q, np.concatenate(parts), zero_b_pairs=zero_b)


# -- verification --------------------------------------------------------------

@dataclass
class DesignReport:
    t: int
    v: int
    k: int | None
    lam: int | None
    b: int
    is_design: bool
    mode: str
    seed: int | None = None
    samples: int | None = None
    counterexample: dict | None = None

    def to_dict(self) -> dict:
        return {
            "t": self.t, "v": self.v, "k": self.k, "lambda": self.lam, "b": self.b,
            "is_design": self.is_design, "mode": self.mode, "seed": self.seed,
            "samples": self.samples, "counterexample": self.counterexample,
        }

    def describe(self) -> str:
        if self.is_design:
            return f"{self.t}-({self.v},{self.k},{self.lam}) design, b={self.b}"
        return f"not a {self.t}-design (v={self.v}, k={self.k}, b={self.b})"


def exact_cost(structure: IncidenceStructure, t: int) -> int:
    return int(sum(comb(int(s), t) for s in structure.sizes))


def pair_coverage(structure: IncidenceStructure, *, threads: int | None = None,
                  backend: str | None = None) -> np.ndarray:
    """Triangular array of pair coverage counts (index ``j*(j-1)/2 + i``)."""
    if structure.b >= 1 << 32:
        raise BudgetExceeded("pair counters are 32-bit; too many blocks")
    kern = kernels.get(backend)
    threads = threads or kernels.default_threads()
    v = structure.v
    total = np.zeros(v * (v - 1) // 2, dtype=np.int64)
    for start in range(0, structure.b, _CHUNK_BLOCKS):
        indptr, indices = structure.csr(start, start + _CHUNK_BLOCKS)
        total += kern.pair_coverage(indptr, indices, v, threads)
    return total


def _pair_of(index: int) -> tuple[int, int]:
    j = int((1 + np.sqrt(1 + 8 * index)) // 2)
    while j * (j - 1) // 2 > index:
        j -= 1
    while (j + 1) * j // 2 <= index:
        j += 1
    return index - j * (j - 1) // 2, j


def _random_subsets(rng: np.random.Generator, v: int, t: int, n: int) -> np.ndarray:
    out = np.empty((0, t), dtype=np.int64)
    while len(out) < n:
        draw = np.sort(rng.integers(0, v, size=(n - len(out), t)), axis=1)
        ok = (np.diff(draw, axis=1) != 0).all(axis=1)
        out = np.concatenate([out, draw[ok]])
    return out


def verify_t_design(structure: IncidenceStructure, t: int = 2, mode: str = "exact", *,
                    samples: int = 10**6, seed: int | None = None,
                    threads: int | None = None, backend: str | None = None,
                    force: bool = False, budget: int | None = None) -> DesignReport:
    """Check that every t-subset lies in the same number of blocks.

    ``mode="exact"`` counts every t-subset.  ``mode="sampled"`` draws
    ``samples`` uniform t-subsets with a seeded generator; a positive result
    there only means the sample did not falsify the property.  Exact mode
    refuses structures costing more than ``budget`` increments unless
    ``force`` is set.
    """
    v = structure.v
    if t < 1:
        raise ValueError("t must be positive")
    if structure.b == 0:
        raise NoBlocks("structure has no blocks")
    if t > int(structure.sizes.min()) or t > v:
        raise ValueError(f"t={t} exceeds the smallest block size")
    k = structure.block_size
    threads = threads or kernels.default_threads()
    kern = kernels.get(backend)

    if mode == "exact":
        budget = EXACT_BUDGET if budget is None else budget
        cost = exact_cost(structure, t)
        if not force and cost > budget:
            raise BudgetExceeded(
                f"exact verification needs {cost} increments "
                f"(budget {budget}); use sampled mode or force")
        if t == 2:
            counts = pair_coverage(structure, threads=threads, backend=backend)
            subsets = None
        else:
            if t > 2 and v > EXACT_HIGH_T_MAX_V:
                raise BudgetExceeded(f"exact t={t} verification is limited to v <= 64")
            subsets = np.array(list(itertools.combinations(range(v), t)), dtype=np.int64)
            subsets = subsets.reshape(-1, t)
            counts = kern.subset_coverage(structure.point_bits(), subsets, threads)
        seed = None
        samples = None
    elif mode == "sampled":
        if seed is None:
            raise ValueError("sampled mode requires an explicit seed")
        rng = np.random.default_rng(seed)
        subsets = _random_subsets(rng, v, t, samples)
        counts = kern.subset_coverage(structure.point_bits(), subsets, threads)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    ref = int(counts[0])
    bad = np.flatnonzero(counts != ref)
    counterexample = None
    if len(bad):
        i = int(bad[0])
        subset = list(_pair_of(i)) if subsets is None else [int(x) for x in subsets[i]]
        first = list(_pair_of(0)) if subsets is None else [int(x) for x in subsets[0]]
        counterexample = {"subset": subset, "coverage": int(counts[i]),
                          "reference_subset": first, "reference_coverage": ref}
    is_design = not len(bad)
    lam = ref if is_design else None
    if is_design and mode == "exact" and k is not None:
        if structure.b * comb(k, t) != lam * comb(v, t):
            raise RuntimeError("coverage counts violate b*C(k,t) = lambda*C(v,t)")
    return DesignReport(t=t, v=v, k=k, lam=lam, b=structure.b, is_design=is_design,
                        mode=mode, seed=seed, samples=samples,
                        counterexample=counterexample)


def naive_coverage(structure: IncidenceStructure, t: int = 2) -> dict[tuple[int, ...], int]:
    """Coverage of every t-subset by scanning all blocks; small v only."""
    blocks = [set(b) for b in structure.blocks()]
    return {sub: sum(1 for blk in blocks if all(x in blk for x in sub))
            for sub in itertools.combinations(range(structure.v), t)}
