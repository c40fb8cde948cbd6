"""Loop statistics of meandric systems built from partition pairs.

A system of class (alpha, beta) has loops counted by the cycles of
alpha~ * beta on the geodesic permutations.  This module enumerates the
four partition-class pairings exhaustively, producing loop polynomials
and the trivariate generating coefficients, and provides executable
forms of the combinatorial counting lemmas.

The exhaustive pair scans are vectorized with numpy but remain honest
brute force: every pair is materialized as a permutation composition
whose cycles are counted directly.  Chunks of the scan may be spread
over a thread pool capped by the MEANDER_THREADS environment variable;
partial histograms are merged by integer addition, so the result does
not depend on the split.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from .partitions import (
    CombSubset,
    NcPartition,
    SizeMismatchError,
    enumerate_interval,
    enumerate_kr_interval,
    enumerate_nc,
)
from .transforms import LaurentPoly


class ResourceLimitError(RuntimeError):
    """An enumeration request exceeded its class budget."""


class MeetNotTrivialError(ValueError):
    """The comb loop formula was applied where the Kr-interval meet is
    nontrivial."""


class MeanderClass(enum.Enum):
    FULL = "full"                 # NC(n) x NC(n)
    SHALLOW_TOP = "shallow-top"   # Int(n) x NC(n)
    THIN = "thin"                 # Int(n) x Int(n)
    SEMI = "semi"                 # Int(n) x {rainbow}

    @classmethod
    def from_tag(cls, tag: str) -> "MeanderClass":
        for member in cls:
            if member.value == tag:
                return member
        raise ValueError(f"unknown meander class {tag!r}")


DEFAULT_BUDGETS: dict[MeanderClass, int] = {
    MeanderClass.FULL: 9,
    MeanderClass.SHALLOW_TOP: 10,
    MeanderClass.THIN: 16,
    MeanderClass.SEMI: 16,
}


def _check_budget(klass: MeanderClass, n: int, budget: int | None) -> None:
    if n < 1:
        raise ValueError("n must be >= 1")
    cap = DEFAULT_BUDGETS[klass] if budget is None else budget
    if n > cap:
        raise ResourceLimitError(
            f"{klass.value} enumeration at n={n} exceeds budget {cap}")


@dataclass(frozen=True)
class LoopPolynomial:
    """Counts of class pairs by number of loops, i.e. the coefficients of
    the meander polynomial in the loop fugacity."""

    n: int
    klass: MeanderClass
    coeffs: Mapping[int, int]

    def evaluate(self, ell: int) -> int:
        return sum(c * ell ** k for k, c in self.coeffs.items())

    def total(self) -> int:
        return sum(self.coeffs.values())

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "class": self.klass.value,
            "coeffs": {str(k): self.coeffs[k] for k in sorted(self.coeffs)},
        }

    def csv_rows(self) -> list[tuple[int, int, int]]:
        return [(self.n, k, self.coeffs[k]) for k in sorted(self.coeffs)]


# ---------------------------------------------------------------------------
# Scalar loop counting
# ---------------------------------------------------------------------------

def loop_count(a: NcPartition, b: NcPartition) -> int:
    """Number of loops of the system glued from a (top) and b (bottom):
    the cycle count of a~ * b."""
    if a.n != b.n:
        raise SizeMismatchError("partitions live on different ground sets")
    return a.to_geodesic().inverse().compose(b.to_geodesic()).cycle_count()


def loop_count_comb(q: CombSubset, b: NcPartition) -> int:
    """Loop count via the comb formula
    2 #{c in b' : Q & c = {}} + 1 - #(b') + |Q|,
    valid when the Kr-interval meet of q and b is trivial."""
    if q.n != b.n:
        raise SizeMismatchError("different ground sets")
    n = q.n
    if q.q.intersection(b.block_containing(n - 1)):
        raise MeetNotTrivialError(f"Q meets the block of n: {q!r}, {b!r}")
    rest = [blk for blk in b.blocks if n - 1 not in blk]
    empty = sum(1 for blk in rest if not q.q.intersection(blk))
    return 2 * empty + 1 - len(rest) + len(q.q)


def rainbow(n: int) -> NcPartition:
    """The fully nested pairing (1,n)(2,n-1)...; middle point a singleton
    for odd n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    blocks = [[i, n - 1 - i] for i in range(n // 2)]
    if n % 2:
        blocks.append([n // 2])
    return NcPartition(n, blocks)


# ---------------------------------------------------------------------------
# Bulk enumeration kernel
# ---------------------------------------------------------------------------

def _threads() -> int:
    try:
        return max(1, int(os.environ.get("MEANDER_THREADS", "1")))
    except ValueError:
        return 1


def _geodesic_rows(parts: Iterable[NcPartition | CombSubset]) -> tuple[np.ndarray, np.ndarray]:
    """One-line images and block counts for a family of partitions."""
    images = []
    nblocks = []
    for p in parts:
        part = p.to_partition() if isinstance(p, CombSubset) else p
        images.append(part.to_geodesic().images)
        nblocks.append(part.block_count())
    return np.array(images, dtype=np.int16), np.array(nblocks, dtype=np.int64)


def _cycle_counts(perms: np.ndarray) -> np.ndarray:
    """Cycle counts of each row of an (M, n) one-line array."""
    m, n = perms.shape
    visited = np.zeros((m, n), dtype=bool)
    counts = np.zeros(m, dtype=np.int64)
    for j in range(n):
        todo = ~visited[:, j]
        counts += todo
        rows = np.nonzero(todo)[0]
        cur = np.full(rows.shape, j, dtype=np.int64)
        while rows.size:
            visited[rows, cur] = True
            cur = perms[rows, cur].astype(np.int64, copy=False)
            keep = cur != j
            rows = rows[keep]
            cur = cur[keep]
    return counts


def _scan_chunk(inv_a: np.ndarray, imgs_b: np.ndarray, idx_a: np.ndarray,
                idx_b: np.ndarray, base: int, nbins: int,
                pair_ok: np.ndarray | None) -> np.ndarray:
    """Histogram of (cycle_count, a-stat, b-stat) for one A-chunk against
    all of B.  idx_a/idx_b are precomputed per-row index contributions."""
    ca, n = inv_a.shape
    comp = inv_a[:, imgs_b]                   # (ca, mb, n): (alpha~ beta)(i)
    counts = _cycle_counts(comp.reshape(-1, n))
    idx = counts * base * base + (idx_a[:, None] + idx_b[None, :]).ravel()
    if pair_ok is not None:
        idx = idx[pair_ok.ravel()]
    return np.bincount(idx, minlength=nbins)


def _pair_scan(a_imgs: np.ndarray, a_stat: np.ndarray, b_imgs: np.ndarray,
               b_stat: np.ndarray, n: int,
               a_masks: np.ndarray | None = None,
               b_masks: np.ndarray | None = None) -> dict[tuple[int, int, int], int]:
    """Joint histogram over all pairs of (#cycles(a~ b), a_stat, b_stat).

    When masks are given, only pairs with a_mask & b_mask == 0 are kept
    (the trivial-meet filter of the cumulant sums).
    """
    ma = a_imgs.shape[0]
    base = n + 1
    nbins = base * base * (n + 1)
    inv_all = np.empty_like(a_imgs)
    rows = np.arange(ma)[:, None]
    inv_all[rows, a_imgs] = np.arange(n, dtype=a_imgs.dtype)[None, :]

    mb = b_imgs.shape[0]
    chunk = max(1, 4_000_000 // max(1, mb * n))
    starts = list(range(0, ma, chunk))

    tasks = []
    for s in starts:
        sl = slice(s, min(s + chunk, ma))
        pair_ok = None
        if a_masks is not None and b_masks is not None:
            pair_ok = (a_masks[sl, None] & b_masks[None, :]) == 0
        tasks.append((inv_all[sl], b_imgs, a_stat[sl] * base, b_stat, base,
                      nbins, pair_ok))

    workers = _threads()
    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(lambda t: _scan_chunk(*t), tasks))
    else:
        partials = [_scan_chunk(*t) for t in tasks]

    total = np.sum(partials, axis=0, dtype=np.int64)
    hist: dict[tuple[int, int, int], int] = {}
    for flat in np.nonzero(total)[0]:
        k, rem = divmod(int(flat), base * base)
        a, b = divmod(rem, base)
        hist[(k, a, b)] = int(total[flat])
    return hist


def pairwise_cycle_counts(a_imgs: np.ndarray, b_imgs: np.ndarray) -> np.ndarray:
    """(MA, MB) array of #cycles(alpha~ beta) for one-line image rows."""
    ma, n = a_imgs.shape
    rows = np.arange(ma)[:, None]
    inv = np.empty_like(a_imgs)
    inv[rows, a_imgs] = np.arange(n, dtype=a_imgs.dtype)[None, :]
    mb = b_imgs.shape[0]
    out = np.empty((ma, mb), dtype=np.int64)
    chunk = max(1, 4_000_000 // max(1, mb * n))
    for s in range(0, ma, chunk):
        comp = inv[s:s + chunk][:, b_imgs]
        out[s:s + chunk] = _cycle_counts(comp.reshape(-1, n)).reshape(-1, mb)
    return out


def _class_sides(klass: MeanderClass, n: int):
    if klass is MeanderClass.FULL:
        return list(enumerate_nc(n)), list(enumerate_nc(n))
    if klass is MeanderClass.SHALLOW_TOP:
        return list(enumerate_interval(n)), list(enumerate_nc(n))
    if klass is MeanderClass.THIN:
        return list(enumerate_interval(n)), list(enumerate_interval(n))
    if klass is MeanderClass.SEMI:
        return list(enumerate_interval(n)), [rainbow(n)]
    raise ValueError(f"unknown class {klass}")


@lru_cache(maxsize=None)
def _pair_histogram(klass: MeanderClass, n: int) -> Mapping[tuple[int, int, int], int]:
    """{(loops, ||alpha||, ||beta||): count} over all class pairs."""
    side_a, side_b = _class_sides(klass, n)
    a_imgs, a_blocks = _geodesic_rows(side_a)
    b_imgs, b_blocks = _geodesic_rows(side_b)
    return _pair_scan(a_imgs, n - a_blocks, b_imgs, n - b_blocks, n)


def meander_polynomial(klass: MeanderClass, n: int,
                       budget: int | None = None) -> LoopPolynomial:
    """Exhaustive loop distribution: coeffs[k] = #{pairs with k loops}."""
    _check_budget(klass, n, budget)
    hist = _pair_histogram(klass, n)
    coeffs: dict[int, int] = {}
    for (k, _, _), c in hist.items():
        coeffs[k] = coeffs.get(k, 0) + c
    return LoopPolynomial(n, klass, coeffs)


def generating_coefficient(klass: MeanderClass, n: int,
                           budget: int | None = None) -> LaurentPoly:
    """Sum over class pairs of Y^||alpha~ beta|| A^||alpha|| B^||beta||."""
    _check_budget(klass, n, budget)
    hist = _pair_histogram(klass, n)
    return LaurentPoly({(n - k, a, b): c for (k, a, b), c in hist.items()})


@lru_cache(maxsize=None)
def _kr_pair_histogram(klass: MeanderClass, n: int) -> Mapping[tuple[int, int, int], int]:
    combs = list(enumerate_kr_interval(n))
    a_imgs, a_blocks = _geodesic_rows(combs)
    a_masks = np.array([sum(1 << i for i in q.q) for q in combs], dtype=np.int64)
    if klass is MeanderClass.THIN:
        b_parts: list[NcPartition] = [q.to_partition() for q in combs]
        b_masks = a_masks.copy()
    else:
        b_parts = list(enumerate_nc(n))
        b_masks = np.array(
            [sum(1 << i for i in b.block_containing(n - 1) if i != n - 1)
             for b in b_parts],
            dtype=np.int64)
    b_imgs, b_blocks = _geodesic_rows(b_parts)
    # Kr-side exponents: ||alpha~ 1_n|| = n - 1 - ||alpha||, same for beta.
    return _pair_scan(a_imgs, (n - 1) - (n - a_blocks), b_imgs,
                      (n - 1) - (n - b_blocks), n,
                      a_masks=a_masks, b_masks=b_masks)


def cumulant_coefficient(klass: MeanderClass, n: int,
                         budget: int | None = None) -> LaurentPoly:
    """Sum over Kr Int(n) x Kr L(n) pairs with trivial Kr-interval meet of
    Y^||alpha~ beta|| A^||alpha~ 1_n|| B^||beta~ 1_n||."""
    if klass not in (MeanderClass.THIN, MeanderClass.SHALLOW_TOP):
        raise ValueError("cumulant coefficients exist for thin and "
                         "shallow-top classes only")
    _check_budget(klass, n, budget)
    hist = _kr_pair_histogram(klass, n)
    return LaurentPoly({(n - k, a, b): c for (k, a, b), c in hist.items()})


# ---------------------------------------------------------------------------
# Counting lemmas and closed-form counts
# ---------------------------------------------------------------------------

def binomial_lemma_check(blocks: Sequence[Iterable[int]], a_val: int,
                         b_val: int) -> tuple[int, int]:
    """Both sides of the subset identity
    sum_Q A^|Q| B^#{c : Q & c = {}}  ==  prod_c ((A+1)^|c| + B - 1)
    for an arbitrary partition (crossing allowed).  Returns (lhs, rhs);
    equality is the tested property, not assumed here.
    """
    blocks = [frozenset(b) for b in blocks]
    ground = sorted(x for b in blocks for x in b)
    m = len(ground)
    if len(set(ground)) != m:
        raise ValueError("blocks overlap")
    if m > 20:
        raise ValueError("ground set too large for the subset scan")
    pos = {x: i for i, x in enumerate(ground)}
    masks = [sum(1 << pos[x] for x in b) for b in blocks]

    qs = np.arange(1 << m, dtype=np.int64)
    sizes = np.zeros(1 << m, dtype=np.int64)
    for i in range(m):
        sizes += (qs >> i) & 1
    empties = np.zeros(1 << m, dtype=np.int64)
    for mask in masks:
        empties += (qs & mask) == 0
    counts = np.zeros((m + 1, len(blocks) + 1), dtype=np.int64)
    np.add.at(counts, (sizes, empties), 1)

    lhs = 0
    for i in range(m + 1):
        for j in range(len(blocks) + 1):
            c = int(counts[i, j])
            if c:
                lhs += c * a_val ** i * b_val ** j
    rhs = 1
    for b in blocks:
        rhs *= (a_val + 1) ** len(b) + b_val - 1
    return lhs, rhs


def thin_count(n: int, k: int) -> int:
    """Thin systems of order n with k loops: 2^(n-1) binom(n-1, k-1)."""
    if n < 1 or not 1 <= k <= n:
        raise ValueError("need n >= 1 and 1 <= k <= n")
    return 2 ** (n - 1) * comb(n - 1, k - 1)


def semi_loop_distribution(n: int) -> LoopPolynomial:
    """Loop distribution of interval x rainbow systems in closed form:
    the X^n coefficient of M(X, Y, 1) re-keyed from Y-degree e to k = n - e
    loops.  For n = 2k it is (2Y)^(k-1) (Y+1)^k, for n = 2k-1 it is
    (2Y(Y+1))^(k-1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    coeffs: dict[int, int] = {}
    if n % 2 == 0:
        half = n // 2
        for j in range(half + 1):
            coeffs[half + 1 - j] = 2 ** (half - 1) * comb(half, j)
    else:
        half = (n + 1) // 2
        for j in range(half):
            coeffs[half - j] = 2 ** (half - 1) * comb(half - 1, j)
    return LoopPolynomial(n, MeanderClass.SEMI, coeffs)


def shallow_top_meander_count(n: int, m: int) -> int:
    """Shallow-top meanders of order n extracted at A-degree n - m:
    (1/n) binom(n, m-1) binom(n+m-1, 2m-1), always an integer."""
    if n < 1 or not 1 <= m <= n:
        raise ValueError("need n >= 1 and 1 <= m <= n")
    val = Fraction(comb(n, m - 1) * comb(n + m - 1, 2 * m - 1), n)
    if val.denominator != 1:
        raise AssertionError(f"shallow_top_meander_count({n}, {m}) is not integral: {val}")
    return int(val)
