"""Permutations, non-crossing partitions and their lattice operations.

Conventions used throughout the package:

- Permutations are stored in one-line ("word") notation as a tuple of
  0-based images: ``p.images[i] = p(i)``.  Composition is ``(p * q)(i) =
  p(q(i))``.
- Partitions of ``{1, ..., n}`` are stored 0-based internally, as a tuple
  of blocks sorted by their minimum, each block an increasing tuple.  All
  serialization and cycle/block notation at the boundary is 1-based.
- ``length`` of a permutation is the minimal number of transpositions
  whose product is the permutation, which equals ``n - cycle_count``.
- A geodesic permutation is one with ``length(p) + length(p~ * gamma) ==
  n - 1`` for the full cycle ``gamma = (1, 2, ..., n)``; these are exactly
  the permutations whose cycles, read increasingly, are the blocks of a
  non-crossing partition.
"""

from __future__ import annotations

import math
from typing import Iterable, Iterator, Sequence


class SizeMismatchError(ValueError):
    """Two objects that must live on the same ground set do not."""


class GeodesicViolationError(ValueError):
    """A permutation that should lie on the id--gamma geodesic does not."""


def catalan(n: int) -> int:
    """n-th Catalan number, binom(2n, n) / (n + 1), exact."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return math.comb(2 * n, n) // (n + 1)


# ---------------------------------------------------------------------------
# Permutations
# ---------------------------------------------------------------------------

class Permutation:
    """A permutation of {0, ..., n-1} in one-line notation."""

    __slots__ = ("images",)

    def __init__(self, images: Iterable[int]):
        images = tuple(images)
        n = len(images)
        if n == 0:
            raise ValueError("empty permutation")
        seen = [False] * n
        for x in images:
            if not isinstance(x, int) or not 0 <= x < n or seen[x]:
                raise ValueError(f"not a permutation of 0..{n - 1}: {images}")
            seen[x] = True
        self.images = images

    @property
    def n(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(n))

    @classmethod
    def full_cycle(cls, n: int) -> "Permutation":
        """gamma_n = (1, 2, ..., n): i -> i + 1 cyclically."""
        return cls(tuple(range(1, n)) + (0,))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Iterable[int]],
                    one_based: bool = True) -> "Permutation":
        """Build from disjoint cycles; fixed points may be omitted.

        Cycles are given in the 1-based notation used in all displayed
        examples, e.g. ``from_cycles(5, [(1, 2), (3, 4, 5)])``.
        """
        off = 1 if one_based else 0
        images = list(range(n))
        for cycle in cycles:
            cycle = [c - off for c in cycle]
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                if not 0 <= a < n:
                    raise ValueError(f"cycle entry {a + off} out of range")
                images[a] = b
        return cls(images)

    @classmethod
    def from_one_based(cls, images: Iterable[int]) -> "Permutation":
        return cls(x - 1 for x in images)

    def one_based(self) -> tuple[int, ...]:
        """One-line images in 1-based form, the serialization format."""
        return tuple(x + 1 for x in self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return self.compose(other)

    def compose(self, other: "Permutation") -> "Permutation":
        """(self * other)(i) = self(other(i))."""
        if self.n != other.n:
            raise SizeMismatchError(f"sizes differ: {self.n} != {other.n}")
        img = self.images
        return Permutation(img[x] for x in other.images)

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, x in enumerate(self.images):
            inv[x] = i
        return Permutation(inv)

    def cycles(self) -> tuple[tuple[int, ...], ...]:
        """Disjoint cycles, 0-based, each starting at its minimum,
        ordered by minimum."""
        seen = [False] * self.n
        out = []
        for i in range(self.n):
            if seen[i]:
                continue
            cyc = []
            j = i
            while not seen[j]:
                seen[j] = True
                cyc.append(j)
                j = self.images[j]
            out.append(tuple(cyc))
        return tuple(out)

    def cycle_count(self) -> int:
        seen = [False] * self.n
        count = 0
        for i in range(self.n):
            if seen[i]:
                continue
            count += 1
            j = i
            while not seen[j]:
                seen[j] = True
                j = self.images[j]
        return count

    def length(self) -> int:
        """Minimal number of transpositions multiplying to self;
        equals n - cycle_count."""
        return self.n - self.cycle_count()

    def is_identity(self) -> bool:
        return all(x == i for i, x in enumerate(self.images))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def __repr__(self) -> str:
        cyc = " ".join(
            "(" + ",".join(str(c + 1) for c in cycle) + ")"
            for cycle in self.cycles()
        )
        return f"Permutation[{cyc}]"


def compose(p: Permutation, q: Permutation) -> Permutation:
    return p.compose(q)


def cycle_count(p: Permutation) -> int:
    return p.cycle_count()


def length(p: Permutation) -> int:
    return p.length()


# ---------------------------------------------------------------------------
# Non-crossing partitions
# ---------------------------------------------------------------------------

def _canonical_blocks(blocks: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0]))


def _blocks_cross(blocks: Sequence[Sequence[int]], n: int) -> bool:
    # Classic one-pass stack check: a revisited block must sit on top of
    # the stack of open blocks, and a block is popped at its maximum.
    owner = [0] * n
    last = [0] * len(blocks)
    for k, b in enumerate(blocks):
        last[k] = b[-1]
        for x in b:
            owner[x] = k
    stack: list[int] = []
    opened = [False] * len(blocks)
    for i in range(n):
        k = owner[i]
        if not opened[k]:
            opened[k] = True
            stack.append(k)
        elif not stack or stack[-1] != k:
            return True
        if last[k] == i:
            if not stack or stack[-1] != k:
                return True
            stack.pop()
    return False


class NcPartition:
    """A non-crossing partition of {0, ..., n-1} in canonical block form."""

    __slots__ = ("n", "blocks")

    def __init__(self, n: int, blocks: Iterable[Iterable[int]]):
        if n < 1:
            raise ValueError("n must be >= 1")
        canon = _canonical_blocks(blocks)
        cover = sorted(x for b in canon for x in b)
        if cover != list(range(n)):
            raise ValueError(f"blocks do not partition 0..{n - 1}: {canon}")
        if _blocks_cross(canon, n):
            raise ValueError(f"blocks cross: {canon}")
        self.n = n
        self.blocks = canon

    @classmethod
    def _trusted(cls, n: int, blocks: tuple[tuple[int, ...], ...]) -> "NcPartition":
        # Internal: caller guarantees canonical non-crossing blocks.  Used
        # by the enumeration streams, whose output is cross-validated
        # against the checking constructor in the test suite.
        out = object.__new__(cls)
        out.n = n
        out.blocks = blocks
        return out

    @classmethod
    def from_one_based(cls, n: int, blocks: Iterable[Iterable[int]]) -> "NcPartition":
        return cls(n, [[x - 1 for x in b] for b in blocks])

    @classmethod
    def singletons(cls, n: int) -> "NcPartition":
        """0_n, the finest partition."""
        return cls(n, [[i] for i in range(n)])

    @classmethod
    def full(cls, n: int) -> "NcPartition":
        """1_n, the one-block partition."""
        return cls(n, [list(range(n))])

    def block_count(self) -> int:
        return len(self.blocks)

    def norm(self) -> int:
        """Length of the geodesic permutation: n - number of blocks."""
        return self.n - len(self.blocks)

    def block_containing(self, i: int) -> tuple[int, ...]:
        for b in self.blocks:
            if i in b:
                return b
        raise ValueError(f"{i} not in ground set")

    def to_geodesic(self) -> Permutation:
        """The permutation whose cycles are the blocks, elements increasing."""
        images = list(range(self.n))
        for b in self.blocks:
            for a, c in zip(b, b[1:] + b[:1]):
                images[a] = c
        return Permutation(images)

    @classmethod
    def from_geodesic(cls, p: Permutation) -> "NcPartition":
        """Inverse of :meth:`to_geodesic`.

        Raises :class:`GeodesicViolationError` unless ``p`` saturates the
        triangle inequality ``length(p) + length(p~ gamma) == n - 1``.
        """
        n = p.n
        gamma = Permutation.full_cycle(n)
        if p.length() + p.inverse().compose(gamma).length() != n - 1:
            raise GeodesicViolationError(f"not on the id--gamma geodesic: {p!r}")
        return cls(n, [sorted(c) for c in p.cycles()])

    def kreweras(self) -> "NcPartition":
        """Kreweras complement, computed as p~ * gamma on geodesics."""
        p = self.to_geodesic()
        comp = p.inverse().compose(Permutation.full_cycle(self.n))
        return NcPartition(self.n, [sorted(c) for c in comp.cycles()])

    def fatten(self) -> "NcPartition":
        """The non-crossing pairing of 2n points obtained by doubling.

        Point i (0-based) becomes 2i (its left copy) and 2i+1 (its right
        copy); the right copy of i is paired with the left copy of p(i)
        for the geodesic permutation p.
        """
        p = self.to_geodesic()
        pairs = [(2 * i + 1, 2 * p(i)) for i in range(self.n)]
        return NcPartition(2 * self.n, [sorted(pr) for pr in pairs])

    def leq(self, other: "NcPartition") -> bool:
        """Reversed refinement order: every block of self inside a block
        of other."""
        if self.n != other.n:
            raise SizeMismatchError("different ground sets")
        owner = [0] * other.n
        for k, b in enumerate(other.blocks):
            for x in b:
                owner[x] = k
        return all(len({owner[x] for x in b}) == 1 for b in self.blocks)

    def to_one_based(self) -> list[list[int]]:
        return [[x + 1 for x in b] for b in self.blocks]

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, NcPartition)
                and self.n == other.n and self.blocks == other.blocks)

    def __hash__(self) -> int:
        return hash((self.n, self.blocks))

    def __repr__(self) -> str:
        body = "".join("{" + ",".join(str(x + 1) for x in b) + "}" for b in self.blocks)
        return f"NcPartition({body})"


class CombSubset:
    """An element of the Kreweras complement of the interval partitions.

    Such a partition has at most one nontrivial block, ``Q | {n}`` (the
    comb), with everything else a singleton; it is encoded by the subset
    ``Q`` of {1, ..., n-1} (stored 0-based).
    """

    __slots__ = ("n", "q")

    def __init__(self, n: int, q: Iterable[int]):
        if n < 1:
            raise ValueError("n must be >= 1")
        q = frozenset(q)
        if not all(isinstance(x, int) and 0 <= x < n - 1 for x in q):
            raise ValueError(f"Q must be a subset of 0..{n - 2}: {sorted(q)}")
        self.n = n
        self.q = q

    @classmethod
    def from_one_based(cls, n: int, q: Iterable[int]) -> "CombSubset":
        return cls(n, [x - 1 for x in q])

    @classmethod
    def from_partition(cls, part: NcPartition) -> "CombSubset":
        nontrivial = [b for b in part.blocks if len(b) > 1]
        if len(nontrivial) > 1 or (nontrivial and part.n - 1 not in nontrivial[0]):
            raise ValueError(f"not a comb partition: {part!r}")
        q = set(nontrivial[0]) - {part.n - 1} if nontrivial else set()
        return cls(part.n, q)

    def to_partition(self) -> NcPartition:
        comb = sorted(self.q) + [self.n - 1]
        rest = [[i] for i in range(self.n) if i not in self.q and i != self.n - 1]
        return NcPartition(self.n, [comb] + rest)

    def to_geodesic(self) -> Permutation:
        return self.to_partition().to_geodesic()

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, CombSubset)
                and self.n == other.n and self.q == other.q)

    def __hash__(self) -> int:
        return hash((self.n, self.q))

    def __repr__(self) -> str:
        return f"CombSubset(n={self.n}, Q={{{','.join(str(x + 1) for x in sorted(self.q))}}})"


# ---------------------------------------------------------------------------
# Enumeration (iterative, streaming)
# ---------------------------------------------------------------------------

def _next_dyck(word: list[int]) -> bool:
    """Advance a balanced 0/1 word (1 = open) to its lexicographic
    successor in place, treating 1 < 0.  Returns False from the last
    word 1010...; the first word is 1...10...0.
    """
    n2 = len(word)
    suffix_balance = 0
    ones_suffix = 0
    for i in range(n2 - 1, -1, -1):
        if word[i] == 1:
            suffix_balance += 1
            ones_suffix += 1
            # prefix balance is -suffix_balance; flipping 1 -> 0 here keeps
            # the word a ballot sequence iff that balance stays >= 0
            if suffix_balance <= -1:
                word[i] = 0
                for j in range(i + 1, i + 1 + ones_suffix):
                    word[j] = 1
                for j in range(i + 1 + ones_suffix, n2):
                    word[j] = 0
                return True
        else:
            suffix_balance -= 1
    return False


def _dyck_words(n: int) -> Iterator[list[int]]:
    word = [1] * n + [0] * n
    yield word
    while _next_dyck(word):
        yield word


def _pairing_from_dyck(word: Sequence[int]) -> list[tuple[int, int]]:
    stack: list[int] = []
    pairs = []
    for i, w in enumerate(word):
        if w == 1:
            stack.append(i)
        else:
            pairs.append((stack.pop(), i))
    return pairs


def enumerate_nc(n: int) -> Iterator[NcPartition]:
    """Stream all non-crossing partitions of [n]; Catalan(n) of them.

    Iterates Dyck words by lexicographic successor and un-fattens the
    induced non-crossing pairing of 2n points, so nothing is materialized.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    for word in _dyck_words(n):
        images = [0] * n
        for a, b in _pairing_from_dyck(word):
            # each pair joins one even (left copy, 2j) and one odd point
            # (right copy, 2i+1); it encodes p(i) = j
            if a % 2 == 1:
                i, j = a // 2, b // 2
            else:
                i, j = b // 2, a // 2
            images[i] = j
        # cycles, discovered at their minima, are the canonical blocks
        seen = [False] * n
        blocks = []
        for i in range(n):
            if seen[i]:
                continue
            cyc = []
            j = i
            while not seen[j]:
                seen[j] = True
                cyc.append(j)
                j = images[j]
            blocks.append(tuple(cyc))
        yield NcPartition._trusted(n, tuple(blocks))


def enumerate_interval(n: int) -> Iterator[NcPartition]:
    """Stream all interval partitions of [n]; 2^(n-1) of them."""
    if n < 1:
        raise ValueError("n must be >= 1")
    for cuts in range(1 << (n - 1)):
        blocks = []
        start = 0
        for i in range(n - 1):
            if cuts >> i & 1:
                blocks.append(list(range(start, i + 1)))
                start = i + 1
        blocks.append(list(range(start, n)))
        yield NcPartition(n, blocks)


def enumerate_kr_interval(n: int) -> Iterator[CombSubset]:
    """Stream Kr Int(n) as comb subsets Q of [n-1]; 2^(n-1) of them."""
    if n < 1:
        raise ValueError("n must be >= 1")
    for mask in range(1 << (n - 1)):
        yield CombSubset(n, [i for i in range(n - 1) if mask >> i & 1])


# ---------------------------------------------------------------------------
# Lattice operations
# ---------------------------------------------------------------------------

def refinement_leq(a: NcPartition, b: NcPartition) -> bool:
    return a.leq(b)


def nc_meet(a: NcPartition, b: NcPartition) -> NcPartition:
    """Largest common refinement: blockwise intersections."""
    if a.n != b.n:
        raise SizeMismatchError("different ground sets")
    owner_a = [0] * a.n
    for k, blk in enumerate(a.blocks):
        for x in blk:
            owner_a[x] = k
    owner_b = [0] * b.n
    for k, blk in enumerate(b.blocks):
        for x in blk:
            owner_b[x] = k
    groups: dict[tuple[int, int], list[int]] = {}
    for x in range(a.n):
        groups.setdefault((owner_a[x], owner_b[x]), []).append(x)
    return NcPartition(a.n, list(groups.values()))


def _set_partition_join_blocks(a: NcPartition, b: NcPartition) -> list[set[int]]:
    parent = list(range(a.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[ry] = rx

    for part in (a, b):
        for blk in part.blocks:
            for x in blk[1:]:
                union(blk[0], x)
    groups: dict[int, set[int]] = {}
    for x in range(a.n):
        groups.setdefault(find(x), set()).add(x)
    return list(groups.values())


def nc_join(a: NcPartition, b: NcPartition) -> NcPartition:
    """Smallest common non-crossing coarsening.

    Starts from the set-partition join and merges crossing blocks until
    none remain; every merge is forced, so the result is the minimum.
    """
    if a.n != b.n:
        raise SizeMismatchError("different ground sets")
    blocks = _set_partition_join_blocks(a, b)
    merged = True
    while merged:
        merged = False
        for i in range(len(blocks)):
            for j in range(i + 1, len(blocks)):
                bi, bj = blocks[i], blocks[j]
                lo, hi = min(bj), max(bj)
                inside = any(lo < x < hi for x in bi)
                outside = any(x < lo or x > hi for x in bi)
                if inside and outside:
                    blocks[i] = bi | bj
                    del blocks[j]
                    merged = True
                    break
            if merged:
                break
    return NcPartition(a.n, [sorted(blk) for blk in blocks])


def _separators(p: NcPartition) -> set[int]:
    # positions i (0-based gap between i and i+1) not straddled by any block
    straddled = set()
    for blk in p.blocks:
        straddled.update(range(blk[0], blk[-1]))
    return set(range(p.n - 1)) - straddled


def interval_join(a: NcPartition, b: NcPartition) -> NcPartition:
    """Smallest interval-partition coarsening of both (interval closure
    of the join): keep exactly the gaps that separate both partitions."""
    if a.n != b.n:
        raise SizeMismatchError("different ground sets")
    cuts = _separators(a) & _separators(b)
    blocks = []
    start = 0
    for i in sorted(cuts):
        blocks.append(list(range(start, i + 1)))
        start = i + 1
    blocks.append(list(range(start, a.n)))
    return NcPartition(a.n, blocks)


def kr_interval_meet(q: CombSubset, b: NcPartition) -> NcPartition:
    """Meet inside Kr Int(n): the comb on (Q | {n}) & b(n), singletons
    elsewhere.  Agrees with nc_meet when b is itself a comb."""
    if q.n != b.n:
        raise SizeMismatchError("different ground sets")
    n = q.n
    block_n = set(b.block_containing(n - 1))
    comb = (q.q | {n - 1}) & block_n
    return CombSubset(n, comb - {n - 1}).to_partition()


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def partition_to_json(p: NcPartition) -> list[list[int]]:
    """Sorted 1-based block lists, e.g. [[1,4,5],[2,3]]."""
    return p.to_one_based()


def partition_from_json(blocks: list[list[int]]) -> NcPartition:
    n = max(x for b in blocks for x in b)
    return NcPartition.from_one_based(n, blocks)


def permutation_to_json(p: Permutation) -> list[int]:
    return list(p.one_based())


def permutation_from_json(images: list[int]) -> Permutation:
    return Permutation.from_one_based(images)
