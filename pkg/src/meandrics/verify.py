"""Oracle-equivalence checks behind the ``verify`` CLI command.

Every check compares an implemented formula or closed form against an
independent brute-force computation and returns (name, ok, detail); on
failure the detail holds a minimal counterexample.  All randomness is
seeded with fixed constants so repeated runs print identical reports.
"""

from __future__ import annotations

import random
from typing import Callable, Iterator

import numpy as np

from . import matrix_models, meanders, partitions, transforms
from .meanders import MeanderClass
from .transforms import LaurentPoly, TruncSeries

CheckResult = tuple[str, bool, str]

_SEED = 20240809


def set_partitions(m: int) -> Iterator[list[list[int]]]:
    """All set partitions of {1..m} via restricted growth strings."""
    a = [0] * m
    while True:
        blocks: list[list[int]] = [[] for _ in range(max(a) + 1)]
        for i, v in enumerate(a):
            blocks[v].append(i + 1)
        yield blocks
        for i in range(m - 1, 0, -1):
            if a[i] <= max(a[:i]):
                a[i] += 1
                for j in range(i + 1, m):
                    a[j] = 0
                break
        else:
            return


# ---------------------------------------------------------------------------
# Lemma suite
# ---------------------------------------------------------------------------

def check_krint_combs(n_max: int = 8) -> CheckResult:
    name = "krint-equals-comb-partitions"
    total = 0
    for n in range(1, n_max + 1):
        combs = {q.to_partition() for q in partitions.enumerate_kr_interval(n)}
        krs = {p.kreweras() for p in partitions.enumerate_interval(n)}
        if combs != krs:
            return name, False, f"n={n}: comb set differs from Kr(Int)"
        total += len(combs)
    return name, True, f"{total} partitions, n<={n_max}"


def check_kr_interval_meet(n_max: int = 7) -> CheckResult:
    name = "kr-interval-meet-formula"
    checked = 0
    for n in range(1, n_max + 1):
        combs = list(partitions.enumerate_kr_interval(n))
        comb_parts = [c.to_partition() for c in combs]
        ncs = list(partitions.enumerate_nc(n))
        # owner[x] per partition makes the refinement test direct
        owners = []
        for b in ncs:
            owner = [0] * n
            for k, blk in enumerate(b.blocks):
                for x in blk:
                    owner[x] = k
            owners.append(owner)

        def below(comb: partitions.CombSubset, owner: list[int]) -> bool:
            root = owner[n - 1]
            return all(owner[x] == root for x in comb.q)

        for q, qp in zip(combs, comb_parts):
            q_owner = [0] * n
            for k, blk in enumerate(qp.blocks):
                for x in blk:
                    q_owner[x] = k
            for b, owner in zip(ncs, owners):
                got = partitions.kr_interval_meet(q, b)
                candidates = [c for c, cp in zip(combs, comb_parts)
                              if below(c, q_owner) and below(c, owner)]
                best = max(candidates, key=lambda c: len(c.q)).to_partition()
                if got != best:
                    return name, False, f"n={n}, Q={q!r}, beta={b!r}: {got!r} != {best!r}"
                checked += 1
            for rp in comb_parts:
                if partitions.kr_interval_meet(q, rp) != partitions.nc_meet(qp, rp):
                    return name, False, f"n={n}: comb meet differs from nc_meet at {q!r}, {rp!r}"
    return name, True, f"{checked} pairs, n<={n_max}"


def check_meet_join_duality(n_max: int = 7) -> CheckResult:
    name = "interval-join-kreweras-duality"
    checked = 0
    for n in range(1, n_max + 1):
        ncs = list(partitions.enumerate_nc(n))
        # memoize per distinct object: interval joins are determined by the
        # intersection of separator sets, Kr-interval meets by the block of n
        sep_masks = []
        kr_bn_masks = []
        for p in ncs:
            straddled = 0
            for blk in p.blocks:
                for i in range(blk[0], blk[-1]):
                    straddled |= 1 << i
            sep_masks.append(~straddled & ((1 << (n - 1)) - 1))
            bn = p.kreweras().block_containing(n - 1)
            kr_bn_masks.append(sum(1 << i for i in bn if i != n - 1))
        lhs_by_cuts: dict[int, partitions.NcPartition] = {}
        rhs_by_q: dict[int, partitions.NcPartition] = {}
        for xi, x in enumerate(ncs):
            for yi, y in enumerate(ncs):
                cuts = sep_masks[xi] & sep_masks[yi]
                if cuts not in lhs_by_cuts:
                    lhs_by_cuts[cuts] = partitions.interval_join(x, y).kreweras()
                qmask = kr_bn_masks[xi] & kr_bn_masks[yi]
                if qmask not in rhs_by_q:
                    rhs_by_q[qmask] = partitions.CombSubset(
                        n, [i for i in range(n - 1) if qmask >> i & 1]).to_partition()
                if lhs_by_cuts[cuts] != rhs_by_q[qmask]:
                    return name, False, f"n={n}, x={x!r}, y={y!r}: duality fails"
                checked += 1
    return name, True, f"{checked} pairs, n<={n_max}"


def check_comb_loop_formula(n_max: int = 8) -> CheckResult:
    name = "comb-loop-count-formula"
    checked = 0
    for n in range(1, n_max + 1):
        combs = list(partitions.enumerate_kr_interval(n))
        ncs = list(partitions.enumerate_nc(n))
        a_imgs = np.array([q.to_geodesic().images for q in combs], dtype=np.int16)
        b_imgs = np.array([b.to_geodesic().images for b in ncs], dtype=np.int16)
        direct = meanders.pairwise_cycle_counts(a_imgs, b_imgs)
        bn_sets = [frozenset(b.block_containing(n - 1)) for b in ncs]
        for qi, q in enumerate(combs):
            for bi, b in enumerate(ncs):
                if q.q & bn_sets[bi]:
                    continue
                formula = meanders.loop_count_comb(q, b)
                if formula != int(direct[qi, bi]):
                    return name, False, (f"n={n}, Q={q!r}, beta={b!r}: "
                                         f"{formula} != {int(direct[qi, bi])}")
                checked += 1
    return name, True, f"{checked} admissible pairs, n<={n_max}"


def check_subset_binomial(m_max: int = 10,
                          ab_values: tuple[int, ...] = (1, 2, 3)) -> CheckResult:
    name = "subset-binomial-identity"
    checked = 0
    vals = np.array(ab_values, dtype=np.int64)
    for m in range(1, m_max + 1):
        qs = np.arange(1 << m, dtype=np.int64)
        sizes = np.zeros(1 << m, dtype=np.int64)
        for i in range(m):
            sizes += (qs >> i) & 1
        a_pows = vals[:, None] ** sizes[None, :]            # (|vals|, 2^m)
        b_lut = vals[:, None] ** np.arange(m + 1)[None, :]  # (|vals|, m+1)
        # rhs factor per (A, B, block size): (A+1)^s + B - 1
        rhs_lut = ((vals + 1)[:, None, None] ** np.arange(m + 1)[None, None, :]
                   + vals[None, :, None] - 1)
        for blocks in set_partitions(m):
            masks = np.array([sum(1 << (x - 1) for x in blk) for blk in blocks],
                             dtype=np.int64)
            empties = np.sum((qs[None, :] & masks[:, None]) == 0, axis=0)
            lhs = a_pows @ b_lut[:, empties].T              # lhs[ai, bi]
            blk_sizes = np.array([len(blk) for blk in blocks])
            rhs = rhs_lut[:, :, blk_sizes].prod(axis=2)
            if not np.array_equal(lhs, rhs):
                ai, bi = (int(v[0]) for v in np.nonzero(lhs != rhs))
                return name, False, (f"m={m}, blocks={blocks}, A={int(vals[ai])}, "
                                     f"B={int(vals[bi])}: {int(lhs[ai, bi])} != "
                                     f"{int(rhs[ai, bi])}")
            checked += lhs.size
    return name, True, f"{checked} (partition, A, B) triples, m<={m_max}"


def check_kreweras_loop_invariance(n_max: int = 7) -> CheckResult:
    name = "kreweras-loop-invariance"
    checked = 0
    for n in range(1, n_max + 1):
        ncs = list(partitions.enumerate_nc(n))
        imgs = np.array([p.to_geodesic().images for p in ncs], dtype=np.int16)
        kr_imgs = np.array([p.kreweras().to_geodesic().images for p in ncs],
                           dtype=np.int16)
        plain = meanders.pairwise_cycle_counts(imgs, imgs)
        krd = meanders.pairwise_cycle_counts(kr_imgs, kr_imgs)
        if not np.array_equal(plain, krd):
            i, j = (int(v[0]) for v in np.nonzero(plain != krd))
            return name, False, (f"n={n}, alpha={ncs[i]!r}, beta={ncs[j]!r}: "
                                 f"{int(plain[i, j])} != {int(krd[i, j])}")
        checked += plain.size
    return name, True, f"{checked} pairs, n<={n_max}"


# ---------------------------------------------------------------------------
# Thin suite
# ---------------------------------------------------------------------------

def check_thin_closed_form(n_max: int = 12) -> CheckResult:
    name = "thin-closed-form"
    m, _ = transforms.thin_series(n_max)
    for n in range(1, n_max + 1):
        brute = meanders.generating_coefficient(MeanderClass.THIN, n)
        if m.coefficient(n) != brute:
            return name, False, f"n={n}: series {m.coefficient(n)!r} != brute {brute!r}"
    return name, True, f"coefficients equal, n<={n_max}"


def check_thin_distribution(n_max: int = 12) -> CheckResult:
    name = "thin-loop-distribution"
    for n in range(1, n_max + 1):
        poly = meanders.meander_polynomial(MeanderClass.THIN, n)
        for k in range(1, n + 1):
            want = meanders.thin_count(n, k)
            got = poly.coeffs.get(k, 0)
            if got != want:
                return name, False, f"n={n}, k={k}: {got} != {want}"
    return name, True, f"counts equal 2^(n-1) C(n-1,k-1), n<={n_max}"


def check_thin_cumulants(n_max: int = 8) -> CheckResult:
    name = "thin-cumulant-coefficients"
    _, k = transforms.thin_series(n_max)
    kernel = transforms.A * transforms.B + (transforms.A + transforms.B) * transforms.Y
    for n in range(1, n_max + 1):
        brute = meanders.cumulant_coefficient(MeanderClass.THIN, n)
        if brute != kernel ** (n - 1) or brute != k.coefficient(n):
            return name, False, f"n={n}: cumulant sum differs from (AB+(A+B)Y)^(n-1)"
    return name, True, f"kappa_n == (AB+(A+B)Y)^(n-1), n<={n_max}"


def check_thin_matrix_model(n_max: int = 16, l_max: int = 5) -> CheckResult:
    name = "thin-matrix-model-exact"
    for l in range(1, l_max + 1):
        for n in range(1, n_max + 1):
            got = matrix_models.thin_exact(n, l)   # asserts the closed form
            want = l * (2 + 2 * l) ** (n - 1)
            if got != want:
                return name, False, f"n={n}, l={l}: {got} != {want}"
    return name, True, f"integer equality, n<={n_max}, l<={l_max}"


def check_thin_matrix_vs_polynomial(n_max: int = 12, l_max: int = 3) -> CheckResult:
    name = "thin-matrix-model-vs-brute-force"
    for n in range(1, n_max + 1):
        poly = meanders.meander_polynomial(MeanderClass.THIN, n)
        for l in range(1, l_max + 1):
            got = matrix_models.thin_exact(n, l)
            want = poly.evaluate(l)
            if got != want:
                return name, False, f"n={n}, l={l}: {got} != {want}"
    return name, True, f"trace equals brute-force polynomial, n<={n_max}, l<={l_max}"


# ---------------------------------------------------------------------------
# Shallow-top suite
# ---------------------------------------------------------------------------

def check_shallow_top_series(n_max: int = 9) -> CheckResult:
    name = "shallow-top-series"
    m, _ = transforms.shallow_top_series(n_max)
    for n in range(1, n_max + 1):
        brute = meanders.generating_coefficient(MeanderClass.SHALLOW_TOP, n)
        if m.coefficient(n) != brute:
            return name, False, f"n={n}: series coefficient differs from brute force"
    return name, True, f"coefficients equal, n<={n_max}"


def check_shallow_top_cumulants(n_max: int = 8) -> CheckResult:
    name = "shallow-top-cumulant-coefficients"
    _, k = transforms.shallow_top_series(n_max)
    for n in range(1, n_max + 1):
        brute = meanders.cumulant_coefficient(MeanderClass.SHALLOW_TOP, n)
        if k.coefficient(n) != brute:
            return name, False, f"n={n}: K coefficient differs from Kr-pair sum"
    return name, True, f"kappa_n matches Kr-pair sum, n<={n_max}"


def check_shallow_top_meander_binomials(n_max: int = 9) -> CheckResult:
    name = "shallow-top-meander-binomials"
    m, _ = transforms.shallow_top_series(n_max)
    for n in range(1, n_max + 1):
        cn = m.coefficient(n).substitute(b=1)
        slice_by_adeg: dict[int, int] = {}
        for (ey, ea, _), c in cn.terms():
            if ey == n - 1:
                slice_by_adeg[ea] = slice_by_adeg.get(ea, 0) + c
        for mm in range(1, n + 1):
            got = slice_by_adeg.get(n - mm, 0)
            want = meanders.shallow_top_meander_count(n, mm)
            if got != want:
                return name, False, f"n={n}, m={mm}: coefficient {got} != {want}"
    return name, True, f"[X^n Y^(n-1) A^(n-m)] M(X,Y,A,1) == shallow_top_meander_count, n<={n_max}"


# ---------------------------------------------------------------------------
# Semi suite
# ---------------------------------------------------------------------------

def check_semi_series(n_max: int = 14) -> CheckResult:
    name = "semi-meander-series"
    s = transforms.semi_meander_series(n_max)
    for n in range(1, n_max + 1):
        brute = meanders.generating_coefficient(MeanderClass.SEMI, n).substitute(b=1)
        if s.coefficient(n) != brute:
            return name, False, f"n={n}: series coefficient differs from brute force"
    return name, True, f"coefficients equal, n<={n_max}"


def check_semi_distribution(n_max: int = 14) -> CheckResult:
    name = "semi-loop-distribution"
    for n in range(1, n_max + 1):
        closed = dict(meanders.semi_loop_distribution(n).coeffs)
        brute = dict(meanders.meander_polynomial(MeanderClass.SEMI, n).coeffs)
        if closed != brute:
            return name, False, f"n={n}: {closed} != {brute}"
        if closed.get(1, 0) != 2 ** ((n + 1) // 2 - 1):
            return name, False, f"n={n}: semi-meander count {closed.get(1, 0)}"
    return name, True, f"two-case formula and 2^(ceil(n/2)-1) count, n<={n_max}"


# ---------------------------------------------------------------------------
# Transform suite
# ---------------------------------------------------------------------------

def _random_series(order: int, rng: random.Random) -> TruncSeries:
    def poly(_):
        return LaurentPoly({(rng.randint(0, 3), rng.randint(0, 3), rng.randint(0, 3)):
                            rng.randint(-9, 9) for _ in range(3)})
    return TruncSeries.from_function(order, poly)


def check_transform_round_trips(order: int = 12, trials: int = 8) -> CheckResult:
    name = "transform-round-trips"
    rng = random.Random(_SEED)
    for t in range(trials):
        s = _random_series(order, rng)
        if transforms.boolean_inverse(transforms.boolean_transform(s)) != s:
            return name, False, f"boolean round trip failed on trial {t}"
        if transforms.free_inverse(transforms.free_transform(s)) != s:
            return name, False, f"free round trip failed on trial {t}"
    return name, True, f"{trials} random series, exact to order {order}"


_profile_cache: dict[tuple[str, int], dict[tuple, int]] = {}


def _size_profiles(kind: str, n: int) -> dict[tuple, int]:
    """Multiplicities of block-size profiles over Int(n) or NC(n); for
    kind 'nc-last' the profile is (|block of n|, sorted other sizes)."""
    key = (kind, n)
    if key not in _profile_cache:
        profiles: dict[tuple, int] = {}
        if kind == "interval":
            parts = partitions.enumerate_interval(n)
        else:
            parts = partitions.enumerate_nc(n)
        for p in parts:
            if kind == "nc-last":
                last = len(p.block_containing(n - 1))
                rest = tuple(sorted(len(b) for b in p.blocks if n - 1 not in b))
                prof: tuple = (last, rest)
            else:
                prof = tuple(sorted(len(b) for b in p.blocks))
            profiles[prof] = profiles.get(prof, 0) + 1
        _profile_cache[key] = profiles
    return _profile_cache[key]


def check_moment_cumulant_oracle(order: int = 10, trials: int = 4) -> CheckResult:
    name = "moment-cumulant-definition"
    rng = random.Random(_SEED + 1)
    for t in range(trials):
        s = _random_series(order, rng)
        kappas = {i: s.coefficient(i) for i in range(1, order + 1)}
        mb = transforms.boolean_transform(s)
        mf = transforms.free_transform(s)
        for n in range(1, order + 1):
            for series, kind in ((mb, "interval"), (mf, "nc")):
                total = transforms.ZERO
                for prof, count in _size_profiles(kind, n).items():
                    prod = transforms.ONE * count
                    for size in prof:
                        prod = prod * kappas[size]
                    total = total + prod
                if series.coefficient(n) != total:
                    return name, False, f"trial {t}, n={n}: partition sum differs"
    return name, True, f"{trials} random cumulant series, order {order}"


def check_last_block_sum(order: int = 8) -> CheckResult:
    name = "last-block-composition"
    rng = random.Random(_SEED + 2)
    h = _random_series(order, rng)
    g = _random_series(order, rng)
    lhs = transforms.last_block_sum(h, g)
    hc = {i: h.coefficient(i) for i in range(1, order + 1)}
    gc = {i: g.coefficient(i) for i in range(1, order + 1)}
    for n in range(1, order + 1):
        total = transforms.ZERO
        for (last, rest), count in _size_profiles("nc-last", n).items():
            term = hc[last] * count
            for size in rest:
                term = term * gc[size]
            total = total + term
        if lhs.coefficient(n) != total:
            return name, False, f"n={n}: composition differs from block sum"
    return name, True, f"h(X(1+g_hat)) equals the block sum, order {order}"


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

_Check = Callable[..., CheckResult]

SUITES: dict[str, list[tuple[_Check, str]]] = {
    "lemmas": [
        (check_krint_combs, "n_max"),
        (check_kr_interval_meet, "n_max"),
        (check_meet_join_duality, "n_max"),
        (check_comb_loop_formula, "n_max"),
        (check_subset_binomial, "m_max"),
        (check_kreweras_loop_invariance, "n_max"),
    ],
    "thin": [
        (check_thin_closed_form, "n_max"),
        (check_thin_distribution, "n_max"),
        (check_thin_cumulants, "n_max"),
        (check_thin_matrix_model, "n_max"),
        (check_thin_matrix_vs_polynomial, "n_max"),
    ],
    "shallow-top": [
        (check_shallow_top_series, "n_max"),
        (check_shallow_top_cumulants, "n_max"),
        (check_shallow_top_meander_binomials, "n_max"),
    ],
    "semi": [
        (check_semi_series, "n_max"),
        (check_semi_distribution, "n_max"),
    ],
    "transforms": [
        (check_transform_round_trips, "order"),
        (check_moment_cumulant_oracle, "order"),
        (check_last_block_sum, "order"),
    ],
}


def run_suite(suite: str, budget: int | None = None) -> list[CheckResult]:
    """Run one named suite (or 'all'); budget overrides each check's cap."""
    names = list(SUITES) if suite == "all" else [suite]
    results = []
    for nm in names:
        for fn, cap_kw in SUITES[nm]:
            kwargs = {cap_kw: budget} if budget is not None else {}
            results.append(fn(**kwargs))
    return results
