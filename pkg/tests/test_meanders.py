import itertools
import random

import pytest

from meandrics.meanders import (
    DEFAULT_BUDGETS,
    MeanderClass,
    MeetNotTrivialError,
    ResourceLimitError,
    binomial_lemma_check,
    cumulant_coefficient,
    generating_coefficient,
    shallow_top_meander_count,
    loop_count,
    loop_count_comb,
    meander_polynomial,
    pairwise_cycle_counts,
    rainbow,
    semi_loop_distribution,
    thin_count,
)
from meandrics.meanders import _geodesic_rows, _pair_scan
from meandrics.partitions import (
    CombSubset,
    NcPartition,
    catalan,
    enumerate_interval,
    enumerate_kr_interval,
    enumerate_nc,
)
from meandrics.transforms import A, B, LaurentPoly, ONE, Y


class TestLoopCount:
    def test_worked_example(self):
        a = NcPartition.from_one_based(5, [[1, 2], [3, 4, 5]])
        b = NcPartition.from_one_based(5, [[1, 2, 4], [3], [5]])
        assert loop_count(a, b) == 2

    def test_equal_partitions_give_n_loops(self):
        for n in range(1, 7):
            for x in enumerate_nc(n):
                assert loop_count(x, x) == n

    def test_kreweras_invariance(self):
        for n in range(1, 7):
            ncs = list(enumerate_nc(n))
            for a, b in itertools.product(ncs, repeat=2):
                assert loop_count(a, b) == loop_count(a.kreweras(), b.kreweras())

    def test_parity(self):
        for n in range(1, 7):
            ncs = list(enumerate_nc(n))
            for a, b in itertools.product(ncs, repeat=2):
                k = loop_count(a, b)
                assert (n - k) % 2 == (a.norm() + b.norm()) % 2

    def test_comb_xor_identity(self):
        # #(comb(Q)~ comb(R)) == n - |Q xor R|
        for n in range(2, 9):
            combs = list(enumerate_kr_interval(n))
            for q in combs:
                for r in combs:
                    got = loop_count(q.to_partition(), r.to_partition())
                    assert got == n - len(q.q ^ r.q)

    def test_pairwise_kernel_matches_scalar(self):
        rnd = random.Random(3)
        for n in (2, 4, 6, 8):
            ncs = list(enumerate_nc(n))
            sample = [rnd.choice(ncs) for _ in range(12)]
            imgs, _ = _geodesic_rows(sample)
            table = pairwise_cycle_counts(imgs, imgs)
            for i, a in enumerate(sample):
                for j, b in enumerate(sample):
                    assert int(table[i, j]) == loop_count(a, b)


class TestLoopCountComb:
    def test_empty_comb_on_singletons(self):
        for n in range(1, 9):
            assert loop_count_comb(CombSubset(n, []), NcPartition.singletons(n)) == n

    def test_empty_comb_counts_blocks(self):
        for n in range(1, 8):
            for b in enumerate_nc(n):
                assert loop_count_comb(CombSubset(n, []), b) == b.block_count()

    def test_formula_matches_direct_count(self):
        for n in range(1, 7):
            ncs = list(enumerate_nc(n))
            for q in enumerate_kr_interval(n):
                qp = q.to_partition()
                for b in ncs:
                    if q.q & set(b.block_containing(n - 1)):
                        with pytest.raises(MeetNotTrivialError):
                            loop_count_comb(q, b)
                    else:
                        assert loop_count_comb(q, b) == loop_count(qp, b)


class TestRainbow:
    def test_examples(self):
        assert rainbow(6).to_one_based() == [[1, 6], [2, 5], [3, 4]]
        assert rainbow(6).kreweras().to_one_based() == [[1, 5], [2, 4], [3], [6]]
        assert rainbow(7).to_one_based() == [[1, 7], [2, 6], [3, 5], [4]]
        assert rainbow(7).kreweras().to_one_based() == [[1, 6], [2, 5], [3, 4], [7]]
        assert rainbow(1).to_one_based() == [[1]]

    @pytest.mark.parametrize("n", range(2, 14))
    def test_kreweras_structure(self, n):
        kr = rainbow(n).kreweras()
        blocks = kr.to_one_based()
        assert [n] in blocks
        singles = [b for b in blocks if len(b) == 1]
        if n % 2 == 0:
            assert sorted(singles) == [[n // 2], [n]]
        else:
            assert singles == [[n]]
        assert all(len(b) in (1, 2) for b in blocks)


class TestMeanderPolynomial:
    def test_order_one_all_classes(self):
        for klass in MeanderClass:
            poly = meander_polynomial(klass, 1)
            assert dict(poly.coeffs) == {1: 1}

    def test_full_n2(self):
        assert dict(meander_polynomial(MeanderClass.FULL, 2).coeffs) == {1: 2, 2: 2}

    def test_totals(self):
        for n in range(1, 7):
            assert meander_polynomial(MeanderClass.FULL, n).total() == catalan(n) ** 2
            assert meander_polynomial(MeanderClass.SHALLOW_TOP, n).total() == \
                2 ** (n - 1) * catalan(n)
            assert meander_polynomial(MeanderClass.THIN, n).total() == 4 ** (n - 1)
            assert meander_polynomial(MeanderClass.SEMI, n).total() == 2 ** (n - 1)

    def test_thin_matches_closed_count(self):
        for n in range(1, 9):
            poly = meander_polynomial(MeanderClass.THIN, n)
            for k in range(1, n + 1):
                assert poly.coeffs.get(k, 0) == thin_count(n, k)

    def test_budget(self):
        with pytest.raises(ResourceLimitError):
            meander_polynomial(MeanderClass.FULL, DEFAULT_BUDGETS[MeanderClass.FULL] + 1)
        with pytest.raises(ValueError):
            meander_polynomial(MeanderClass.FULL, 0)
        # explicit budget raises the cap
        poly = meander_polynomial(MeanderClass.SEMI, 17, budget=17)
        assert poly.total() == 2 ** 16

    def test_evaluate_and_json(self):
        poly = meander_polynomial(MeanderClass.THIN, 3)
        assert poly.evaluate(1) == 16
        assert poly.evaluate(2) == 2 * (2 + 2 * 2) ** 2
        assert poly.to_json() == {"n": 3, "class": "thin",
                                  "coeffs": {"1": 4, "2": 8, "3": 4}}
        assert poly.csv_rows() == [(3, 1, 4), (3, 2, 8), (3, 3, 4)]


class TestGeneratingCoefficient:
    def test_thin_n2(self):
        assert generating_coefficient(MeanderClass.THIN, 2) == ONE + A * B + (A + B) * Y

    def test_order_one(self):
        for klass in MeanderClass:
            assert generating_coefficient(klass, 1) == ONE

    def test_shallow_top_n3_has_twenty_pairs(self):
        poly = generating_coefficient(MeanderClass.SHALLOW_TOP, 3)
        assert poly.evaluate(1, 1, 1) == 20

    def test_y_marginal_recovers_loop_polynomial(self):
        for klass in MeanderClass:
            for n in range(1, 6):
                poly = generating_coefficient(klass, n).substitute(a=1, b=1)
                marginal = {}
                for (ey, _, _), c in poly.terms():
                    marginal[n - ey] = marginal.get(n - ey, 0) + c
                assert marginal == dict(meander_polynomial(klass, n).coeffs)

    def test_kreweras_primed_exponents(self):
        # the joint distribution is unchanged by passing to Kreweras
        # complements with the primed exponent convention
        for klass in (MeanderClass.THIN, MeanderClass.SHALLOW_TOP, MeanderClass.FULL):
            for n in range(1, 7):
                if klass is MeanderClass.FULL:
                    a_parts = [p.kreweras() for p in enumerate_nc(n)]
                    b_parts = [p.kreweras() for p in enumerate_nc(n)]
                elif klass is MeanderClass.SHALLOW_TOP:
                    a_parts = [p.kreweras() for p in enumerate_interval(n)]
                    b_parts = [p.kreweras() for p in enumerate_nc(n)]
                else:
                    a_parts = [p.kreweras() for p in enumerate_interval(n)]
                    b_parts = a_parts
                a_imgs, a_blocks = _geodesic_rows(a_parts)
                b_imgs, b_blocks = _geodesic_rows(b_parts)
                hist = _pair_scan(a_imgs, (n - 1) - (n - a_blocks),
                                  b_imgs, (n - 1) - (n - b_blocks), n)
                primed = LaurentPoly({(n - k, a, b): c
                                      for (k, a, b), c in hist.items()})
                assert primed == generating_coefficient(klass, n)


class TestCumulantCoefficient:
    def test_thin_closed_form(self):
        kernel = A * B + (A + B) * Y
        for n in range(1, 8):
            assert cumulant_coefficient(MeanderClass.THIN, n) == kernel ** (n - 1)

    def test_order_one(self):
        assert cumulant_coefficient(MeanderClass.SHALLOW_TOP, 1) == ONE

    def test_rejects_other_classes(self):
        with pytest.raises(ValueError):
            cumulant_coefficient(MeanderClass.FULL, 3)
        with pytest.raises(ValueError):
            cumulant_coefficient(MeanderClass.SEMI, 3)


class TestBinomialLemma:
    def test_single_block(self):
        for m in (1, 2, 5):
            lhs, rhs = binomial_lemma_check([range(1, m + 1)], 3, 7)
            assert lhs == rhs == 4 ** m + 6

    def test_m1(self):
        assert binomial_lemma_check([[1]], 5, 11) == (16, 16)

    def test_random_crossing_partitions(self):
        rnd = random.Random(11)
        for _ in range(25):
            m = rnd.randint(2, 12)
            labels = list(range(1, m + 1))
            rnd.shuffle(labels)
            nblocks = rnd.randint(1, m)
            blocks = [[] for _ in range(nblocks)]
            for i, x in enumerate(labels):
                blocks[i % nblocks].append(x)
            for a_val in (2, 3, 5):
                for b_val in (2, 3, 5):
                    lhs, rhs = binomial_lemma_check(blocks, a_val, b_val)
                    assert lhs == rhs

    def test_overlap_rejected(self):
        with pytest.raises(ValueError):
            binomial_lemma_check([[1, 2], [2, 3]], 1, 1)


class TestClosedCounts:
    def test_thin_count_small(self):
        assert thin_count(2, 1) == 2 and thin_count(2, 2) == 2
        with pytest.raises(ValueError):
            thin_count(3, 4)

    def test_semi_distribution_n3(self):
        assert dict(semi_loop_distribution(3).coeffs) == {1: 2, 2: 2}

    def test_semi_distribution_matches_bruteforce(self):
        for n in range(1, 11):
            assert dict(semi_loop_distribution(n).coeffs) == \
                dict(meander_polynomial(MeanderClass.SEMI, n).coeffs)

    def test_semi_meander_count(self):
        for n in range(1, 15):
            assert semi_loop_distribution(n).coeffs.get(1, 0) == \
                2 ** ((n + 1) // 2 - 1)

    def test_shallow_top_meander_count_values(self):
        assert shallow_top_meander_count(1, 1) == 1
        assert [shallow_top_meander_count(3, m) for m in (1, 2, 3)] == [1, 4, 1]
        assert [shallow_top_meander_count(4, m) for m in (1, 2, 3, 4)] == [1, 10, 9, 1]
        for n in range(1, 13):
            for m in range(1, n + 1):
                assert shallow_top_meander_count(n, m) >= 1
        with pytest.raises(ValueError):
            shallow_top_meander_count(3, 0)

    def test_shallow_top_meander_count_matches_bruteforce(self):
        for n in range(1, 8):
            poly = generating_coefficient(MeanderClass.SHALLOW_TOP, n).substitute(b=1)
            by_adeg = {}
            for (ey, ea, _), c in poly.terms():
                if ey == n - 1:
                    by_adeg[ea] = by_adeg.get(ea, 0) + c
            for m in range(1, n + 1):
                assert by_adeg.get(n - m, 0) == shallow_top_meander_count(n, m)


class TestDeterminism:
    def test_thread_split_invariance(self, monkeypatch):
        from meandrics import meanders as mod
        mod._pair_histogram.cache_clear()
        serial = generating_coefficient(MeanderClass.SHALLOW_TOP, 7)
        monkeypatch.setenv("MEANDER_THREADS", "3")
        mod._pair_histogram.cache_clear()
        threaded = generating_coefficient(MeanderClass.SHALLOW_TOP, 7)
        mod._pair_histogram.cache_clear()
        assert serial == threaded
