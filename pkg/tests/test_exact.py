import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boolpred.boolfn import (
    TruthTable,
    constant,
    dictator,
    from_hex,
    majority,
    parity,
    threshold,
)
from boolpred.bounds import gaussian_entropy_approx
from boolpred.exact import (
    EmptyPreimageError,
    apply_channel,
    cond_entropy,
    cond_entropy_symmetric,
    h_maj_given_y,
    loss_value,
    mutual_information,
    output_distribution,
    prefix_levels,
    seq_cost,
    seq_cost_auto,
    seq_cost_batch,
    seq_cost_noiseless,
    seq_cost_symmetric,
    smse_channel_compose_check,
    tmaj_marginal,
)
from boolpred.numerics import LN2, binent

ALPHA_GRID = [round(0.05 * i, 2) for i in range(11)]


def oracle_joint(bits, alpha):
    """P[Y^n = y, b = v] by direct summation over (x, y), in exact rationals."""
    n = int(len(bits)).bit_length() - 1
    alpha = Fraction(alpha)
    xs = list(itertools.product((0, 1), repeat=n))
    joint = {0: {}, 1: {}}
    for y in xs:
        for v in (0, 1):
            total = Fraction(0)
            for x, bx in zip(xs, bits):
                if bx != v:
                    continue
                flips = sum(a != b for a, b in zip(x, y))
                total += alpha ** flips * (1 - alpha) ** (n - flips)
            joint[v][y] = total / 2 ** n
    return joint


def oracle_smse(bits, alpha):
    """Per-step SMSE sum_y P(y^{k-1}, v) Q(1-Q) from the explicit joint law."""
    n = int(len(bits)).bit_length() - 1
    joint = oracle_joint(bits, alpha)
    steps = []
    for k in range(1, n + 1):
        acc = Fraction(0)
        for v in (0, 1):
            for prefix in itertools.product((0, 1), repeat=k - 1):
                p = [sum(pr for y, pr in joint[v].items() if y[:k] == prefix + (c,)) for c in (0, 1)]
                if p[0] + p[1]:
                    q = p[1] / (p[0] + p[1])
                    acc += (p[0] + p[1]) * q * (1 - q)
        steps.append(acc)
    return steps


def random_table(rng, n):
    return TruthTable(n, rng.integers(0, 2, 1 << n))


class TestOutputDistribution:
    def test_noiseless_uniform_on_preimage(self):
        b = majority(3).expand()
        d = output_distribution(b, 1, 0)
        np.testing.assert_allclose(d, b.bits / 4)

    def test_fully_noisy(self):
        rng = np.random.default_rng(1)
        for n in range(1, 8):
            b = random_table(rng, n)
            for v in (0, 1):
                if (b.bits == v).any():
                    np.testing.assert_allclose(output_distribution(b, v, 0.5), 2.0 ** -n, atol=1e-15)

    def test_dictator_product_law(self):
        d = output_distribution(dictator(2, 1), 1, 0.1).reshape(2, 2)
        np.testing.assert_allclose(d.sum(axis=1), [0.1, 0.9])
        np.testing.assert_allclose(d, np.outer([0.1, 0.9], [0.5, 0.5]), atol=1e-15)

    def test_empty_preimage(self):
        with pytest.raises(EmptyPreimageError):
            output_distribution(constant(3, 1), 0, 0.1)

    def test_exact_matches_oracle(self):
        b = from_hex(3, "6A")
        d = output_distribution(b, 1, Fraction(1, 5), exact=True)
        joint = oracle_joint(b.bits.tolist(), Fraction(1, 5))
        pv = Fraction(b.weight, 8)
        ys = list(itertools.product((0, 1), repeat=3))
        assert [d[i] for i in range(8)] == [joint[1][y] / pv for y in ys]

    def test_channel_batch(self):
        rng = np.random.default_rng(2)
        batch = rng.random((5, 16))
        batch /= batch.sum(axis=1, keepdims=True)
        out = apply_channel(batch, 0.2, 4)
        for row_in, row_out in zip(batch, out):
            np.testing.assert_allclose(apply_channel(row_in, 0.2, 4), row_out)


class TestMarginalisation:
    @pytest.mark.parametrize("n", [1, 3, 6, 9])
    def test_float_levels(self, n):
        rng = np.random.default_rng(n)
        b = TruthTable(n, np.r_[1, rng.integers(0, 2, (1 << n) - 1)])
        dist = output_distribution(b, 1, 0.15)
        levels = prefix_levels(dist, n)
        for k in range(n):
            assert levels[k].sum() == pytest.approx(1.0, abs=1e-12)
            sums = levels[k + 1].reshape(-1, 2).sum(axis=1)
            np.testing.assert_allclose(levels[k], sums, atol=1e-12)

    def test_exact_levels(self):
        b = majority(4).expand()
        dist = output_distribution(b, 0, Fraction(1, 7), exact=True)
        levels = prefix_levels(dist, 4)
        for k in range(4):
            assert sum(levels[k].tolist()) == 1
            nxt = levels[k + 1].tolist()
            assert levels[k].tolist() == [nxt[2 * i] + nxt[2 * i + 1] for i in range(len(nxt) // 2)]


class TestSeqCostExamples:
    def test_majority3(self):
        r = seq_cost_noiseless(majority(3).expand())
        assert r.total == Fraction(23, 48)
        assert r.per_step == (Fraction(3, 16), Fraction(1, 6), Fraction(1, 8))
        assert seq_cost(majority(3), 0, exact=True).total == Fraction(23, 48)
        assert float(r.total) == pytest.approx(0.4792, abs=1e-4)

    @pytest.mark.parametrize("n", range(1, 21))
    def test_dictator_noiseless(self, n):
        assert seq_cost_noiseless(dictator(n, 1)).total == Fraction(n - 1, 4)

    def test_dictator5(self):
        assert seq_cost_noiseless(dictator(5, 1)).total == 1

    @pytest.mark.parametrize("n", range(1, 11))
    def test_parity(self, n):
        assert seq_cost_noiseless(parity(n).expand()).total == Fraction(n - 1, 4)
        assert seq_cost_symmetric(parity(n), 0, exact=True).total == Fraction(n - 1, 4)

    @pytest.mark.parametrize("alpha", ALPHA_GRID)
    def test_constant(self, alpha):
        for n in (1, 4, 7):
            assert seq_cost(constant(n, 1), alpha).total == pytest.approx(n / 4, abs=1e-12)

    @pytest.mark.parametrize("alpha", ALPHA_GRID)
    def test_dictator_noisy(self, alpha):
        for n in (1, 2, 5, 8):
            for i in (1, n):
                expected = (n - (1 - 2 * alpha) ** 2) / 4
                assert seq_cost(dictator(n, i), alpha).total == pytest.approx(expected, abs=1e-12)

    def test_exact_rational_dictator(self):
        a = Fraction(1, 10)
        assert seq_cost(dictator(4, 2), a, exact=True).total == (4 - (1 - 2 * a) ** 2) / 4


class TestAgainstOracle:
    @pytest.mark.parametrize("alpha", [Fraction(0), Fraction(1, 10), Fraction(1, 3), Fraction(1, 2)])
    def test_small_functions(self, alpha):
        rng = np.random.default_rng(7)
        tables = [majority(3).expand(), dictator(3, 2), from_hex(2, "6")]
        tables += [random_table(rng, n) for n in (1, 2, 3, 3)]
        for b in tables:
            expected = oracle_smse(b.bits.tolist(), alpha)
            r = seq_cost(b, alpha, exact=True)
            assert list(r.per_step) == expected
            np.testing.assert_allclose(seq_cost(b, float(alpha)).per_step,
                                       [float(e) for e in expected], atol=1e-14)

    def test_noiseless_engine_matches_dense(self):
        rng = np.random.default_rng(8)
        for n in range(1, 9):
            for _ in range(5):
                b = random_table(rng, n)
                assert seq_cost_noiseless(b).per_step == seq_cost(b, 0, exact=True).per_step

    def test_batch_matches_single(self):
        rng = np.random.default_rng(9)
        bits = rng.integers(0, 2, (20, 32))
        out = seq_cost_batch(bits, 0.17)
        for row, b in zip(out, bits):
            np.testing.assert_allclose(row, seq_cost(TruthTable(5, b), 0.17).per_step, atol=1e-14)


class TestReportInvariants:
    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 8), st.integers(0, 2 ** 32 - 1),
           st.floats(min_value=0.0, max_value=0.5))
    def test_structure(self, n, seed, alpha):
        b = random_table(np.random.default_rng(seed), n)
        r = seq_cost(b, alpha)
        assert r.total == pytest.approx(sum(r.per_step), abs=1e-12)
        assert all(-1e-15 <= s <= 0.25 + 1e-15 for s in r.per_step)
        assert 0 <= r.total <= n / 4 + 1e-12
        p1 = b.weight / 2 ** n
        parts = [w * t for w, t in ((1 - p1, r.by_value[0]), (p1, r.by_value[1])) if t is not None]
        assert r.total == pytest.approx(sum(parts), abs=1e-12)

    def test_exact_structure(self):
        r = seq_cost(majority(4), Fraction(1, 6), exact=True)
        assert r.total == r.prob_one * r.by_value[1] + (1 - r.prob_one) * r.by_value[0]


class TestInvariance:
    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 8), st.integers(0, 2 ** 32 - 1))
    def test_complement_exact(self, n, seed):
        b = random_table(np.random.default_rng(seed), n)
        assert seq_cost_noiseless(b).total == seq_cost_noiseless(~b).total
        assert seq_cost(b, Fraction(1, 5), exact=True).total == seq_cost(~b, Fraction(1, 5), exact=True).total

    def test_symmetric_permutation_exact(self):
        for s in (majority(4), threshold(4, 3), parity(4)):
            t = s.expand()
            ref = seq_cost(t, Fraction(1, 8), exact=True).total
            for perm in itertools.permutations(range(4)):
                assert seq_cost(t.permute(perm), Fraction(1, 8), exact=True).total == ref

    def test_permuted_per_step_matches_oracle(self):
        rng = np.random.default_rng(11)
        b = random_table(rng, 3)
        for perm in itertools.permutations(range(3)):
            pb = b.permute(perm)
            assert list(seq_cost(pb, Fraction(1, 4), exact=True).per_step) == \
                oracle_smse(pb.bits.tolist(), Fraction(1, 4))

    def test_log_total_permutation_invariant(self):
        rng = np.random.default_rng(12)
        b = random_table(rng, 5)
        ref = seq_cost(b, 0.2, "log").total
        for perm in itertools.permutations(range(5)):
            assert seq_cost(b.permute(perm), 0.2, "log").total == pytest.approx(ref, abs=1e-12)


class TestSymmetricEngine:
    def test_majority3_exact(self):
        assert seq_cost_symmetric(majority(3), 0, exact=True).total == Fraction(23, 48)
        assert seq_cost_symmetric(majority(3), 0).total == pytest.approx(23 / 48, abs=1e-12)

    @pytest.mark.parametrize("n", [1, 5, 40, 301])
    def test_fully_noisy(self, n):
        assert seq_cost_symmetric(majority(n), 0.5).total == pytest.approx(n / 4, abs=1e-12)

    @pytest.mark.parametrize("n", range(1, 11))
    def test_matches_dense(self, n):
        for s in (majority(n), parity(n), threshold(n, 1 + n // 3)):
            for alpha in (0.0, 0.05, 0.25, 0.45):
                dense = seq_cost(s.expand(), alpha)
                fast = seq_cost_symmetric(s, alpha)
                np.testing.assert_allclose(fast.per_step, dense.per_step, atol=1e-10)

    def test_exact_rational_matches_dense(self):
        for s in (majority(5), threshold(5, 4)):
            a = Fraction(1, 7)
            assert seq_cost_symmetric(s, a, exact=True).per_step == seq_cost(s, a, exact=True).per_step

    def test_log_loss(self):
        for n in (3, 6, 9):
            s = majority(n)
            fast = seq_cost_symmetric(s, 0.2, "log").total
            assert fast == pytest.approx(cond_entropy(s, 0.2), abs=1e-10)
            assert cond_entropy_symmetric(s, 0.2) == pytest.approx(fast, abs=1e-10)

    def test_auto_dispatch(self):
        assert seq_cost_auto(majority(3), 0, exact=True).total == Fraction(23, 48)
        assert seq_cost_auto(dictator(4, 1), 0, exact=True).total == Fraction(3, 4)


class TestEntropy:
    @pytest.mark.parametrize("alpha", [0.0, 0.1, 0.3, 0.5])
    def test_dictator(self, alpha):
        for n in (1, 4, 8):
            assert cond_entropy(dictator(n, 1), alpha) == pytest.approx(n - 1 + binent(alpha), abs=1e-12)

    def test_balanced_noiseless(self):
        rng = np.random.default_rng(3)
        for n in (2, 5, 8):
            bits = np.zeros(1 << n, dtype=np.uint8)
            bits[rng.permutation(1 << n)[: 1 << (n - 1)]] = 1
            assert cond_entropy(TruthTable(n, bits), 0) == pytest.approx(n - 1, abs=1e-12)

    def test_constant(self):
        assert cond_entropy(constant(5, 0), 0.2) == pytest.approx(5, abs=1e-12)
        assert mutual_information(constant(5, 0), 0.2) == 0

    def test_mutual_information(self):
        assert mutual_information(dictator(3, 1), 0.1) == pytest.approx(1 - binent(0.1), abs=1e-10)
        assert 1 - binent(0.1) == pytest.approx(0.5310, abs=1e-4)
        v = mutual_information(majority(5), 0.1)
        assert 0 < v < 1 - binent(0.1)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 7), st.integers(0, 2 ** 32 - 1), st.floats(min_value=0.0, max_value=0.5))
    def test_log_loss_equals_entropy(self, n, seed, alpha):
        b = random_table(np.random.default_rng(seed), n)
        assert seq_cost(b, alpha, "log").total == pytest.approx(cond_entropy(b, alpha), abs=1e-10)

    def test_loss_value(self):
        assert loss_value("quad", 1, 0.25) == 0.5625
        assert loss_value("log", 1, 0.5) == 1.0
        assert loss_value("log", 0, 1.0) == math.inf


class TestMajorityGivenOutput:
    def test_endpoints(self):
        for n in (1, 5, 11):
            assert h_maj_given_y(n, 0) == pytest.approx(0.0, abs=1e-12)
            assert h_maj_given_y(n, 0.5) == pytest.approx(1.0, abs=1e-12)

    def test_direct_posterior_oracle(self):
        n, alpha = 5, 0.2
        ys = list(itertools.product((0, 1), repeat=n))
        expected = 0.0
        for y in ys:
            p_one = p_all = 0.0
            for x in ys:
                flips = sum(a != b for a, b in zip(x, y))
                w = alpha ** flips * (1 - alpha) ** (n - flips) / 2 ** n
                p_all += w
                if sum(x) > n / 2:
                    p_one += w
            expected += p_all * binent(p_one / p_all)
        assert h_maj_given_y(n, alpha) == pytest.approx(expected, abs=1e-12)

    def test_gaussian_proximity(self):
        assert abs(h_maj_given_y(11, 0.3) - gaussian_entropy_approx(0.3)) < 0.05

    def test_even_rejected(self):
        with pytest.raises(ValueError):
            h_maj_given_y(4, 0.1)


class TestChannelComposition:
    def test_scalar_example(self):
        left, right = smse_channel_compose_check([0.7, 0.3], 0.1)
        assert left == pytest.approx(0.2244, abs=1e-12)
        assert right == pytest.approx(0.2244, abs=1e-12)

    def test_product_law_equality(self):
        beta, n = 0.35, 3
        dist = np.array([beta ** sum(x) * (1 - beta) ** (n - sum(x))
                         for x in itertools.product((0, 1), repeat=n)])
        left, right = smse_channel_compose_check(dist, 0.2)
        assert left == pytest.approx(right, abs=1e-12)

    def test_fully_noisy(self):
        dist = np.random.default_rng(4).dirichlet(np.ones(16))
        assert smse_channel_compose_check(dist, 0.5)[0] == pytest.approx(1.0, abs=1e-12)

    def test_random_laws(self):
        rng = np.random.default_rng(5)
        violations = 0
        for _ in range(200):
            n = int(rng.integers(1, 9))
            dist = rng.dirichlet(np.full(1 << n, 0.3))
            alpha = float(rng.uniform(0, 0.5))
            left, right = smse_channel_compose_check(dist, alpha)
            violations += left < right - 1e-12
        assert violations == 0


def tmaj_oracle(n, t):
    support = [x for x in itertools.product((0, 1), repeat=n) if sum(x) >= t * n]
    return Fraction(sum(x[0] for x in support), len(support))


class TestTMajority:
    def test_examples(self):
        assert tmaj_marginal(3, Fraction(1, 2)) == Fraction(3, 4)
        for n in (1, 5, 30):
            assert tmaj_marginal(n, 0) == Fraction(1, 2)
            assert tmaj_marginal(n, 1) == 1

    def test_enumeration(self):
        for n in range(1, 9):
            for t in (Fraction(k, 8) for k in range(9)):
                assert tmaj_marginal(n, t) == tmaj_oracle(n, t)

    def test_lower_bound(self):
        bad = []
        for n in range(1, 41):
            for k in range(21):
                t = Fraction(k, 20)
                if tmaj_marginal(n, t) < max(Fraction(1, 2), t):
                    bad.append((n, t))
        assert bad == []


class TestCertifiedBounds:
    def test_noisy_lower_bound_random(self):
        rng = np.random.default_rng(6)
        violations = 0
        for _ in range(60):
            n = int(rng.integers(1, 13))
            b = random_table(rng, n)
            for alpha in (0.0, 0.1, 0.3, 0.5):
                lb = (n - 2 * LN2 * (1 - 2 * alpha) ** 2) / 4
                violations += seq_cost(b, alpha).total < lb - 1e-12
        assert violations == 0

    def test_noiseless_lower_bound_random(self):
        rng = np.random.default_rng(10)
        for _ in range(60):
            n = int(rng.integers(1, 13))
            b = random_table(rng, n)
            assert seq_cost_noiseless(b).total >= (n - 2 * LN2) / 4
