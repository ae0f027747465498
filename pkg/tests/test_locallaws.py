import math
from fractions import Fraction

import pytest

from divilab import (
    DomainError,
    Lambda_kd,
    ResourceError,
    gaussian_cdf,
    k_scales,
    lambda_kp,
    lambda_mode,
    lambda_row,
    median_prime,
    median_prime_detail,
    phi0_correction,
    s_coeffs,
    unimodal_check,
)
from divilab.locallaws import lambda_sweep, s_coeffs_exact

from oracles import naive_lambda_kd, simpson_normal_cdf


def test_s_coeffs_examples():
    assert list(s_coeffs(2, 3).e) == [1.0, 0.0, 0.0, 0.0]
    e5 = s_coeffs(5, 2).e
    assert e5 == pytest.approx([1.0, 1.5, 0.5], abs=1e-14)


def test_s1_matches_prime_power_series():
    # sum over m with all prime factors < 5 and one distinct prime:
    # geometric series sum_a 2^-a + sum_b 3^-b = 1 + 1/2
    series = (1 / 2) / (1 - 1 / 2) + (1 / 3) / (1 - 1 / 3)
    assert s_coeffs(5, 1).e[1] == pytest.approx(series, abs=1e-14)


def test_s_coeffs_rational_certifies_doubles():
    for p in (7, 97, 293):
        kmax = 8
        dbl = s_coeffs(p, kmax).e
        exact = s_coeffs_exact(p, kmax)
        for j in range(kmax + 1):
            assert dbl[j] == pytest.approx(float(exact[j]), rel=1e-12, abs=1e-300)


def test_s_coeffs_sum_telescopes():
    # sum_j e_j = prod_{q<p} (1 + 1/(q-1)) = prod q/(q-1)
    from divilab.sieve import primes_upto

    for p in (5, 13, 101, 1009):
        coeffs = s_coeffs(p, 400)
        prod = 1.0
        for q in primes_upto(p - 1):
            prod *= int(q) / (int(q) - 1)
        assert float(coeffs.e.sum()) == pytest.approx(prod, abs=1e-12 * prod)


def test_s_coeffs_requires_prime():
    with pytest.raises(DomainError):
        s_coeffs(6, 2)


def test_lambda_kp_examples():
    assert lambda_kp(1, 2) == pytest.approx(0.5, abs=1e-15)
    assert lambda_kp(1, 3) == pytest.approx(1 / 6, abs=1e-15)
    assert lambda_kp(2, 3) == pytest.approx(1 / 6, abs=1e-15)
    assert lambda_kp(2, 2) == 0.0  # no primes below 2


def test_lambda_row_small():
    row = lambda_row(1, 10)
    expect = [Fraction(1, 2), Fraction(1, 6), Fraction(1, 15), Fraction(4, 105)]
    assert [p for p, _ in row.entries] == [2, 3, 5, 7]
    for (_, lam), ex in zip(row.entries, expect):
        assert lam == pytest.approx(float(ex), abs=1e-14)
    assert row.partial_sum == pytest.approx(float(sum(expect)), abs=1e-13)
    assert row.partial_sum + row.tail == pytest.approx(1.0, abs=1e-12)


def test_lambda_row_k2_p3():
    row = lambda_row(2, 3)
    assert row.partial_sum == pytest.approx(1 / 6, abs=1e-14)
    assert dict(row.entries)[2] == 0.0


def test_lambda_kp_empirical_frequencies(sieve_1e5):
    # direct counting of k-th-distinct-prime-factor events over n <= 1e5;
    # the event is a union of residue classes, so convergence is fast
    from divilab import factor

    x = 10**5
    counts = {(1, 3): 0, (2, 5): 0, (3, 7): 0, (2, 37): 0}
    for n in range(2, x + 1):
        ps = factor(n, sieve_1e5).prime_list()
        for (k, p) in counts:
            if len(ps) >= k and ps[k - 1] == p:
                counts[(k, p)] += 1
    for (k, p), c in counts.items():
        assert c / x == pytest.approx(lambda_kp(k, p), abs=3e-3), (k, p)


def test_positivity_boundary():
    # lambda_k(p) > 0 iff k <= pi(p-1) + 1
    assert lambda_kp(3, 7) > 0  # pi(6) = 3, k up to 4
    assert lambda_kp(4, 7) > 0
    assert lambda_kp(5, 7) == 0.0


def test_median_primes():
    assert median_prime(2) == 37
    det = median_prime_detail(1)
    assert det.p_star == 3
    assert det.tie_at == 2
    with pytest.raises(ResourceError):
        median_prime(4, pmax=10**5)


def test_gaussian_cdf():
    assert gaussian_cdf(0.0) == pytest.approx(0.5, abs=1e-15)
    assert gaussian_cdf(40.0) == 1.0
    assert gaussian_cdf(1.0) == pytest.approx(0.8413447461, abs=1e-10)
    for z in (-2.5, -0.3, 0.7, 1.9):
        assert gaussian_cdf(z) == pytest.approx(simpson_normal_cdf(z), abs=1e-10)
        assert gaussian_cdf(z) + gaussian_cdf(-z) == pytest.approx(1.0, abs=1e-14)


def test_phi0_correction():
    from divilab.experiments import mertens_A

    A = mertens_A().point
    assert phi0_correction(0.0) == pytest.approx(1 / 3 + A, abs=1e-9)
    assert phi0_correction(0.0) == pytest.approx(0.59483, abs=1e-4)
    assert phi0_correction(50.0) == 0.0
    assert phi0_correction(1.0) == pytest.approx(math.exp(-0.5) * A, abs=1e-9)


def test_lambda_mode():
    assert lambda_mode(2) == (1, pytest.approx(0.5))
    k3, v3 = lambda_mode(3)
    assert k3 == 1 and v3 == pytest.approx(1 / 6, abs=1e-14)
    k_star, lam_star = lambda_mode(10007)
    assert 1 <= k_star <= 5
    ref = 1.0 / (10007 * math.sqrt(2 * math.pi * math.log(math.log(10007))))
    assert ref / 2 < lam_star < ref * 2


def test_unimodal_small():
    assert unimodal_check(2)
    assert unimodal_check(3)
    for p in (5, 7, 11, 101, 997, 1999):
        assert unimodal_check(p)


def test_column_sum_prefix():
    # sum_k lambda_k(p) telescopes to 1/p; spot a prefix of the acceptance sweep
    for p, prod, e, seen in lambda_sweep(500):
        total = float(e[: seen + 1].sum()) * prod / p
        assert total == pytest.approx(1.0 / p, abs=1e-13)


def test_Lambda_exact_examples():
    assert Lambda_kd(1, 1).exact == 1
    assert Lambda_kd(2, 2).exact == Fraction(1, 2)
    assert Lambda_kd(2, 3).exact == Fraction(1, 6)
    assert Lambda_kd(3, 4).exact == Fraction(1, 6)
    assert Lambda_kd(4, 4).exact == Fraction(1, 12)
    assert Lambda_kd(1, 2).exact == 0


def test_Lambda_against_naive_period_scan():
    for d in range(1, 11):
        for k in range(1, d + 2):
            assert Lambda_kd(k, d).exact == naive_lambda_kd(k, d)


def test_Lambda_against_friable_sum_formula():
    # second independent route: the generating friable-sum identity
    from oracles import lambda_kd_formula

    for d in (3, 4, 6, 8):
        for k in range(1, d + 1):
            want = float(Lambda_kd(k, d).exact)
            got, tail = lambda_kd_formula(k, d)
            assert abs(got - want) <= tail + 1e-9, (k, d, got, want, tail)


def test_Lambda_empirical_exact_over_whole_periods():
    # d_k(n) = d depends only on n mod lcm(1..d): counts over whole periods
    # of per-n divisor enumeration must match the density exactly
    from fractions import Fraction as F
    from oracles import trial_divisors

    for d, L in ((4, 12), (6, 60)):
        reps = 3
        hits = {}
        for n in range(1, reps * L + 1):
            divs = trial_divisors(n)
            for k, dv in enumerate(divs, start=1):
                if dv == d:
                    hits[k] = hits.get(k, 0) + 1
        for k in range(1, d + 1):
            assert F(hits.get(k, 0), reps * L) == Lambda_kd(k, d).exact


def test_Lambda_column_sums():
    for d in range(1, 13):
        total = sum((Lambda_kd(k, d).exact for k in range(1, d + 1)), Fraction(0))
        assert total == Fraction(1, d)


def test_Lambda_monte_carlo_brackets_exact():
    for k, d in ((2, 2), (3, 4), (4, 6), (6, 12)):
        exact = float(Lambda_kd(k, d).exact)
        est = Lambda_kd(k, d, method="mc", samples=150_000, seed=12345)
        assert est.lower - 1e-12 <= exact <= est.upper + 1e-12
    with pytest.raises(DomainError):
        Lambda_kd(2, 30, method="mc")  # seed required


def test_Lambda_mc_deterministic():
    a = Lambda_kd(5, 30, method="mc", samples=50_000, seed=7)
    b = Lambda_kd(5, 30, method="mc", samples=50_000, seed=7)
    assert a.point == b.point and a.lower == b.lower


def test_k_scales():
    ks = k_scales(16, 0)
    expect = 16 ** (math.log(math.log(16)) / math.log(2))
    assert ks.values[0] == pytest.approx(expect, rel=1e-12)
    k100 = k_scales(100, 0).values[0]
    assert k100 == pytest.approx(100 ** (math.log(math.log(100)) / math.log(2)), rel=1e-12)
    big = k_scales(10**6, 1)
    assert big.values[1] < big.values[0]
    with pytest.raises(DomainError):
        k_scales(3, 1)  # ln ln ln 3 undefined


def test_row_identity_sample():
    # finite identity: partial + prod * sum_{j<k} e_j == 1
    for k in (1, 2, 5):
        row = lambda_row(k, 2000)
        assert row.partial_sum + row.tail == pytest.approx(1.0, abs=1e-11)


def test_row_mass_approaches_one():
    # every n > 1 has a first prime factor, so the k=1 row mass fills up
    assert lambda_row(1, 10**5).partial_sum > 0.95
    assert lambda_row(1, 10**5).partial_sum < 1.0
