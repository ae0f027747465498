"""Local laws of the k-th prime factor and the k-th divisor.

The density of integers whose k-th smallest distinct prime factor equals p is

    lambda_k(p) = (1/p) * prod_{q<p} (1 - 1/q) * e_{k-1}(p),

where e_j(p) is the j-th elementary symmetric function of {1/(q-1): q < p}.
The e_j are accumulated by an all-positive DP (no cancellation), so doubles
carry relative error O(pi(p) * ulp) -- certified against an exact-rational
mode for small p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .density import DensityEstimate, exact_density
from .errors import DomainError, ResourceError
from .sieve import is_prime_u64, primes_upto


def lambda_sweep(pmax: int, kmax: int | None = None):
    """Iterate primes p <= pmax in ascending order, yielding
    (p, prod_{q<p}(1-1/q), e) where e[j] is the elementary symmetric function
    of {1/(q-1): q < p} truncated at kmax.

    The e buffer is reused between iterations; copy it if you keep it.
    After the loop, e and prod cover all primes <= pmax.  The final state is
    available from the generator's return value via StopIteration, or use
    sweep_totals().
    """
    primes = [int(p) for p in primes_upto(pmax)]
    size = (len(primes) if kmax is None else min(kmax, len(primes))) + 1
    e = np.zeros(size)
    e[0] = 1.0
    prod = 1.0
    seen = 0
    for p in primes:
        yield p, prod, e, seen
        hi = min(seen + 1, size - 1)
        e[1:hi + 1] += e[:hi] / (p - 1)
        seen += 1
        prod *= 1.0 - 1.0 / p
    return prod, e


def sweep_totals(pmax: int, kmax: int | None = None):
    """prod_{p<=pmax}(1-1/p) and e_j over {1/(q-1): q <= pmax}."""
    gen = lambda_sweep(pmax, kmax)
    try:
        while True:
            next(gen)
    except StopIteration as stop:
        return stop.value


@dataclass(frozen=True)
class SymmetricCoeffs:
    """e[j] = elementary symmetric function of {1/(q-1): q prime < p}."""

    p: int
    kmax: int
    e: np.ndarray

    def __post_init__(self):
        self.e.flags.writeable = False


def s_coeffs(p: int, kmax: int) -> SymmetricCoeffs:
    if not is_prime_u64(p):
        raise DomainError(f"s_coeffs needs a prime, got {p}")
    if kmax < 0:
        raise DomainError(f"need kmax >= 0, got {kmax}")
    e = np.zeros(kmax + 1)
    e[0] = 1.0
    for q in primes_upto(p - 1):
        e[1:] += e[:-1] / (int(q) - 1)
    return SymmetricCoeffs(p, kmax, e)


def s_coeffs_exact(p: int, kmax: int) -> list[Fraction]:
    """Exact-rational elementary symmetric functions, for certifying doubles
    (practical for p up to about 10^3)."""
    if not is_prime_u64(p):
        raise DomainError(f"s_coeffs_exact needs a prime, got {p}")
    e = [Fraction(0)] * (kmax + 1)
    e[0] = Fraction(1)
    for q in primes_upto(p - 1):
        w = Fraction(1, int(q) - 1)
        for j in range(kmax, 0, -1):
            e[j] += e[j - 1] * w
    return e


def lambda_kp(k: int, p: int) -> float:
    """Density of integers whose k-th distinct prime factor is p; zero when
    k - 1 exceeds the number of primes below p."""
    if k < 1:
        raise DomainError(f"need k >= 1, got {k}")
    if not is_prime_u64(p):
        raise DomainError(f"lambda_kp needs a prime, got {p}")
    qs = primes_upto(p - 1)
    if k - 1 > len(qs):
        return 0.0
    coeffs = s_coeffs(p, k - 1)
    prod = 1.0
    for q in qs:
        prod *= 1.0 - 1.0 / int(q)
    return prod * coeffs.e[k - 1] / p


@dataclass(frozen=True)
class LocalLawRow:
    """All lambda_k(p) for p <= P, with the exact finite tail identity:
    partial_sum + tail == 1, both sides being the density of integers with
    at least k distinct prime factors <= P (tail = prod * sum_{j<k} e_j)."""

    k: int
    entries: tuple[tuple[int, float], ...]
    partial_sum: float
    tail: float


def lambda_row(k: int, P: int) -> LocalLawRow:
    if k < 1:
        raise DomainError(f"need k >= 1, got {k}")
    if P < 2:
        raise DomainError(f"need P >= 2, got {P}")
    entries = []
    total = 0.0
    gen = lambda_sweep(P, k)
    try:
        while True:
            p, prod, e, seen = next(gen)
            lam = float(e[k - 1]) * prod / p if k - 1 <= seen else 0.0
            entries.append((p, lam))
            total += lam
    except StopIteration as stop:
        prod_all, e_all = stop.value
    tail = float(prod_all * e_all[:k].sum())
    return LocalLawRow(k, tuple(entries), total, tail)


@dataclass(frozen=True)
class MedianResult:
    p_star: int
    cum_before: float
    cum_at: float
    tie_at: int | None  # prime where the cumulative sum hit exactly 1/2


def median_prime_detail(k: int, pmax: int = 200_000) -> MedianResult:
    """Smallest prime at which the cumulative lambda_k mass strictly exceeds
    1/2.  Exact ties (cumulative sum == 1/2) are excluded by strictness and
    flagged; they are adjudicated in exact rationals for small primes.

    This convention reproduces the published values (k=2 -> 37, k=3 -> 42719);
    see the distribution's tie at p=2 for k=1, which yields 3.
    """
    if k < 1:
        raise DomainError(f"need k >= 1, got {k}")
    cum = 0.0
    tie_at = None
    prev = 0.0
    for p, prod, e, seen in lambda_sweep(pmax, k):
        lam = float(e[k - 1]) * prod / p if k - 1 <= seen else 0.0
        prev = cum
        cum += lam
        if abs(cum - 0.5) < 1e-9:
            if p <= 1000 and _exact_cum_is_half(k, p):
                tie_at = p
                continue
        if cum > 0.5:
            return MedianResult(p, prev, cum, tie_at)
    raise ResourceError(
        f"cumulative lambda_{k} mass reaches only {cum:.6f} by p = {pmax}; "
        f"the median prime grows doubly exponentially in k"
    )


def median_prime(k: int, pmax: int = 200_000) -> int:
    return median_prime_detail(k, pmax).p_star


def _exact_cum_is_half(k: int, pmax: int) -> bool:
    cum = Fraction(0)
    e = [Fraction(0)] * k
    e[0] = Fraction(1)
    prod = Fraction(1)
    for q in primes_upto(pmax):
        q = int(q)
        cum += e[k - 1] * prod / q
        for j in range(k - 1, 0, -1):
            e[j] += e[j - 1] / (q - 1)
        prod *= Fraction(q - 1, q)
    return cum == Fraction(1, 2)


def gaussian_cdf(z: float) -> float:
    """Standard normal CDF via the complementary error function."""
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def phi0_correction(z: float, A: float | None = None) -> float:
    """Second-order correction term exp(-z^2/2) * (1/3 + A - z^2/3) to the
    Gaussian law of the k-th prime factor."""
    if A is None:
        from .experiments import mertens_A

        A = mertens_A().point
    return math.exp(-z * z / 2.0) * (1.0 / 3.0 + A - z * z / 3.0)


def _coeff_vector(p: int) -> np.ndarray:
    """Full e-array over primes < p (length pi(p-1) + 1)."""
    qs = [int(q) for q in primes_upto(p - 1)]
    e = np.zeros(len(qs) + 1)
    e[0] = 1.0
    for q in qs:
        e[1:] += e[:-1] / (q - 1)
    return e


def lambda_mode(p: int) -> tuple[int, float]:
    """(k*, lambda*) maximizing lambda_k(p) over k, ties toward smaller k."""
    if not is_prime_u64(p):
        raise DomainError(f"lambda_mode needs a prime, got {p}")
    e = _coeff_vector(p)
    prod = 1.0
    for q in primes_upto(p - 1):
        prod *= 1.0 - 1.0 / int(q)
    j = int(np.argmax(e))  # first max wins
    return j + 1, float(e[j] * prod / p)


def _unimodal(values: np.ndarray) -> bool:
    d = np.diff(values)
    falls = np.flatnonzero(d < 0)
    if len(falls) == 0:
        return True
    return not np.any(d[falls[0]:] > 0)


def unimodal_check(p: int) -> bool:
    """True iff {lambda_k(p)}_k rises then falls (plateaus allowed)."""
    if not is_prime_u64(p):
        raise DomainError(f"unimodal_check needs a prime, got {p}")
    return _unimodal(_coeff_vector(p))


# ---------------------------------------------------------------------------
# local law of the k-th divisor

EXACT_PERIOD_MAX_D = 20  # lcm(1..20) = 232792560 keeps the period walk in seconds

_exact_cache: dict[int, dict[int, Fraction]] = {}


def _exact_period_row(d: int) -> dict[int, Fraction]:
    """Exact densities {k: Lambda_k(d)} by walking multiples of d through one
    full period L = lcm(1..d) and counting divisors below d."""
    if d in _exact_cache:
        return _exact_cache[d]
    if d == 1:
        row = {1: Fraction(1)}
    else:
        L = 1
        for m in range(2, d + 1):
            L = L * m // math.gcd(L, m)
        nmult = L // d
        counts = np.zeros(d + 2, dtype=np.int64)
        chunk = 1 << 20
        for start in range(0, nmult, chunk):
            stop = min(start + chunk, nmult)
            r = np.arange(start + 1, stop + 1, dtype=np.int64) * d
            k = np.full(stop - start, 2, dtype=np.int64)  # divisors 1 and d
            for m in range(2, d):
                k += r % m == 0
            counts += np.bincount(k, minlength=d + 2)
        row = {int(k): Fraction(int(c), L) for k, c in enumerate(counts) if c}
    _exact_cache[d] = row
    return row


def Lambda_kd(
    k: int,
    d: int,
    method: str | None = None,
    samples: int = 200_000,
    seed: int | None = None,
) -> DensityEstimate:
    """Density of integers whose k-th smallest divisor is d.

    d <= 20 uses the exact residue-period count (d_k(n) = d depends only on
    n mod lcm(1..d)); larger d falls back to Monte Carlo over random 64-bit
    integers with a Wilson 95% bracket.  Positivity: tau(d) <= k <= d.
    """
    if k < 1 or d < 1:
        raise DomainError(f"need k >= 1 and d >= 1, got k={k}, d={d}")
    if method is None:
        method = "exact" if d <= EXACT_PERIOD_MAX_D else "mc"
    if method == "exact":
        if d > EXACT_PERIOD_MAX_D:
            raise ResourceError(
                f"exact period walk supports d <= {EXACT_PERIOD_MAX_D}; "
                f"lcm(1..{d}) is out of reach"
            )
        val = _exact_period_row(d).get(k, Fraction(0))
        return exact_density(val, method="exact_period", d=d, k=k)
    if method != "mc":
        raise DomainError(f"unknown Lambda method {method!r}")
    if seed is None:
        raise DomainError("monte carlo Lambda_kd requires a seed")
    if d > 10_000:
        raise ResourceError(f"monte carlo cost grows with d; d={d} > 10000")
    rng = np.random.Generator(np.random.Philox(seed))
    hits = 0
    total = 0
    batch = 1 << 16
    while total < samples:
        size = min(batch, samples - total)
        n = rng.integers(1, 1 << 63, size=size, dtype=np.int64)
        total += size
        nd = n[n % d == 0]
        if len(nd) == 0:
            continue
        cnt = np.full(len(nd), 2 if d > 1 else 1, dtype=np.int64)
        for m in range(2, d):
            cnt += nd % m == 0
        hits += int(np.count_nonzero(cnt == k))
    phat = hits / samples
    z = 1.959963984540054
    denom = 1.0 + z * z / samples
    center = (phat + z * z / (2 * samples)) / denom
    half = z * math.sqrt(phat * (1 - phat) / samples + z * z / (4 * samples**2)) / denom
    lo = max(0.0, center - half)
    hi = min(1.0, center + half)
    return DensityEstimate(
        phat, lo, hi, "monte_carlo",
        params={"samples": samples, "seed": seed, "d": d, "k": k},
    )


@dataclass(frozen=True)
class KScales:
    """Characteristic scales K_j = k^{(log_{j+2} k)/log 2} of the k-th
    divisor's local law (log_m = m-fold iterated natural log)."""

    k: int
    values: tuple[float, ...]


def k_scales(k: int, jmax: int) -> KScales:
    if k < 2:
        raise DomainError(f"need k >= 2 for iterated logs, got {k}")
    vals = []
    it = float(k)
    # log_{j+2}(k): iterate ln (j+2) times
    it = math.log(math.log(it))
    for j in range(jmax + 1):
        if j > 0:
            if it <= 0:
                raise DomainError(f"iterated log non-positive at depth {j + 2} for k={k}")
            it = math.log(it)
        if it <= 0:
            raise DomainError(f"iterated log non-positive at depth {j + 2} for k={k}")
        vals.append(k ** (it / math.log(2.0)))
    return KScales(k, tuple(vals))
