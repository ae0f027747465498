"""Range-scale empirical studies and the named-constant table.

Everything empirical here is a finite scan: two-scale monotone-trend
observations stand in for limit claims, which desk scales cannot see.
Scans are deterministic; Monte Carlo never runs without an explicit seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from .density import DensityEstimate
from .errors import DomainError, ResourceError
from .locallaws import gaussian_cdf
from .multiples import _subset_sums, alpha0
from .sieve import SpfSieve, primes_upto
from .tables import (
    e_set_mask,
    gpf_table,
    interval_divisor_counts,
    interval_multiples_hits,
    multiples_mask,
    omega_table,
    tau_table,
    tauplus_table,
    totient_segment,
)

LN2 = math.log(2.0)


@dataclass(frozen=True)
class BracketedValue:
    point: float
    lower: float
    upper: float

    def as_record(self) -> dict:
        return {"point": self.point, "lower": self.lower, "upper": self.upper}


# ---------------------------------------------------------------------------
# counting with a divisor in an interval

def h_count(x: int, y: int, z: int, closed_left: bool = False) -> int:
    """Number of n <= x with a divisor in (y, z] (or [y, z] with the
    sensitivity flag)."""
    if not (1 <= y < z <= x):
        raise DomainError(f"need 1 <= y < z <= x, got y={y} z={z} x={x}")
    lo = y - 1 if closed_left else y
    hits = interval_multiples_hits(x, lo, z)
    return int(np.count_nonzero(hits[1:]))


_worker_sieve: SpfSieve | None = None


def _tauplus_chunk(bounds: tuple[int, int]) -> int:
    lo, hi = bounds
    spf = _worker_sieve.spf
    total = 0
    for n in range(lo, hi):
        divs = [1]
        m = n
        while m > 1:
            p = int(spf[m])
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            block = list(divs)
            pe = 1
            for _ in range(e):
                pe *= p
                divs.extend(d * pe for d in block)
        cells = 0
        for d in divs:
            cells |= 1 << (d - 1).bit_length()
        total += cells.bit_count()
    return total


def _map_chunks(fn, lo: int, hi: int, threads: int) -> list:
    """Apply fn to disjoint subranges of [lo, hi); deterministic ordered merge.
    Workers are forked so they share the module-level sieve read-only."""
    bounds = []
    step = max(1, (hi - lo + threads - 1) // threads)
    for a in range(lo, hi, step):
        bounds.append((a, min(a + step, hi)))
    if threads <= 1 or len(bounds) == 1:
        return [fn(b) for b in bounds]
    import multiprocessing as mp

    try:
        ctx = mp.get_context("fork")
    except ValueError:
        return [fn(b) for b in bounds]
    with ctx.Pool(processes=threads) as pool:
        return pool.map(fn, bounds)


def t_sum(x: int, sieve: SpfSieve | None = None, threads: int = 1) -> tuple[int, int]:
    """Sum of tau^+(n) over n <= x, computed two independent ways:

    direct -- per-integer divisor generation from the SPF factorization,
    collecting occupied dyadic cells into a bitmask;
    dyadic -- the identity with interval counts, sum_{k >= -1} H(x, 2^k, 2^{k+1}).

    Returns (direct, dyadic); they must agree exactly.
    """
    global _worker_sieve
    if x < 1:
        raise DomainError(f"need x >= 1, got {x}")
    direct = 1  # n = 1 occupies the single cell (1/2, 1]
    if x >= 2:
        if sieve is None or sieve.limit < x:
            sieve = SpfSieve.build(x)
        _worker_sieve = sieve
        try:
            direct += sum(_map_chunks(_tauplus_chunk, 2, x + 1, threads))
        finally:
            _worker_sieve = None
    dyadic = x  # k = -1: every n has the divisor 1 in (1/2, 1]
    k = 0
    while (1 << k) < x:
        dyadic += h_count(x, 1 << k, min(1 << (k + 1), x))
        k += 1
    return direct, dyadic


def _delta_sum_chunk(bounds: tuple[int, int]) -> int:
    from .tables import divisor_lists

    lo, hi = bounds
    total = 0
    for base, lists in divisor_lists(hi - 1, start=lo):
        for divs in lists:
            logs = [math.log(d) for d in divs]
            best = 1
            j = 0
            for i in range(len(logs)):
                if j < i:
                    j = i
                while j + 1 < len(logs) and logs[j + 1] - logs[i] < 1.0:
                    j += 1
                if j - i + 1 > best:
                    best = j - i + 1
            total += best
    return total


def s_avg(x: int, cap: int = 10**7, threads: int = 1) -> float:
    """Average of the divisor-concentration function over n <= x (exact)."""
    if x < 1:
        raise DomainError(f"need x >= 1, got {x}")
    if x > cap:
        raise ResourceError(f"s_avg scan {x} exceeds per-n capability cap {cap}")
    total = sum(_map_chunks(_delta_sum_chunk, 1, x + 1, threads))
    return total / x


def eps_pair(y: int, z: int, x: int) -> tuple[DensityEstimate, DensityEstimate, float]:
    """Densities of {some divisor in (y, z]} and {exactly one divisor in
    (y, z]}, plus their ratio rho_1.

    Exact inclusion-exclusion when the interval holds at most 24 integers
    (P(exactly one) = sum_k (-1)^{k-1} k S_k over subset-lcm sums); sieve
    counts at x otherwise.
    """
    if not (1 <= y < z <= x):
        raise DomainError(f"need 1 <= y < z <= x, got y={y} z={z} x={x}")
    elements = list(range(y + 1, z + 1))
    if len(elements) <= 24:
        bound = 10**40
        sums, total, pruned = _subset_sums(elements, bound)
        eps_exact = total
        eps1_exact = Fraction(0)
        for k in range(1, len(elements) + 1):
            term = k * sums[k]
            eps1_exact += term if k % 2 == 1 else -term
        if eps_exact == 0:
            raise DomainError("eps = 0: rho_1 undefined")
        if pruned:
            # huge-lcm subsets were skipped; their weight is bounded and folded in
            tail = Fraction(len(elements) * pruned, bound)
            mk = lambda v: DensityEstimate(
                float(v), max(0.0, float(v - tail)), min(1.0, float(v + tail)),
                "exact_ie_truncated", params={"pruned_subsets": pruned})
            return mk(eps_exact), mk(eps1_exact), float(eps1_exact / eps_exact)
        e = DensityEstimate(float(eps_exact), float(eps_exact), float(eps_exact),
                            "exact_ie", exact=eps_exact)
        e1 = DensityEstimate(float(eps1_exact), float(eps1_exact), float(eps1_exact),
                             "exact_ie", exact=eps1_exact)
        return e, e1, float(eps1_exact / eps_exact)
    counts = interval_divisor_counts(x, y, z)
    n_any = int(np.count_nonzero(counts[1:]))
    n_one = int(np.count_nonzero(counts[1:] == 1))
    band = 2.0 / math.sqrt(x)
    pe = n_any / x
    p1 = n_one / x
    e = DensityEstimate(pe, max(0.0, pe - band), min(1.0, pe + band),
                        "sieve_count", params={"x": x})
    e1 = DensityEstimate(p1, max(0.0, p1 - band), min(1.0, p1 + band),
                         "sieve_count", params={"x": x})
    if n_any == 0:
        raise DomainError("eps = 0: rho_1 undefined")
    return e, e1, n_one / n_any


# ---------------------------------------------------------------------------
# empirical distributions

@dataclass(frozen=True)
class EmpiricalDistribution:
    samples: int
    grid: tuple[float, ...]
    cdf: tuple[float, ...]
    ks_vs: tuple[str, float] | None = None
    jumps: tuple[tuple[float, float], ...] = field(default=())

    def __post_init__(self):
        c = self.cdf
        if any(b < a - 1e-12 for a, b in zip(c, c[1:])) or (c and not c[-1] <= 1 + 1e-12):
            raise DomainError("cdf must be non-decreasing and end at most 1")


def nu_distribution(x: int, grid: tuple[float, ...] | None = None) -> EmpiricalDistribution:
    """Empirical CDF of tau^+(n)/tau(n) over n <= x, with the largest
    grid-cell masses reported as jump candidates (no assertion)."""
    if grid is None:
        grid = tuple(i / 50 for i in range(1, 51))
    if list(grid) != sorted(grid):
        raise DomainError("grid must be ascending")
    tp = tauplus_table(x)[1:].astype(np.float64)
    tau = tau_table(x)[1:]
    ratio = np.sort(tp / tau)
    g = np.asarray(grid, dtype=np.float64)
    cum = np.searchsorted(ratio, g, side="right") / x
    masses = np.diff(np.concatenate(([0.0], cum)))  # mass in each cell (g_{i-1}, g_i]
    order = np.argsort(masses)[::-1][:5]
    jumps = tuple(sorted((float(g[i]), float(masses[i])) for i in order))
    return EmpiricalDistribution(x, tuple(map(float, grid)), tuple(map(float, cum)),
                                 ks_vs=None, jumps=jumps)


def _ks_two_sided(zvals: np.ndarray, weights: np.ndarray) -> float:
    """Two-sided Kolmogorov-Smirnov distance between a discrete empirical law
    (atoms zvals with the given weights) and the standard normal."""
    order = np.argsort(zvals)
    z = zvals[order]
    w = weights[order]
    cdf = np.cumsum(w)
    cdf_left = cdf - w
    phi = np.array([gaussian_cdf(v) for v in z])
    return float(np.max(np.maximum(np.abs(cdf - phi), np.abs(cdf_left - phi))))


def erdos_kac(x: int, with_multiplicity: bool = False) -> EmpiricalDistribution:
    """Empirical law of (omega(n) - ln ln x)/sqrt(ln ln x) over 3 <= n <= x,
    with the two-sided KS distance to the standard normal."""
    if x < 3:
        raise DomainError(f"need x >= 3, got {x}")
    om = omega_table(x, with_multiplicity=with_multiplicity)
    llx = math.log(math.log(x))
    s = math.sqrt(llx)
    counts = np.bincount(om[3:])
    tot = counts.sum()
    zvals = (np.arange(len(counts)) - llx) / s
    weights = counts / tot
    keep = weights > 0
    ks = _ks_two_sided(zvals[keep], weights[keep])
    cdf = np.cumsum(weights)
    return EmpiricalDistribution(int(tot), tuple(map(float, zvals)),
                                 tuple(map(float, cdf)), ks_vs=("gaussian", ks))


# ---------------------------------------------------------------------------
# largest-prime-factor adjacency

@dataclass(frozen=True)
class PPlusStats:
    x: int
    frac_up: float
    frac_triple_down: float
    first_triple_down: int | None
    alpha_bins: tuple[float, ...]
    alpha_counts: tuple[int, ...]


def pplus_adjacency(x: int) -> PPlusStats:
    """Adjacency statistics of P^+ at consecutive arguments: the fraction of
    n <= x with P^+(n+1) > P^+(n), descending triples, and the histogram of
    log(P^+(n+1)/P^+(n)) / log n."""
    if x < 2:
        raise DomainError(f"need x >= 2, got {x}")
    gpf = gpf_table(x + 2).astype(np.float64)
    up = gpf[2:x + 2] > gpf[1:x + 1]
    frac_up = float(np.count_nonzero(up)) / x
    a = gpf[1:x + 1]
    b = gpf[2:x + 2]
    c = gpf[3:x + 3]
    triple = (a > b) & (b > c)
    n_triple = int(np.count_nonzero(triple))
    first = int(np.flatnonzero(triple)[0]) + 1 if n_triple else None
    n = np.arange(2, x + 1, dtype=np.float64)
    alpha = np.log(gpf[3:x + 2] / gpf[2:x + 1]) / np.log(n)
    bins = np.linspace(-1.0, 1.0, 41)
    counts, _ = np.histogram(np.clip(alpha, -1.0, 1.0), bins=bins)
    return PPlusStats(x, frac_up, n_triple / x, first,
                      tuple(map(float, bins)), tuple(int(v) for v in counts))


# ---------------------------------------------------------------------------
# the consecutive-ratio integral lower bound

def lower_bound_integral(c: float) -> float:
    """log(1/(1-c)) - 2 * int_0^c log((1-v)/(1-v-2c)) dv/(1-v) for 0 < c < 1/5."""
    if not 0.0 < c < 0.2:
        raise DomainError(f"need 0 < c < 1/5, got {c}")
    val, _ = quad(lambda v: math.log((1 - v) / (1 - v - 2 * c)) / (1 - v),
                  0.0, c, epsabs=1e-12, epsrel=1e-12)
    return math.log(1.0 / (1.0 - c)) - 2.0 * val


def maximize_lower_bound() -> tuple[float, float]:
    """(c*, value) maximizing the integral lower bound over (0, 1/5)."""
    res = minimize_scalar(lambda c: -lower_bound_integral(c),
                          bounds=(1e-9, 0.2 - 1e-9), method="bounded",
                          options={"xatol": 1e-10})
    return float(res.x), float(-res.fun)


# ---------------------------------------------------------------------------
# medians of Omega and totient values

@dataclass(frozen=True)
class OmegaMedianResult:
    x: int
    count: int
    formula_gap: float
    printed_constant: float
    direct_formula_constant: float


def omega_median_count(x: int) -> OmegaMedianResult:
    """Count of n <= x with Omega(n) <= ln ln x; formula_gap is the
    empirical estimate of the negated constant in the secondary term.

    The source's printed constant (0.36798) does not match a direct reading
    of its defining formula (about -1.178); both are reported, nothing is
    asserted.
    """
    if x < 3:
        raise DomainError(f"need x >= 3, got {x}")
    om = omega_table(x, with_multiplicity=True)
    llx = math.log(math.log(x))
    count = int(np.count_nonzero(om[1:] <= llx))
    gap = (count - x / 2) * math.sqrt(2 * math.pi * llx) / x + (llx - math.floor(llx))
    A = mertens_A().point
    s = sum(1.0 / (int(p) * (int(p) - 1)) for p in primes_upto(10**6))
    return OmegaMedianResult(x, count, gap, 0.36798, A - 2.0 / 3.0 - s)


def totient_values(x: int, cap: int = 3 * 10**8) -> int:
    """Exact count of v <= x arising as a totient value.  phi(n) > sqrt(n/2)
    bounds the search at n <= 2x^2."""
    if x < 1:
        raise DomainError(f"need x >= 1, got {x}")
    bound = 2 * x * x
    if bound > cap:
        raise ResourceError(f"totient enumeration bound {bound} exceeds cap {cap}")
    hit = np.zeros(x + 1, dtype=bool)
    small = primes_upto(math.isqrt(bound) + 1)
    seg = 1 << 20
    for lo in range(1, bound + 1, seg):
        hi = min(lo + seg, bound + 1)
        phi = totient_segment(lo, hi, small)
        vals = phi[phi <= x]
        hit[vals] = True
    return int(np.count_nonzero(hit[1:]))


# ---------------------------------------------------------------------------
# divisor multiples of an irrational: ||d theta||

def dtheta_min(f, theta) -> tuple[float, int]:
    """(min over d | n of ||d theta||, minimizing divisor); theta may be a
    float or a Fraction (exact arithmetic in the latter case)."""
    from .arith import divisors

    spec = divisors(f)
    best = None
    best_d = 1
    for d in spec.divisors:
        t = d * theta
        fr = t - math.floor(t)
        dist = min(fr, 1 - fr)
        if best is None or dist < best:
            best, best_d = dist, d
    return float(best), best_d


def convergents(theta: Fraction, J: int) -> list[tuple[int, int]]:
    """First J continued-fraction convergents p_j/q_j of theta (fewer if the
    expansion terminates)."""
    if J < 1:
        raise DomainError(f"need J >= 1, got {J}")
    a = Fraction(theta)
    h0, h1 = 1, int(math.floor(a))
    k0, k1 = 0, 1
    out = [(h1, k1)]
    frac = a - h1
    while len(out) < J and frac != 0:
        a = 1 / frac
        ai = int(math.floor(a))
        frac = a - ai
        h0, h1 = h1, ai * h1 + h0
        k0, k1 = k1, ai * k1 + k0
        out.append((h1, k1))
    return out


def convergent_growth_report(theta: Fraction, J: int) -> list[float]:
    """Exponents ln ln q_{j+1} / ln ln q_j along the convergents (defined
    once q_j >= 3): the bounded-growth condition holds when these stay near 1."""
    qs = [q for _, q in convergents(theta, J)]
    out = []
    for q1, q2 in zip(qs, qs[1:]):
        if q1 >= 3 and q2 >= 3:
            out.append(math.log(math.log(q2)) / math.log(math.log(q1)))
    return out


def dtheta_exponent_stats(lo: int, hi: int, theta) -> tuple[float, float]:
    """(median, mean) of log(1/min_d ||d theta||)/log tau(n) over n in
    [lo, hi]; integers where the minimum vanishes are skipped."""
    from .tables import divisor_lists

    if not 2 <= lo <= hi:
        raise DomainError(f"need 2 <= lo <= hi, got {lo}..{hi}")
    th = float(theta)
    vals = []
    for base, lists in divisor_lists(hi, start=lo):
        for divs in lists:
            if len(divs) < 2:
                continue
            best = 0.5
            for d in divs:
                t = d * th
                fr = t - math.floor(t)
                dist = fr if fr < 0.5 else 1.0 - fr
                if dist < best:
                    best = dist
            if best <= 0.0:
                continue
            vals.append(math.log(1.0 / best) / math.log(len(divs)))
    if not vals:
        raise DomainError("no usable integers in range")
    arr = np.sort(np.asarray(vals))
    return float(arr[len(arr) // 2]), float(arr.mean())


def golden_ratio_fraction(digits: int = 60) -> Fraction:
    scale = 10**digits
    return Fraction(scale + math.isqrt(5 * scale * scale), 2 * scale)


def sqrt2_fraction(digits: int = 60) -> Fraction:
    scale = 10**digits
    return Fraction(math.isqrt(2 * scale * scale), scale)


# ---------------------------------------------------------------------------
# exceptional integers for the close-divisor-product set

def me_fractions(xs: list[int]) -> list[float]:
    """Fraction of n <= x lying in M(E) for each x (one shared scan)."""
    xmax = max(xs)
    mask = multiples_mask(np.flatnonzero(e_set_mask(xmax)), xmax)
    cum = np.cumsum(mask[1:])
    return [float(cum[x - 1]) / x for x in xs]


def exceptional_count(x: int) -> int:
    """Number of n <= x without any divisor of the form d*d', d < d' < 2d."""
    mask = multiples_mask(np.flatnonzero(e_set_mask(x)), x)
    return x - int(np.count_nonzero(mask[1:]))


# ---------------------------------------------------------------------------
# named constants

_mertens_cache: BracketedValue | None = None

EULER_GAMMA = 0.5772156649015328606


def mertens_A(prime_limit: int = 10**6) -> BracketedValue:
    """gamma - sum over primes of (log(1/(1-1/p)) - 1/p), summed to the
    given limit with the tail bounded by sum 1/(2n(n-1)) < 1/prime_limit."""
    global _mertens_cache
    if _mertens_cache is not None and prime_limit == 10**6:
        return _mertens_cache
    s = 0.0
    for p in primes_upto(prime_limit):
        ip = 1.0 / int(p)
        s += -math.log1p(-ip) - ip
    tail = 1.0 / prime_limit
    val = EULER_GAMMA - s
    out = BracketedValue(val, val - tail, val)
    if prime_limit == 10**6:
        _mertens_cache = out
    return out


def beta_r(r: int) -> float:
    """Propinquity exponent (log3 - 1)^m / (log3 - 1/3)^{m-1} with m chosen
    by 2^{m-1} < r + 1 <= 2^m."""
    if r < 1:
        raise DomainError(f"need r >= 1, got {r}")
    m = (r + 1 - 1).bit_length()  # smallest m with 2^m >= r + 1
    if 1 << (m - 1) >= r + 1:
        m -= 1
    m = max(m, 1)
    ln3 = math.log(3.0)
    return (ln3 - 1.0) ** m / (ln3 - 1.0 / 3.0) ** (m - 1)


LAMBDA_STAR = math.log(4.0) - 1.0
_RAOUJ_KNEE = 3 * LN2 - 1.0


def raouj_F(lam: float) -> float:
    """Exponent F(lambda): beta log beta - beta + 1 with
    beta = -1 + (1 + lambda)/log 2 up to the knee 3 log 2 - 1, then
    lambda - log 2 beyond it."""
    if lam < 0:
        raise DomainError(f"need lambda >= 0, got {lam}")
    if lam <= _RAOUJ_KNEE:
        b = -1.0 + (1.0 + lam) / LN2
        return b * math.log(b) - b + 1.0
    return lam - LN2


@dataclass(frozen=True)
class ConstantTable:
    """The named constants, each computed from its closed form.

    Note: the printed source value for c_pseudo (3.566509) disagrees with its
    own defining expression (1 - log 2)/delta = 3.5650990; the closed-form
    value is carried here.
    """

    delta: float
    beta: float
    gamma_delta: float
    lambda_star: float
    sigma0: float
    c_pseudo: float
    b: float
    mertens: float
    hall_c: float
    two_minus_log4: float
    beta_1: float
    beta_2: float
    beta_4: float

    def as_dict(self) -> dict:
        return {
            "delta": self.delta,
            "beta": self.beta,
            "gamma_delta": self.gamma_delta,
            "lambda_star": self.lambda_star,
            "sigma0": self.sigma0,
            "c_pseudo": self.c_pseudo,
            "b": self.b,
            "A": self.mertens,
            "hall_c": self.hall_c,
            "two_minus_log4": self.two_minus_log4,
            "beta_1": self.beta_1,
            "beta_2": self.beta_2,
            "beta_4": self.beta_4,
        }


def constant_table() -> ConstantTable:
    delta = 1.0 - (1.0 + math.log(LN2)) / LN2
    A = mertens_A().point
    return ConstantTable(
        delta=delta,
        beta=1.0 - (1.0 + math.log(math.log(3.0))) / math.log(3.0),
        gamma_delta=LN2 / math.log((1.0 - 1.0 / math.log(27.0)) / (1.0 - 1.0 / math.log(3.0))),
        lambda_star=LAMBDA_STAR,
        sigma0=LN2 / (1.0 - LN2),
        c_pseudo=(1.0 - LN2) / delta,
        b=1.0 / 3.0 + A,
        mertens=A,
        hall_c=0.5 - math.log(math.pi**2 / 6.0) / math.log(4.0),
        two_minus_log4=2.0 - math.log(4.0),
        beta_1=beta_r(1),
        beta_2=beta_r(2),
        beta_4=beta_r(4),
    )


__all__ = [
    "BracketedValue", "ConstantTable", "EmpiricalDistribution", "OmegaMedianResult",
    "PPlusStats", "alpha0", "beta_r", "constant_table", "convergent_growth_report",
    "convergents", "dtheta_min", "eps_pair", "erdos_kac", "exceptional_count",
    "golden_ratio_fraction", "h_count", "lower_bound_integral", "maximize_lower_bound",
    "me_fractions", "mertens_A", "nu_distribution", "omega_median_count",
    "pplus_adjacency", "raouj_F", "s_avg", "sqrt2_fraction", "t_sum", "totient_values",
]
