"""Sets of multiples: membership, density brackets, Behrend machinery, blocks.

Densities of finite generator sets are computed by inclusion-exclusion over
subset lcms.  Subsets whose running lcm exceeds a bound contribute less than
1/bound each; that tail is folded into a rigorous bracket, which keeps the
"exact" path honest for interval generators like (T, 2T].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .arith import INFINITE, Factored, divisors
from .density import DensityEstimate, exact_density
from .errors import ConstraintError, DomainError, ResourceError
from .sieve import primes_upto
from .tables import DEFAULT_SCAN_CAP, _check_cap, multiples_mask

MAX_EXACT_GENERATORS = 24
DEFAULT_LCM_BOUND = 10**18


class GeneratorSet:
    """A finite set of generators (naturals >= 2), possibly given as an
    integer interval (y, z].

    reduce() removes elements divisible by a smaller element; this leaves the
    set of multiples unchanged, and also leaves d_1(n, A) unchanged (a
    non-primitive element can never realize the smallest divisor in A).
    """

    def __init__(self, elements: Iterable[int] = (), interval: tuple[int, int] | None = None):
        if interval is not None:
            y, z = interval
            if z <= y:
                raise DomainError(f"empty interval ({y}, {z}]")
            if y < 1:
                raise DomainError(f"interval must sit in the naturals, got ({y}, {z}]")
            if z - y > 50_000_000:
                raise ResourceError(f"interval ({y}, {z}] too large to materialize")
            self.interval = (y, z)
            self.elements: tuple[int, ...] = tuple(range(y + 1, z + 1))
        else:
            elems = sorted(set(int(a) for a in elements))
            if any(a < 2 for a in elems):
                raise DomainError("generators must be >= 2")
            self.interval = None
            self.elements = tuple(elems)

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        if self.interval:
            return f"GeneratorSet(({self.interval[0]}, {self.interval[1]}])"
        return f"GeneratorSet({list(self.elements)})"

    def reduce(self) -> "GeneratorSet":
        """Primitive form: no element divides another."""
        kept: list[int] = []
        for a in self.elements:
            if not any(a % b == 0 for b in kept):
                kept.append(a)
        return GeneratorSet(kept)

    def truncated(self, T: int) -> "GeneratorSet":
        return GeneratorSet(a for a in self.elements if a <= T)


def multiples_count(A: GeneratorSet, x: int) -> int:
    """|M(A) ∩ [1, x]| by boolean-marking multiples of each generator."""
    _check_cap(x)
    mask = multiples_mask(A.elements, x)
    return int(np.count_nonzero(mask[1:]))


def _subset_sums(gens: Sequence[int], lcm_bound: int) -> tuple[list[Fraction], Fraction, int]:
    """DFS over nonempty subsets, accumulating S_k = sum over |S|=k of
    1/lcm(S).  Subtrees whose running lcm exceeds lcm_bound are pruned;
    returns (S_k by size, signed inclusion-exclusion total, pruned count)."""
    n = len(gens)
    sums = [Fraction(0)] * (n + 1)
    pruned = 0

    def walk(idx: int, lcm: int, size: int):
        nonlocal pruned
        for i in range(idx, n):
            new = lcm * gens[i] // math.gcd(lcm, gens[i])
            if new > lcm_bound:
                # all supersets of this branch have lcm >= new
                pruned += 1 << (n - i - 1)
                continue
            sums[size + 1] += Fraction(1, new)
            walk(i + 1, new, size + 1)

    walk(0, 1, 0)
    total = Fraction(0)
    for k in range(1, n + 1):
        total += sums[k] if k % 2 == 1 else -sums[k]
    return sums, total, pruned


def density_bracket(
    A: GeneratorSet,
    method: str = "auto",
    depth: int = 3,
    lcm_bound: int = DEFAULT_LCM_BOUND,
) -> DensityEstimate:
    """Natural density of M(A) with a rigorous bracket.

    exact_ie: full inclusion-exclusion over subset lcms (|A| <= 24), with
    lcm-bound pruning folded into the bracket.  bonferroni: alternating
    truncation; depth is 0-indexed, so depth d sums subset sizes 1..d+1 and
    an even depth ends on a positive term (upper bound), odd on negative
    (lower bound).
    """
    A = A.reduce()
    n = len(A)
    if n == 0:
        return exact_density(Fraction(0))
    if method == "auto":
        method = "exact_ie" if n <= MAX_EXACT_GENERATORS else "bonferroni"
    if method == "exact_ie":
        if n > MAX_EXACT_GENERATORS:
            raise ResourceError(
                f"exact inclusion-exclusion capped at {MAX_EXACT_GENERATORS} generators, got {n}"
            )
        sums, total, pruned = _subset_sums(A.elements, lcm_bound)
        if pruned == 0:
            return exact_density(total)
        tail = Fraction(pruned, lcm_bound)
        lo = max(0.0, float(total - tail))
        hi = min(1.0, float(total + tail))
        return DensityEstimate(float(total), lo, hi, "exact_ie_truncated",
                               params={"pruned_subsets": pruned})
    if method == "bonferroni":
        if depth < 0:
            raise DomainError(f"need depth >= 0, got {depth}")
        maxsize = min(depth + 2, n)  # one extra level gives the two-sided bracket
        terms = sum(math.comb(n, k) for k in range(1, maxsize + 1))
        if terms > 3_000_000:
            raise ResourceError(
                f"bonferroni depth {depth} over {n} generators needs {terms} "
                f"subset terms; lower the depth"
            )
        sums = [Fraction(0)] * (maxsize + 1)
        for k in range(1, maxsize + 1):
            for sub in combinations(A.elements, k):
                lcm = 1
                for a in sub:
                    lcm = lcm * a // math.gcd(lcm, a)
                sums[k] += Fraction(1, lcm)
        partial = Fraction(0)
        partials = []
        for k in range(1, maxsize + 1):
            partial += sums[k] if k % 2 == 1 else -sums[k]
            partials.append(partial)
        if len(partials) == 1:
            lo, hi = Fraction(0), partials[0]
        else:
            a, b = partials[-2], partials[-1]
            lo, hi = min(a, b), max(a, b)
        lo = max(lo, Fraction(0))  # the alternating bounds can be trivial
        hi = min(hi, Fraction(1))
        point = (lo + hi) / 2
        return DensityEstimate(float(point), float(lo), float(hi), "bonferroni",
                               params={"depth": depth})
    raise DomainError(f"unknown density method {method!r}")


def sieve_density(A: GeneratorSet, x: int) -> DensityEstimate:
    """Counting estimate |M(A) ∩ [1,x]| / x with the 2/sqrt(x)-style
    empirical band (not a rigorous bracket)."""
    cnt = multiples_count(A, x)
    p = cnt / x
    band = 2.0 / math.sqrt(x)
    return DensityEstimate(p, max(0.0, p - band), min(1.0, p + band),
                           "sieve_count", params={"x": x})


def log_density(A: GeneratorSet, x: int) -> DensityEstimate:
    """(sum_{n<=x, n in M(A)} 1/n) / ln x."""
    _check_cap(x)
    if len(A) == 0:
        return DensityEstimate(0.0, 0.0, 0.0, "logarithmic", params={"x": x})
    mask = multiples_mask(A.elements, x)
    members = np.flatnonzero(mask)
    val = float(np.sum(1.0 / members)) / math.log(x)
    band = 2.0 / math.log(x)
    return DensityEstimate(val, max(0.0, val - band), min(1.0, val + band),
                           "logarithmic", params={"x": x})


def sequential_density(A, T_grid: Sequence[int], **kw) -> list[DensityEstimate]:
    """Exact truncated densities d M(A ∩ [1, T]) along the grid; the sequence
    is non-decreasing since each truncation only adds generators."""
    gens = block_elements(A) if isinstance(A, BlockSequence) else A
    out = []
    for T in T_grid:
        est = density_bracket(gens.truncated(T), **kw)
        out.append(DensityEstimate(est.point, est.lower, est.upper, "sequential",
                                   params={"T": T, "inner": est.method}, exact=est.exact))
    return out


def d1(n: int, A: GeneratorSet, f: Factored | None = None):
    """Smallest divisor of n lying in A; the infinity sentinel when none."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    elems = set(A.elements)
    if not elems:
        return INFINITE
    if f is not None:
        for d in divisors(f).divisors:
            if d in elems:
                return d
        return INFINITE
    best = None
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            if d in elems:
                return d
            q = n // d
            if q in elems and (best is None or q < best):
                best = q
    return best if best is not None else INFINITE


def criterion4_scan(A: GeneratorSet, eps: float, x: int) -> float:
    """Empirical frequency of n <= x with n^{1-eps} < d_1(n, A) <= n: the
    obstruction measure for natural-density existence."""
    if not 0.0 < eps < 1.0:
        raise DomainError(f"need 0 < eps < 1, got {eps}")
    _check_cap(x)
    first = np.zeros(x + 1, dtype=np.int64)
    for a in A.elements:
        a = int(a)
        if a > x:
            break
        sl = first[a::a]
        sl[sl == 0] = a
    n = np.arange(x + 1, dtype=np.float64)
    thresh = n ** (1.0 - eps)
    hit = (first[1:] > thresh[1:]) & (first[1:] > 0)
    return float(np.count_nonzero(hit)) / x


def behrend_ineq_check(A: GeneratorSet, B: GeneratorSet) -> tuple[float, float, bool]:
    """Both sides of 1 - dM(A ∪ B) >= (1 - dM(A))(1 - dM(B)) by exact
    inclusion-exclusion."""
    union = GeneratorSet(set(A.elements) | set(B.elements))
    big = 10**40  # no pruning: the check needs untruncated rationals
    da = density_bracket(A, method="exact_ie", lcm_bound=big)
    db = density_bracket(B, method="exact_ie", lcm_bound=big)
    du = density_bracket(union, method="exact_ie", lcm_bound=big)
    if da.exact is None or db.exact is None or du.exact is None:
        raise ResourceError("behrend check needs untruncated exact densities")
    lhs = 1 - du.exact
    rhs = (1 - da.exact) * (1 - db.exact)
    return float(lhs), float(rhs), float(lhs) >= float(rhs) - 1e-12


# ---------------------------------------------------------------------------
# block sequences

@dataclass(frozen=True)
class BlockSequence:
    """Disjoint blocks (T_j, H_j T_j] subject to the growth condition
    1 + 1/T_j^{1-eta} <= H_j <= min(T_j, T_{j+1}/T_j)."""

    blocks: tuple[tuple[float, float], ...]
    family: str
    eta: float = 0.1


def validate_blocks(blocks: Sequence[tuple[float, float]], eta: float) -> None:
    for j, (T, H) in enumerate(blocks, start=1):
        if T < 2 or H <= 1:
            raise ConstraintError(f"block {j}: need T >= 2 and H > 1, got T={T}, H={H}")
        lo = 1.0 + T ** -(1.0 - eta)
        hi = T if j == len(blocks) else min(T, blocks[j][0] / T)
        if not lo <= H <= hi + 1e-12:
            raise ConstraintError(
                f"growth condition fails at block j={j}: "
                f"need {lo:.6g} <= H_j <= {hi:.6g}, got H_j={H:.6g}"
            )


def block_builder(family: str, params: dict, J: int, eta: float = 0.1) -> BlockSequence:
    """Construct a validated block sequence.

    families: explicit (params['blocks']), besicovitch (T_{j+1} = T_j^2,
    H_j = 2), a_lambda (blocks (exp j^lam, 2 exp j^lam]), theorem3
    (log(T_{j+1}/T_j) = j^sigma log(j+1)^tau, H_j = exp(log(j+1)^gamma / j^alpha)).
    """
    if J < 1:
        raise DomainError(f"need J >= 1, got {J}")
    if family == "explicit":
        blocks = [tuple(map(float, b)) for b in params["blocks"]]
    elif family == "besicovitch":
        T = float(params.get("T1", 4.0))
        blocks = []
        for _ in range(J):
            blocks.append((T, 2.0))
            T = T * T
    elif family == "a_lambda":
        lam = float(params["lam"])
        blocks = [(math.exp(j**lam), 2.0) for j in range(1, J + 1)]
    elif family == "theorem3":
        sigma = float(params["sigma"])
        tau = float(params["tau"])
        gamma = float(params["gamma"])
        alpha = float(params["alpha"])
        T = float(params.get("T1", 16.0))
        blocks = []
        for j in range(1, J + 1):
            H = math.exp(math.log(j + 1) ** gamma / j**alpha)
            blocks.append((T, H))
            T = T * math.exp(j**sigma * math.log(j + 1) ** tau)
    else:
        raise DomainError(f"unknown block family {family!r}")
    validate_blocks(blocks, eta)
    return BlockSequence(tuple(blocks), family, eta)


def block_elements(seq: BlockSequence, cap: int = DEFAULT_SCAN_CAP) -> GeneratorSet:
    """Materialize the integers in all blocks (resource-capped)."""
    elems: list[int] = []
    for T, H in seq.blocks:
        lo = math.floor(T)
        hi = math.floor(H * T)
        if hi > cap:
            raise ResourceError(f"block ({T}, {H * T}] exceeds materialization cap")
        elems.extend(range(max(2, lo + 1), hi + 1))
    return GeneratorSet(elems)


SIGMA0 = math.log(2.0) / (1.0 - math.log(2.0))


def alpha0(sigma: float) -> float:
    """Critical block-shrinkage exponent: (1 - log 2)(sigma0 - sigma) up to
    sigma0, then sigma0 - sigma; continuous at sigma0."""
    if sigma <= -1:
        raise DomainError(f"need sigma > -1, got {sigma}")
    if sigma <= SIGMA0:
        return (1.0 - math.log(2.0)) * (SIGMA0 - sigma)
    return SIGMA0 - sigma


# ---------------------------------------------------------------------------
# friable lower bound m(y)

def _friables_upto(limit: int, y: int) -> list[int]:
    out = [1]
    for p in primes_upto(y):
        p = int(p)
        cur = list(out)
        for r in cur:
            v = r * p
            while v <= limit:
                out.append(v)
                v *= p
    out.sort()
    return out


def m_of_y(A: GeneratorSet, y: int, truncation: int = 10**7) -> DensityEstimate:
    """Friable lower-bound functional for d M(A):

        m(y) = prod_{p<=y}(1 - 1/p) * sum 1/r

    over the y-friable members r of M(A ∩ friables).  The sum is truncated at
    the given bound; a Rankin-style tail estimate widens the upper bracket,
    never silently."""
    if y < 2:
        raise DomainError(f"need y >= 2, got {y}")
    # A_y: members of A that are themselves y-friable
    ay = []
    for a in A.elements:
        m = a
        for p in primes_upto(y):
            p = int(p)
            while m % p == 0:
                m //= p
        if m == 1:
            ay.append(a)
    prod = 1.0
    for p in primes_upto(y):
        prod *= 1.0 - 1.0 / int(p)
    if not ay:
        return DensityEstimate(0.0, 0.0, 0.0, "sequential", params={"y": y})
    total = 0.0
    for r in _friables_upto(truncation, y):
        if any(r % a == 0 for a in ay):
            total += 1.0 / r
    point = prod * total
    # Rankin: sum_{r > X, P+(r) <= y} 1/r <= X^{s-1} prod_{p<=y} (1 - p^{-s})^{-1}
    s = 1.0 - 1.0 / math.log(y) if y > 2 else 0.5
    tail = truncation ** (s - 1.0)
    for p in primes_upto(y):
        tail /= 1.0 - float(p) ** (-s)
    upper = min(1.0, point + prod * tail)
    return DensityEstimate(point, point, upper, "sequential",
                           params={"y": y, "truncation": truncation})


# ---------------------------------------------------------------------------
# the close-divisor-product set E and interval remainders

def is_in_E(n: int) -> bool:
    """n = d * d' with d < d' < 2d, i.e. n has a divisor strictly between
    sqrt(n/2) and sqrt(n)."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    for d in range(max(1, math.isqrt(n // 2)), math.isqrt(n) + 1):
        if d * d < n < 2 * d * d and n % d == 0:
            return True
    return False


def in_ME(n: int) -> bool:
    """Some divisor of n lies in E."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            if is_in_E(d) or is_in_E(n // d):
                return True
    return False


def remainder_Rn(n: int, x: int, x_ref: int = 10**8) -> tuple[float, float, float]:
    """Remainder R_n(x) = |M([n, 2n]) ∩ [1, x]| - eps_n * x, with the
    eps_n bracket propagated into (R, R_lower, R_upper).

    eps_n is exact when the interval has at most 24 integers (after
    primitive reduction it always does for n <= 23); otherwise it is a
    long-count estimate at min(x_ref, cap)."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    if n == 1:
        # divisor 1 lies in [1, 2], so M([1, 2]) is everything: R identically 0
        return 0.0, 0.0, 0.0
    A = GeneratorSet(interval=(n - 1, 2 * n))  # closed interval [n, 2n]
    cnt = multiples_count(A, x)
    red = A.reduce()
    if len(red) <= MAX_EXACT_GENERATORS:
        est = density_bracket(red, method="exact_ie")
    else:
        est = sieve_density(red, min(x_ref, DEFAULT_SCAN_CAP // 2))
    r = cnt - est.point * x
    return r, cnt - est.upper * x, cnt - est.lower * x


def max_gap(n: int, X: int) -> tuple[int, int]:
    """Largest gap between consecutive elements of M((n, 2n]) ∩ [1, X] and
    the left endpoint where it occurs."""
    _check_cap(X)
    A = GeneratorSet(interval=(n, 2 * n))
    mask = multiples_mask(A.elements, X)
    members = np.flatnonzero(mask)
    if len(members) < 2:
        raise DomainError(f"M(({n}, {2*n}]) has fewer than 2 elements up to {X}")
    gaps = np.diff(members)
    i = int(np.argmax(gaps))
    return int(gaps[i]), int(members[i])
