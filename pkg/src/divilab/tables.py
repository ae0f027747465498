"""Vectorized whole-range tables for counting scans up to ~10^8.

The divisor-indexed builders use the hyperbola split: divisors d <= sqrt(x)
are marked with one strided slice per d, and larger divisors are covered by
one strided slice per cofactor m = n/d <= sqrt(x), so a full tau table costs
O(sqrt(x)) numpy operations over O(x log x) cells.

Scans partition cleanly over segments with associative merges; results are
deterministic and independent of partitioning.
"""

from __future__ import annotations

import math
from typing import Iterator

import numpy as np

from .errors import ResourceError
from .sieve import primes_upto

DEFAULT_SCAN_CAP = 200_000_000


def _check_cap(x: int, cap: int = DEFAULT_SCAN_CAP) -> None:
    if x < 1:
        raise ResourceError(f"need x >= 1, got {x}")
    if x > cap:
        raise ResourceError(f"scan size {x} exceeds cap {cap}")


def tau_table(x: int) -> np.ndarray:
    """tau(n) for 0..x (index 0 unused)."""
    _check_cap(x)
    tau = np.zeros(x + 1, dtype=np.uint16)
    D = math.isqrt(x)
    for d in range(1, D + 1):
        tau[d::d] += 1
    for m in range(1, x // (D + 1) + 1):
        tau[m * (D + 1): m * (x // m) + 1: m] += 1
    return tau


def interval_multiples_hits(x: int, lo_d: int, hi_d: int, out: np.ndarray | None = None) -> np.ndarray:
    """Boolean mask on 0..x of integers having a divisor in (lo_d, hi_d]."""
    _check_cap(x)
    if out is None:
        out = np.zeros(x + 1, dtype=bool)
    else:
        out[:] = False
    hi_d = min(hi_d, x)
    if lo_d >= hi_d:
        return out
    D = math.isqrt(x)
    for d in range(lo_d + 1, min(hi_d, D) + 1):
        out[d::d] = True
    if hi_d > D:
        for m in range(1, x // (D + 1) + 1):
            lo = max(D, lo_d)
            hi = min(hi_d, x // m)
            if hi > lo:
                out[m * (lo + 1): m * hi + 1: m] = True
    return out


def tauplus_table(x: int) -> np.ndarray:
    """tau^+(n) for 0..x: the number of dyadic cells (2^k, 2^{k+1}] occupied
    by divisors of n, with the k = -1 cell holding d = 1."""
    _check_cap(x)
    kmax = (x - 1).bit_length() - 1 if x > 1 else 0
    acc = np.zeros(x + 1, dtype=np.uint8)
    hit = np.empty(x + 1, dtype=bool)
    for k in range(-1, kmax + 1):
        lo_d = (1 << k) if k >= 0 else 0
        hi_d = min(1 << (k + 1), x)
        if lo_d >= hi_d:
            continue
        interval_multiples_hits(x, lo_d, hi_d, out=hit)
        acc += hit
    return acc


def gpf_table(x: int) -> np.ndarray:
    """Largest prime factor of 0..x (gpf[1] = 1 by convention)."""
    _check_cap(x)
    gpf = np.ones(x + 1, dtype=np.int64 if x >= 1 << 31 else np.int32)
    pr = primes_upto(x)
    D = max(math.isqrt(x), 2)
    for p in pr[pr <= D]:
        gpf[p::p] = p
    large = pr[pr > D]
    # a prime p > sqrt(x) is automatically the largest prime factor of m*p
    for m in range(1, x // (D + 1) + 1):
        sel = large[large <= x // m]
        gpf[m * sel] = sel
    return gpf


def omega_table(x: int, with_multiplicity: bool = False) -> np.ndarray:
    """omega(n) (distinct primes) or Omega(n) (with multiplicity) for 0..x."""
    _check_cap(x)
    om = np.zeros(x + 1, dtype=np.uint8)
    pr = primes_upto(x)
    D = max(math.isqrt(x), 2)
    for p in pr[pr <= D]:
        p = int(p)
        om[p::p] += 1
        if with_multiplicity:
            pe = p * p
            while pe <= x:
                om[pe::pe] += 1
                pe *= p
    large = pr[pr > D]
    for m in range(1, x // (D + 1) + 1):
        sel = large[large <= x // m]
        om[m * sel] += 1
    return om


def mu_table(x: int) -> np.ndarray:
    """Moebius function for 0..x as int8."""
    _check_cap(x)
    mu = np.ones(x + 1, dtype=np.int8)
    pr = primes_upto(x)
    D = max(math.isqrt(x), 2)
    for p in pr[pr <= D]:
        p = int(p)
        mu[p::p] *= -1
        mu[p * p:: p * p] = 0
    large = pr[pr > D]
    for m in range(1, x // (D + 1) + 1):
        sel = large[large <= x // m]
        mu[m * sel] *= -1
    mu[0] = 0
    return mu


def totient_segment(lo: int, hi: int, small_primes: np.ndarray) -> np.ndarray:
    """Euler phi for the segment [lo, hi); small_primes must cover sqrt(hi)."""
    if lo < 1:
        raise ResourceError("totient segment needs lo >= 1")
    rem = np.arange(lo, hi, dtype=np.int64)
    phi = np.ones(hi - lo, dtype=np.int64)
    for p in small_primes:
        p = int(p)
        if p * p >= hi:
            break
        start = (-lo) % p
        idx = np.arange(start, hi - lo, p, dtype=np.int64)
        if len(idx) == 0:
            continue
        r = rem[idx]
        f = np.ones(len(idx), dtype=np.int64)
        div = r % p == 0
        while np.any(div):
            r[div] //= p
            f[div] *= p
            div = r % p == 0
        rem[idx] = r
        phi[idx] *= (f // p) * (p - 1)
    left = rem > 1
    phi[left] *= rem[left] - 1
    return phi


def e_set_mask(x: int) -> np.ndarray:
    """Boolean mask of the products d*d' with d < d' < 2d, up to x."""
    _check_cap(x)
    mask = np.zeros(x + 1, dtype=bool)
    for d in range(1, math.isqrt(x) + 1):
        hi = min(2 * d - 1, x // d)
        if hi > d:
            mask[d * (d + 1): d * hi + 1: d] = True
    return mask


def multiples_mask(generators, x: int) -> np.ndarray:
    """Membership mask of the set of multiples of the given generators on
    0..x.  Generators already covered by an earlier mark are skipped (their
    multiples are a subset)."""
    _check_cap(x)
    out = np.zeros(x + 1, dtype=bool)
    for a in generators:
        a = int(a)
        if a <= 0:
            raise ResourceError("generators must be positive")
        if a <= x and not out[a]:
            out[a::a] = True
    return out


def interval_divisor_counts(x: int, y: int, z: int, closed_left: bool = False) -> np.ndarray:
    """Number of divisors of each n <= x lying in (y, z] (or [y, z]),
    saturating at 255."""
    _check_cap(x)
    cnt = np.zeros(x + 1, dtype=np.uint8)
    lo = y if not closed_left else y - 1
    for d in range(max(1, lo + 1), min(z, x) + 1):
        sl = cnt[d::d]
        np.add(sl, 1, out=sl, where=sl < 255)
    return cnt


def divisor_lists(x: int, segment: int = 200_000, start: int = 1) -> Iterator[tuple[int, list[list[int]]]]:
    """Yield (base, lists) segments where lists[i] holds the ascending
    divisors of base + i, covering start..x.

    Small divisors d <= sqrt(hi) are appended d-major (ascending); large
    divisors are appended via cofactors m-major with m descending, which
    also lands ascending per n -- so no per-n sort is needed.
    """
    _check_cap(x)
    for base in range(start, x + 1, segment):
        hi = min(base + segment, x + 1)
        lists: list[list[int]] = [[] for _ in range(hi - base)]
        root = math.isqrt(hi - 1)
        for d in range(1, root + 1):
            first = ((base + d - 1) // d) * d
            for nn in range(first, hi, d):
                lists[nn - base].append(d)
        for m in range(root, 0, -1):
            d_lo = max(root + 1, (base + m - 1) // m)
            d_hi = (hi - 1) // m
            for d in range(d_lo, d_hi + 1):
                lists[m * d - base].append(d)
        yield base, lists
