"""Smallest-prime-factor sieve, primality testing, and the sieve cache file.

The SPF table gives O(log n) factorization of every n <= limit and is the
backbone of all per-integer functions.  It is immutable after construction
and safe for concurrent reads.
"""

from __future__ import annotations

import math
import struct
from pathlib import Path

import numpy as np

from .errors import DomainError, ResourceError

# Construction allocates one 4-byte cell per integer (8 bytes above 2**32);
# the default cap keeps a full build comfortably inside a few GB of RAM.
DEFAULT_LIMIT_CAP = 400_000_000

_CACHE_MAGIC = b"DVL1"
_CACHE_VERSION = 1

# Deterministic Miller-Rabin witness set for all n < 2**64.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime_u64(n: int) -> bool:
    """Deterministic Miller-Rabin primality test for 0 <= n < 2**64."""
    if n < 0 or n >= 1 << 64:
        raise DomainError(f"is_prime_u64 needs 0 <= n < 2**64, got {n}")
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_upto(n: int) -> np.ndarray:
    """All primes <= n as an int64 array (boolean Eratosthenes sieve)."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(n + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if mask[p]:
            mask[p * p:: p] = False
    return np.flatnonzero(mask).astype(np.int64)


class SpfSieve:
    """Smallest-prime-factor table for 2..limit.

    Invariants: spf[n] is prime and divides n; spf[n] == n iff n is prime.
    Entries 0 and 1 are stored as 0.  The array is read-only.
    """

    def __init__(self, limit: int, spf: np.ndarray):
        self.limit = int(limit)
        self.spf = spf
        self.spf.flags.writeable = False
        self._primes: np.ndarray | None = None

    @classmethod
    def build(cls, limit: int, cap: int = DEFAULT_LIMIT_CAP) -> "SpfSieve":
        if limit < 2:
            raise DomainError(f"sieve limit must be >= 2, got {limit}")
        if limit > cap:
            raise ResourceError(f"sieve limit {limit} exceeds cap {cap}")
        dtype = np.uint32 if limit < 1 << 32 else np.uint64
        spf = np.zeros(limit + 1, dtype=dtype)
        for i in range(2, math.isqrt(limit) + 1):
            if spf[i] == 0:
                sl = spf[i * i:: i]
                sl[sl == 0] = i
        rest = np.flatnonzero(spf[2:] == 0) + 2
        spf[rest] = rest
        return cls(limit, spf)

    def is_prime(self, n: int) -> bool:
        self._check_range(n)
        return n >= 2 and int(self.spf[n]) == n

    def factor_pairs(self, n: int) -> list[tuple[int, int]]:
        """Prime-power decomposition [(p, e), ...] with p ascending."""
        self._check_range(n)
        spf = self.spf
        out: list[tuple[int, int]] = []
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out

    def primes(self) -> np.ndarray:
        """All primes <= limit (cached)."""
        if self._primes is None:
            idx = np.arange(len(self.spf), dtype=self.spf.dtype)
            mask = self.spf == idx
            mask[:2] = False
            self._primes = np.flatnonzero(mask).astype(np.int64)
        return self._primes

    def _check_range(self, n: int) -> None:
        if not 1 <= n <= self.limit:
            raise DomainError(f"n={n} outside sieve range 1..{self.limit}")

    # --- cache file: magic "DVL1", version u32, limit u64, then entries ---
    # Entries cover indices 0..limit (spf[0] = spf[1] = 0), little-endian,
    # u32 when limit < 2**32 else u64.

    def save(self, path: str | Path) -> None:
        path = Path(path)
        kind = "<u4" if self.limit < 1 << 32 else "<u8"
        with open(path, "wb") as fh:
            fh.write(struct.pack("<4sIQ", _CACHE_MAGIC, _CACHE_VERSION, self.limit))
            fh.write(self.spf.astype(kind, copy=False).tobytes())

    @classmethod
    def load(cls, path: str | Path) -> "SpfSieve":
        path = Path(path)
        with open(path, "rb") as fh:
            header = fh.read(16)
            if len(header) != 16:
                raise DomainError(f"sieve cache {path} truncated header")
            magic, version, limit = struct.unpack("<4sIQ", header)
            if magic != _CACHE_MAGIC:
                raise DomainError(f"sieve cache {path} has bad magic {magic!r}")
            if version != _CACHE_VERSION:
                raise DomainError(f"sieve cache {path} has unsupported version {version}")
            kind = "<u4" if limit < 1 << 32 else "<u8"
            data = np.fromfile(fh, dtype=np.dtype(kind))
        if len(data) != limit + 1:
            raise DomainError(
                f"sieve cache {path} has {len(data)} entries, expected {limit + 1}"
            )
        return cls(int(limit), data.astype(data.dtype.newbyteorder("="), copy=False))


def build_sieve(limit: int, cap: int = DEFAULT_LIMIT_CAP) -> SpfSieve:
    """Build the SPF sieve for 2..limit; deterministic and bit-identical across runs."""
    return SpfSieve.build(limit, cap=cap)
