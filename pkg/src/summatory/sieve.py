"""Moebius and Liouville functions: pointwise trial-division oracle and segmented sieve.

Two independent routes to the same values:

* ``factorize`` / ``mobius_of`` / ``liouville_of`` — per-integer trial
  division, slow but simple; serves as the reference oracle.
* ``sieve_block`` — segmented sieve over a contiguous range, the fast path
  used by all streaming consumers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import DomainError

#: Largest admissible ``hi`` for sieve_block.
SIEVE_LIMIT = 1 << 40
#: Trial division by primes up to 10**6 proves primality of cofactors up to 10**12.
ORACLE_LIMIT = 10**12
TRIAL_PRIME_BOUND = 10**6
#: Default sieve segment length; fits the int64 working set in cache-friendly chunks.
DEFAULT_BLOCK_LEN = 1 << 22


class Kind(Enum):
    """Which completely/multiplicative sign function a sequence holds."""

    MOBIUS = "mobius"
    LIOUVILLE = "liouville"

    @classmethod
    def parse(cls, text: str) -> "Kind":
        t = text.strip().lower()
        if t in ("mobius", "moebius", "mu", "mertens"):
            return cls.MOBIUS
        if t in ("liouville", "lambda"):
            return cls.LIOUVILLE
        raise DomainError(f"unknown kind {text!r}")


@dataclass(frozen=True)
class Factorization:
    """Prime factorization ``n = prod(p**e)`` with primes strictly increasing."""

    n: int
    factors: tuple[tuple[int, int], ...]

    def product(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p**e
        return out

    @property
    def num_distinct(self) -> int:
        return len(self.factors)

    @property
    def num_with_multiplicity(self) -> int:
        """Total number of prime factors counted with multiplicity."""
        return sum(e for _, e in self.factors)

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)


@dataclass
class SignSequence:
    """Dense block of mu or lambda values over ``[lo, hi)``.

    ``values[k - lo]`` is the function value at ``k``; codes are int8 in
    {-1, 0, +1} (0 never occurs for the Liouville kind).
    """

    lo: int
    hi: int
    kind: Kind
    values: np.ndarray

    def __post_init__(self):
        if self.lo < 1 or self.hi <= self.lo:
            raise DomainError(f"bad range [{self.lo}, {self.hi})")
        if len(self.values) != self.hi - self.lo:
            raise DomainError("values length does not match range")

    def __len__(self) -> int:
        return self.hi - self.lo

    def value_at(self, n: int) -> int:
        if not self.lo <= n < self.hi:
            raise DomainError(f"{n} outside [{self.lo}, {self.hi})")
        return int(self.values[n - self.lo])


# ---------------------------------------------------------------------------
# prime tables
# ---------------------------------------------------------------------------

_prime_cache: dict = {"limit": 0, "primes": np.empty(0, dtype=np.int64)}
_trial_primes_list: Optional[list] = None


def primes_upto(limit: int) -> np.ndarray:
    """All primes <= limit as int64, cached (cache only grows)."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    if limit > _prime_cache["limit"]:
        sieve = np.ones(limit + 1, dtype=bool)
        sieve[:2] = False
        for p in range(2, math.isqrt(limit) + 1):
            if sieve[p]:
                sieve[p * p :: p] = False
        _prime_cache["primes"] = np.flatnonzero(sieve).astype(np.int64)
        _prime_cache["limit"] = limit
    primes = _prime_cache["primes"]
    cut = int(np.searchsorted(primes, limit, side="right"))
    return primes[:cut]


def _trial_primes() -> list:
    global _trial_primes_list
    if _trial_primes_list is None:
        _trial_primes_list = primes_upto(TRIAL_PRIME_BOUND).tolist()
    return _trial_primes_list


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond the oracle bound."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# pointwise oracle
# ---------------------------------------------------------------------------


def factorize(n: int) -> Factorization:
    """Factor ``n`` by trial division over primes up to 10**6.

    Valid for 1 <= n <= 10**12 (any surviving cofactor is then prime);
    larger n are rejected rather than silently mis-factored.
    """
    n = int(n)
    if n < 1 or n > ORACLE_LIMIT:
        raise DomainError(f"factorize requires 1 <= n <= {ORACLE_LIMIT}, got {n}")
    m = n
    out = []
    for p in _trial_primes():
        if p * p > m:
            break
        if m % p == 0:
            e = 1
            m //= p
            while m % p == 0:
                e += 1
                m //= p
            out.append((p, e))
    if m > 1:
        out.append((m, 1))
    return Factorization(n, tuple(out))


def mobius_of(n: int) -> int:
    """mu(n): 0 if a square divides n, else (-1)**(number of distinct prime factors)."""
    f = factorize(n)
    if not f.is_squarefree:
        return 0
    return -1 if f.num_distinct % 2 else 1


def liouville_of(n: int) -> int:
    """lambda(n) = (-1)**Omega(n), prime factors counted with multiplicity."""
    f = factorize(n)
    return -1 if f.num_with_multiplicity % 2 else 1


# ---------------------------------------------------------------------------
# segmented sieve
# ---------------------------------------------------------------------------


def _mu_lambda_range(lo: int, hi: int, base_primes: Optional[np.ndarray] = None):
    """Compute (mu, lambda) int8 arrays over [lo, hi) in one pass.

    Divides out every base prime p <= sqrt(hi-1) with full multiplicity,
    tracking Omega-parity and a square-divisibility flag; a residual
    cofactor > 1 is a single prime and flips parity once.
    """
    top = hi - 1
    rem = np.arange(lo, hi, dtype=np.int64)
    parity = np.zeros(hi - lo, dtype=np.int8)
    squared = np.zeros(hi - lo, dtype=bool)
    primes = base_primes if base_primes is not None else primes_upto(math.isqrt(top))
    root = math.isqrt(top)
    for p in primes.tolist():
        if p > root:
            break
        pe = p
        e = 1
        while pe <= top:
            start = ((lo + pe - 1) // pe) * pe
            if start >= hi:
                break
            off = start - lo
            rem[off::pe] //= p
            parity[off::pe] ^= 1
            if e >= 2:
                squared[off::pe] = True
            pe *= p
            e += 1
    parity[rem > 1] ^= 1
    lam = np.where(parity, -1, 1).astype(np.int8)
    mu = np.where(squared, 0, lam).astype(np.int8)
    return mu, lam


def _check_range(lo: int, hi: int):
    if lo < 1 or hi <= lo:
        raise DomainError(f"need 1 <= lo < hi, got [{lo}, {hi})")
    if hi > SIEVE_LIMIT:
        raise DomainError(f"hi={hi} exceeds sieve limit {SIEVE_LIMIT}")


def sieve_block(lo: int, hi: int, kind: Kind) -> SignSequence:
    """Sieve mu or lambda over ``[lo, hi)``."""
    _check_range(lo, hi)
    mu, lam = _mu_lambda_range(lo, hi)
    return SignSequence(lo, hi, kind, mu if kind is Kind.MOBIUS else lam)


def _block_task(args):
    lo, hi, prime_bound = args
    primes = primes_upto(prime_bound)
    return _mu_lambda_range(lo, hi, primes)


def iter_mu_lambda_blocks(
    lo: int,
    hi: int,
    block_len: int = DEFAULT_BLOCK_LEN,
    workers: int = 1,
) -> Iterator[tuple[int, int, np.ndarray, np.ndarray]]:
    """Yield ``(blo, bhi, mu, lam)`` for consecutive segments covering [lo, hi).

    Blocks are pure functions of their range; with ``workers > 1`` they are
    computed on a process pool but always yielded in ascending order, so any
    ordered reduction over them is deterministic regardless of worker count.
    """
    _check_range(lo, hi)
    if block_len < 1:
        raise DomainError("block_len must be >= 1")
    ranges = [(a, min(a + block_len, hi)) for a in range(lo, hi, block_len)]
    prime_bound = math.isqrt(hi - 1)
    if workers <= 1 or len(ranges) == 1:
        primes = primes_upto(prime_bound)
        for a, b in ranges:
            mu, lam = _mu_lambda_range(a, b, primes)
            yield a, b, mu, lam
        return
    primes_upto(prime_bound)  # warm the cache before fork
    tasks = [(a, b, prime_bound) for a, b in ranges]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for (a, b), (mu, lam) in zip(ranges, pool.map(_block_task, tasks)):
            yield a, b, mu, lam


def values_at(points: Sequence[int], kind: Kind, block_len: int = DEFAULT_BLOCK_LEN) -> np.ndarray:
    """Sieved values at sorted sample points (convenience for spot checks)."""
    pts = np.asarray(sorted(int(p) for p in points), dtype=np.int64)
    if len(pts) == 0:
        return np.empty(0, dtype=np.int8)
    out = np.empty(len(pts), dtype=np.int8)
    sel = 0 if kind is Kind.MOBIUS else 1
    for blo, bhi, mu, lam in iter_mu_lambda_blocks(int(pts[0]), int(pts[-1]) + 1, block_len):
        a = int(np.searchsorted(pts, blo, side="left"))
        b = int(np.searchsorted(pts, bhi, side="left"))
        if a < b:
            arr = (mu, lam)[sel]
            out[a:b] = arr[pts[a:b] - blo]
    return out
