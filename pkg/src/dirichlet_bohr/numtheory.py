"""Prime-arithmetic substrate.

Sieve, prime counting, factorization, prime power sums, and the bijection
between finitely supported exponent vectors and positive integers
(``bohr_encode`` / ``bohr_decode``) that underlies the whole package.

Everything here is deterministic: a plain (segmented) Eratosthenes sieve,
trial division backed by a smallest-prime-factor table, and fixed ascending
summation order for the prime power sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import isqrt

import numpy as np

from .errors import EncodeOverflowError, ResourceLimitError, TableTooSmallError

SIEVE_CAP = 1 << 40
ENCODE_MAX = (1 << 63) - 1

_SEGMENT_SIZE = 1 << 22


@dataclass(frozen=True)
class PrimeTable:
    """All primes up to ``limit``, ascending, as an int64 array."""

    limit: int
    primes: np.ndarray

    def __len__(self) -> int:
        return int(self.primes.size)


def _plain_sieve(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def sieve_primes(limit: int, _segment: int = _SEGMENT_SIZE) -> PrimeTable:
    """Complete prime table below ``limit`` (segmented Eratosthenes)."""
    limit = int(limit)
    if limit < 2:
        raise ValueError(f"sieve limit must be >= 2, got {limit}")
    if limit > SIEVE_CAP:
        raise ResourceLimitError(f"sieve limit {limit} exceeds cap 2^40")
    if limit <= _segment:
        return PrimeTable(limit, _plain_sieve(limit))
    root = isqrt(limit)
    root_primes = _plain_sieve(root)
    chunks = [root_primes]
    small = root_primes.tolist()
    lo = root + 1
    while lo <= limit:
        hi = min(lo + _segment - 1, limit)
        flags = np.ones(hi - lo + 1, dtype=bool)
        for p in small:
            start = ((lo + p - 1) // p) * p
            if start <= hi:
                flags[start - lo :: p] = False
        chunks.append((np.flatnonzero(flags) + lo).astype(np.int64))
        lo = hi + 1
    return PrimeTable(limit, np.concatenate(chunks))


_shared_table: PrimeTable | None = None


def shared_table(limit: float) -> PrimeTable:
    """Module-wide prime table, grown (by powers of two) on demand.

    Immutable once built, so safe to hand out across threads.
    """
    global _shared_table
    need = max(int(limit), 2)
    if _shared_table is None or _shared_table.limit < need:
        grown = 1 << max(need.bit_length(), 16)
        _shared_table = sieve_primes(grown)
    return _shared_table


def prime_pi(x: float, table: PrimeTable | None = None) -> int:
    """Number of primes <= x.

    With an explicit ``table`` the query must stay below ``table.limit``;
    without one the shared table is grown as needed.
    """
    if x < 0:
        raise ValueError(f"prime_pi argument must be >= 0, got {x}")
    if table is None:
        table = shared_table(max(x, 2))
    elif x > table.limit:
        raise TableTooSmallError(f"x={x} exceeds table limit {table.limit}")
    return int(np.searchsorted(table.primes, math.floor(x), side="right"))


def nth_prime(k: int) -> int:
    """The k-th prime, 1-indexed (p_1 = 2)."""
    if k < 1:
        raise ValueError(f"prime index must be >= 1, got {k}")
    if k < 6:
        guess = 13
    else:
        # Rosser's bound p_k < k(ln k + ln ln k) for k >= 6
        guess = int(k * (math.log(k) + math.log(math.log(k)))) + 10
    table = shared_table(guess)
    while len(table) < k:
        table = shared_table(table.limit * 2)
    return int(table.primes[k - 1])


def prime_index(p: int) -> int:
    """Position of the prime p in the prime sequence (2 -> 1, 3 -> 2, ...)."""
    table = shared_table(p)
    i = int(np.searchsorted(table.primes, p))
    if i >= len(table) or int(table.primes[i]) != p:
        raise ValueError(f"{p} is not prime")
    return i + 1


@dataclass(frozen=True)
class Factorization:
    """Canonical factorization n = prod p^e with distinct ascending primes."""

    n: int
    pairs: tuple[tuple[int, int], ...]

    @property
    def big_omega(self) -> int:
        return sum(e for _, e in self.pairs)


_spf_table: np.ndarray | None = None
_SPF_SOFT_CAP = 1 << 24


def _spf_upto(limit: int) -> np.ndarray:
    """Smallest-prime-factor array; spf[n] == 0 marks n prime (or n < 2)."""
    global _spf_table
    if _spf_table is None or _spf_table.size <= limit:
        size = 1 << max(int(limit).bit_length(), 20)
        spf = np.zeros(size, dtype=np.int32)
        for p in range(2, isqrt(size - 1) + 1):
            if spf[p] == 0:
                sl = spf[p * p :: p]
                sl[sl == 0] = p
        _spf_table = spf
    return _spf_table


def _wheel_factor_pairs(n: int) -> list[tuple[int, int]]:
    pairs = []
    for p in (2, 3):
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            pairs.append((p, e))
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            if e:
                pairs.append((p, e))
        f += 6
    if n > 1:
        pairs.append((n, 1))
    return pairs


def factorize(n: int) -> Factorization:
    """Canonical factorization; n = 1 yields the empty product."""
    n = int(n)
    if n < 1:
        raise ValueError(f"cannot factorize {n}; need a positive integer")
    if n == 1:
        return Factorization(1, ())
    if n < _SPF_SOFT_CAP:
        spf = _spf_upto(n)
        pairs = []
        m = n
        while m > 1:
            p = int(spf[m]) or m
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            pairs.append((p, e))
        pairs.sort()
        return Factorization(n, tuple(pairs))
    return Factorization(n, tuple(_wheel_factor_pairs(n)))


def big_omega(n: int) -> int:
    """Number of prime divisors of n counted with multiplicity."""
    return factorize(n).big_omega


@dataclass(frozen=True, order=True)
class MultiIndex:
    """Finitely supported exponent vector, stored as sparse (coordinate,
    exponent) pairs with coordinates ascending and exponents >= 1.

    Coordinates are 1-based: coordinate j is the slot of the j-th prime.
    Instances are hashable dict keys; the dataclass ordering (lexicographic
    on the pairs) is the canonical term order used throughout the package.
    """

    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        cleaned = tuple((int(c), int(e)) for c, e in self.pairs)
        object.__setattr__(self, "pairs", cleaned)
        last = 0
        for c, e in cleaned:
            if c <= last:
                raise ValueError(f"coordinates must be ascending and >= 1: {cleaned}")
            if e < 1:
                raise ValueError(f"exponents must be >= 1: {cleaned}")
            last = c

    @classmethod
    def from_dense(cls, exponents) -> "MultiIndex":
        """Build from a dense exponent vector (position j-1 holds alpha_j)."""
        return cls(tuple((j + 1, int(e)) for j, e in enumerate(exponents) if e))

    @property
    def degree(self) -> int:
        return sum(e for _, e in self.pairs)

    @property
    def max_coordinate(self) -> int:
        return self.pairs[-1][0] if self.pairs else 0

    def dense(self, d: int | None = None) -> tuple[int, ...]:
        size = self.max_coordinate if d is None else d
        out = [0] * size
        for c, e in self.pairs:
            out[c - 1] = e
        return tuple(out)


def bohr_encode(alpha: MultiIndex) -> int:
    """n = prod p_j^{alpha_j}; inverse of bohr_decode. Empty index -> 1."""
    n = 1
    for c, e in alpha.pairs:
        n *= nth_prime(c) ** e
        if n > ENCODE_MAX:
            raise EncodeOverflowError(
                f"encoding overflows 63-bit range at coordinate {c} (p_{c}^{e})"
            )
    return n


def bohr_decode(n: int) -> MultiIndex:
    """Exponent vector of n: prime p_j contributes exponent at coordinate j."""
    f = factorize(n)
    return MultiIndex(tuple((prime_index(p), e) for p, e in f.pairs))


def prime_power_sum(alpha: float, x: float) -> float:
    """Sum of p^(-alpha) over primes p <= x, accumulated in ascending order."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if x < 2:
        raise ValueError(f"x must be >= 2, got {x}")
    if x > SIEVE_CAP:
        raise ResourceLimitError(f"x={x} exceeds sieve cap 2^40")
    table = shared_table(x)
    primes = table.primes[table.primes <= x]
    terms = primes.astype(np.float64) ** (-alpha)
    total = 0.0
    for t in terms.tolist():
        total += t
    return total
