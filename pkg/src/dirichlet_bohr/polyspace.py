"""Sparse data model for Dirichlet polynomials, polydisc polynomials, and
index sets with their kernel operators, plus the lift identifying the
Dirichlet side with the polydisc side.

All containers are frozen dataclasses holding sorted term maps; treat them
as immutable. Coefficient l1 norms use ``math.fsum`` so they are exact to
rounding and independent of term order, which makes "lift preserves l1"
an exact identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import EncodeOverflowError, LiftError, ResourceLimitError
from .numtheory import (
    MultiIndex,
    big_omega,
    bohr_decode,
    bohr_encode,
    factorize,
    nth_prime,
    prime_pi,
)


@dataclass(frozen=True)
class DirichletPolynomial:
    """Finite Dirichlet polynomial: sparse map n -> a_n with 1 <= n <= x.

    Zero coefficients are dropped on construction; terms are stored sorted
    by n.
    """

    x: float
    terms: dict[int, complex]

    def __post_init__(self):
        x = float(self.x)
        if x < 2:
            raise ValueError(f"length bound x must be >= 2, got {x}")
        cleaned: dict[int, complex] = {}
        for n, a in self.terms.items():
            n = int(n)
            if n < 1:
                raise ValueError(f"term index must be >= 1, got {n}")
            if n > x:
                raise ValueError(f"term index {n} exceeds length bound x={x}")
            a = complex(a)
            if a != 0:
                cleaned[n] = a
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "terms", dict(sorted(cleaned.items())))

    def l1(self) -> float:
        return math.fsum(abs(a) for a in self.terms.values())

    def coefficient(self, n: int) -> complex:
        return self.terms.get(n, 0j)

    def support(self) -> tuple[int, ...]:
        return tuple(self.terms)


@dataclass(frozen=True)
class PolydiscPolynomial:
    """Polynomial on the d-dimensional polydisc: sparse map alpha -> c_alpha."""

    dimension: int
    terms: dict[MultiIndex, complex]

    def __post_init__(self):
        d = int(self.dimension)
        if d < 1:
            raise ValueError(f"dimension must be >= 1, got {d}")
        cleaned: dict[MultiIndex, complex] = {}
        for alpha, c in self.terms.items():
            if not isinstance(alpha, MultiIndex):
                alpha = MultiIndex(tuple(alpha))
            if alpha.max_coordinate > d:
                raise ValueError(
                    f"term {alpha.pairs} uses coordinate beyond dimension {d}"
                )
            c = complex(c)
            if c != 0:
                cleaned[alpha] = c
        object.__setattr__(self, "dimension", d)
        object.__setattr__(self, "terms", dict(sorted(cleaned.items())))

    def l1(self) -> float:
        return math.fsum(abs(c) for c in self.terms.values())

    def degree(self) -> int:
        return max((a.degree for a in self.terms), default=0)

    def coefficient(self, alpha: MultiIndex) -> complex:
        return self.terms.get(alpha, 0j)

    def constant_term(self) -> complex:
        return self.terms.get(MultiIndex(), 0j)

    def support(self) -> tuple[MultiIndex, ...]:
        return tuple(self.terms)


@dataclass(frozen=True)
class IndexSet:
    """Explicit finite subset of the positive integers, sorted, with a label."""

    members: tuple[int, ...]
    label: str = ""

    def __post_init__(self):
        cleaned = sorted({int(k) for k in self.members})
        if cleaned and cleaned[0] < 1:
            raise ValueError(f"index sets live in the positive integers: {cleaned[0]}")
        object.__setattr__(self, "members", tuple(cleaned))

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, k) -> bool:
        return k in set(self.members)


def lift(D: DirichletPolynomial) -> PolydiscPolynomial:
    """Identify sum a_n n^{-s} with the polydisc polynomial that puts a_n on
    the monomial z^alpha, p^alpha = n. Dimension is pi(x)."""
    try:
        d = max(prime_pi(math.floor(D.x)), 1)
        terms = {bohr_decode(n): a for n, a in D.terms.items()}
    except ResourceLimitError as exc:
        raise LiftError(f"lift failed: {exc}") from exc
    return PolydiscPolynomial(d, terms)


def push(P: PolydiscPolynomial, x: float) -> DirichletPolynomial:
    """Inverse of lift on its image; every encoded index must stay <= x."""
    terms: dict[int, complex] = {}
    offenders: list[MultiIndex] = []
    for alpha, c in P.terms.items():
        try:
            n = bohr_encode(alpha)
        except EncodeOverflowError:
            offenders.append(alpha)
            continue
        if n > x:
            offenders.append(alpha)
        else:
            terms[n] = c
    if offenders:
        shown = ", ".join(str(a.pairs) for a in offenders[:5])
        raise LiftError(
            f"{len(offenders)} term(s) encode beyond x={x}: {shown}", offenders
        )
    return DirichletPolynomial(x, terms)


def homogeneous_part(P: PolydiscPolynomial, m: int) -> PolydiscPolynomial:
    """Terms of total degree exactly m; the parts partition P."""
    if m < 0:
        raise ValueError(f"degree must be >= 0, got {m}")
    return PolydiscPolynomial(
        P.dimension, {a: c for a, c in P.terms.items() if a.degree == m}
    )


def dirichlet_homogeneity(D: DirichletPolynomial) -> int | None:
    """Common Omega-grade of the support, or None if mixed/empty."""
    grades = {big_omega(n) for n in D.terms}
    if len(grades) == 1:
        return grades.pop()
    return None


def kernel_dim(J: IndexSet, n: int) -> IndexSet:
    """Members of J whose prime factors all lie among the first n primes.

    1 is always retained (empty factorization).
    """
    if n < 1:
        raise ValueError(f"kernel dimension must be >= 1, got {n}")
    p_n = nth_prime(n)
    kept = [k for k in J if all(p <= p_n for p, _ in factorize(k).pairs)]
    return IndexSet(tuple(kept), f"{J.label or 'J'}({n})")


def kernel_hom(J: IndexSet, m: int) -> IndexSet:
    """Members of J with exactly m prime divisors counted with multiplicity."""
    if m < 0:
        raise ValueError(f"homogeneity must be >= 0, got {m}")
    kept = [k for k in J if big_omega(k) == m]
    return IndexSet(tuple(kept), f"{J.label or 'J'}[{m}]")


def block_index_set(blocks: Iterable[Iterable[int]], x: float) -> IndexSet:
    """Union over blocks of all products of primes within one block, capped
    at x; 1 is always included. Blocks must be pairwise disjoint prime sets."""
    cap = math.floor(x)
    if cap < 1:
        raise ValueError(f"cap must be >= 1, got {x}")
    seen: set[int] = set()
    members: set[int] = {1}
    for block in blocks:
        primes = sorted({int(p) for p in block})
        for p in primes:
            if factorize(p).pairs != ((p, 1),):
                raise ValueError(f"block entry {p} is not prime")
            if p in seen:
                raise ValueError(f"blocks are not disjoint: prime {p} repeats")
        seen.update(primes)
        # products of primes from this block only, DFS with non-decreasing
        # prime choice so each multiset appears once
        stack = [(1, 0)]
        while stack:
            value, start = stack.pop()
            for i in range(start, len(primes)):
                v = value * primes[i]
                if v <= cap:
                    members.add(v)
                    stack.append((v, i))
    return IndexSet(tuple(members), f"blocks<= {cap}")


def enumerate_range(x: float) -> IndexSet:
    """The initial segment {1, ..., floor(x)}."""
    if x < 1:
        raise ValueError(f"range bound must be >= 1, got {x}")
    top = math.floor(x)
    return IndexSet(tuple(range(1, top + 1)), f"range:1..{top}")


# -- JSON wire formats --------------------------------------------------------
#
# DirichletPolynomial: {"x": number, "terms": [[n, re, im], ...]}
# PolydiscPolynomial:  {"d": number, "terms": [[[[coord, exp], ...], re, im], ...]}
#
# Terms are ordered by key, so serialization is byte-stable.


def dirichlet_to_json(D: DirichletPolynomial) -> dict:
    return {
        "x": D.x,
        "terms": [[n, a.real, a.imag] for n, a in D.terms.items()],
    }


def dirichlet_from_json(obj: Mapping) -> DirichletPolynomial:
    try:
        x = float(obj["x"])
        terms = {int(n): complex(re, im) for n, re, im in obj["terms"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed Dirichlet polynomial JSON: {exc}") from exc
    return DirichletPolynomial(x, terms)


def polydisc_to_json(P: PolydiscPolynomial) -> dict:
    return {
        "d": P.dimension,
        "terms": [
            [[[c, e] for c, e in alpha.pairs], coeff.real, coeff.imag]
            for alpha, coeff in P.terms.items()
        ],
    }


def polydisc_from_json(obj: Mapping) -> PolydiscPolynomial:
    try:
        d = int(obj["d"])
        terms = {
            MultiIndex(tuple((int(c), int(e)) for c, e in pairs)): complex(re, im)
            for pairs, re, im in obj["terms"]
        }
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed polydisc polynomial JSON: {exc}") from exc
    return PolydiscPolynomial(d, terms)
