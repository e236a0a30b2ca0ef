"""Explicit extremal and random witnesses.

Three families: a q x q unimodular matrix with orthogonal columns (the
discrete Fourier matrix) spread over products of two primes, which drives
the certified upper bounds on the 2-homogeneous radius; the one-variable
Moebius family whose critical radius approaches 1/3; and random unimodular
(Steinhaus) homogeneous polynomials for the ratio probes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import comb, isqrt

import numpy as np

from .errors import ResourceLimitError, WitnessUnavailableError
from .numtheory import MultiIndex, big_omega, nth_prime, prime_pi
from .polyspace import DirichletPolynomial, PolydiscPolynomial, enumerate_range, kernel_hom

_ORTHOGONALITY_TOL = 1e-9
_UNIMODULAR_TOL = 1e-12
_STEINHAUS_TERM_CAP = 100_000


@dataclass(frozen=True)
class MatrixWitness:
    """2-homogeneous Dirichlet witness built from a unimodular matrix
    (a_nk) with orthogonal columns, supported on indices p_n * p_{q+k}.

    ``l1`` is q^2 (unimodular entries) and ``analytic_sup_bound`` is
    q^{3/2}, the Cauchy-Schwarz consequence of column orthogonality; both
    are stored exactly as computed from q.
    """

    q: int
    x: float
    D: DirichletPolynomial
    l1: float
    analytic_sup_bound: float

    def __post_init__(self):
        coeffs = np.array(list(self.D.terms.values()), dtype=complex)
        if coeffs.size != self.q * self.q:
            raise ValueError(f"expected q^2 = {self.q**2} terms, got {coeffs.size}")
        moduli = np.abs(coeffs)
        if float(np.max(np.abs(moduli - 1.0))) > _UNIMODULAR_TOL:
            raise ValueError("witness coefficients are not unimodular")
        if max(self.D.terms) > self.x:
            raise ValueError("witness support exceeds the length bound")
        res = self.orthogonality_residual()
        if res > _ORTHOGONALITY_TOL:
            raise ValueError(f"columns are not orthogonal: residual {res:.3e}")

    def matrix(self) -> np.ndarray:
        """Recover (a_nk) from the stored Dirichlet terms."""
        A = np.empty((self.q, self.q), dtype=complex)
        for n in range(1, self.q + 1):
            p_n = nth_prime(n)
            for k in range(1, self.q + 1):
                A[n - 1, k - 1] = self.D.terms[p_n * nth_prime(self.q + k)]
        return A

    def orthogonality_residual(self) -> float:
        A = self.matrix()
        gram = A.conj().T @ A
        return float(np.max(np.abs(gram - self.q * np.eye(self.q))))


def dft_witness(x: float) -> MatrixWitness:
    """Matrix witness at length bound x with a_nk = e^{2 pi i n k / q},
    q = floor(pi(sqrt(x)) / 2).

    The Fourier matrix is unimodular with exactly orthogonal columns for
    every q, and p_n p_{q+k} <= p_{2q}^2 <= x keeps the support admissible.
    Below x = 49 no q >= 2 exists and the witness is unavailable.
    """
    if x < 2:
        raise WitnessUnavailableError(f"x={x} is too small for any witness")
    root = isqrt(math.floor(x))
    q = prime_pi(root) // 2
    if q < 2:
        raise WitnessUnavailableError(
            f"x={x} gives q={q} < 2; no matrix witness below x=49"
        )
    terms: dict[int, complex] = {}
    for n in range(1, q + 1):
        p_n = nth_prime(n)
        for k in range(1, q + 1):
            a_nk = complex(np.exp(2j * np.pi * (n * k) / q))
            terms[p_n * nth_prime(q + k)] = a_nk
    D = DirichletPolynomial(float(x), terms)
    return MatrixWitness(q, float(x), D, float(q * q), float(q) ** 1.5)


@dataclass(frozen=True)
class MoebiusWitness:
    """Truncated disc automorphism (a - z)/(1 - a z) as a one-variable
    polydisc polynomial, with the radius where its weighted coefficient sum
    reaches 1.

    ``sup_upper`` = 1 + (1+a) a^N is a certified sup bound: the automorphism
    has modulus <= 1 and the dropped tail has l1 norm (1+a) a^N.
    """

    P: PolydiscPolynomial
    critical_r: float
    sup_upper: float


def moebius_witness(a: float, degree_cap: int = 200) -> MoebiusWitness:
    """Degree-capped expansion a - (1-a^2) sum_k a^{k-1} z^k and the radius r
    solving sum_k |c_k| r^k = 1 (bisection to 1e-12).

    For the full series the solution is 1/(1+2a), decreasing to 1/3 as
    a -> 1; the truncation shifts the root by an amount controlled by the
    geometric tail, negligible at the default cap.
    """
    if not 0.0 < a < 1.0:
        raise ValueError(f"a must lie in (0, 1), got {a}")
    if degree_cap < 2:
        raise ValueError(f"degree cap must be >= 2, got {degree_cap}")
    terms: dict[MultiIndex, complex] = {MultiIndex(): complex(a)}
    lead = -(1.0 - a * a)
    for k in range(1, degree_cap + 1):
        terms[MultiIndex(((1, k),))] = complex(lead * a ** (k - 1))
    P = PolydiscPolynomial(1, terms)
    mags = [(alpha.degree, abs(c)) for alpha, c in P.terms.items()]

    def weighted_l1(r: float) -> float:
        return math.fsum(c * r**k for k, c in mags)

    lo, hi = 0.0, 1.0
    if weighted_l1(1.0) <= 1.0:
        critical = 1.0
    else:
        while hi - lo > 1e-12:
            mid = 0.5 * (lo + hi)
            if weighted_l1(mid) < 1.0:
                lo = mid
            else:
                hi = mid
        critical = 0.5 * (lo + hi)
    tail = (1.0 + a) * a**degree_cap
    return MoebiusWitness(P, critical, 1.0 + tail)


def steinhaus_witness(n_vars: int, m: int, seed: int) -> PolydiscPolynomial:
    """m-homogeneous polynomial in n_vars variables with independent uniform
    unimodular coefficients on every degree-m monomial; deterministic per
    seed."""
    if n_vars < 1:
        raise ValueError(f"n_vars must be >= 1, got {n_vars}")
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    if n_vars > 10 or m > 4:
        raise ResourceLimitError(f"steinhaus witness capped at n_vars<=10, m<=4")
    count = comb(n_vars + m - 1, m)
    if count > _STEINHAUS_TERM_CAP:
        raise ResourceLimitError(f"{count} monomials exceed the cap {_STEINHAUS_TERM_CAP}")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), n_vars, m]))
    phases = rng.uniform(0.0, 2.0 * np.pi, size=count)
    terms: dict[MultiIndex, complex] = {}
    for i, combo in enumerate(combinations_with_replacement(range(1, n_vars + 1), m)):
        exps: dict[int, int] = {}
        for j in combo:
            exps[j] = exps.get(j, 0) + 1
        alpha = MultiIndex(tuple(sorted(exps.items())))
        terms[alpha] = complex(np.exp(1j * phases[i]))
    return PolydiscPolynomial(n_vars, terms)


def steinhaus_dirichlet(x: float, m: int, seed: int) -> DirichletPolynomial:
    """Dirichlet-side Steinhaus witness: unimodular coefficients on every
    n <= x with exactly m prime divisors (with multiplicity)."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    support = kernel_hom(enumerate_range(x), m).members
    if not support:
        raise ValueError(f"no indices with Omega = {m} below x = {x}")
    if len(support) > _STEINHAUS_TERM_CAP:
        raise ResourceLimitError(f"{len(support)} terms exceed the cap")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), int(x), m]))
    phases = rng.uniform(0.0, 2.0 * np.pi, size=len(support))
    terms = {n: complex(np.exp(1j * ph)) for n, ph in zip(support, phases)}
    return DirichletPolynomial(float(x), terms)
