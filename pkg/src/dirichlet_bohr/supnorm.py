"""Sup-norm machinery on the polydisc torus.

Lower bounds are *certified*: every reported value is |P| re-evaluated at a
stored torus point, so the estimate can never exceed the true sup norm.
Upper bounds are only ever the coefficient l1 norm or a caller-supplied
analytic bound; no sampled value is labeled certified.

Estimation strategy: coarse sampling (a full angle grid in low dimension,
seeded uniform batches otherwise) followed by cyclic coordinate phase
ascent. Restricted to one phase the modulus is a degree-bounded
trigonometric polynomial, so each coordinate is optimized by a dense line
scan plus golden-section refinement; multistart from per-batch maxima
covers the torus. Batches own deterministic sub-seeds and the reduction is
an associative max with a first-index tie-break, so results are bit-stable
for a fixed seed regardless of worker count (capped by ``DBR_THREADS``).
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy import sparse

from .errors import AliasingError, PreconditionError, ResourceLimitError
from .numtheory import shared_table
from .polyspace import DirichletPolynomial, PolydiscPolynomial, homogeneous_part, lift

TWO_PI = 2.0 * math.pi
DEFAULT_SEED = 0x5EED

_GRID_MAX_DIM = 6
_GRID_AUTO_CAP = 1 << 20  # beyond this many grid points, fall back to random
_GRID_ASCENT_STARTS = 4
_BATCH = 4096
_EVAL_ELEMENT_BUDGET = 2_000_000
_ANGLE_TOL = 1e-10
_TLINE_SPAN = 1.0e4
_TLINE_TAG = 1 << 32


@dataclass(frozen=True)
class Budget:
    """Work limits shared by the samplers and searchers.

    grid_per_dim / random_samples / ascent_iters drive sup-norm estimation;
    restarts / descent_steps drive the worst-case coefficient searches.
    """

    grid_per_dim: int = 16
    random_samples: int = 100_000
    ascent_iters: int = 50
    restarts: int = 32
    descent_steps: int = 200

    def __post_init__(self):
        for name in ("grid_per_dim", "random_samples", "ascent_iters", "restarts", "descent_steps"):
            if getattr(self, name) < 1:
                raise ValueError(f"budget field {name} must be >= 1")


DEFAULT_BUDGET = Budget()


@dataclass(frozen=True)
class SupEstimate:
    """Certified-lower / certified-upper bracket for a sup norm.

    ``lower`` is |P| at ``witness``; ``upper`` is the l1 norm (or an
    analytic bound supplied downstream). ``witness`` is empty only for the
    zero polynomial.
    """

    lower: float
    upper: float
    method: str
    samples_used: int
    seed: int
    witness: tuple[float, ...] = ()

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"lower {self.lower} exceeds upper {self.upper}")

    def to_json(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "method": self.method,
            "seed": self.seed,
            "witness": list(self.witness),
        }


@dataclass(frozen=True)
class CaratheodoryReport:
    lhs: float
    rhs: float
    passed: bool

    def to_json(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "pass": self.passed}


def eval_on_torus(P: PolydiscPolynomial, angles) -> complex:
    """P at the torus point with the given angles, summed in canonical term
    order (deterministic to the last bit)."""
    angles = np.asarray(angles, dtype=float)
    if angles.ndim != 1 or angles.size != P.dimension:
        raise ValueError(
            f"need {P.dimension} angles, got shape {angles.shape}"
        )
    total = 0j
    for alpha, c in P.terms.items():
        phase = 0.0
        for j, e in alpha.pairs:
            phase += e * angles[j - 1]
        total += c * cmath.exp(1j * phase)
    return total


def eval_at(P: PolydiscPolynomial, z) -> complex:
    """P at a general point of the (closed) polydisc."""
    z = np.asarray(z, dtype=complex)
    if z.ndim != 1 or z.size != P.dimension:
        raise ValueError(f"need {P.dimension} coordinates, got shape {z.shape}")
    total = 0j
    for alpha, c in P.terms.items():
        w = 1.0 + 0j
        for j, e in alpha.pairs:
            w *= z[j - 1] ** e
        total += c * w
    return total


class _Compiled:
    """Vectorized view of a polydisc polynomial: coefficient vector plus a
    sparse (terms x dims) exponent matrix, with per-coordinate term groups
    for the ascent."""

    def __init__(self, P: PolydiscPolynomial):
        alphas = list(P.terms)
        self.coeffs = np.array([P.terms[a] for a in alphas], dtype=complex)
        self.d = P.dimension
        rows, cols, data = [], [], []
        for t, alpha in enumerate(alphas):
            for c, e in alpha.pairs:
                rows.append(t)
                cols.append(c - 1)
                data.append(float(e))
        self.E = sparse.csr_matrix(
            (data, (rows, cols)), shape=(len(alphas), P.dimension)
        )
        by_coord: dict[int, list[int]] = {}
        for t, c, e in zip(rows, cols, data):
            by_coord.setdefault(c, []).append(t)
        self.groups = []
        coo = {(t, c): e for t, c, e in zip(rows, cols, data)}
        for c in sorted(by_coord):
            tids = np.array(sorted(by_coord[c]), dtype=np.intp)
            exps = np.array([coo[(t, c)] for t in tids], dtype=float)
            self.groups.append((c, tids, exps, exps.astype(np.int64)))

    def moduli(self, angles: np.ndarray) -> np.ndarray:
        """|P| at each row of ``angles``, chunked to bound memory."""
        n = angles.shape[0]
        terms = max(len(self.coeffs), 1)
        chunk = max(int(_EVAL_ELEMENT_BUDGET / terms), 16)
        out = np.empty(n)
        for lo in range(0, n, chunk):
            block = angles[lo : lo + chunk]
            phases = self.E.dot(block.T)  # (T, n_chunk)
            out[lo : lo + chunk] = np.abs(self.coeffs @ np.exp(1j * phases))
        return out


def _golden_max(f, a: float, b: float, tol: float = _ANGLE_TOL):
    """Golden-section maximization of f on [a, b]; deterministic."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _coordinate_ascent(comp: _Compiled, start: np.ndarray, sweeps: int):
    """Cyclic per-coordinate phase optimization from ``start``.

    Each visit reduces the objective to a 1-D trigonometric profile whose
    maximum is bracketed by a dense line scan and refined by golden
    section. Ties keep the earlier angle; coordinates are visited in index
    order.
    """
    theta = np.asarray(start, dtype=float).copy()
    if len(comp.coeffs) == 0:
        return theta, 0.0
    best = abs(complex(comp.coeffs @ np.exp(1j * comp.E.dot(theta))))
    for _ in range(sweeps):
        vals = comp.coeffs * np.exp(1j * comp.E.dot(theta))
        total = vals.sum()
        gained = 0.0
        for c, tids, exps, iexps in comp.groups:
            sub = vals[tids]
            rest = total - sub.sum()
            base = sub * np.exp(-1j * exps * theta[c])
            kmax = int(iexps.max())
            gk = np.zeros(kmax + 1, dtype=complex)
            np.add.at(gk, iexps, base)
            gk[0] += rest
            ks = np.arange(kmax + 1)
            scan = 4 * kmax + 9
            ts = np.arange(scan) * (TWO_PI / scan)
            prof = np.abs(np.exp(1j * np.outer(ts, ks)) @ gk)
            i0 = int(np.argmax(prof))
            t_star, v_star = _golden_max(
                lambda t: abs(complex(np.exp(1j * t * ks) @ gk)),
                ts[i0] - TWO_PI / scan,
                ts[i0] + TWO_PI / scan,
            )
            if prof[i0] > v_star:
                t_star, v_star = float(ts[i0]), float(prof[i0])
            cur = abs(total)
            if v_star > cur + 1e-15:
                t_new = t_star % TWO_PI
                shift = exps * (t_new - theta[c])
                new_sub = sub * np.exp(1j * shift)
                vals[tids] = new_sub
                total = rest + new_sub.sum()
                theta[c] = t_new
                gained += v_star - cur
        best = max(best, abs(total))
        if gained < 1e-13:
            break
    return theta, best


def _grid_chunks(g: int, d: int, chunk: int):
    total = g**d
    axis = np.arange(g) * (TWO_PI / g)
    for lo in range(0, total, chunk):
        idx = np.arange(lo, min(lo + chunk, total), dtype=np.int64)
        pts = np.empty((idx.size, d))
        rem = idx.copy()
        for j in range(d - 1, -1, -1):
            pts[:, j] = axis[rem % g]
            rem //= g
        yield pts


def _worker_count() -> int:
    try:
        return max(int(os.environ.get("DBR_THREADS", "1")), 1)
    except ValueError:
        return 1


def _map_ordered(fn, n: int) -> list:
    workers = _worker_count()
    if workers <= 1 or n <= 1:
        return [fn(j) for j in range(n)]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, range(n)))


def sup_lower(
    P: PolydiscPolynomial,
    budget: Budget | None = None,
    seed: int = DEFAULT_SEED,
    _extra_points: np.ndarray | None = None,
) -> SupEstimate:
    """Certified lower / l1 upper bracket for sup |P| on the torus.

    Dimension <= 6 uses a full angle grid of ``grid_per_dim`` angles per
    coordinate while that stays below 2^20 points, otherwise seeded uniform
    batches of 4096 samples. The best point of every batch (and of the
    extra deterministic points, when given) seeds a coordinate ascent, so
    enlarging ``random_samples`` can only raise the bound.
    """
    budget = budget or DEFAULT_BUDGET
    if seed < 0:
        raise ValueError("seed must be a non-negative integer")
    if not P.terms:
        return SupEstimate(0.0, 0.0, "empty", 0, seed, ())
    comp = _Compiled(P)
    upper = P.l1()
    d = P.dimension
    samples = 0
    starts: list[tuple[float, np.ndarray]] = []

    if _extra_points is not None and len(_extra_points):
        pts = np.asarray(_extra_points, dtype=float)
        m = comp.moduli(pts)
        i = int(np.argmax(m))
        starts.append((float(m[i]), pts[i].copy()))
        samples += pts.shape[0]

    grid_total = budget.grid_per_dim**d if d <= _GRID_MAX_DIM else None
    if grid_total is not None and grid_total <= _GRID_AUTO_CAP:
        method = "grid+ascent"
        terms = max(len(comp.coeffs), 1)
        chunk = max(int(_EVAL_ELEMENT_BUDGET / terms), 16)
        chunk_best: list[tuple[float, np.ndarray]] = []
        for pts in _grid_chunks(budget.grid_per_dim, d, chunk):
            m = comp.moduli(pts)
            i = int(np.argmax(m))
            chunk_best.append((float(m[i]), pts[i].copy()))
            samples += pts.shape[0]
        order = sorted(range(len(chunk_best)), key=lambda i: (-chunk_best[i][0], i))
        starts.extend(chunk_best[i] for i in sorted(order[:_GRID_ASCENT_STARTS]))
    else:
        method = "random+ascent"
        n_batches = -(-budget.random_samples // _BATCH)

        def run_batch(j: int):
            rng = np.random.default_rng(np.random.SeedSequence([seed, j]))
            pts = rng.uniform(0.0, TWO_PI, size=(_BATCH, d))
            m = comp.moduli(pts)
            i = int(np.argmax(m))
            return float(m[i]), pts[i].copy()

        starts.extend(_map_ordered(run_batch, n_batches))
        samples += n_batches * _BATCH

    def ascend(job: int):
        _, pt = starts[job]
        return _coordinate_ascent(comp, pt, budget.ascent_iters)

    outcomes = _map_ordered(ascend, len(starts))
    best_val, best_angles = -1.0, None
    for (v0, pt), (theta, v1) in zip(starts, outcomes):
        for val, ang in ((v0, pt), (v1, theta)):
            if val > best_val:
                best_val, best_angles = val, ang

    lower = abs(eval_on_torus(P, best_angles))
    lower = min(lower, upper)
    return SupEstimate(lower, upper, method, samples, seed, tuple(map(float, best_angles)))


def dirichlet_sup(
    D: DirichletPolynomial,
    budget: Budget | None = None,
    seed: int = DEFAULT_SEED,
) -> SupEstimate:
    """Sup norm of a Dirichlet polynomial via its polydisc lift.

    A seeded grid of vertical-line samples t -> (theta_j = -t log p_j) is
    thrown in as deterministic extra start points, so the certified lower
    bound dominates every direct t-line sample by construction; the two
    views can never disagree beyond ascent tolerance.
    """
    budget = budget or DEFAULT_BUDGET
    P = lift(D)
    if not P.terms:
        return SupEstimate(0.0, 0.0, "empty", 0, seed, ())
    logp = np.log(shared_table(max(D.x, 2)).primes[: P.dimension].astype(float))
    n_t = min(budget.random_samples, _BATCH)
    rng = np.random.default_rng(np.random.SeedSequence([seed, _TLINE_TAG]))
    ts = rng.uniform(0.0, _TLINE_SPAN, size=n_t)
    ts[0] = 0.0
    t_angles = (-np.outer(ts, logp)) % TWO_PI
    est = sup_lower(P, budget, seed, _extra_points=t_angles)
    return replace(est, method="lift+" + est.method)


def hom_project(P: PolydiscPolynomial, m: int, K: int) -> PolydiscPolynomial:
    """Degree-m part of P by circle averaging with the K-th roots of unity,
    applied symbolically on coefficients: each c_alpha picks up the weight
    mean_j omega_j^(|alpha|-m), which is 1 (to rounding) when |alpha| = m
    and numerically zero otherwise once K exceeds the degree."""
    if m < 0:
        raise ValueError(f"degree must be >= 0, got {m}")
    if K <= P.degree():
        raise AliasingError(
            f"averaging order K={K} must exceed the degree {P.degree()}"
        )
    roots = np.exp(2j * np.pi * np.arange(K) / K)
    terms = {}
    for alpha, c in P.terms.items():
        w = complex(np.mean(roots ** (alpha.degree - m)))
        if abs(w) > 0.5:
            terms[alpha] = c * w
    return PolydiscPolynomial(P.dimension, terms)


def caratheodory_check(
    P: PolydiscPolynomial, z0, m: int, tol: float = 1e-9
) -> CaratheodoryReport:
    """Check |f_m(z0)| <= 2 (1 - |c_0|) for a sup-normalized P at an interior
    point z0.

    The caller guarantees a certified sup bound <= 1. When the l1 norm does
    not already certify that, a cheap sampling probe raises on detectable
    violations (a sampled |P| above 1).
    """
    z0 = np.asarray(z0, dtype=complex)
    if z0.ndim != 1 or z0.size != P.dimension:
        raise ValueError(f"need {P.dimension} coordinates, got shape {z0.shape}")
    if z0.size and float(np.max(np.abs(z0))) >= 1.0:
        raise ValueError("z0 must lie in the open polydisc")
    if m < 1:
        raise ValueError(f"homogeneity degree must be >= 1, got {m}")
    if P.l1() > 1.0 + tol:
        probe = sup_lower(
            P,
            Budget(grid_per_dim=6, random_samples=4096, ascent_iters=6),
            seed=DEFAULT_SEED,
        )
        if probe.lower > 1.0 + tol:
            raise PreconditionError(
                f"normalization violated: witnessed |P| = {probe.lower:.12g} > 1"
            )
    fm = homogeneous_part(P, m)
    lhs = abs(eval_at(fm, z0))
    rhs = 2.0 * (1.0 - abs(P.constant_term()))
    return CaratheodoryReport(lhs, rhs, lhs <= rhs + tol)
