"""Command-line front end.

Subcommands: ``table`` (bound table over a log-spaced grid), ``verify``
(seeded property suites), ``radius`` (bound for a polynomial file or an
index-set spec), ``supnorm`` (sup estimate for a polynomial file),
``witness`` (matrix-witness summary).

Index-set spec mini-language:
    range:a..b          the integers a..b
    primes<=x           primes up to x
    powers-of-p<=x      {p^k <= x, k >= 0} for a prime p (includes 1)
    blocks:[2,3|5]<=x   products within each prime block, up to x

Output is CSV ('.' decimal, 12 significant digits) or JSON; identical
config and seed give byte-identical output. Exit codes: 0 pass, 1
verification failure, 2 usage/parse error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from dataclasses import dataclass, field, replace
from math import isqrt

from .errors import WitnessUnavailableError
from .numtheory import MultiIndex, prime_pi, shared_table
from .polyspace import (
    DirichletPolynomial,
    IndexSet,
    block_index_set,
    dirichlet_from_json,
    dirichlet_homogeneity,
    enumerate_range,
    kernel_dim,
    kernel_hom,
    polydisc_from_json,
)
from .supnorm import (
    DEFAULT_SEED,
    Budget,
    caratheodory_check,
    dirichlet_sup,
    sup_lower,
)
from .witnesses import dft_witness, moebius_witness, steinhaus_witness
from .radius import (
    RadiusBound,
    bcq_battery,
    BCQ_RATIO_BUDGET,
    FRED2_RATIO_BUDGET,
    MONSTER_RATIO_BUDGET,
    find_violator,
    fred2_battery,
    heuristic_K,
    index_set_spectrum,
    kernel_monotonicity,
    lx_target,
    monster_battery,
    sandwich_check,
    upper_bound_Lx,
    witness_upper_Lm,
)

_SUITES = ("sandwich", "kernels", "blocks", "caratheodory", "ratios", "bohr13", "all")

_BUDGET_FLAGS = (
    "grid_per_dim",
    "random_samples",
    "ascent_iters",
    "restarts",
    "descent_steps",
)

# per-suite search budget keeping the verify suites at desk-scale runtimes;
# any --budget-* flag overrides the corresponding field
_SEARCH_BUDGET = Budget(
    grid_per_dim=12, random_samples=2048, ascent_iters=8, restarts=12, descent_steps=160
)


@dataclass
class RunConfig:
    seed: int = DEFAULT_SEED
    budget_overrides: dict = field(default_factory=dict)
    fmt: str | None = None
    out: str | None = None

    def budget(self, base: Budget) -> Budget:
        return replace(base, **self.budget_overrides) if self.budget_overrides else base


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _usage_error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


# -- table --------------------------------------------------------------------


def cmd_table(args, config: RunConfig) -> int:
    if args.x_min < 2 or args.x_max < args.x_min or args.points < 1:
        return _usage_error("need 2 <= x_min <= x_max and points >= 1")
    if args.points == 1:
        xs = [args.x_min]
    else:
        lo, hi = math.log10(args.x_min), math.log10(args.x_max)
        xs = [10 ** (lo + (hi - lo) * i / (args.points - 1)) for i in range(args.points)]
    rows = []
    for x in xs:
        q = prime_pi(isqrt(math.floor(x))) // 2
        upper = upper_bound_Lx(x).upper
        target = lx_target(x)
        rows.append((x, q, upper, target, upper / target))
    if (config.fmt or "csv") == "json":
        payload = [
            {"x": x, "q": q, "L_upper": u, "target": t, "ratio": r}
            for x, q, u, t, r in rows
        ]
        _emit(json.dumps(payload, indent=2) + "\n", config.out)
    else:
        lines = ["x,q,L_upper,target,ratio"]
        for x, q, u, t, r in rows:
            lines.append(",".join((_fmt(x), str(q), _fmt(u), _fmt(t), _fmt(r))))
        _emit("\n".join(lines) + "\n", config.out)
    return 0


# -- verify -------------------------------------------------------------------


def _check(name: str, value, tolerance, passed: bool) -> dict:
    return {"name": name, "value": value, "tolerance": tolerance, "pass": bool(passed)}


def _suite_bohr13(config: RunConfig) -> list[dict]:
    checks = []
    previous = None
    for a in (0.9, 0.99, 0.999):
        w = moebius_witness(a, 200)
        closed = 1.0 / (1.0 + 2.0 * a)
        checks.append(
            _check(f"moebius critical radius a={a}", w.critical_r, 1e-5,
                   abs(w.critical_r - closed) <= 1e-5)
        )
        if previous is not None:
            checks.append(
                _check(f"moebius radius decreasing at a={a}", w.critical_r, 0.0,
                       w.critical_r < previous and w.critical_r > 1.0 / 3.0)
            )
        previous = w.critical_r
    spectrum = [MultiIndex(((1, k),)) if k else MultiIndex() for k in range(21)]
    budget = config.budget(_SEARCH_BUDGET)
    est = heuristic_K(spectrum, budget=budget, seed=config.seed)
    checks.append(_check("one-variable degrees<=20 upper", est.upper, 0.36, est.upper <= 0.36))
    violator = find_violator(spectrum, 0.30, budget=budget, seed=config.seed)
    checks.append(_check("no violator at r=0.30", violator is None, None, violator is None))
    return checks


def _suite_sandwich(config: RunConfig) -> list[dict]:
    budget = config.budget(_SEARCH_BUDGET)
    report = sandwich_check(enumerate_range(12), budget=budget, seed=config.seed)
    values = {
        "estimate": [report.estimate.lower, report.estimate.upper],
        "homogeneous_upper": {m: b.upper for m, b in report.homogeneous.items()},
    }
    return [_check("sandwich on range:1..12", values, report.tolerance, report.passed)]


def _suite_kernels(config: RunConfig) -> list[dict]:
    checks = []
    J = enumerate_range(100)
    exact = all(
        kernel_dim(kernel_hom(J, m), n).members == kernel_hom(kernel_dim(J, n), m).members
        for n in range(1, 6)
        for m in range(0, 6)
    )
    checks.append(_check("kernel commutation on range:1..100, n,m<=5", exact, None, exact))
    budget = config.budget(_SEARCH_BUDGET)
    series = kernel_monotonicity(enumerate_range(30), 3, budget=budget, seed=config.seed)
    uppers = [b.upper for _, b in series.bounds]
    checks.append(_check("kernel series non-increasing on range:1..30", uppers,
                         series.tolerance, series.passed))
    return checks


def _suite_blocks(config: RunConfig) -> list[dict]:
    budget = config.budget(_SEARCH_BUDGET)
    primes = shared_table(30).primes
    singletons = [[int(p)] for p in primes[primes <= 30]]
    blocks = block_index_set(singletons, 30)
    est_blocks = heuristic_K(index_set_spectrum(blocks), budget=budget, seed=config.seed)
    powers = IndexSet(tuple(2**k for k in range(5)), "powers-of-2<=30")
    est_powers = heuristic_K(index_set_spectrum(powers), budget=budget, seed=config.seed)
    gap = abs(est_blocks.upper - est_powers.upper)
    return [
        _check(
            "singleton blocks vs one-variable estimate",
            {"blocks_upper": est_blocks.upper, "powers_upper": est_powers.upper, "gap": gap},
            0.05,
            gap <= 0.05,
        )
    ]


def _suite_caratheodory(config: RunConfig) -> list[dict]:
    import numpy as np

    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 0xCA7A]))
    all_pass = True
    worst = 0.0
    for _ in range(100):
        d = int(rng.integers(1, 5))
        n_terms = int(rng.integers(2, 12))
        terms = {}
        terms[MultiIndex()] = complex(rng.standard_normal(), rng.standard_normal())
        for _ in range(n_terms):
            pairs = []
            for j in range(1, d + 1):
                e = int(rng.integers(0, 3))
                if e:
                    pairs.append((j, e))
            coeff = complex(rng.standard_normal(), rng.standard_normal())
            if pairs:
                terms[MultiIndex(tuple(pairs))] = coeff
        from .polyspace import PolydiscPolynomial

        P = PolydiscPolynomial(d, terms)
        scale = P.l1()
        P = PolydiscPolynomial(d, {a: c / scale for a, c in P.terms.items()})
        z0 = 0.9 * np.exp(1j * rng.uniform(0.0, 2 * np.pi, size=d))
        m = int(rng.integers(1, max(P.degree(), 1) + 1))
        rep = caratheodory_check(P, z0, m)
        worst = max(worst, rep.lhs - rep.rhs)
        all_pass = all_pass and rep.passed
    return [_check("caratheodory bound, 100 draws", {"worst_excess": worst}, 1e-9, all_pass)]


def _suite_ratios(config: RunConfig) -> list[dict]:
    checks = []
    for m in (2, 3):
        rep = bcq_battery(m)
        checks.append(_check(f"bcq ratio budget m={m}", rep.max_ratio,
                             BCQ_RATIO_BUDGET[m], rep.max_ratio <= BCQ_RATIO_BUDGET[m]))
    for m in (2, 3):
        rep = fred2_battery(m)
        checks.append(_check(f"fred2 ratio budget m={m}", rep.max_ratio,
                             FRED2_RATIO_BUDGET[m], rep.max_ratio <= FRED2_RATIO_BUDGET[m]))
    for m in (2, 3):
        rep = monster_battery(m)
        checks.append(_check(f"monster ratio budget m={m}", rep.max_ratio,
                             MONSTER_RATIO_BUDGET, rep.max_ratio <= MONSTER_RATIO_BUDGET))
    return checks


_SUITE_RUNNERS = {
    "bohr13": _suite_bohr13,
    "sandwich": _suite_sandwich,
    "kernels": _suite_kernels,
    "blocks": _suite_blocks,
    "caratheodory": _suite_caratheodory,
    "ratios": _suite_ratios,
}


def cmd_verify(args, config: RunConfig) -> int:
    if args.suite not in _SUITES:
        return _usage_error(f"unknown suite {args.suite!r}; choose from {', '.join(_SUITES)}")
    names = [s for s in _SUITE_RUNNERS] if args.suite == "all" else [args.suite]
    checks = []
    for name in names:
        for check in _SUITE_RUNNERS[name](config):
            check["suite"] = name
            checks.append(check)
    ok = all(c["pass"] for c in checks)
    report = {"suite": args.suite, "seed": config.seed, "pass": ok, "checks": checks}
    _emit(json.dumps(report, indent=2) + "\n", config.out)
    return 0 if ok else 1


# -- radius / supnorm / witness ------------------------------------------------

_RANGE_RE = re.compile(r"^range:(\d+)\.\.(\d+)$")
_PRIMES_RE = re.compile(r"^primes<=(\d+)$")
_POWERS_RE = re.compile(r"^powers-of-(\d+)<=(\d+)$")
_BLOCKS_RE = re.compile(r"^blocks:\[([0-9,|]*)\]<=(\d+)$")


def parse_index_spec(text: str) -> IndexSet:
    """Parse the index-set mini-language; raises ValueError on bad input."""
    text = text.strip()
    if m := _RANGE_RE.match(text):
        a, b = int(m.group(1)), int(m.group(2))
        if not 1 <= a <= b:
            raise ValueError(f"bad range bounds in {text!r}")
        return IndexSet(tuple(range(a, b + 1)), text)
    if m := _PRIMES_RE.match(text):
        x = int(m.group(1))
        if x < 2:
            raise ValueError(f"prime cap must be >= 2 in {text!r}")
        primes = shared_table(x).primes
        return IndexSet(tuple(int(p) for p in primes[primes <= x]), text)
    if m := _POWERS_RE.match(text):
        p, x = int(m.group(1)), int(m.group(2))
        members = block_index_set([[p]], x).members
        return IndexSet(members, text)
    if m := _BLOCKS_RE.match(text):
        body, x = m.group(1), int(m.group(2))
        blocks = []
        if body:
            for part in body.split("|"):
                if not part:
                    raise ValueError(f"empty block in {text!r}")
                blocks.append([int(p) for p in part.split(",") if p])
        return block_index_set(blocks, x)
    raise ValueError(
        f"unrecognized index spec {text!r}; expected range:a..b, primes<=x, "
        f"powers-of-p<=x or blocks:[p,p|p]<=x"
    )


def _load_polynomial(path: str):
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ValueError(f"{path}: expected a JSON object")
    if "x" in obj:
        return dirichlet_from_json(obj)
    if "d" in obj:
        return polydisc_from_json(obj)
    raise ValueError(f"{path}: need an 'x' (Dirichlet) or 'd' (polydisc) key")


def cmd_radius(args, config: RunConfig) -> int:
    budget = config.budget(_SEARCH_BUDGET)
    target = args.input
    try:
        if target.endswith(".json") or os.path.exists(target):
            poly = _load_polynomial(target)
            if isinstance(poly, DirichletPolynomial):
                m = dirichlet_homogeneity(poly)
                if not m:
                    return _usage_error("polynomial input must be homogeneous of grade >= 1")
                est = dirichlet_sup(poly, budget, config.seed)
                upper = min(1.0, (est.lower / poly.l1()) ** (1.0 / m))
                bound = RadiusBound(0.0, upper, False, "sampled-witness",
                                    f"m={m}, sup lower={est.lower:.12g}")
            else:
                degrees = {a.degree for a in poly.terms}
                if len(degrees) != 1 or degrees == {0}:
                    return _usage_error("polynomial input must be homogeneous of grade >= 1")
                m = degrees.pop()
                est = sup_lower(poly, budget, config.seed)
                upper = min(1.0, (est.lower / poly.l1()) ** (1.0 / m))
                bound = RadiusBound(0.0, upper, False, "sampled-witness",
                                    f"m={m}, sup lower={est.lower:.12g}")
        else:
            J = parse_index_spec(target)
            bound = heuristic_K(index_set_spectrum(J), budget=budget, seed=config.seed)
            bound = RadiusBound(bound.lower, bound.upper, bound.certified_upper,
                                bound.method, f"{J.label or target}; {bound.provenance}")
    except (ValueError, OSError) as exc:
        return _usage_error(str(exc))
    _emit(json.dumps(bound.to_json(), indent=2) + "\n", config.out)
    return 0


def cmd_supnorm(args, config: RunConfig) -> int:
    budget = config.budget(_SEARCH_BUDGET)
    try:
        poly = _load_polynomial(args.input)
    except (ValueError, OSError) as exc:
        return _usage_error(str(exc))
    if isinstance(poly, DirichletPolynomial):
        est = dirichlet_sup(poly, budget, config.seed)
    else:
        est = sup_lower(poly, budget, config.seed)
    _emit(json.dumps(est.to_json(), indent=2) + "\n", config.out)
    return 0


def cmd_witness(args, config: RunConfig) -> int:
    x = args.x
    if x < 2:
        return _usage_error("x must be >= 2")
    try:
        w = dft_witness(x)
        payload = {
            "available": True,
            "q": w.q,
            "x": w.x,
            "l1": w.l1,
            "analytic_sup_bound": w.analytic_sup_bound,
            "orthogonality_residual": w.orthogonality_residual(),
            "upper_Lm": witness_upper_Lm(w.D, 2, w.analytic_sup_bound).upper,
        }
    except WitnessUnavailableError as exc:
        payload = {"available": False, "x": float(x), "upper_Lm": 1.0, "reason": str(exc)}
    if (config.fmt or "json") == "csv":
        keys = list(payload)
        lines = [",".join(keys), ",".join(_fmt(payload[k]) for k in keys)]
        _emit("\n".join(lines) + "\n", config.out)
    else:
        _emit(json.dumps(payload, indent=2) + "\n", config.out)
    return 0


# -- entry point ----------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help="base seed for all stochastic search (default 0x5EED)")
    for name in _BUDGET_FLAGS:
        common.add_argument(f"--budget-{name.replace('_', '-')}", type=int,
                            dest=f"budget_{name}", default=None)
    common.add_argument("--format", choices=("csv", "json"), dest="fmt", default=None)
    common.add_argument("--out", default=None, help="write output to this path")

    parser = argparse.ArgumentParser(
        prog="dbr", description="Dirichlet-Bohr radius laboratory"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table", parents=[common],
                       help="bound table over a log-spaced grid")
    p.add_argument("x_min", type=float)
    p.add_argument("x_max", type=float)
    p.add_argument("points", type=int)
    p.set_defaults(fn=cmd_table)

    p = sub.add_parser("verify", parents=[common], help="run a property suite")
    p.add_argument("suite", choices=_SUITES)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("radius", parents=[common],
                       help="radius bound for a polynomial JSON file or index-set spec")
    p.add_argument("input")
    p.set_defaults(fn=cmd_radius)

    p = sub.add_parser("supnorm", parents=[common],
                       help="sup-norm estimate for a polynomial JSON file")
    p.add_argument("input")
    p.set_defaults(fn=cmd_supnorm)

    p = sub.add_parser("witness", parents=[common], help="matrix witness summary")
    p.add_argument("x", type=float)
    p.set_defaults(fn=cmd_witness)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    overrides = {
        name: getattr(args, f"budget_{name}")
        for name in _BUDGET_FLAGS
        if getattr(args, f"budget_{name}") is not None
    }
    if args.seed < 0:
        return _usage_error("seed must be non-negative")
    config = RunConfig(seed=args.seed, budget_overrides=overrides,
                       fmt=args.fmt, out=args.out)
    return args.fn(args, config)


if __name__ == "__main__":
    sys.exit(main())
