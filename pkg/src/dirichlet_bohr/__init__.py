"""Numerical laboratory for Dirichlet-Bohr radii.

Dirichlet polynomials are identified with polydisc polynomials through the
prime-exponent bijection; sup norms are bracketed by certified sampled
lower bounds and l1/analytic upper bounds; explicit witnesses (Fourier
matrices, Moebius truncations, Steinhaus draws) turn into radius bounds
and regression probes.
"""

from . import errors
from .numtheory import (
    Factorization,
    MultiIndex,
    PrimeTable,
    big_omega,
    bohr_decode,
    bohr_encode,
    factorize,
    nth_prime,
    prime_index,
    prime_pi,
    prime_power_sum,
    shared_table,
    sieve_primes,
)
from .polyspace import (
    DirichletPolynomial,
    IndexSet,
    PolydiscPolynomial,
    block_index_set,
    dirichlet_from_json,
    dirichlet_homogeneity,
    dirichlet_to_json,
    enumerate_range,
    homogeneous_part,
    kernel_dim,
    kernel_hom,
    lift,
    polydisc_from_json,
    polydisc_to_json,
    push,
)
from .supnorm import (
    DEFAULT_BUDGET,
    DEFAULT_SEED,
    Budget,
    CaratheodoryReport,
    SupEstimate,
    caratheodory_check,
    dirichlet_sup,
    eval_at,
    eval_on_torus,
    hom_project,
    sup_lower,
)
from .witnesses import (
    MatrixWitness,
    MoebiusWitness,
    dft_witness,
    moebius_witness,
    steinhaus_dirichlet,
    steinhaus_witness,
)
from .radius import (
    AsymptoticFit,
    KernelSeries,
    RadiusBound,
    RatioReport,
    SandwichReport,
    asymptotic_fit,
    bcq_battery,
    bcq_ratio,
    find_violator,
    fred2_battery,
    fred2_ratio,
    heuristic_K,
    index_set_spectrum,
    kernel_monotonicity,
    lx_target,
    monster_battery,
    monster_ratio,
    monster_weight,
    sandwich_check,
    sqrt_log_weight,
    upper_bound_Lx,
    witness_upper_Lm,
)

__version__ = "0.1.0"
