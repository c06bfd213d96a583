"""Security-budget calculators and an empirical forgery-game simulator.

Forging past a compressed verifier reduces to guessing a nonzero element
of the hidden kernel given only accept/reject answers.  After Q rejected
queries the next one succeeds with probability at most
kappa / (#keyspace - kappa * Q), kappa the largest number of candidate
kernels any single query can eliminate.  The calculators here evaluate
that bound (exactly on toys, in log2 for production sizes), derive the
largest defensible security exponent for a query budget, and the
simulator plays the actual game on enumerable instances to check the
bound and the claim that scalar-replay strategies gain nothing.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from random import Random

from .errors import BudgetExceeded
from .modmath import PRIME_COUNT_31BIT, is_prime_word

LN2 = math.log(2)
LOG2_3 = math.log2(3)

# Float slack for invariants over long log-domain sums.
_EPS = 1e-9


@dataclass(frozen=True)
class SecurityBudget:
    """Everything needed to decide when a verification key must be
    refreshed, all exponents in log2.

    ``mu`` is the largest exponent e with
    min(keyspace/kappa, quotient) >= 2^e + q_limit; rejections beyond
    q_limit invalidate the budget.
    """

    mu: float
    q_limit: int
    s_size_log2: float
    kappa_log2: float
    quotient_size_log2: float

    def __post_init__(self):
        headroom = min(self.s_size_log2 - self.kappa_log2, self.quotient_size_log2)
        if headroom + _EPS < self.mu:
            raise ValueError(
                f"budget exponent {self.mu} exceeds keyspace headroom {headroom}"
            )


def segp_success_bound(s_size: int, kappa: int, queries: int) -> float:
    """Per-query success bound kappa / (#S - kappa * Q), exact rationals
    evaluated in floating point.

    Raises:
        BudgetExceeded: when kappa * Q reaches #S (mandatory key refresh).
    """
    if s_size <= 0 or kappa <= 0:
        raise ValueError("keyspace and kappa must be positive")
    denominator = s_size - kappa * queries
    if denominator <= 0:
        raise BudgetExceeded(
            f"{queries} rejections can pin the kernel down ({kappa}*Q >= #S)"
        )
    return float(Fraction(kappa, denominator))


def segp_success_bound_log2(
    s_size_log2: float, kappa_log2: float, queries: int
) -> float:
    """log2 of the per-query bound for sizes too large to hold exactly."""
    if queries < 0:
        raise ValueError("query count must be non-negative")
    if queries:
        eaten = kappa_log2 + math.log2(queries) - s_size_log2
        if eaten >= 0:
            raise BudgetExceeded("query budget exhausts the keyspace")
        denom_log2 = s_size_log2 + math.log1p(-(2.0 ** eaten)) / LN2
    else:
        denom_log2 = s_size_log2
    return kappa_log2 - denom_log2


def _log2_pow3_minus1(e: int) -> float:
    """log2(3^e - 1), exact for small e, asymptotic beyond."""
    if e <= 0:
        raise ValueError("exponent must be positive")
    if e <= 40:
        return math.log2(3**e - 1)
    correction = 3.0 ** (-e)
    if correction > 0.0:
        return e * LOG2_3 + math.log1p(-correction) / LN2
    return e * LOG2_3


def three_binomial(a: int, b: int) -> float:
    """log2 of the Gaussian binomial coefficient at base 3: the number
    of b-dimensional subspaces of F3^a."""
    if b < 0 or b > a:
        raise ValueError(f"need 0 <= b <= a, got a={a}, b={b}")
    total = 0.0
    for i in range(b):
        total += _log2_pow3_minus1(a - i) - _log2_pow3_minus1(b - i)
    return total


def gaussian_binomial_3(a: int, b: int) -> int:
    """Exact base-3 Gaussian binomial, for enumerable toy sizes."""
    if b < 0 or b > a:
        raise ValueError(f"need 0 <= b <= a, got a={a}, b={b}")
    num = den = 1
    for i in range(b):
        num *= 3 ** (a - i) - 1
        den *= 3 ** (b - i) - 1
    return num // den


def _budget_mu(min_headroom_log2: float, q_limit: int) -> float:
    """Largest mu with 2^headroom >= 2^mu + q_limit."""
    if q_limit < 0:
        raise ValueError("query limit must be non-negative")
    if q_limit == 0:
        return min_headroom_log2
    gap = math.log2(q_limit) - min_headroom_log2
    if gap >= 0:
        raise BudgetExceeded("query limit alone exhausts the keyspace")
    shrink = math.log1p(-(2.0 ** gap)) / LN2
    return min_headroom_log2 + shrink


def squirrels_budget(
    s: int, t: int, q_limit: int, kappa_model: str = "small-constant"
) -> SecurityBudget:
    """Budget for t secret 31-bit primes against an s-prime public basis.

    The keyspace is the t-subsets of the 31-bit prime pool.  Constructing
    a query divisible by even one product of public-pool primes already
    means forging the underlying scheme, so the operative model takes
    kappa as a small constant; ``kappa_model="combinatorial"`` instead
    charges the full C(s, t) kernels a maximally divisible query could
    touch, which is the pessimistic reading.
    """
    if t < 1 or s < t:
        raise ValueError("need 1 <= t <= s")
    s_size_log2 = math.log2(math.comb(PRIME_COUNT_31BIT, t))
    if kappa_model == "small-constant":
        kappa_log2 = 0.0
    elif kappa_model == "combinatorial":
        kappa_log2 = math.log2(math.comb(s, t))
    else:
        raise ValueError(f"unknown kappa model {kappa_model!r}")
    quotient_log2 = 30.0 * t  # every secret prime exceeds 2^30
    mu = _budget_mu(min(s_size_log2 - kappa_log2, quotient_log2), q_limit)
    return SecurityBudget(
        mu=mu,
        q_limit=q_limit,
        s_size_log2=s_size_log2,
        kappa_log2=kappa_log2,
        quotient_size_log2=quotient_log2,
    )


def wave_budget(n: int, k: int, c: int, q_limit: int) -> SecurityBudget:
    """Budget for a codimension-c projection of F3^(n-k).

    keyspace/kappa collapses to (3^(n-k)-1)/(3^(n-k-c)-1), a hair above
    3^c, while the quotient has exactly 3^c elements, so the headroom is
    exactly c*log2(3).
    """
    nk = n - k
    if not 0 < c <= nk:
        raise ValueError(f"need 0 < c <= n-k, got c={c}")
    s_size_log2 = three_binomial(nk, nk - c)
    kappa_log2 = three_binomial(nk - 1, nk - c - 1)
    quotient_log2 = c * LOG2_3
    mu = _budget_mu(quotient_log2, q_limit)
    return SecurityBudget(
        mu=mu,
        q_limit=q_limit,
        s_size_log2=s_size_log2,
        kappa_log2=kappa_log2,
        quotient_size_log2=quotient_log2,
    )


# ---------------------------------------------------------------------------
# Membership-oracle game on enumerable instances.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SegpInstance:
    """An enumerable instance: the full kernel set, exact counts, and
    the query domain."""

    name: str
    kernels: tuple  # each kernel supports `query in kernel`
    s_size: int
    kappa: int
    sample_query: object  # rng -> query
    scalar_double: object  # query -> query (a nontrivial scalar multiple)


def _enumerate_f3_subspaces(dim: int, subdim: int) -> list[frozenset]:
    """All subdim-dimensional subspaces of F3^dim as vector sets, via
    reduced-echelon representatives (one per subspace)."""
    subspaces = []
    for pivots in combinations(range(dim), subdim):
        free_positions = [
            (r, c)
            for r in range(subdim)
            for c in range(pivots[r] + 1, dim)
            if c not in pivots
        ]
        for assignment in product(range(3), repeat=len(free_positions)):
            rows = [[0] * dim for _ in range(subdim)]
            for r, p in enumerate(pivots):
                rows[r][p] = 1
            for (r, c), v in zip(free_positions, assignment):
                rows[r][c] = v
            span = set()
            for coeffs in product(range(3), repeat=subdim):
                vec = tuple(
                    sum(coeffs[r] * rows[r][i] for r in range(subdim)) % 3
                    for i in range(dim)
                )
                span.add(vec)
            subspaces.append(frozenset(span))
    return subspaces


def wave_segp_instance(nk: int, c: int) -> SegpInstance:
    """All codimension-c subspaces of F3^nk; queries are uniform nonzero
    vectors.  Counts are exhaustively enumerated and must agree with the
    Gaussian-binomial formulas."""
    if nk > 8 or c > 3:
        raise ValueError("exhaustive enumeration capped at nk <= 8, c <= 3")
    kernels = tuple(_enumerate_f3_subspaces(nk, nk - c))
    s_size = len(kernels)
    assert s_size == gaussian_binomial_3(nk, nk - c)
    probe = tuple([1] + [0] * (nk - 1))
    kappa = sum(probe in kernel for kernel in kernels)
    assert kappa == gaussian_binomial_3(nk - 1, nk - c - 1)

    def sample_query(rng: Random):
        while True:
            v = tuple(rng.randrange(3) for _ in range(nk))
            if any(v):
                return v

    def scalar_double(v):
        return tuple((2 * x) % 3 for x in v)

    return SegpInstance(
        name=f"wave(nk={nk}, c={c})",
        kernels=kernels,
        s_size=s_size,
        kappa=kappa,
        sample_query=sample_query,
        scalar_double=scalar_double,
    )


class _PrimeKernel:
    __slots__ = ("r",)

    def __init__(self, r: int):
        self.r = r

    def __contains__(self, t: int) -> bool:
        return t % self.r == 0


def squirrels_segp_instance(width: int, query_bound: int) -> SegpInstance:
    """One hidden prime of the given width; queries are integers in
    [1, query_bound], answered by divisibility."""
    if width > 16:
        raise ValueError("exhaustive prime enumeration capped at width <= 16")
    pool = [
        n
        for n in range((1 << (width - 1)) + 1, 1 << width, 2)
        if is_prime_word(n)
    ]
    kernels = tuple(_PrimeKernel(r) for r in pool)
    kappa = 0
    acc = 1
    while acc <= query_bound:
        acc *= (1 << (width - 1)) + 1
        kappa += 1
    kappa = max(1, kappa - 1)

    def sample_query(rng: Random):
        return rng.randrange(1, query_bound + 1)

    def scalar_double(t: int) -> int:
        return 2 * t

    return SegpInstance(
        name=f"squirrels(width={width})",
        kernels=kernels,
        s_size=len(kernels),
        kappa=kappa,
        sample_query=sample_query,
        scalar_double=scalar_double,
    )


STRATEGIES = ("random", "scalar-replay", "replay-rejected")


@dataclass(frozen=True)
class SegpReport:
    instance: str
    strategy: str
    trials: int
    queries_per_trial: int
    successes: int
    success_rate: float
    per_query_bound: float
    cumulative_bound: float


def simulate_segp_game(
    instance: SegpInstance,
    strategy: str,
    trials: int,
    queries_per_trial: int,
    rng: Random,
) -> SegpReport:
    """Play the membership game against a fresh kernel per trial.

    random:          every query drawn uniformly from the domain.
    scalar-replay:   alternates fresh draws with the scalar double of
                     the previous (rejected) query -- the doubles are
                     predictable rejects, so half the budget is wasted.
    replay-rejected: finds one rejected query with free probes, then
                     burns the entire budget re-asking it.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    successes = 0
    for _ in range(trials):
        kernel = rng.choice(instance.kernels)
        if strategy == "replay-rejected":
            probe = instance.sample_query(rng)
            while probe in kernel:
                probe = instance.sample_query(rng)
            hit = any(probe in kernel for _ in range(queries_per_trial))
        elif strategy == "scalar-replay":
            hit = False
            last = None
            for i in range(queries_per_trial):
                if i % 2 == 1 and last is not None:
                    query = instance.scalar_double(last)
                else:
                    query = instance.sample_query(rng)
                if query in kernel:
                    hit = True
                    break
                last = query
        else:
            hit = False
            for _ in range(queries_per_trial):
                if instance.sample_query(rng) in kernel:
                    hit = True
                    break
        successes += hit
    per_query = segp_success_bound(instance.s_size, instance.kappa, queries_per_trial)
    return SegpReport(
        instance=instance.name,
        strategy=strategy,
        trials=trials,
        queries_per_trial=queries_per_trial,
        successes=successes,
        success_rate=successes / trials if trials else 0.0,
        per_query_bound=per_query,
        cumulative_bound=min(1.0, queries_per_trial * per_query),
    )
