"""Explicit modular CRT: re-reduce a residue-form value to a new prime
basis without ever reconstructing the integer.

A value 0 <= x < D, D the product of the public primes p_1..p_s, is held
as residues (x mod p_i).  Writing q_i for the inverse of the i-th
cofactor D/p_i modulo p_i, x equals a*D - floor(a)*D with
a = sum_i x_i q_i / p_i; evaluating both terms modulo each secret prime
r_k needs only word arithmetic once floor(a) is pinned down.  A
fixed-point accumulator with ``precision`` fractional bits recovers
floor(a) up to +1, so the transfer lands on x or on x - D -- downstream
consumers absorb that single-D ambiguity by design.

The basis product D is never materialized: setup runs running-product
loops over word residues, and the transfer itself touches nothing wider
than a double word.
"""

from dataclasses import dataclass, field

from .errors import SharedFactor
from .modmath import check_modulus, inv_mod, is_prime_word

# Caps under which the fixed-point accumulator provably fits 64 bits.
MAX_BASIS_LEN = 1 << 16
MAX_PRECISION = 32


def _ceil_log2(n: int) -> int:
    return (n - 1).bit_length()


@dataclass(frozen=True)
class PrimeBasis:
    """An ordered tuple of distinct word-sized primes.

    The product exists only implicitly; nothing in this module computes
    it.  The prime 2 is admitted (even toy determinants factor through
    it); all other entries are odd.
    """

    primes: tuple[int, ...]

    def __post_init__(self):
        if not self.primes:
            raise ValueError("prime basis must be non-empty")
        if len(set(self.primes)) != len(self.primes):
            raise ValueError("prime basis entries must be distinct")
        for p in self.primes:
            check_modulus(p)
            if not is_prime_word(p):
                raise ValueError(f"basis entry {p} is not prime")

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes)


@dataclass(frozen=True)
class RnsResidues:
    """A value represented by its residues along a prime basis."""

    basis: PrimeBasis
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != len(self.basis):
            raise ValueError("residue count does not match basis length")
        for v, p in zip(self.values, self.basis):
            if not 0 <= v < p:
                raise ValueError(f"residue {v} not reduced mod {p}")

    @classmethod
    def from_int(cls, x: int, basis: PrimeBasis) -> "RnsResidues":
        return cls(basis, tuple(x % p for p in basis))

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class CrtCoefficients:
    """The per-prime cofactor inverses q_i, each in (0, p_i)."""

    values: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class EcrtPrecomp:
    """Precomputed residues driving the basis transfer.

    ``product_res[k]``    = (p_1 ... p_s)       mod r_k
    ``cofactor_res[k][i]`` = (p_1 ... p_s)/p_i  mod r_k

    Storage is keyed by secret prime first (k-major): the verification
    loop walks one secret prime at a time and wants its row contiguous.
    """

    secret_basis: PrimeBasis
    product_res: tuple[int, ...]
    cofactor_res: tuple[tuple[int, ...], ...]
    precision: int
    source_len: int = field(default=0)

    def __post_init__(self):
        t = len(self.secret_basis)
        if len(self.product_res) != t or len(self.cofactor_res) != t:
            raise ValueError("precomp rows do not match secret basis")
        s = self.source_len or (len(self.cofactor_res[0]) if self.cofactor_res else 0)
        object.__setattr__(self, "source_len", s)
        for row in self.cofactor_res:
            if len(row) != s:
                raise ValueError("ragged cofactor rows")
        if s < 1 or s > MAX_BASIS_LEN:
            raise ValueError(f"source basis length {s} out of range")
        if self.precision < _ceil_log2(s) + 1:
            raise ValueError(
                f"precision {self.precision} below floor-recovery minimum "
                f"{_ceil_log2(s) + 1} for {s} primes"
            )
        if self.precision > MAX_PRECISION:
            raise ValueError(f"precision {self.precision} exceeds {MAX_PRECISION}")


def default_precision(source_len: int) -> int:
    """ceil(log2 s) + 2: one bit above the recovery minimum, which halves
    the chance of landing in the off-by-product branch for random x."""
    return _ceil_log2(source_len) + 2


def q_coefficients(basis: PrimeBasis) -> CrtCoefficients:
    """Cofactor inverses by product-then-invert, all in word arithmetic.

    q_i = (prod_{j != i} p_j)^{-1} mod p_i.  Basis invariants (distinct
    primes) guarantee every inverse exists.
    """
    primes = basis.primes
    out = []
    for i, p in enumerate(primes):
        acc = 1
        for j, pj in enumerate(primes):
            if j != i:
                acc = acc * pj % p
        out.append(inv_mod(acc, p) if p > 2 else acc)
    return CrtCoefficients(tuple(out))


def mod_ecrt_setup(
    public: PrimeBasis, secret: PrimeBasis, precision: int | None = None
) -> EcrtPrecomp:
    """Running-product residues of the public product and its cofactors
    along the secret basis; no multiprecision intermediate.

    Raises:
        SharedFactor: if the bases overlap (the transfer needs every
            secret prime coprime to the public product).
    """
    overlap = set(public.primes) & set(secret.primes)
    if overlap:
        raise SharedFactor(f"bases share primes {sorted(overlap)}")
    s = len(public)
    if precision is None:
        precision = default_precision(s)
    product_rows = []
    cofactor_rows = []
    for r in secret.primes:
        prod = 1
        cof = [1] * s
        for i, p in enumerate(public.primes):
            u = p % r
            prod = prod * u % r
            for j in range(s):
                if j != i:
                    cof[j] = cof[j] * u % r
        product_rows.append(prod)
        cofactor_rows.append(tuple(cof))
    return EcrtPrecomp(
        secret_basis=secret,
        product_res=tuple(product_rows),
        cofactor_res=tuple(cofactor_rows),
        precision=precision,
    )


def floor_accumulate(x_i: int, q_i: int, p_i: int, precision: int) -> int:
    """floor(2^precision * (x_i * q_i) / p_i) without dividing by p_i.

    The double-word product is split once, then a doubling loop of
    exactly ``precision`` iterations shifts the remainder up bit by bit,
    counting overflows past p_i.
    """
    hi, rem = divmod(x_i * q_i, p_i)
    acc = hi
    for _ in range(precision):
        rem <<= 1
        over = rem >= p_i
        rem -= p_i * over
        acc = (acc << 1) | over
    return acc


def approx_floor(x_res: RnsResidues, q: CrtCoefficients, precision: int) -> int:
    """Fixed-point recovery of floor(sum_i x_i q_i / p_i), possibly +1.

    Exact whenever the fractional part of the sum is below
    1 - s/2^precision.
    """
    primes = x_res.basis.primes
    s = len(primes)
    f = s
    for x, qi, p in zip(x_res.values, q.values, primes):
        f += floor_accumulate(x, qi, p, precision)
    return f >> precision


def mod_ecrt(pre: EcrtPrecomp, q: CrtCoefficients, x_res: RnsResidues) -> RnsResidues:
    """Transfer x (held as residues on the public basis) to the secret
    basis; the result represents x or x - D, D the public product.

    If x < (1 - s/2^precision) * D the result is exactly x's residues.
    The per-secret-prime loop is independent across primes and may be
    parallelized.
    """
    primes = x_res.basis.primes
    s = len(primes)
    if s != pre.source_len:
        raise ValueError("residues do not match the precomputed public basis")
    if len(q) != s:
        raise ValueError("coefficient count does not match basis")
    a = pre.precision

    scaled = [x * qi for x, qi in zip(x_res.values, q.values)]
    f = s
    for y, p in zip(scaled, primes):
        hi, rem = divmod(y, p)
        acc = hi
        for _ in range(a):
            rem <<= 1
            over = rem >= p
            rem -= p * over
            acc = (acc << 1) | over
        f += acc
    f >>= a

    out = []
    for k, r in enumerate(pre.secret_basis.primes):
        cof = pre.cofactor_res[k]
        z = 0
        for j in range(s):
            z = (z + (scaled[j] % r) * cof[j]) % r
        out.append((z - f * pre.product_res[k]) % r)
    return RnsResidues(pre.secret_basis, tuple(out))
