"""Full and compressed verification for Squirrels-shape signatures over
co-cyclic lattices.

A public key is the parity-check vector of a co-cyclic lattice held in
residue form along a fixed basis of public primes; checking a signature
means checking one congruence per public prime.  The compressed verifier
instead picks a handful of secret primes, transfers every check-vector
entry to the secret basis with the reconstruction-free CRT, and verifies
by recovering the integer multiplier of the lattice determinant modulo
each secret prime: for honest signatures the recovered values agree and
land in a small window, for anything else they look uniform.

Real Squirrels key generation and trapdoor signing are out of scope; a
desk-scale key generator (random co-cyclic lattice via its Hermite form)
and a round-off signer stand in as test oracles.
"""

import hashlib
import logging
import math
from dataclasses import dataclass
from random import Random

import numpy as np

from .ecrt import (
    EcrtPrecomp,
    PrimeBasis,
    RnsResidues,
    mod_ecrt,
    mod_ecrt_setup,
    q_coefficients,
)
from .errors import MalformedSignature, ResampleLimit
from .modmath import PRIME_COUNT_31BIT, inv_mod, is_prime_word, sample_prime
from .opcount import OpCounter

logger = logging.getLogger(__name__)

SALT_BYTES = 16
MAX_TOY_DIMENSION = 32
COORD_BITS = 16  # serialized signature coordinates: signed 16-bit

# Named instances: dimension, hash bound, max squared norm, public prime
# count, determinant bit length, classical security target.
_NAMED = {
    "I": (1034, 4096, 2_026_590, 165, 5048, 128),
    "II": (1164, 4096, 2_442_439, 188, 5738, 128),
    "III": (1556, 4096, 4_512_242, 262, 8017, 192),
    "IV": (1718, 4096, 3_659_372, 275, 8402, 192),
    "V": (2056, 4096, 5_370_115, 339, 10347, 256),
}

SQUIRRELS_TAGS = tuple(_NAMED)


@dataclass(frozen=True)
class SquirrelsParams:
    n: int
    q: int
    beta_sq: int
    s: int
    tag: str
    public_basis: PrimeBasis | None = None
    delta_bits: int | None = None
    classical_bits: int | None = None

    def __post_init__(self):
        if self.q < 1 or self.q & (self.q - 1):
            raise ValueError(f"hash bound q must be a power of two, got {self.q}")
        if self.public_basis is not None and len(self.public_basis) != self.s:
            raise ValueError("public basis length disagrees with s")


def named_params(tag: str) -> SquirrelsParams:
    if tag not in _NAMED:
        raise ValueError(f"unknown Squirrels instance {tag!r}")
    n, q, beta_sq, s, delta_bits, lam = _NAMED[tag]
    return SquirrelsParams(
        n=n, q=q, beta_sq=beta_sq, s=s, tag=tag,
        delta_bits=delta_bits, classical_bits=lam,
    )


@dataclass(eq=False)
class SquirrelsPublicKey:
    """Check-vector residues, shape (n-1, s): residues[i][j] is the i-th
    check coordinate mod the j-th public prime.  The final coordinate is
    -1 by convention and never stored."""

    residues: np.ndarray

    def __post_init__(self):
        self.residues = np.ascontiguousarray(self.residues, dtype=np.int64)
        if self.residues.ndim != 2:
            raise ValueError("public key residues must be 2-D")
        self.residues.setflags(write=False)


@dataclass(frozen=True)
class SquirrelsSignature:
    salt: bytes
    s_vec: tuple[int, ...]


@dataclass(frozen=True)
class SquirrelsCompressionKey:
    secret_basis: PrimeBasis
    precomp: EcrtPrecomp
    inv_delta: tuple[int, ...]  # (product of public primes)^-1 mod each secret prime


@dataclass(eq=False)
class SquirrelsVerificationKey:
    """rows[j][i] = i-th shifted check coordinate mod the j-th secret
    prime (secret-prime-major, matching the verification loop).  Row
    index n-1 holds r_j - 1, the image of the implicit -1 coordinate."""

    secret_basis: PrimeBasis
    inv_delta: tuple[int, ...]
    rows: np.ndarray  # shape (t, n)

    def __post_init__(self):
        self.rows = np.ascontiguousarray(self.rows, dtype=np.int64)
        self.rows.setflags(write=False)


@dataclass(eq=False)
class ToySquirrelsSecret:
    """Short generating matrix for the round-off signer."""

    basis: np.ndarray  # (n, n) int64, rows generate the lattice
    inv: np.ndarray  # float64 inverse, used only to pick a near point


def hash_to_point(message: bytes, salt: bytes, q: int, n: int) -> np.ndarray:
    """Deterministic hash of salt||message to a vector in [0, q)^n.

    q is a power of two (4096 in every named instance), so masking two
    little-endian bytes per coordinate is exactly uniform.
    """
    if q < 1 or q & (q - 1) or q > (1 << 16):
        raise ValueError(f"q must be a power of two in [1, 2^16], got {q}")
    raw = hashlib.shake_128(salt + message).digest(2 * n)
    words = np.frombuffer(raw, dtype="<u2").astype(np.int64)
    return words & (q - 1)


def k_prime_bounds(params: SquirrelsParams) -> tuple[int, int]:
    """Exact integer range of the recovered determinant multiplier for
    any signature passing the norm gate."""
    double_root = math.isqrt(4 * params.n * params.beta_sq)
    k_min = -double_root - 1
    k_max = 2 * (params.n - 1) * (params.q - 1) + double_root + 1
    return k_min, k_max


def _check_signature_shape(sig: SquirrelsSignature, n: int) -> np.ndarray:
    if len(sig.s_vec) != n:
        raise MalformedSignature(f"signature has {len(sig.s_vec)} coords, expected {n}")
    bound = 1 << (COORD_BITS - 1)
    if any(not -bound <= x < bound for x in sig.s_vec):
        raise MalformedSignature("signature coordinate outside 16-bit range")
    return np.asarray(sig.s_vec, dtype=np.int64)


def verify(
    sig: SquirrelsSignature,
    message: bytes,
    pk: SquirrelsPublicKey,
    params: SquirrelsParams,
    counter: OpCounter | None = None,
) -> bool:
    """Full verification: norm gate, then one congruence per public prime."""
    if params.public_basis is None:
        raise ValueError("verification needs a concrete public basis")
    s_vec = _check_signature_shape(sig, params.n)
    if int(s_vec @ s_vec) > params.beta_sq:
        return False
    c = s_vec + hash_to_point(message, sig.salt, params.q, params.n)
    primes = np.asarray(params.public_basis.primes, dtype=np.int64)
    sums = c[:-1] @ pk.residues
    if counter is not None:
        counter.add(muls=(params.n - 1) * params.s, reductions=params.s)
    return bool(np.all((sums - c[-1]) % primes == 0))


def ckeygen(
    params: SquirrelsParams,
    t: int,
    rng: Random,
    secret_width: int = 31,
) -> SquirrelsCompressionKey:
    """Sample the secret basis and precompute the CRT-transfer tables.

    Every secret prime must exceed the recovered-multiplier window so
    the shifted multiplier fits a single residue; 31-bit primes always
    qualify, toy widths are checked explicitly.
    """
    if t < 1:
        raise ValueError(f"need at least one secret prime, got t={t}")
    if params.public_basis is None:
        raise ValueError("compression-key generation needs a concrete public basis")
    k_min, k_max = k_prime_bounds(params)
    if (1 << (secret_width - 1)) <= k_max - k_min:
        raise ValueError(
            f"{secret_width}-bit secret primes cannot exceed the multiplier "
            f"window {k_max - k_min}"
        )
    taken = set(params.public_basis.primes)
    secret = []
    for _ in range(t):
        r = sample_prime(secret_width, rng, exclude=taken)
        taken.add(r)
        secret.append(r)
    secret_basis = PrimeBasis(tuple(secret))
    precomp = mod_ecrt_setup(params.public_basis, secret_basis)
    inv_delta = tuple(
        inv_mod(d, r) for d, r in zip(precomp.product_res, secret_basis.primes)
    )
    return SquirrelsCompressionKey(secret_basis, precomp, inv_delta)


def vkeygen(
    ck: SquirrelsCompressionKey,
    pk: SquirrelsPublicKey,
    params: SquirrelsParams,
) -> SquirrelsVerificationKey:
    """Transfer every check coordinate to the secret basis.

    The raw transfer returns the coordinate or the coordinate minus the
    public product; adding the product's residues once normalizes that
    to coordinate-plus-{0,1}-product, which is the shift the multiplier
    window of ``k_prime_bounds`` accounts for.  The per-row loop is
    independent across rows and may be parallelized.
    """
    if params.public_basis is None:
        raise ValueError("verification-key generation needs a concrete public basis")
    n, t = params.n, len(ck.secret_basis)
    if pk.residues.shape != (n - 1, params.s):
        raise ValueError(f"public key shape {pk.residues.shape} != {(n - 1, params.s)}")
    qc = q_coefficients(params.public_basis)
    secret_primes = ck.secret_basis.primes
    rows = np.empty((t, n), dtype=np.int64)
    for i in range(n - 1):
        res = mod_ecrt(
            ck.precomp, qc, RnsResidues(params.public_basis, tuple(map(int, pk.residues[i])))
        )
        for j in range(t):
            rows[j, i] = (res.values[j] + ck.precomp.product_res[j]) % secret_primes[j]
    for j in range(t):
        rows[j, n - 1] = secret_primes[j] - 1
    return SquirrelsVerificationKey(
        secret_basis=ck.secret_basis, inv_delta=ck.inv_delta, rows=rows
    )


def cverify(
    sig: SquirrelsSignature,
    message: bytes,
    vk: SquirrelsVerificationKey,
    params: SquirrelsParams,
    counter: OpCounter | None = None,
) -> bool:
    """Compressed verification against the secret-basis key.

    Per secret prime: fold the signature against the transferred check
    row, multiply by the inverse determinant residue, shift by the
    window minimum.  Accept iff every shifted multiplier sits inside the
    window and they all agree.  The per-prime loop gathers flags and
    combines them at the end (no early exit on secret data).
    """
    s_vec = _check_signature_shape(sig, params.n)
    if int(s_vec @ s_vec) > params.beta_sq:
        return False
    c = [int(x) for x in s_vec + hash_to_point(message, sig.salt, params.q, params.n)]
    k_min, k_max = k_prime_bounds(params)
    span = k_max - k_min
    n = params.n
    t = len(vk.secret_basis)
    multipliers = []
    in_window = True
    for j, r in enumerate(vk.secret_basis.primes):
        row = vk.rows[j]
        acc = 0
        for i in range(n):
            acc += c[i] * int(row[i])
        k_j = (acc % r * vk.inv_delta[j] - k_min) % r
        multipliers.append(k_j)
        in_window &= k_j <= span
    if counter is not None:
        counter.add(muls=(n + 1) * t, reductions=2 * t)
    agree = True
    for k_j in multipliers:
        agree &= k_j == multipliers[0]
    return bool(in_window & agree)


def choose_t(target_mu: float) -> tuple[int, float]:
    """Secret-prime count whose keyspace exponent log2 C(#31-bit primes, t)
    lands nearest the target; returns (t, achieved exponent)."""
    if target_mu <= 0:
        raise ValueError("target security exponent must be positive")
    best = None
    for t in range(1, 65):
        mu = math.log2(math.comb(PRIME_COUNT_31BIT, t))
        gap = abs(mu - target_mu)
        if best is None or gap < best[0]:
            best = (gap, t, mu)
    return best[1], best[2]


def pk_bytes(params: SquirrelsParams) -> int:
    """Serialized public key: 4(n-1)s bytes of 32-bit residues."""
    return 4 * (params.n - 1) * params.s


def vk_bytes(params: SquirrelsParams, t: int) -> int:
    """Serialized verification key: secret primes, inverse-determinant
    residues, and n-1 transferred rows -- 4(n+1)t bytes."""
    return 4 * (params.n + 1) * t


def ck_bytes(params: SquirrelsParams, t: int) -> int:
    """Serialized compression key: secret primes, product residues,
    cofactor residues, inverse-determinant residues -- 4(s+3)t bytes."""
    return 4 * (params.s + 3) * t


def verify_cost(params: SquirrelsParams) -> tuple[int, int]:
    """(word multiplications, reductions) of the congruence phase."""
    return (params.n - 1) * params.s, params.s


def cverify_cost(params: SquirrelsParams, t: int) -> tuple[int, int]:
    return (params.n + 1) * t, 2 * t


# ---------------------------------------------------------------------------
# Desk-scale test oracle: random co-cyclic lattice + round-off signer.
# ---------------------------------------------------------------------------


def _row_hnf(mat: list[list[int]]) -> list[list[int]] | None:
    """Row-style Hermite form, upper triangular with positive diagonal
    and above-diagonal entries reduced; None if the matrix is singular."""
    n = len(mat)
    a = [row[:] for row in mat]
    for col in range(n):
        while True:
            nz = [r for r in range(col, n) if a[r][col] != 0]
            if not nz:
                return None
            r0 = min(nz, key=lambda r: abs(a[r][col]))
            a[col], a[r0] = a[r0], a[col]
            if a[col][col] < 0:
                a[col] = [-x for x in a[col]]
            pivot = a[col][col]
            clean = True
            for r in range(col + 1, n):
                if a[r][col]:
                    f = a[r][col] // pivot
                    a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                    if a[r][col]:
                        clean = False
            if clean:
                break
        pivot = a[col][col]
        for r in range(col):
            f = a[r][col] // pivot
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return a


def _pollard_rho(n: int, rng: Random) -> int:
    while True:
        c = rng.randrange(1, n)
        x = y = rng.randrange(2, n)
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d


def _factorize(n: int, rng: Random) -> list[int]:
    """Prime factorization with multiplicity; trial division then rho."""
    out = []
    for p in (2, 3, 5, 7, 11, 13):
        while n % p == 0:
            out.append(p)
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime_word(m):
            out.append(m)
            continue
        d = _pollard_rho(m, rng)
        stack.extend((d, m // d))
    return sorted(out)


def toy_keygen(
    n: int,
    entry_bound: int,
    rng: Random,
    q: int = 16,
    max_attempts: int = 2000,
) -> tuple[SquirrelsPublicKey, SquirrelsParams, ToySquirrelsSecret]:
    """Random co-cyclic lattice small enough to cross-check with big
    integers.

    Samples integer matrices until the Hermite form is co-cyclic (unit
    diagonal except the last entry) with an odd-or-even squarefree
    determinant whose prime factors all fit 31 bits.  The check vector
    is read off the Hermite form's last column; the sampled matrix
    itself serves as the signer's short basis.
    """
    if not 2 <= n <= MAX_TOY_DIMENSION:
        raise ValueError(f"toy dimension must be in [2, {MAX_TOY_DIMENSION}]")
    if entry_bound < 1:
        raise ValueError("entry bound must be positive")
    cocyclic_hits = 0
    for attempt in range(1, max_attempts + 1):
        g = [[rng.randint(-entry_bound, entry_bound) for _ in range(n)] for _ in range(n)]
        h = _row_hnf(g)
        if h is None:
            continue
        det = h[n - 1][n - 1]
        if any(h[i][i] != 1 for i in range(n - 1)) or det <= 1:
            continue
        cocyclic_hits += 1
        if det >= (1 << 62):
            continue
        factors = _factorize(det, rng)
        if len(set(factors)) != len(factors):
            continue  # determinant not squarefree
        if any(p >= (1 << 31) for p in factors):
            continue  # residues must fit signed 32-bit storage
        logger.debug(
            "toy keygen: accepted after %d attempts, co-cyclic rate %.2f",
            attempt, cocyclic_hits / attempt,
        )
        basis = PrimeBasis(tuple(factors))
        check = [h[i][n - 1] for i in range(n - 1)]
        residues = np.array(
            [[v % p for p in basis.primes] for v in check], dtype=np.int64
        )
        params = SquirrelsParams(
            n=n,
            q=q,
            beta_sq=n * n * entry_bound * entry_bound,
            s=len(basis),
            tag="toy",
            public_basis=basis,
        )
        g_arr = np.array(g, dtype=np.int64)
        secret = ToySquirrelsSecret(basis=g_arr, inv=np.linalg.inv(g_arr.astype(float)))
        return SquirrelsPublicKey(residues), params, secret
    raise ResampleLimit(f"no usable co-cyclic lattice in {max_attempts} attempts")


def toy_sign(
    secret: ToySquirrelsSecret,
    message: bytes,
    params: SquirrelsParams,
    rng: Random,
    max_retries: int = 200,
) -> SquirrelsSignature:
    """Round-off signer: snap the hashed point to a nearby lattice point
    with the short basis, retrying salts until the difference clears the
    norm gate.  Stands in for the trapdoor sampler, which is out of
    scope."""
    for _ in range(max_retries):
        salt = rng.randbytes(SALT_BYTES)
        h = hash_to_point(message, salt, params.q, params.n)
        coeffs = np.rint(h.astype(float) @ secret.inv).astype(np.int64)
        nearby = coeffs @ secret.basis
        s_vec = nearby - h
        if int(s_vec @ s_vec) <= params.beta_sq:
            return SquirrelsSignature(salt=salt, s_vec=tuple(int(x) for x in s_vec))
    raise ResampleLimit(f"no short signature after {max_retries} salts")
