#!/usr/bin/env python3
"""Empirical false-accept rates of the compressed verifiers on toy
instances, against their predicted values.

Wave: uniform nonzero syndromes against a random codimension-c
projection; the prediction is 3^-c.  Squirrels: norm-valid single
coordinate tampers with fresh salts against a single known secret prime
r; the prediction is (window span + 1) / r.
"""

import argparse
import math
import os
import sys
from random import Random

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from cvk import squirrels as sq
from cvk import wave as wv


def wave_experiment(trials: int, c: int, seed: int) -> None:
    params = wv.WaveParams(n=24, k=12, w=16, tag="toy")
    nk = params.redundancy
    ck = wv.wave_ckeygen(params, c, Random(seed))
    ck_arr = ck.to_array().astype(np.int64)
    gen = np.random.default_rng(seed)
    syndromes = gen.integers(0, 3, size=(trials, nk), dtype=np.int64)
    zero = ~syndromes.any(axis=1)
    while zero.any():
        syndromes[zero] = gen.integers(0, 3, size=(int(zero.sum()), nk))
        zero = ~syndromes.any(axis=1)
    rate = float((~((syndromes @ ck_arr) % 3).any(axis=1)).mean())
    expected = 3.0**-c
    sigma = math.sqrt(expected * (1 - expected) / trials)
    print(f"wave   c={c}: rate {rate:.6f}  expected {expected:.6f}  "
          f"deviation {abs(rate - expected) / sigma:.2f} sigma")


def squirrels_experiment(trials: int, seed: int) -> None:
    rng = Random(seed)
    pk, params, secret = sq.toy_keygen(12, 3, rng, q=16)
    ck = sq.ckeygen(params, 1, rng, secret_width=16)
    vk = sq.vkeygen(ck, pk, params)
    r = vk.secret_basis.primes[0]
    k_min, k_max = sq.k_prime_bounds(params)
    expected = (k_max - k_min + 1) / r
    base = list(sq.toy_sign(secret, b"target", params, rng).s_vec)
    accepts = 0
    for _ in range(trials):
        coord = rng.randrange(params.n)
        delta = rng.choice((-4, -3, -2, -1, 1, 2, 3, 4))
        tampered = base.copy()
        tampered[coord] += delta
        sig = sq.SquirrelsSignature(salt=rng.randbytes(16), s_vec=tuple(tampered))
        if sum(x * x for x in sig.s_vec) > params.beta_sq:
            continue
        accepts += sq.cverify(sig, b"target", vk, params)
    rate = accepts / trials
    sigma = math.sqrt(expected * (1 - expected) / trials)
    print(f"squirrels r={r}: rate {rate:.6f}  expected {expected:.6f}  "
          f"deviation {abs(rate - expected) / sigma:.2f} sigma")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=100_000)
    parser.add_argument("--c", type=int, default=4)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()
    wave_experiment(args.trials, args.c, args.seed)
    squirrels_experiment(args.trials, args.seed)


if __name__ == "__main__":
    main()
