"""Command-line surface: parameter tables, the key pipeline, the
verifiers, operation-count comparisons, and the forgery-game simulator.

Exit codes: 0 = Accept, 1 = Reject, 2 = malformed input or usage error.

Named instances carry published parameters only; key material flows
through toy instances, whose parameters travel in a JSON sidecar written
by ``keygen``.  Compression and verification keys are verifier-private
and are written with owner-only permissions.
"""

import argparse
import json
import math
import os
import struct
import sys
from random import Random

from . import rw, security, serial
from . import squirrels as sq
from . import wave as wv
from .ecrt import PrimeBasis
from .errors import CvkError

_PRIVATE_KINDS = (serial.KIND_CK, serial.KIND_VK, serial.KIND_SK)


def _write(path: str, blob: bytes, private: bool = False) -> None:
    if private:
        fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_TRUNC, 0o600)
        with os.fdopen(fd, "wb") as fh:
            fh.write(blob)
    else:
        with open(path, "wb") as fh:
            fh.write(blob)


def _read(path: str) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


def _rng(seed) -> Random:
    return Random(seed)


def _message(args) -> bytes:
    if args.message_file is not None:
        return _read(args.message_file)
    if args.message is not None:
        return args.message.encode()
    raise CvkError("provide --message or --message-file")


def _require(value, flag: str):
    if value is None:
        raise CvkError(f"{flag} is required for this scheme")
    return value


def _load_params(path: str):
    doc = json.loads(_read(_require(path, "--params")).decode())
    scheme = doc["scheme"]
    if scheme == "squirrels":
        return sq.SquirrelsParams(
            n=doc["n"],
            q=doc["q"],
            beta_sq=doc["beta_sq"],
            s=len(doc["primes"]),
            tag=doc.get("tag", "toy"),
            public_basis=PrimeBasis(tuple(doc["primes"])),
        )
    if scheme == "wave":
        return wv.WaveParams(n=doc["n"], k=doc["k"], w=doc["w"], tag=doc.get("tag", "toy"))
    raise CvkError(f"unknown scheme {scheme!r} in {path}")


def _dump_squirrels_params(params: sq.SquirrelsParams, path: str) -> None:
    doc = {
        "scheme": "squirrels",
        "tag": params.tag,
        "n": params.n,
        "q": params.q,
        "beta_sq": params.beta_sq,
        "primes": list(params.public_basis.primes),
    }
    _write(path, json.dumps(doc, indent=2).encode() + b"\n")


def _dump_wave_params(params: wv.WaveParams, path: str) -> None:
    doc = {"scheme": "wave", "tag": params.tag, "n": params.n, "k": params.k, "w": params.w}
    _write(path, json.dumps(doc, indent=2).encode() + b"\n")


# ── params ───────────────────────────────────────────────────────────────


def squirrels_table_row(tag: str) -> dict:
    params = sq.named_params(tag)
    t, mu = sq.choose_t(params.classical_bits)
    pk = sq.pk_bytes(params)
    vk = sq.vk_bytes(params, t)
    return {
        "instance": tag,
        "lambda": params.classical_bits,
        "n": params.n,
        "s": params.s,
        "t": t,
        "mu": mu,
        "pk_bytes": pk,
        "ck_bytes": sq.ck_bytes(params, t),
        "vk_bytes": vk,
        "ratio": pk / vk,
    }


def wave_table_row(tag: str) -> dict:
    params = wv.named_params(tag)
    c, mu = wv.wave_choose_c(params.classical_bits)
    pk = wv.pk_bytes(params)
    vk = wv.vk_bytes(params, c)
    return {
        "instance": tag,
        "lambda": params.classical_bits,
        "n": params.n,
        "k": params.k,
        "c": c,
        "mu": mu,
        "pk_bytes": pk,
        "ck_bytes": wv.ck_bytes(params, c),
        "vk_bytes": vk,
        "ratio": pk / vk,
    }


def cmd_params(args) -> int:
    if args.scheme == "squirrels":
        tags = [args.instance] if args.instance else list(sq.SQUIRRELS_TAGS)
        print("instance  lambda     n    s   t     mu       |PK|     |CK|    |VK|  ratio")
        for tag in tags:
            r = squirrels_table_row(tag)
            print(
                f"{r['instance']:>8}  {r['lambda']:>6}  {r['n']:>4} {r['s']:>4} "
                f"{r['t']:>3}  {r['mu']:>5.1f}  {r['pk_bytes']:>9} {r['ck_bytes']:>8} "
                f"{r['vk_bytes']:>7}  {r['ratio']:>5.2f}"
            )
    elif args.scheme == "wave":
        tags = [args.instance] if args.instance else list(wv.WAVE_TAGS)
        print("instance  lambda      n     k    c     mu      |PK|     |CK|    |VK|  ratio")
        for tag in tags:
            r = wave_table_row(tag)
            print(
                f"{r['instance']:>8}  {r['lambda']:>6}  {r['n']:>5} {r['k']:>5} "
                f"{r['c']:>4}  {r['mu']:>5.1f}  {r['pk_bytes']:>8} {r['ck_bytes']:>8} "
                f"{r['vk_bytes']:>7}  {r['ratio']:>5.2f}"
            )
    else:
        raise CvkError("params tables exist for squirrels and wave")
    return 0


# ── pipeline commands ────────────────────────────────────────────────────


def cmd_keygen(args) -> int:
    rng = _rng(args.seed)
    if args.scheme == "squirrels":
        pk, params, secret = sq.toy_keygen(args.n, args.entry_bound, rng, q=args.q)
        _dump_squirrels_params(params, _require(args.out_params, "--out-params"))
        _write(args.out_pk, serial.encode_squirrels_pk(pk, params))
        _write(_require(args.out_sk, "--out-sk"), serial.encode_squirrels_sk(secret, params), private=True)
    elif args.scheme == "wave":
        params = wv.WaveParams(n=args.n, k=args.k, w=args.w, tag="toy")
        pk = wv.wave_toy_keygen(params, rng)
        _dump_wave_params(params, _require(args.out_params, "--out-params"))
        _write(args.out_pk, serial.encode_wave_pk(pk, params))
    else:
        kp = rw.rw_keygen(args.bits, rng)
        _write(args.out_pk, serial.encode_rw_pk(kp.n))
        _write(_require(args.out_sk, "--out-sk"), serial.encode_rw_sk(kp), private=True)
    return 0


def cmd_ck_gen(args) -> int:
    rng = _rng(args.seed)
    if args.scheme == "squirrels":
        params = _load_params(args.params)
        ck = sq.ckeygen(params, args.t, rng, secret_width=args.secret_width)
        _write(args.out, serial.encode_squirrels_ck(ck, params), private=True)
    elif args.scheme == "wave":
        params = _load_params(args.params)
        ck = wv.wave_ckeygen(params, args.c, rng)
        _write(args.out, serial.encode_wave_ck(ck, params), private=True)
    else:
        ell = rw.rw_ckeygen(args.mu, rng)
        _write(args.out, serial.encode_rw_ck(ell), private=True)
    return 0


def cmd_vk_gen(args) -> int:
    if args.scheme == "squirrels":
        params = _load_params(args.params)
        pk = serial.decode_squirrels_pk(_read(args.pk), params)
        ck = serial.decode_squirrels_ck(_read(args.ck), params)
        vk = sq.vkeygen(ck, pk, params)
        _write(args.out, serial.encode_squirrels_vk(vk, params), private=True)
    elif args.scheme == "wave":
        params = _load_params(args.params)
        pk = serial.decode_wave_pk(_read(args.pk), params)
        ck = serial.decode_wave_ck(_read(args.ck), params, args.c)
        vk = wv.wave_vkeygen(pk, ck, params)
        _write(args.out, serial.encode_wave_vk(vk, params), private=True)
    else:
        n = serial.decode_rw_pk(_read(args.pk))
        ell = serial.decode_rw_ck(_read(args.ck))
        vk = rw.rw_vkeygen(ell, n)
        _write(args.out, serial.encode_rw_vk(vk), private=True)
    return 0


def cmd_sign_toy(args) -> int:
    rng = _rng(args.seed)
    message = _message(args)
    if args.scheme == "squirrels":
        params = _load_params(args.params)
        secret = serial.decode_squirrels_sk(_read(_require(args.sk, "--sk")), params)
        sig = sq.toy_sign(secret, message, params, rng)
        _write(args.out, serial.encode_squirrels_sig(sig, params))
    elif args.scheme == "wave":
        params = _load_params(args.params)
        pk = serial.decode_wave_pk(_read(_require(args.pk, "--pk")), params)
        sig = wv.wave_toy_sign(pk, message, params, rng)
        _write(args.out, serial.encode_wave_sig(sig, params))
    else:
        kp = serial.decode_rw_sk(_read(_require(args.sk, "--sk")))
        sig = rw.rw_sign(kp, message, rng)
        _write(args.out, serial.encode_rw_sig(sig))
    return 0


def cmd_verify(args) -> int:
    message = _message(args)
    if args.scheme == "squirrels":
        params = _load_params(args.params)
        pk = serial.decode_squirrels_pk(_read(args.pk), params)
        sig = serial.decode_squirrels_sig(_read(args.sig), params)
        ok = sq.verify(sig, message, pk, params)
    elif args.scheme == "wave":
        params = _load_params(args.params)
        pk = serial.decode_wave_pk(_read(args.pk), params)
        sig = serial.decode_wave_sig(_read(args.sig), params)
        ok = wv.wave_verify(sig, message, pk, params)
    else:
        n = serial.decode_rw_pk(_read(args.pk))
        sig = serial.decode_rw_sig(_read(args.sig))
        ok = rw.rw_verify(sig, message, n)
    print("accept" if ok else "reject")
    return 0 if ok else 1


def cmd_cverify(args) -> int:
    message = _message(args)
    if args.scheme == "squirrels":
        params = _load_params(args.params)
        vk = serial.decode_squirrels_vk(_read(args.vk), params)
        sig = serial.decode_squirrels_sig(_read(args.sig), params)
        ok = sq.cverify(sig, message, vk, params)
    elif args.scheme == "wave":
        params = _load_params(args.params)
        vk = serial.decode_wave_vk(_read(args.vk), params, args.c)
        sig = serial.decode_wave_sig(_read(args.sig), params)
        ok = wv.wave_cverify(sig, message, vk, params)
    else:
        vk = serial.decode_rw_vk(_read(args.vk))
        sig = serial.decode_rw_sig(_read(args.sig))
        ok = rw.rw_cverify(sig, message, vk)
    print("accept" if ok else "reject")
    return 0 if ok else 1


def cmd_bench_ops(args) -> int:
    if args.scheme == "squirrels":
        params = sq.named_params(args.instance)
        t = args.t if args.t else sq.choose_t(params.classical_bits)[0]
        v_muls, v_reds = sq.verify_cost(params)
        c_muls, c_reds = sq.cverify_cost(params, t)
        threshold = params.s / (t + 1)
        label = f"s/(t+1) = {params.s}/{t + 1}"
    elif args.scheme == "wave":
        params = wv.named_params(args.instance)
        c = args.c if args.c else wv.wave_choose_c(params.classical_bits)[0]
        v_muls, v_reds = wv.verify_cost(params)
        c_muls, c_reds = wv.cverify_cost(params, c)
        threshold = params.redundancy / (2 * c)
        label = f"(n-k)/(2c) = {params.redundancy}/{2 * c}"
    else:
        raise CvkError("bench-ops covers squirrels and wave")
    ratio = v_muls / c_muls
    print(f"scheme={args.scheme} instance={args.instance}")
    print(f"verify   word-muls={v_muls:>12}  reductions={v_reds}")
    print(f"cverify  word-muls={c_muls:>12}  reductions={c_reds}")
    print(f"speedup  {ratio:.2f}x  (required >= {label} = {threshold:.2f})")
    return 0 if ratio >= threshold else 1


def cmd_simulate_forgery(args) -> int:
    rng = _rng(args.seed)
    if args.scheme == "wave":
        instance = security.wave_segp_instance(args.nk, args.c)
    elif args.scheme == "squirrels":
        instance = security.squirrels_segp_instance(args.width, args.query_bound)
    else:
        raise CvkError("simulate-forgery covers squirrels and wave")
    report = security.simulate_segp_game(
        instance, args.strategy, args.trials, args.queries, rng
    )
    sigma = math.sqrt(
        max(report.cumulative_bound * (1 - report.cumulative_bound), 1e-12)
        / max(report.trials, 1)
    )
    print(f"instance          {report.instance}")
    print(f"strategy          {report.strategy}")
    print(f"trials x queries  {report.trials} x {report.queries_per_trial}")
    print(f"success rate      {report.success_rate:.6f}  ({report.successes} hits)")
    print(f"per-query bound   {report.per_query_bound:.6f}")
    print(f"cumulative bound  {report.cumulative_bound:.6f} (3-sigma {3 * sigma:.6f})")
    within = report.success_rate <= report.cumulative_bound + 3 * sigma
    print("within bound" if within else "EXCEEDS BOUND")
    return 0 if within else 1


# ── argument wiring ──────────────────────────────────────────────────────


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvk",
        description="Compressed verification for GPV-style signatures",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="print parameter tables")
    p.add_argument("--scheme", required=True, choices=["squirrels", "wave"])
    p.add_argument("--instance")
    p.set_defaults(run=cmd_params)

    p = sub.add_parser("keygen", help="toy key generation")
    p.add_argument("--scheme", required=True, choices=["squirrels", "wave", "rw"])
    p.add_argument("--seed", type=int)
    p.add_argument("--out-pk", required=True)
    p.add_argument("--out-sk")
    p.add_argument("--out-params")
    p.add_argument("--n", type=int, default=12)
    p.add_argument("--k", type=int, default=12)
    p.add_argument("--w", type=int, default=16)
    p.add_argument("--q", type=int, default=16)
    p.add_argument("--entry-bound", type=int, default=3)
    p.add_argument("--bits", type=int, default=128)
    p.set_defaults(run=cmd_keygen)

    p = sub.add_parser("ck-gen", help="sample a compression key")
    p.add_argument("--scheme", required=True, choices=["squirrels", "wave", "rw"])
    p.add_argument("--seed", type=int)
    p.add_argument("--params")
    p.add_argument("--t", type=int, default=2)
    p.add_argument("--secret-width", type=int, default=31)
    p.add_argument("--c", type=int, default=4)
    p.add_argument("--mu", type=int, default=31)
    p.add_argument("--out", required=True)
    p.set_defaults(run=cmd_ck_gen)

    p = sub.add_parser("vk-gen", help="compress a public key")
    p.add_argument("--scheme", required=True, choices=["squirrels", "wave", "rw"])
    p.add_argument("--params")
    p.add_argument("--pk", required=True)
    p.add_argument("--ck", required=True)
    p.add_argument("--c", type=int, default=4)
    p.add_argument("--out", required=True)
    p.set_defaults(run=cmd_vk_gen)

    p = sub.add_parser("sign-toy", help="sign with the desk-scale signer")
    p.add_argument("--scheme", required=True, choices=["squirrels", "wave", "rw"])
    p.add_argument("--seed", type=int)
    p.add_argument("--params")
    p.add_argument("--sk")
    p.add_argument("--pk")
    p.add_argument("--message")
    p.add_argument("--message-file")
    p.add_argument("--out", required=True)
    p.set_defaults(run=cmd_sign_toy)

    p = sub.add_parser("verify", help="full verification")
    p.add_argument("--scheme", required=True, choices=["squirrels", "wave", "rw"])
    p.add_argument("--params")
    p.add_argument("--pk", required=True)
    p.add_argument("--sig", required=True)
    p.add_argument("--message")
    p.add_argument("--message-file")
    p.set_defaults(run=cmd_verify)

    p = sub.add_parser("cverify", help="compressed verification")
    p.add_argument("--scheme", required=True, choices=["squirrels", "wave", "rw"])
    p.add_argument("--params")
    p.add_argument("--vk", required=True)
    p.add_argument("--sig", required=True)
    p.add_argument("--c", type=int, default=4)
    p.add_argument("--message")
    p.add_argument("--message-file")
    p.set_defaults(run=cmd_cverify)

    p = sub.add_parser("bench-ops", help="operation-count comparison")
    p.add_argument("--scheme", required=True, choices=["squirrels", "wave"])
    p.add_argument("--instance", required=True)
    p.add_argument("--t", type=int)
    p.add_argument("--c", type=int)
    p.set_defaults(run=cmd_bench_ops)

    p = sub.add_parser("simulate-forgery", help="membership-oracle forgery game")
    p.add_argument("--scheme", required=True, choices=["squirrels", "wave"])
    p.add_argument("--strategy", default="random", choices=list(security.STRATEGIES))
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--queries", type=int, default=3)
    p.add_argument("--nk", type=int, default=4)
    p.add_argument("--c", type=int, default=2)
    p.add_argument("--width", type=int, default=8)
    p.add_argument("--query-bound", type=int, default=1 << 20)
    p.add_argument("--seed", type=int)
    p.set_defaults(run=cmd_simulate_forgery)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except (CvkError, OSError, json.JSONDecodeError, ValueError, KeyError, struct.error) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
