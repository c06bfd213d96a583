#!/usr/bin/env python3
"""Play the hidden-kernel membership game on exhaustively enumerable
instances and compare every strategy's success rate with the
per-rejection elimination bound."""

import argparse
import os
import sys
from random import Random

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from cvk import security


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scheme", choices=["wave", "squirrels"], default="wave")
    parser.add_argument("--nk", type=int, default=4)
    parser.add_argument("--c", type=int, default=2)
    parser.add_argument("--width", type=int, default=8)
    parser.add_argument("--query-bound", type=int, default=1 << 20)
    parser.add_argument("--trials", type=int, default=4000)
    parser.add_argument("--queries", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if args.scheme == "wave":
        instance = security.wave_segp_instance(args.nk, args.c)
    else:
        instance = security.squirrels_segp_instance(args.width, args.query_bound)
    print(f"{instance.name}: keyspace {instance.s_size}, kappa {instance.kappa}")
    rng = Random(args.seed)
    for strategy in security.STRATEGIES:
        report = security.simulate_segp_game(
            instance, strategy, args.trials, args.queries, rng
        )
        print(
            f"{strategy:>16}: rate {report.success_rate:.4f}  "
            f"per-query bound {report.per_query_bound:.4f}  "
            f"cumulative bound {report.cumulative_bound:.4f}"
        )


if __name__ == "__main__":
    main()
