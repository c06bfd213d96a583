#!/usr/bin/env python3
"""Print the parameter-selection tables and the multiplier windows for
every named instance of both schemes."""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from cvk import squirrels as sq
from cvk import wave as wv
from cvk.cli import squirrels_table_row, wave_table_row


def main() -> None:
    print("Squirrels: secret-prime counts, key sizes, compression ratios")
    print(f"{'inst':>5} {'lam':>4} {'n':>5} {'s':>4} {'t':>3} {'mu':>6} "
          f"{'|PK|':>9} {'|CK|':>7} {'|VK|':>7} {'ratio':>6}")
    for tag in sq.SQUIRRELS_TAGS:
        r = squirrels_table_row(tag)
        print(f"{r['instance']:>5} {r['lambda']:>4} {r['n']:>5} {r['s']:>4} "
              f"{r['t']:>3} {r['mu']:>6.1f} {r['pk_bytes']:>9} {r['ck_bytes']:>7} "
              f"{r['vk_bytes']:>7} {r['ratio']:>6.2f}")

    print("\nSquirrels: recovered-multiplier windows")
    print(f"{'inst':>5} {'k_min':>9} {'k_max':>9} {'span bits':>9}")
    for tag in sq.SQUIRRELS_TAGS:
        params = sq.named_params(tag)
        k_min, k_max = sq.k_prime_bounds(params)
        print(f"{tag:>5} {k_min:>9} {k_max:>9} {(k_max - k_min).bit_length():>9}")

    print("\nWave: projection dimensions and key sizes (our packing)")
    print(f"{'inst':>5} {'lam':>4} {'n':>6} {'k':>6} {'c':>4} {'mu':>6} "
          f"{'|PK|':>9} {'|CK|':>7} {'|VK|':>7} {'ratio':>6}")
    for tag in wv.WAVE_TAGS:
        r = wave_table_row(tag)
        print(f"{r['instance']:>5} {r['lambda']:>4} {r['n']:>6} {r['k']:>6} "
              f"{r['c']:>4} {r['mu']:>6.1f} {r['pk_bytes']:>9} {r['ck_bytes']:>7} "
              f"{r['vk_bytes']:>7} {r['ratio']:>6.2f}")


if __name__ == "__main__":
    main()
