"""Series behind the growth figures: torsion size, generator rank, bound gap.

Computes records over a range and emits CSV columns for the three observed
phenomena: exponential growth of degree-one torsion (log|tors|/|D|^e with
e = 2 for GL2 and 3/2 for SL2), the generator rank Z_D (count of all cyclic
factors of the first Voronoi homology), and for SL2 the gap between the
cuspidal dimension and its totient lower bound.

Usage: python3 demos/growth_figures.py [--to -40] [--group gl2]
"""

import argparse

from bianchivoronoi import compute_record, is_fundamental


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--to", type=int, default=-40)
    ap.add_argument("--group", choices=("gl2", "sl2"), default="gl2")
    args = ap.parse_args()
    flavor = {"gl2": "gl", "sl2": "sl"}[args.group]

    cols = "abs_D,logtor,z_d" + (",rohlfs_gap" if flavor == "sl" else "")
    print(cols)
    for D in range(-3, args.to - 1, -1):
        if not is_fundamental(D):
            continue
        rec = compute_record(D, flavor)
        line = f"{-D},{rec['logtor']!r},{rec['z_d']}"
        if flavor == "sl":
            line += f",{rec['rohlfs_gap']}"
        print(line)


if __name__ == "__main__":
    main()
