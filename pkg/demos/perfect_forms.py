"""Walk the perfect Hermitian forms of one imaginary quadratic order.

Every positive definite binary Hermitian form over O_D has a minimum on the
nonzero lattice vectors; a form is perfect when its minimal vectors pin it
down uniquely.  The script enumerates the GL2(O_D)-classes of perfect forms
by the facet-walking algorithm and prints what it finds.

Usage: python3 demos/perfect_forms.py [-D 23]
"""

import argparse

from bianchivoronoi import OrderContext, enumerate_perfect_forms


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("-D", type=int, default=-23, help="fundamental discriminant < 0")
    args = ap.parse_args()

    ctx = OrderContext(args.D)
    print(f"order Z[omega], omega^2 = {ctx.D}*omega - {ctx.n}  (D = {ctx.D})")

    graph = enumerate_perfect_forms(ctx, "gl")
    print(f"perfect form classes up to GL2-equivalence: {len(graph.classes)}")
    print()
    for i, cls in enumerate(graph.classes):
        a, b1, b2, c = cls.form.coords
        neighbors = sorted({j for j, _ in graph.adjacency[i]})
        print(f"class {i}: form (a, b1, b2, c) = ({a}, {b1}, {b2}, {c})")
        print(f"  minimum {cls.min_value}, minimal vectors {len(cls.min_all)}, "
              f"cone rays {len(cls.ray_keys)}")
        print(f"  facets {len(graph.facet_lists[i])}, neighbor classes {neighbors}")

    total_facets = sum(len(f) for f in graph.facet_lists)
    print()
    print(f"the {len(graph.classes)} top cones share {total_facets} facets; "
          f"every facet crossing lands on another perfect class (closed walk)")


if __name__ == "__main__":
    main()
