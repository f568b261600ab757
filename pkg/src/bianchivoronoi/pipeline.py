"""End-to-end computation of the homology record for one discriminant."""

import math
import time

from .arith import ArithmeticGuard, class_group, cusp_dimension, factorize, \
    growth_stats, torsion_order
from .cache import complex_hash, load_complex, save_doc, serialize_complex
from .cellcomplex import build_complex
from .qfield import OrderContext
from .voronoi import enumerate_perfect_forms
from .zhomology import complex_homology


class InternalGuard(RuntimeError):
    """An internal consistency check failed; the record must not be trusted."""


FLAVORS = ("gl", "sl")


def _check_flavor(flavor: str) -> str:
    if flavor not in FLAVORS:
        raise ValueError(f"flavor must be one of {FLAVORS}, got {flavor!r}")
    return flavor


def _prime_to_six_part(torsion) -> int:
    out = 1
    for t in torsion:
        t = int(t)
        for p in (2, 3):
            while t % p == 0:
                t //= p
        out *= t
    return out


def is_square(n: int) -> bool:
    r = math.isqrt(n)
    return r * r == n


def compute_record(D: int, flavor: str, cache_dir=None, telemetry=None) -> dict:
    """Compute class group, Betti numbers, torsion and cusp count for (D, flavor).

    With a cache directory the enumeration and complex are resumed from disk
    when present and written there otherwise.  Raises InternalGuard when any
    structural invariant of the complex or of the Eisenstein part fails,
    rather than returning a questionable record.

    telemetry, if given, is a dict that receives stage timings in seconds;
    timings never enter the returned record, which stays run-independent.
    """
    _check_flavor(flavor)
    if telemetry is None:
        telemetry = {}
    t_start = time.monotonic()
    loaded = load_complex(cache_dir, D, flavor) if cache_dir else None
    if loaded is not None:
        counts, d2, d3 = loaded.counts, loaded.d2, loaded.d3
        stab_orders = loaded.stabilizer_orders
        n_classes = loaded.n_classes
        cache_hash = complex_hash(loaded.doc)
        telemetry["cache"] = "hit"
    else:
        ctx = OrderContext(D)
        t0 = time.monotonic()
        graph = enumerate_perfect_forms(ctx, flavor)
        telemetry["enumerate_s"] = time.monotonic() - t0
        t0 = time.monotonic()
        cx = build_complex(graph)
        telemetry["complex_s"] = time.monotonic() - t0
        doc = serialize_complex(graph, cx)
        cache_hash = complex_hash(doc)
        if cache_dir:
            save_doc(cache_dir, doc)
        counts, d2, d3 = cx.counts, cx.d2, cx.d3
        stab_orders = [len(o.stabilizer)
                       for dim_orbits in cx.orbits.values() for o in dim_orbits]
        n_classes = len(graph.classes)
        telemetry["cache"] = "miss"
    for order in stab_orders:
        for p in factorize(order):
            if p not in (2, 3):
                raise InternalGuard(
                    f"stabilizer of order {order} at D={D} has a prime factor {p}")
    t0 = time.monotonic()
    hom = complex_homology(counts, d2, d3)
    telemetry["homology_s"] = time.monotonic() - t0
    if hom.betti[3] != 1:
        raise InternalGuard(f"top homology has rank {hom.betti[3]} != 1 at D={D}")
    for t in hom.torsion[2]:
        if 12 % int(t):
            raise InternalGuard(f"degree-2 torsion factor {t} does not divide 12")
    cg = class_group(D)
    try:
        split = cusp_dimension(hom, cg, flavor, D)
    except ArithmeticGuard as exc:
        raise InternalGuard(str(exc)) from exc
    stats = growth_stats(hom, flavor, D, split=split, cg=cg)
    findings = []
    odd_part = _prime_to_six_part(hom.torsion[1])
    if not is_square(odd_part):
        findings.append(
            f"prime-to-6 part {odd_part} of the degree-1 torsion order is not a square")
    telemetry["total_s"] = time.monotonic() - t_start
    return {
        "D": D,
        "flavor": flavor,
        "h": cg.h,
        "class_group": list(cg.elementary_divisors),
        "perfect_classes": n_classes,
        "cells": {str(k): v for k, v in sorted(counts.items())},
        "betti": {str(k): v for k, v in sorted(hom.betti.items())},
        "torsion1": [int(t) for t in hom.torsion[1]],
        "torsion2": [int(t) for t in hom.torsion[2]],
        "cusp": split.cusp_dim,
        "eis_dim_H1": split.eis_dim_H1,
        "eis_dim_H2": split.eis_dim_H2,
        "torsion1_order": torsion_order(hom.torsion[1]),
        "logtor": stats.logtor,
        "z_d": stats.z_d,
        "rohlfs_gap": stats.rohlfs_gap,
        "findings": findings,
        "cache_hash": cache_hash,
    }
