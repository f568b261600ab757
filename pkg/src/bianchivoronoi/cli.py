"""Command line driver: per-discriminant records, scans, tables and stats."""

import argparse
import json
import multiprocessing
import os
import sys

from . import cache, tables
from .pipeline import InternalGuard, compute_record
from .qfield import InvalidDiscriminantError, is_fundamental

EXIT_USAGE = 2
EXIT_CACHE = 3
EXIT_GUARD = 4

GROUPS = {"gl2": "gl", "sl2": "sl"}

CACHE_ENV = "BIANCHIVORONOI_CACHE"
DEFAULT_CACHE = "bianchivoronoi_cache"

FIGURES = {
    "gl-torsion": ("gl", "logtor"),
    "sl-torsion": ("sl", "logtor"),
    "gl-cusp": ("gl", "cusp"),
    "sl-cusp": ("sl", "cusp"),
    "rohlfs": ("sl", "rohlfs_gap"),
    "zfactors": ("gl", "z_d"),
}


def _cache_dir(args) -> str:
    return args.cache or os.environ.get(CACHE_ENV) or DEFAULT_CACHE


def _get_or_compute(D: int, flavor: str, cache_dir: str) -> dict:
    record = cache.load_record(cache_dir, D, flavor)
    if record is not None:
        return record
    telemetry = {}
    record = compute_record(D, flavor, cache_dir=cache_dir, telemetry=telemetry)
    cache.save_record(cache_dir, record, telemetry)
    return record


def cmd_compute(args) -> int:
    cache_dir = _cache_dir(args)
    record = _get_or_compute(args.disc, GROUPS[args.group], cache_dir)
    cache.rebuild_index(cache_dir)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(cache.canonical_json(record))
    print(tables.format_paper_row(record))
    return 0


def _scan_worker(task):
    D, flavor, cache_dir = task
    try:
        telemetry = {}
        record = compute_record(D, flavor, cache_dir=cache_dir, telemetry=telemetry)
        cache.save_record(cache_dir, record, telemetry)
        return (D, None)
    except Exception as exc:
        cache.save_error(cache_dir, D, flavor, f"{type(exc).__name__}: {exc}")
        return (D, f"{type(exc).__name__}: {exc}")


def cmd_scan(args) -> int:
    if args.from_ < args.to:
        print("error: --from must be the less negative bound", file=sys.stderr)
        return EXIT_USAGE
    cache_dir = _cache_dir(args)
    flavor = GROUPS[args.group]
    wanted = [D for D in range(args.from_, args.to - 1, -1) if is_fundamental(D)]
    todo = [D for D in wanted
            if cache.load_record(cache_dir, D, flavor) is None]
    tasks = [(D, flavor, cache_dir) for D in todo]
    if args.jobs > 1 and len(tasks) > 1:
        with multiprocessing.Pool(args.jobs) as pool:
            outcomes = pool.map(_scan_worker, tasks)
    else:
        outcomes = [_scan_worker(t) for t in tasks]
    cache.rebuild_index(cache_dir)
    failures = [(D, msg) for D, msg in outcomes if msg is not None]
    for D, msg in failures:
        print(f"D={D}: {msg}", file=sys.stderr)
    print(f"scan {args.group}: {len(wanted)} in range, "
          f"{len(wanted) - len(todo)} already stored, "
          f"{len(todo) - len(failures)} computed, {len(failures)} failed")
    return 0


def cmd_table(args) -> int:
    cache_dir = _cache_dir(args)
    flavor = GROUPS[args.group] if args.group else None
    records = cache.list_records(cache_dir, flavor=flavor)
    if args.format == "json":
        print(json.dumps(records, sort_keys=True, indent=1))
    elif args.format == "csv":
        print("flavor,D,class_group,cusp,torsion1")
        for r in records:
            print(",".join([r["flavor"], str(r["D"]),
                            '"' + tables.render_invariants(r["class_group"]) + '"',
                            str(r["cusp"]),
                            '"' + tables.render_invariants(r["torsion1"]) + '"']))
    else:
        for r in records:
            print(f"{r['flavor']}2 {r['D']}: {tables.format_paper_row(r)}")
    if args.compare:
        bad = 0
        checked = 0
        for r in records:
            if r["D"] < tables.reference_limit(r["flavor"]):
                continue
            checked += 1
            for line in tables.compare_with_reference(r):
                print(f"MISMATCH {r['flavor']}2 D={r['D']}: {line}", file=sys.stderr)
                bad += 1
        print(f"compared {checked} records against the published tables, "
              f"{bad} mismatches")
        if bad:
            return 1
    return 0


def cmd_stats(args) -> int:
    cache_dir = _cache_dir(args)
    flavor, field = FIGURES[args.figure]
    if args.figure == "rohlfs":
        print("note: the cusp lower bound is an external formula; "
              "treat gaps as advisory", file=sys.stderr)
    print(f"abs_D,{field}")
    for r in cache.list_records(cache_dir, flavor=flavor):
        value = r[field]
        if value is None:
            continue
        print(f"{abs(r['D'])},{value!r}" if isinstance(value, float)
              else f"{abs(r['D'])},{value}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bianchivoronoi",
        description="Voronoi homology of GL2 and SL2 over imaginary "
                    "quadratic integers")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="compute one discriminant record")
    p.add_argument("--disc", type=int, required=True, help="fundamental D < 0")
    p.add_argument("--group", choices=sorted(GROUPS), default="gl2")
    p.add_argument("--cache", help=f"cache directory (or ${CACHE_ENV})")
    p.add_argument("--out", help="also write the record JSON here")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("scan", help="compute a whole discriminant range")
    p.add_argument("--from", dest="from_", type=int, required=True,
                   help="least negative discriminant, e.g. -3")
    p.add_argument("--to", type=int, required=True,
                   help="most negative discriminant, e.g. -200")
    p.add_argument("--group", choices=sorted(GROUPS), default="gl2")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--cache", help=f"cache directory (or ${CACHE_ENV})")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("table", help="print stored records as a table")
    p.add_argument("--format", choices=("paper", "csv", "json"), default="paper")
    p.add_argument("--group", choices=sorted(GROUPS))
    p.add_argument("--compare", action="store_true",
                   help="diff records against the published tables")
    p.add_argument("--cache", help=f"cache directory (or ${CACHE_ENV})")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("stats", help="CSV series for one figure")
    p.add_argument("--figure", choices=sorted(FIGURES), required=True)
    p.add_argument("--cache", help=f"cache directory (or ${CACHE_ENV})")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidDiscriminantError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except cache.CacheCorruptedError as exc:
        print(f"cache error: {exc}", file=sys.stderr)
        return EXIT_CACHE
    except InternalGuard as exc:
        print(f"internal guard: {exc}", file=sys.stderr)
        return EXIT_GUARD


if __name__ == "__main__":
    sys.exit(main())
