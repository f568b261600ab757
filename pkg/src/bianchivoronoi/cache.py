"""Versioned on-disk cache for Voronoi graphs, cell complexes and boundaries."""

import hashlib
import json
import os
from fractions import Fraction

CACHE_VERSION = 1


class CacheCorruptedError(RuntimeError):
    """A cache file exists but cannot be trusted."""


def _frac_str(x) -> str:
    f = Fraction(x)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _parse_frac(s: str):
    f = Fraction(s)
    return int(f) if f.denominator == 1 else f


def _coords_out(coords):
    return [_frac_str(x) for x in coords]


def _coords_in(items):
    return tuple(_parse_frac(s) for s in items)


def _vec_out(v):
    (x1, y1), (x2, y2) = v
    return [x1, y1, x2, y2]


def _vec_in(items):
    x1, y1, x2, y2 = (int(x) for x in items)
    return ((x1, y1), (x2, y2))


def _mat_out(g):
    (a, b), (c, d) = g
    return [a[0], a[1], b[0], b[1], c[0], c[1], d[0], d[1]]


def _mat_in(items):
    v = [int(x) for x in items]
    return (((v[0], v[1]), (v[2], v[3])), ((v[4], v[5]), (v[6], v[7])))


def _triplet_text(nrows: int, columns) -> str:
    lines = [f"{nrows} {len(columns)}"]
    for c, col in enumerate(columns):
        for r in sorted(col):
            lines.append(f"{r} {c} {col[r]}")
    return "\n".join(lines)


def _parse_triplets(text: str):
    lines = text.split("\n")
    try:
        nrows, ncols = (int(x) for x in lines[0].split())
        columns = [{} for _ in range(ncols)]
        for line in lines[1:]:
            r, c, v = line.split()
            columns[int(c)][int(r)] = int(v)
    except (ValueError, IndexError) as exc:
        raise CacheCorruptedError(f"bad triplet text: {exc}") from exc
    return nrows, columns


def serialize_complex(graph, cx) -> dict:
    """The full cache document for one (D, flavor) enumeration and complex."""
    nodes = []
    for P, facets in zip(graph.classes, graph.facet_lists):
        nodes.append({
            "form": _coords_out(P.form.coords),
            "min_value": _frac_str(P.min_value),
            "min_vectors": [_vec_out(v) for v in P.min_all],
            "facets": [sorted(facet) for facet, _ in facets],
        })
    adjacency = [[{"to": j, "witness": _mat_out(w)} for j, w in adj]
                 for adj in graph.adjacency]
    orbits = {}
    for dim, dim_orbits in sorted(cx.orbits.items()):
        orbits[str(dim)] = [{
            "rays": [_coords_out(r) for r in sorted(o.rays)],
            "stabilizer_order": len(o.stabilizer),
            "orientable": o.orientable,
            "gen_index": o.gen_index,
        } for o in dim_orbits]
    return {
        "version": CACHE_VERSION,
        "D": graph.ctx.D,
        "flavor": graph.flavor,
        "nodes": nodes,
        "adjacency": adjacency,
        "orbits": orbits,
        "counts": {str(k): v for k, v in sorted(cx.counts.items())},
        "d2": _triplet_text(cx.counts[1], cx.d2),
        "d3": _triplet_text(cx.counts[2], cx.d3),
    }


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def complex_hash(doc: dict) -> str:
    return hashlib.sha256(canonical_json(doc).encode()).hexdigest()


class LoadedComplex:
    """Deserialized cache document, sufficient to recompute homology."""

    __slots__ = ("doc", "D", "flavor", "counts", "d2", "d3",
                 "stabilizer_orders", "n_classes", "forms", "min_vectors",
                 "witnesses")

    def __init__(self, doc):
        self.doc = doc
        self.D = doc["D"]
        self.flavor = doc["flavor"]
        self.counts = {int(k): v for k, v in doc["counts"].items()}
        n1, self.d2 = _parse_triplets(doc["d2"])
        n2, self.d3 = _parse_triplets(doc["d3"])
        if n1 != self.counts[1] or n2 != self.counts[2]:
            raise CacheCorruptedError("boundary matrix shapes disagree with counts")
        if len(self.d2) != self.counts[2] or len(self.d3) != self.counts[3]:
            raise CacheCorruptedError("boundary matrix shapes disagree with counts")
        self.stabilizer_orders = [
            o["stabilizer_order"] for dim in doc["orbits"] for o in doc["orbits"][dim]]
        self.n_classes = len(doc["nodes"])
        self.forms = [_coords_in(n["form"]) for n in doc["nodes"]]
        self.min_vectors = [[_vec_in(v) for v in n["min_vectors"]] for n in doc["nodes"]]
        self.witnesses = [[(a["to"], _mat_in(a["witness"])) for a in adj]
                          for adj in doc["adjacency"]]


def cache_path(cache_dir: str, D: int, flavor: str) -> str:
    return os.path.join(cache_dir, "complexes", f"{flavor}_{abs(D)}.json")


def save_doc(cache_dir: str, doc: dict) -> str:
    """Write a prebuilt cache document; returns its path."""
    path = cache_path(cache_dir, doc["D"], doc["flavor"])
    os.makedirs(os.path.dirname(path), exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(canonical_json(doc))
    os.replace(tmp, path)
    return path


def save_complex(cache_dir: str, graph, cx) -> str:
    """Serialize and write the cache document; returns its content hash."""
    doc = serialize_complex(graph, cx)
    save_doc(cache_dir, doc)
    return complex_hash(doc)


# ---------------------------------------------------------------------------
# results store: one canonical record per (D, flavor), index.csv, sidecars


RECORD_FIELDS = ("flavor", "D", "h", "class_group", "cusp", "betti1", "betti2",
                 "betti3", "torsion1", "torsion2", "z_d", "logtor", "cache_hash")


def record_key(D: int, flavor: str) -> str:
    return f"{flavor}_{abs(D)}"


def record_path(cache_dir: str, D: int, flavor: str) -> str:
    return os.path.join(cache_dir, "results", record_key(D, flavor) + ".json")


def save_record(cache_dir: str, record: dict, telemetry=None) -> str:
    """Write the canonical record plus a non-canonical timing sidecar."""
    path = record_path(cache_dir, record["D"], record["flavor"])
    os.makedirs(os.path.dirname(path), exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(canonical_json(record))
    os.replace(tmp, path)
    if telemetry is not None:
        with open(path[:-5] + ".meta.json", "w") as fh:
            json.dump(telemetry, fh, sort_keys=True)
            fh.write("\n")
    return path


def load_record(cache_dir: str, D: int, flavor: str):
    """The stored record for (D, flavor), or None when absent."""
    path = record_path(cache_dir, D, flavor)
    if not os.path.exists(path):
        return None
    try:
        with open(path) as fh:
            record = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CacheCorruptedError(f"{path}: {exc}") from exc
    if not isinstance(record, dict) or record.get("D") != D \
            or record.get("flavor") != flavor:
        raise CacheCorruptedError(f"{path}: record does not match its name")
    return record


def list_records(cache_dir: str, flavor=None) -> list:
    """All stored records, sorted by flavor then |D|."""
    results = os.path.join(cache_dir, "results")
    out = []
    if not os.path.isdir(results):
        return out
    for name in sorted(os.listdir(results)):
        if not name.endswith(".json") or name.endswith(".meta.json"):
            continue
        stem = name[:-5]
        fl, _, d_text = stem.partition("_")
        if fl not in ("gl", "sl") or not d_text.isdigit():
            continue
        if flavor is not None and fl != flavor:
            continue
        out.append(load_record(cache_dir, -int(d_text), fl))
    out.sort(key=lambda r: (r["flavor"], abs(r["D"])))
    return out


def save_error(cache_dir: str, D: int, flavor: str, message: str) -> str:
    """Record a per-discriminant failure without stopping a scan."""
    path = os.path.join(cache_dir, "errors", record_key(D, flavor) + ".txt")
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as fh:
        fh.write(message.rstrip("\n") + "\n")
    return path


def rebuild_index(cache_dir: str) -> str:
    """Regenerate index.csv deterministically from the stored records."""
    from .tables import render_invariants
    rows = [",".join(RECORD_FIELDS)]
    for r in list_records(cache_dir):
        rows.append(",".join([
            r["flavor"], str(r["D"]), str(r["h"]),
            '"' + render_invariants(r["class_group"]) + '"',
            str(r["cusp"]),
            str(r["betti"]["1"]), str(r["betti"]["2"]), str(r["betti"]["3"]),
            '"' + render_invariants(r["torsion1"]) + '"',
            '"' + render_invariants(r["torsion2"]) + '"',
            str(r["z_d"]), repr(r["logtor"]), r["cache_hash"],
        ]))
    path = os.path.join(cache_dir, "results", "index.csv")
    os.makedirs(os.path.dirname(path), exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write("\n".join(rows) + "\n")
    os.replace(tmp, path)
    return path


def load_complex(cache_dir: str, D: int, flavor: str):
    """The LoadedComplex for (D, flavor), or None when not cached."""
    path = cache_path(cache_dir, D, flavor)
    if not os.path.exists(path):
        return None
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CacheCorruptedError(f"{path}: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("version") != CACHE_VERSION:
        raise CacheCorruptedError(f"{path}: unsupported cache version")
    if doc.get("D") != D or doc.get("flavor") != flavor:
        raise CacheCorruptedError(f"{path}: wrong discriminant or flavor inside")
    try:
        return LoadedComplex(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise CacheCorruptedError(f"{path}: {exc}") from exc
