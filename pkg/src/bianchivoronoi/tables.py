"""Published reference rows and the exponential invariant-factor notation."""

import json
import re
from importlib import resources

_ITEM_RE = re.compile(r"^(\d+)(?:\^\{?(\d+)\}?)?$")
_ROWS = {}


def reference_rows(flavor: str) -> list:
    """All reference rows for one flavor, in decreasing D order."""
    if flavor not in ("gl", "sl"):
        raise ValueError(f"unknown flavor {flavor!r}")
    if flavor not in _ROWS:
        name = f"{flavor}2_reference.json"
        text = resources.files("bianchivoronoi.data").joinpath(name).read_text()
        _ROWS[flavor] = json.loads(text)
    return _ROWS[flavor]


def reference_row(D: int, flavor: str) -> dict:
    for row in reference_rows(flavor):
        if row["D"] == D:
            return row
    raise KeyError(f"no reference row for D={D} ({flavor})")


def reference_limit(flavor: str) -> int:
    """The most negative discriminant covered by the reference table."""
    return min(row["D"] for row in reference_rows(flavor))


def render_invariants(factors) -> str:
    """Factor lists as compact text: (2, 2, 534) -> '(2^{2},534)', () -> '()'."""
    parts = []
    run_val = None
    run_len = 0
    for f in list(factors) + [None]:
        if f == run_val:
            run_len += 1
            continue
        if run_val is not None:
            parts.append(str(run_val) if run_len == 1 else f"{run_val}^{{{run_len}}}")
        run_val = f
        run_len = 1
    return "(" + ",".join(parts) + ")"


def parse_invariants(text: str) -> tuple:
    """Inverse of render_invariants; also accepts unbraced exponents."""
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise ValueError(f"not an invariant factor list: {text!r}")
    body = text[1:-1].strip()
    if not body:
        return ()
    out = []
    for item in body.split(","):
        m = _ITEM_RE.match(item.strip())
        if not m:
            raise ValueError(f"bad invariant factor item {item!r}")
        base = int(m.group(1))
        exp = int(m.group(2)) if m.group(2) else 1
        out.extend([base] * exp)
    return tuple(out)


def format_paper_row(record: dict) -> str:
    """The one-line summary printed for a computed record."""
    return " | ".join([
        render_invariants(record["class_group"]),
        str(record["cusp"]),
        render_invariants(record["torsion1"]),
    ])


def compare_with_reference(record: dict) -> list:
    """Field mismatches between a computed record and the published row."""
    row = reference_row(record["D"], record["flavor"])
    out = []
    for ours, theirs in (("class_group", "class_group"),
                         ("cusp", "cusp"), ("torsion1", "torsion1")):
        if record[ours] != row[theirs]:
            out.append(f"{ours}: computed {record[ours]} vs published {row[theirs]}")
    return out
