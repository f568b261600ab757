"""Integral homology of the quotient complex via exact Smith normal form."""


class HomologyError(RuntimeError):
    """Internal inconsistency while reducing boundary matrices."""


class SparseIntMatrix:
    """Integer matrix stored as nested dicts, indexed rows[i][j]."""

    __slots__ = ("nrows", "ncols", "rows", "cols")

    def __init__(self, nrows: int, ncols: int):
        self.nrows = nrows
        self.ncols = ncols
        self.rows: dict[int, dict[int, int]] = {}
        self.cols: dict[int, set[int]] = {}

    @classmethod
    def from_columns(cls, nrows: int, columns) -> "SparseIntMatrix":
        """Build from an iterable of {row: value} dicts, one per column."""
        columns = list(columns)
        m = cls(nrows, len(columns))
        for j, col in enumerate(columns):
            for i, v in col.items():
                if v:
                    m.set(i, j, v)
        return m

    @classmethod
    def from_dense(cls, rows) -> "SparseIntMatrix":
        m = cls(len(rows), len(rows[0]) if rows else 0)
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                if v:
                    m.set(i, j, v)
        return m

    def set(self, i: int, j: int, v: int):
        if v:
            self.rows.setdefault(i, {})[j] = v
            self.cols.setdefault(j, set()).add(i)
        else:
            row = self.rows.get(i)
            if row and j in row:
                del row[j]
                if not row:
                    del self.rows[i]
                self.cols[j].discard(i)
                if not self.cols[j]:
                    del self.cols[j]

    def get(self, i: int, j: int) -> int:
        return self.rows.get(i, {}).get(j, 0)

    def entry_count(self) -> int:
        return sum(len(r) for r in self.rows.values())

    def add_row_multiple(self, dst: int, src: int, k: int):
        """row[dst] += k * row[src]."""
        if k == 0:
            return
        srow = self.rows.get(src)
        if not srow:
            return
        for j, v in list(srow.items()):
            self.set(dst, j, self.get(dst, j) + k * v)

    def to_dense(self):
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for i, row in self.rows.items():
            for j, v in row.items():
                out[i][j] = v
        return out


def _dense_smith(rows) -> list[int]:
    """Invariant factors of a dense integer matrix, textbook Smith reduction."""
    m = [list(r) for r in rows]
    nr = len(m)
    nc = len(m[0]) if m else 0
    factors = []
    t = 0
    while True:
        # find the smallest nonzero entry in the remaining block
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                v = m[i][j]
                if v and (best is None or abs(v) < abs(m[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        bi, bj = best
        m[t], m[bi] = m[bi], m[t]
        for row in m:
            row[t], row[bj] = row[bj], row[t]
        while True:
            # clear column t by remainder steps
            restart = False
            for i in range(t + 1, nr):
                if m[i][t]:
                    q = m[i][t] // m[t][t]
                    for j in range(t, nc):
                        m[i][j] -= q * m[t][j]
                    if m[i][t]:
                        m[t], m[i] = m[i], m[t]
                        restart = True
                        break
            if restart:
                continue
            for j in range(t + 1, nc):
                if m[t][j]:
                    q = m[t][j] // m[t][t]
                    for i in range(t, nr):
                        m[i][j] -= q * m[i][t]
                    if m[t][j]:
                        for row in m:
                            row[t], row[j] = row[j], row[t]
                        restart = True
                        break
            if restart:
                continue
            # pivot must divide the rest of the block
            fix = None
            for i in range(t + 1, nr):
                for j in range(t + 1, nc):
                    if m[i][j] % m[t][t]:
                        fix = i
                        break
                if fix is not None:
                    break
            if fix is None:
                break
            for j in range(t, nc):
                m[t][j] += m[fix][j]
        factors.append(abs(m[t][t]))
        t += 1
        if t == min(nr, nc):
            break
    for a, b in zip(factors, factors[1:]):
        if b % a:
            raise HomologyError("invariant factors fail divisibility")
    return factors


def smith_invariants(mat: SparseIntMatrix) -> list[int]:
    """Invariant factors of mat: sparse unit-pivot phase, then dense Smith.

    Returns the full divisibility chain (ones included); the rank is its
    length and the nontrivial factors are the entries > 1.
    """
    m = SparseIntMatrix(mat.nrows, mat.ncols)
    for i, row in mat.rows.items():
        for j, v in row.items():
            m.set(i, j, v)
    unit_rank = 0
    while True:
        # Markowitz-style: cheapest +-1 pivot by predicted fill
        best = None
        best_cost = None
        for i, row in m.rows.items():
            rlen = len(row)
            for j, v in row.items():
                if v == 1 or v == -1:
                    cost = (rlen - 1) * (len(m.cols[j]) - 1)
                    if best_cost is None or cost < best_cost:
                        best = (i, j, v)
                        best_cost = cost
                        if cost == 0:
                            break
            if best_cost == 0:
                break
        if best is None:
            break
        pi, pj, pv = best
        for i in list(m.cols[pj]):
            if i != pi:
                m.add_row_multiple(i, pi, -m.get(i, pj) * pv)
        # clearing the pivot row with column ops would only touch row pi,
        # so the row and column can simply be retired
        for j in list(m.rows[pi]):
            m.set(pi, j, 0)
        unit_rank += 1
    if m.rows:
        live_rows = sorted(m.rows)
        live_cols = sorted({j for r in m.rows.values() for j in r})
        dense = [[m.get(i, j) for j in live_cols] for i in live_rows]
        rest = _dense_smith(dense)
    else:
        rest = []
    if any(f == 0 for f in rest):
        raise HomologyError("zero invariant factor")
    return [1] * unit_rank + rest


def rank_mod_p(mat: SparseIntMatrix, p: int) -> int:
    """Rank of the matrix over the field with p elements."""
    rows = [dict((j, v % p) for j, v in r.items() if v % p) for r in mat.rows.values()]
    rows = [r for r in rows if r]
    rank = 0
    while rows:
        row = rows.pop()
        if not row:
            continue
        j = min(row)
        inv = pow(row[j], p - 2, p)
        row = {c: (v * inv) % p for c, v in row.items()}
        rank += 1
        new_rows = []
        for r in rows:
            if j in r:
                f = r[j]
                r = {c: (r.get(c, 0) - f * row.get(c, 0)) % p
                     for c in set(r) | set(row)}
                r = {c: v for c, v in r.items() if v}
            if r:
                new_rows.append(r)
        rows = new_rows
    return rank


_CHECK_PRIMES = (1_000_003, 999_983)


def matrix_rank_and_torsion(mat: SparseIntMatrix) -> tuple[int, list[int]]:
    """(rank, nontrivial invariant factors), cross-checked against mod-p ranks."""
    factors = smith_invariants(mat)
    rank = len(factors)
    for p in _CHECK_PRIMES:
        rp = rank_mod_p(mat, p)
        drop = sum(1 for f in factors if f % p == 0)
        if rp != rank - drop:
            raise HomologyError(f"mod-{p} rank disagrees with the Smith form")
    return rank, [f for f in factors if f > 1]


class HomologyResult:
    """Betti numbers and torsion of the quotient complex in degrees 1..3."""

    __slots__ = ("counts", "rank_d2", "rank_d3", "betti", "torsion")

    def __init__(self, counts, rank_d2, rank_d3, betti, torsion):
        self.counts = counts
        self.rank_d2 = rank_d2
        self.rank_d3 = rank_d3
        self.betti = betti
        self.torsion = torsion


def complex_homology(counts, d2_columns, d3_columns) -> HomologyResult:
    """Homology of 0 -> C3 -> C2 -> C1 -> 0 with the given boundary columns."""
    v1, v2, v3 = counts[1], counts[2], counts[3]
    d2 = SparseIntMatrix.from_columns(v1, d2_columns)
    d3 = SparseIntMatrix.from_columns(v2, d3_columns)
    rank2, tors1 = matrix_rank_and_torsion(d2)
    rank3, tors2 = matrix_rank_and_torsion(d3)
    betti = {
        1: v1 - rank2,
        2: v2 - rank2 - rank3,
        3: v3 - rank3,
    }
    torsion = {1: tuple(tors1), 2: tuple(tors2), 3: ()}
    if betti[2] < 0:
        raise HomologyError("negative Betti number")
    return HomologyResult(dict(counts), rank2, rank3, betti, torsion)
