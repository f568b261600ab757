"""Quotient cell complex of the perfect-cone tessellation under GL2/SL2."""

import itertools
from fractions import Fraction

from .hermitian import (
    HermitianForm,
    adjugate,
    minimal_vectors,
    pairing,
    vectors_below,
)
from .qfield import OrderContext
from .voronoi import (
    VoronoiError,
    VoronoiGraph,
    form_automorphisms,
    isometries,
    rank_of,
    transform_form,
)

RayKey = tuple[int, int, int, int]
CellKey = tuple[RayKey, ...]


class CellOrbit:
    """One orbit of cells: representative ray set, stabilizer, orientability."""

    __slots__ = ("dim", "rays", "basis", "stabilizer", "orientable", "gen_index")

    def __init__(self, dim, rays, basis, stabilizer, orientable, gen_index):
        self.dim = dim
        self.rays = rays
        self.basis = basis
        self.stabilizer = stabilizer
        self.orientable = orientable
        self.gen_index = gen_index

    def __repr__(self):
        state = "oriented" if self.orientable else "suppressed"
        return f"CellOrbit(dim={self.dim}, rays={len(self.rays)}, {state})"


class CellComplex:
    """Orbit cells and integer boundary maps of the quotient complex.

    Cells of dimension 0 are excluded: single rays are rank-one forms on the
    boundary of the positivity cone.  Boundary maps d2: C2 -> C1 and
    d3: C3 -> C2 are between the orientable orbits only.
    """

    __slots__ = ("ctx", "flavor", "orbits", "counts", "d2", "d3")

    def __init__(self, ctx, flavor, orbits, counts, d2, d3):
        self.ctx = ctx
        self.flavor = flavor
        self.orbits = orbits        # dim -> list of CellOrbit
        self.counts = counts        # dim -> number of orientable orbits
        self.d2 = d2                # columns over C2 generators: dict row -> int
        self.d3 = d3


def apply_action(ctx: OrderContext, h, coords) -> tuple:
    """Coordinates of h A h* for the Hermitian matrix A with given coordinates."""
    phi = HermitianForm(ctx, *coords)
    out = transform_form(phi, ctx.mat_conj_transpose(h)).coords
    res = []
    for t in out:
        if t.denominator != 1:
            raise VoronoiError("integral action produced a non-integer")
        res.append(int(t))
    return tuple(res)


def barycenter_form(ctx: OrderContext, rays: CellKey) -> HermitianForm:
    """Sum of the primitive ray generators, as a PD Hermitian form."""
    coords = tuple(sum(r[i] for r in rays) for i in range(4))
    return HermitianForm(ctx, *coords)


def _witness_vectors(phi: HermitianForm):
    """Vector list of phi holding an independent pair, plus the pair itself."""
    ctx = phi.ctx
    bound = minimal_vectors(phi).min_value
    for _ in range(24):
        vecs = [v for _, v in vectors_below(phi, bound)]
        u1 = vecs[0]
        for u2 in vecs[1:]:
            d = ctx.sub(ctx.mul(u1[0], u2[1]), ctx.mul(u1[1], u2[0]))
            if d != (0, 0):
                return vecs, u1, u2, bound
        bound *= 2
    raise VoronoiError("no independent short vectors found")


def _det_set(ctx, flavor):
    return None if flavor == "gl" else {(1, 0)}


def cell_maps(ctx, flavor, rays1: CellKey, rays2: CellKey, first_only=True):
    """Matrices h with rho(h) mapping the ray set rays1 onto rays2."""
    b1 = barycenter_form(ctx, rays1)
    b2 = barycenter_form(ctx, rays2)
    _, u1, u2, bound = _witness_vectors(b2)
    need = max(b2.evaluate(u1), b2.evaluate(u2), bound)
    vecs1 = [v for _, v in vectors_below(b1, need)]
    set2 = set(rays2)
    out = []
    for g in isometries(b1, vecs1, b2, [u1, u2], _det_set(ctx, flavor)):
        h = ctx.mat_conj_transpose(g)
        if {apply_action(ctx, h, r) for r in rays1} == set2:
            out.append(h)
            if first_only:
                return out
    return out


def cell_stabilizer(ctx, flavor, rays: CellKey):
    """All flavor matrices stabilizing the cell's ray set."""
    return cell_maps(ctx, flavor, rays, rays, first_only=False)


def _cell_fingerprint(ctx, rays: CellKey):
    """Action-invariant key: pair dets against each other and the barycenter."""
    b = tuple(sum(r[i] for r in rays) for i in range(4))
    pair = sorted(pairing(ctx, adjugate(list(map(Fraction, r1))), list(map(Fraction, r2)))
                  for r1, r2 in itertools.combinations(rays, 2))
    to_b = sorted(pairing(ctx, adjugate(list(map(Fraction, b))), list(map(Fraction, r)))
                  for r in rays)
    return (len(rays), tuple(pair), tuple(to_b))


def _greedy_basis(rays: CellKey):
    """First rays (in sorted order) that span the cell's linear span."""
    basis = []
    for r in rays:
        if rank_of(basis + [list(map(Fraction, r))]) > len(basis):
            basis.append(list(map(Fraction, r)))
    return basis


def _span_coords(basis, vec):
    """Coordinates of vec in the basis (rows); vec must lie in the span."""
    k = len(basis)
    # augmented system over the 4 ambient coordinates
    rows = [[basis[j][i] for j in range(k)] + [Fraction(vec[i])] for i in range(4)]
    # eliminate
    piv = []
    r = 0
    for c in range(k):
        pr = next((i for i in range(r, 4) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = rows[r][c]
        rows[r] = [x / inv for x in rows[r]]
        for i in range(4):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        piv.append(c)
        r += 1
    if piv != list(range(k)):
        raise VoronoiError("degenerate basis")
    for i in range(r, 4):
        if rows[i][k] != 0:
            raise VoronoiError("vector outside the span")
    return [rows[i][k] for i in range(k)]


def _det_sign(mat) -> int:
    """Sign of the determinant of a square Fraction matrix."""
    m = [row[:] for row in mat]
    n = len(m)
    sign = 1
    for c in range(n):
        pr = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pr is None:
            return 0
        if pr != c:
            m[c], m[pr] = m[pr], m[c]
            sign = -sign
        if m[c][c] < 0:
            sign = -sign
        for i in range(c + 1, n):
            f = m[i][c] / m[c][c]
            m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return sign


def _orbit_orientable(ctx, basis, stabilizer) -> bool:
    """True when every stabilizer element preserves the span orientation."""
    for h in stabilizer:
        mapped = []
        for b in basis:
            key = tuple(int(t) for t in b)
            img = apply_action(ctx, h, key)
            mapped.append(_span_coords(basis, img))
        if _det_sign(mapped) < 0:
            return False
    return True


def _subfaces_rank2(facet_sets):
    """Ray sets of the rank-2 faces: pairwise facet intersections of rank 2."""
    out = set()
    for f1, f2 in itertools.combinations(facet_sets, 2):
        inter = f1 & f2
        if len(inter) >= 2 and rank_of([list(map(Fraction, r)) for r in inter]) == 2:
            out.add(tuple(sorted(inter)))
    return out


class _Classifier:
    """Incrementally groups cells into orbits, remembering witnesses."""

    def __init__(self, ctx, flavor, dim):
        self.ctx = ctx
        self.flavor = flavor
        self.dim = dim
        self.reps = []
        self.buckets = {}
        self.assign = {}

    def classify(self, rays: CellKey):
        if rays in self.assign:
            return self.assign[rays]
        key = _cell_fingerprint(self.ctx, rays)
        bucket = self.buckets.setdefault(key, [])
        for oi in bucket:
            found = cell_maps(self.ctx, self.flavor, self.reps[oi], rays)
            if found:
                self.assign[rays] = (oi, found[0])
                return self.assign[rays]
        oi = len(self.reps)
        self.reps.append(rays)
        bucket.append(oi)
        self.assign[rays] = (oi, self.ctx.identity_matrix())
        return self.assign[rays]


def _incidence(ctx, parent_basis, parent_rays, sub_rays, rep_basis, witness) -> int:
    """Sign comparing the boundary orientation with the transported one.

    parent carries the orientation of parent_basis; sub_rays is a facet of the
    parent cell, equal to witness applied to the orbit representative whose
    orientation basis is rep_basis.
    """
    u = [sum(Fraction(r[i]) for r in parent_rays if r not in sub_rays) for i in range(4)]
    outward = [-t for t in u]
    vectors = [outward]
    for b in rep_basis:
        key = tuple(int(t) for t in b)
        img = apply_action(ctx, witness, key)
        vectors.append([Fraction(t) for t in img])
    coords = [_span_coords(parent_basis, v) for v in vectors]
    s = _det_sign(coords)
    if s == 0:
        raise VoronoiError("degenerate incidence")
    return s


def build_complex(graph: VoronoiGraph) -> CellComplex:
    """Orbit cells, stabilizers, orientations and boundaries for the flavor."""
    ctx = graph.ctx
    flavor = graph.flavor

    # top cells: one orbit per perfect form class, always orientation-safe
    # because conjugation by g acts with positive determinant on form space
    top_orbits = []
    top_facets = []
    for P, flist in zip(graph.classes, graph.facet_lists):
        rays = P.ray_keys
        basis = _greedy_basis(rays)
        if len(basis) != 4:
            raise VoronoiError("perfect cone span is degenerate")
        stab = form_automorphisms(P, flavor)
        if not _orbit_orientable(ctx, basis, stab):
            raise VoronoiError("top cell cannot be orientation-reversed")
        top_orbits.append(CellOrbit(3, rays, basis, tuple(stab), True, len(top_orbits)))
        top_facets.append([tuple(sorted(face)) for face, _ in flist])

    # candidate lower cells from the representatives' face lattices; remember
    # which top cone each orbit representative was first seen in, since the
    # rank-2 faces of a facet are the parent's rank-2 faces inside it
    faces2_per_top = [sorted(_subfaces_rank2([frozenset(f) for f in facets]))
                      for facets in top_facets]
    cls2 = _Classifier(ctx, flavor, 2)
    cls1 = _Classifier(ctx, flavor, 1)
    orbit2_parent = {}
    for ti, facets in enumerate(top_facets):
        for face in facets:
            before = len(cls2.reps)
            oi, _ = cls2.classify(face)
            if len(cls2.reps) > before:
                orbit2_parent[oi] = ti
        for sub in faces2_per_top[ti]:
            cls1.classify(sub)

    def finish(classifier, dim):
        orbits = []
        gen = 0
        for rays in classifier.reps:
            basis = _greedy_basis(rays)
            if len(basis) != dim + 1:
                raise VoronoiError("cell span has wrong dimension")
            stab = cell_stabilizer(ctx, flavor, rays)
            orientable = _orbit_orientable(ctx, basis, stab)
            idx = gen if orientable else None
            if orientable:
                gen += 1
            orbits.append(CellOrbit(dim, rays, basis, tuple(stab), orientable, idx))
        return orbits, gen

    orbits2, n2 = finish(cls2, 2)
    orbits1, n1 = finish(cls1, 1)

    # d3: boundary of each top cell in the dim-2 generators
    d3 = []
    for ti, P in enumerate(graph.classes):
        col = {}
        parent_rays = top_orbits[ti].rays
        parent_basis = top_orbits[ti].basis
        for face in top_facets[ti]:
            oi, wit = cls2.assign[face]
            orb = orbits2[oi]
            if not orb.orientable:
                continue
            eps = _incidence(ctx, parent_basis, parent_rays, set(face), orb.basis, wit)
            col[orb.gen_index] = col.get(orb.gen_index, 0) + eps
        d3.append({r: v for r, v in col.items() if v})

    # d2: boundary of each dim-2 generator in the dim-1 generators
    d2 = []
    for oi2, orb in enumerate(orbits2):
        if not orb.orientable:
            continue
        col = {}
        rayset = set(orb.rays)
        subs = [f for f in faces2_per_top[orbit2_parent[oi2]] if set(f) <= rayset]
        if not subs:
            raise VoronoiError("a rank-3 cell must have rank-2 faces")
        for sub in subs:
            oi, wit = cls1.assign[sub]
            sub_orb = orbits1[oi]
            if not sub_orb.orientable:
                continue
            eps = _incidence(ctx, orb.basis, orb.rays, set(sub), sub_orb.basis, wit)
            col[sub_orb.gen_index] = col.get(sub_orb.gen_index, 0) + eps
        d2.append({r: v for r, v in col.items() if v})

    counts = {1: n1, 2: n2, 3: len(top_orbits)}
    orbits = {1: orbits1, 2: orbits2, 3: top_orbits}
    complex_ = CellComplex(ctx, flavor, orbits, counts, d2, d3)
    _assert_chain(complex_, n1, n2)
    return complex_


def _assert_chain(cx: CellComplex, n1: int, n2: int):
    """d2 . d3 must vanish identically."""
    for col in cx.d3:
        acc = {}
        for row2, c3 in col.items():
            for row1, c2 in cx.d2[row2].items():
                acc[row1] = acc.get(row1, 0) + c2 * c3
        if any(acc.values()):
            raise VoronoiError("boundary of boundary is nonzero")
