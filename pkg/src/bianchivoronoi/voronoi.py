"""Perfect binary Hermitian forms and their Voronoi tessellation classes."""

import itertools
from fractions import Fraction

from .hermitian import (
    HermitianForm,
    minimal_vectors,
    pairing_matrix,
    rank_one,
    scale_primitive,
    vectors_below,
    vectors_of_value,
)
from .qfield import Mat, OrderContext, Vec


class VoronoiError(RuntimeError):
    """Internal inconsistency while building the tessellation."""


# ---------------------------------------------------------------------------
# small exact linear algebra over Fraction


def _echelon(rows):
    """Row reduce a copy of rows; returns (reduced rows, pivot column list)."""
    m = [[Fraction(x) for x in r] for r in rows]
    ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = m[r][c]
        m[r] = [x / inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank_of(rows) -> int:
    """Rank of a list of rational row vectors."""
    return len(_echelon(rows)[1])


def nullspace_of(rows, ncols: int):
    """Basis of the right nullspace of the given rows (length-ncols vectors)."""
    if not rows:
        rows = [[Fraction(0)] * ncols]
    m, pivots = _echelon(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, c in enumerate(pivots):
            v[c] = -m[r][f]
        basis.append(v)
    return basis


def solve_linear(mat, vec):
    """Solve mat * x = vec exactly for square invertible mat."""
    n = len(mat)
    aug = [[Fraction(mat[i][j]) for j in range(n)] + [Fraction(vec[i])] for i in range(n)]
    m, pivots = _echelon(aug)
    if pivots != list(range(n)):
        raise VoronoiError("singular system")
    return [m[i][n] for i in range(n)]


# ---------------------------------------------------------------------------
# perfect forms


def primitive_ray(ctx: OrderContext, v: Vec) -> tuple[int, int, int, int]:
    """Primitive integer generator of the rank-one ray spanned by q(v)."""
    return scale_primitive(rank_one(ctx, v))


class PerfectForm:
    """A PD form whose minimal vectors span the 4-dim space of forms."""

    __slots__ = ("ctx", "form", "min_value", "min_reps", "min_all",
                 "ray_keys", "ray_vectors", "key")

    def __init__(self, ctx, form, min_value, min_reps, min_all, ray_keys, ray_vectors, key):
        self.ctx = ctx
        self.form = form
        self.min_value = min_value
        self.min_reps = min_reps
        self.min_all = min_all
        self.ray_keys = ray_keys
        self.ray_vectors = ray_vectors
        self.key = key

    def __repr__(self):
        return (f"PerfectForm(D={self.ctx.D}, coords={self.form.coords}, "
                f"vectors={len(self.min_all)}, rays={len(self.ray_keys)})")


def _norm_frac(ctx, z) -> Fraction:
    """Field norm of an element with Fraction coordinates."""
    x, y = z
    return x * x + ctx.D * x * y + ctx.n * y * y


def _form_fingerprint(ctx, form, mv):
    """Equivalence-invariant key: value data plus pair norms of minimal vectors."""
    reps = mv.reps
    pair_norms = sorted(
        _norm_frac(ctx, form.sesquilinear(reps[i], reps[j]))
        for i in range(len(reps)) for j in range(i + 1, len(reps))
    )
    return (mv.min_value, form.det(), len(mv.all_vectors), tuple(pair_norms))


def perfect_from_form(phi: HermitianForm) -> PerfectForm:
    """Normalize phi and package it as a perfect form; raises if not perfect."""
    ctx = phi.ctx
    form = HermitianForm(ctx, *phi.integer_rescaled())
    mv = minimal_vectors(form)
    qs = [rank_one(ctx, v) for v in mv.reps]
    if rank_of(qs) != 4:
        raise VoronoiError(f"form {form.coords} is not perfect")
    ray_vectors = {}
    for v in mv.reps:
        ray_vectors.setdefault(primitive_ray(ctx, v), []).append(v)
    ray_keys = tuple(sorted(ray_vectors))
    ray_vectors = {k: tuple(ray_vectors[k]) for k in ray_keys}
    key = _form_fingerprint(ctx, form, mv)
    return PerfectForm(ctx, form, mv.min_value, mv.reps, mv.all_vectors,
                       ray_keys, ray_vectors, key)


def advance_to_boundary(phi: HermitianForm, direction: HermitianForm, m: Fraction) -> Fraction:
    """Largest lam >= 0 keeping min(phi + lam*direction) == m.

    Requires min(phi) == m and direction not positive semidefinite, so some
    module vector eventually drops below m and lam* is finite.
    """
    old = set(vectors_of_value(phi, m))
    lo = Fraction(0)
    hi = None
    lam = Fraction(1)
    while True:
        probe = phi.add(direction.scale(lam))
        if probe.is_positive_definite():
            pmv = minimal_vectors(probe)
            if pmv.min_value < m:
                # every vector realizing lam* satisfies probe(w) <= m, so the
                # enumerated violator set contains the true minimizer
                best = None
                for _, w in vectors_below(probe, m):
                    tw = direction.evaluate(w)
                    if tw < 0:
                        cand = (m - phi.evaluate(w)) / tw
                        if best is None or cand < best:
                            best = cand
                if best is None or not (lo < best < lam):
                    raise VoronoiError("boundary step lost its violator")
                return best
            if pmv.min_value != m:
                raise VoronoiError("minimum rose along a pinned direction")
            if set(pmv.all_vectors) - old:
                # a new vector arrived exactly at value m, so lam is lam*
                return lam
            lo = lam
            lam = lam * 2 if hi is None else (lo + hi) / 2
        else:
            hi = lam
            lam = (lo + hi) / 2


def first_perfect_form(ctx: OrderContext) -> PerfectForm:
    """Walk from the standard form to a perfect form by closing rank gaps."""
    phi = HermitianForm(ctx, 1, 0, 0, 1)
    pmat = pairing_matrix(ctx)
    for _ in range(8):
        mv = minimal_vectors(phi)
        m = mv.min_value
        qs = [rank_one(ctx, v) for v in mv.reps]
        if rank_of(qs) == 4:
            return perfect_from_form(phi)
        # a direction pairing to zero against every current minimal vector
        rows = [[sum(Fraction(q[i]) * pmat[i][j] for i in range(4)) for j in range(4)]
                for q in qs]
        psi_coords = nullspace_of(rows, 4)[0]
        psi = HermitianForm(ctx, *psi_coords)
        if psi.is_positive_semidefinite():
            psi = psi.scale(-1)
        lam = advance_to_boundary(phi, psi, m)
        phi = phi.add(psi.scale(lam))
    raise VoronoiError("perfection walk did not converge")


def facets_of(P: PerfectForm):
    """Facets of the perfect cone as (sorted ray tuple, inward normal) pairs.

    The normal n satisfies dot(n, r) == 0 on facet rays and > 0 on the rest.
    """
    coords = [[Fraction(t) for t in r] for r in P.ray_keys]
    k = len(coords)
    found = {}
    for i, j, l in itertools.combinations(range(k), 3):
        if any(P.ray_keys[i] in f and P.ray_keys[j] in f and P.ray_keys[l] in f
               for f in found):
            continue
        rows = [coords[i], coords[j], coords[l]]
        ns = nullspace_of(rows, 4)
        if len(ns) != 1:
            continue
        n = ns[0]
        dots = [sum(n[t] * c[t] for t in range(4)) for c in coords]
        if all(d >= 0 for d in dots):
            pass
        elif all(d <= 0 for d in dots):
            n = [-x for x in n]
            dots = [-d for d in dots]
        else:
            continue
        face = frozenset(P.ray_keys[t] for t in range(k) if dots[t] == 0)
        if face not in found:
            found[face] = n
    out = []
    for face, n in found.items():
        out.append((tuple(sorted(face)), n))
    out.sort(key=lambda p: p[0])
    return out


def neighbor_across(P: PerfectForm, normal) -> PerfectForm:
    """The adjacent perfect form sharing the facet with the given inward normal."""
    ctx = P.ctx
    pmat = pairing_matrix(ctx)
    t_coords = solve_linear(pmat, normal)
    direction = HermitianForm(ctx, *t_coords)
    lam = advance_to_boundary(P.form, direction, P.min_value)
    return perfect_from_form(P.form.add(direction.scale(lam)))


# ---------------------------------------------------------------------------
# isometries


def _independent_pair(ctx, vectors):
    """First pair of module vectors from the list that is K-linearly independent."""
    u1 = vectors[0]
    for u2 in vectors[1:]:
        d = ctx.sub(ctx.mul(u1[0], u2[1]), ctx.mul(u1[1], u2[0]))
        if d != (0, 0):
            return u1, u2
    raise VoronoiError("minimal vectors lie on one line")


def isometries(P1: HermitianForm, vecs1, P2: HermitianForm, vecs2, dets=None):
    """All g over the order with P2(v) == P1(g v), i.e. A2 = g* A1 g.

    vecs1, vecs2 are the full minimal vector lists of P1, P2; candidates g are
    built from images of an independent pair of vectors of P2.  If dets is
    given, only matrices whose determinant lies in that set are returned.
    """
    ctx = P1.ctx
    u1, u2 = _independent_pair(ctx, vecs2)
    vdet = ctx.sub(ctx.mul(u1[0], u2[1]), ctx.mul(u1[1], u2[0]))
    vdet_norm = ctx.norm(vdet)
    # adj(V) for V = [u1 u2] as columns
    adj = ((u2[1], ctx.neg(u2[0])), (ctx.neg(u1[1]), u1[0]))
    val1 = P2.evaluate(u1)
    val2 = P2.evaluate(u2)
    cross = P2.sesquilinear(u1, u2)
    out = []
    cand1 = [w for w in vecs1 if P1.evaluate(w) == val1]
    cand2 = [w for w in vecs1 if P1.evaluate(w) == val2]
    for w1 in cand1:
        for w2 in cand2:
            if P1.sesquilinear(w1, w2) != cross:
                continue
            # g = [w1 w2] adj(V) / det(V); clear the denominator via conj
            g = []
            ok = True
            for row in range(2):
                grow = []
                for col in range(2):
                    num = ctx.add(ctx.mul(w1[row], adj[0][col]),
                                  ctx.mul(w2[row], adj[1][col]))
                    num = ctx.mul(num, ctx.conj(vdet))
                    if num[0] % vdet_norm or num[1] % vdet_norm:
                        ok = False
                        break
                    grow.append((num[0] // vdet_norm, num[1] // vdet_norm))
                if not ok:
                    break
                g.append(tuple(grow))
            if not ok:
                continue
            g = tuple(g)
            if dets is not None and ctx.mat_det(g) not in dets:
                continue
            if _is_isometry(ctx, P1, P2, g):
                out.append(g)
    return out


def _is_isometry(ctx, P1, P2, g) -> bool:
    """Check A2 == g* A1 g by comparing coordinates of the transported form."""
    return transform_form(P1, g).coords == P2.coords


def transform_form(phi: HermitianForm, g: Mat) -> HermitianForm:
    """The form v -> phi(g v), with matrix g* A g."""
    ctx = phi.ctx
    e1 = ((1, 0), (0, 0))
    e2 = ((0, 0), (1, 0))
    g1 = ctx.act(g, e1)
    g2 = ctx.act(g, e2)
    a = phi.evaluate(g1)
    c = phi.evaluate(g2)
    b = phi.sesquilinear(g1, g2)
    # b = b1 + b2*omega with Fraction parts
    return HermitianForm(ctx, a, b[0], b[1], c)


def _det_set(ctx, flavor: str):
    if flavor == "gl":
        return None
    if flavor == "sl":
        return {(1, 0)}
    raise ValueError(f"unknown flavor: {flavor!r}")


def forms_equivalent(P: PerfectForm, Q: PerfectForm, flavor: str = "gl"):
    """A matrix g with Q.form == P.form∘g (flavor-appropriate), or None."""
    if P.key != Q.key:
        return None
    dets = _det_set(P.ctx, flavor)
    found = isometries(P.form, P.min_all, Q.form, Q.min_all, dets)
    return found[0] if found else None


def form_automorphisms(P: PerfectForm, flavor: str = "gl"):
    """All g (of the given flavor) with P.form∘g == P.form."""
    dets = _det_set(P.ctx, flavor)
    return isometries(P.form, P.min_all, P.form, P.min_all, dets)


# ---------------------------------------------------------------------------
# enumeration of all classes


class VoronoiGraph:
    """Perfect form classes of one flavor, with their cones' combinatorics."""

    __slots__ = ("ctx", "flavor", "classes", "facet_lists", "adjacency")

    def __init__(self, ctx, flavor, classes, facet_lists, adjacency):
        self.ctx = ctx
        self.flavor = flavor
        self.classes = classes
        self.facet_lists = facet_lists
        # adjacency[i][k] = (class index j, witness g) for the k-th facet of
        # class i, where classes[j].form∘g is the actual neighbor across it
        self.adjacency = adjacency


def enumerate_perfect_forms(ctx: OrderContext, flavor: str = "gl") -> VoronoiGraph:
    """All perfect form classes up to the flavor's equivalence, by facet BFS."""
    start = first_perfect_form(ctx)
    classes = [start]
    facet_lists = [facets_of(start)]
    adjacency = [[]]
    buckets = {start.key: [0]}
    pending = [0]
    while pending:
        i = pending.pop(0)
        for _, normal in facet_lists[i]:
            Q = neighbor_across(classes[i], normal)
            bucket = buckets.setdefault(Q.key, [])
            target = None
            witness = None
            for j in bucket:
                g = forms_equivalent(classes[j], Q, flavor)
                if g is not None:
                    target, witness = j, g
                    break
            if target is None:
                classes.append(Q)
                facet_lists.append(facets_of(Q))
                adjacency.append([])
                target = len(classes) - 1
                witness = ctx.identity_matrix()
                bucket.append(target)
                pending.append(target)
            adjacency[i].append((target, witness))
    return VoronoiGraph(ctx, flavor, classes, facet_lists, adjacency)
