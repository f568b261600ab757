"""Binary Hermitian forms over O_D and exact minimal-vector enumeration.

A form phi = (a, b, c) with a, c rational and b = b1 + b2*omega in the field
is the Hermitian matrix [[a, b], [conj(b), c]]; it takes the value

    phi(x, y) = a*N(x) + Tr(b * conj(x) * y) + c*N(y)

on module vectors.  Forms live in a 4-dimensional rational vector space with
coordinates (a, b1, b2, c); rank-one points q(v) of integral vectors span the
rational closure of the positive definite cone.  All computations are exact:
integer coordinates wherever possible, fractions.Fraction elsewhere.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .qfield import OrderContext, Vec

# A cone point / form coordinate vector is a plain 4-tuple (a, b1, b2, c).
Coords = tuple  # of 4 ints or Fractions


def form_values_are_integral(coords: Coords) -> bool:
    return all(isinstance(t, int) or t.denominator == 1 for t in coords)


def scale_primitive(coords: Coords) -> Coords:
    """Scale a nonzero rational 4-tuple to a primitive integer one (ray fixed)."""
    fracs = [Fraction(t) for t in coords]
    den = 1
    for f in fracs:
        den = den * f.denominator // gcd(den, f.denominator)
    ints = [int(f * den) for f in fracs]
    g = 0
    for t in ints:
        g = gcd(g, t)
    if g == 0:
        raise ValueError("zero vector has no primitive scaling")
    return tuple(t // g for t in ints)


class HermitianForm:
    """A binary Hermitian form over O_D in (a, b1, b2, c) coordinates."""

    __slots__ = ("ctx", "a", "b1", "b2", "c", "_lat")

    def __init__(self, ctx: OrderContext, a, b1, b2, c):
        self.ctx = ctx
        self.a = Fraction(a)
        self.b1 = Fraction(b1)
        self.b2 = Fraction(b2)
        self.c = Fraction(c)
        self._lat = None  # cached reduced-lattice data for enumeration

    @property
    def coords(self) -> Coords:
        return (self.a, self.b1, self.b2, self.c)

    def __eq__(self, other) -> bool:
        return isinstance(other, HermitianForm) and self.ctx.D == other.ctx.D \
            and self.coords == other.coords

    def __hash__(self):
        return hash((self.ctx.D, self.coords))

    def __repr__(self):
        return f"HermitianForm(D={self.ctx.D}, {self.a}, {self.b1}, {self.b2}, {self.c})"

    # -- algebra -------------------------------------------------------------

    def add(self, other: "HermitianForm") -> "HermitianForm":
        return HermitianForm(self.ctx, self.a + other.a, self.b1 + other.b1,
                             self.b2 + other.b2, self.c + other.c)

    def scale(self, t) -> "HermitianForm":
        t = Fraction(t)
        return HermitianForm(self.ctx, self.a * t, self.b1 * t, self.b2 * t, self.c * t)

    def norm_b(self) -> Fraction:
        """Field norm of the off-diagonal entry b = b1 + b2*omega."""
        D, n = self.ctx.D, self.ctx.n
        return self.b1 * self.b1 + D * self.b1 * self.b2 + n * self.b2 * self.b2

    def det(self) -> Fraction:
        return self.a * self.c - self.norm_b()

    def is_positive_definite(self) -> bool:
        return self.a > 0 and self.det() > 0

    def is_positive_semidefinite(self) -> bool:
        return self.a >= 0 and self.c >= 0 and self.det() >= 0

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, v: Vec) -> Fraction:
        """phi(v) for a module vector v = (x, y)."""
        ctx = self.ctx
        x, y = v
        s = ctx.mul(ctx.conj(x), y)  # conj(x)*y
        # Tr(b*s) expanded over the basis {1, omega}
        tr = (self.b1 * (2 * s[0] + ctx.D * s[1])
              + self.b2 * (ctx.D * s[0] + ((ctx.D * ctx.D + ctx.D) // 2) * s[1]))
        return self.a * ctx.norm(x) + tr + self.c * ctx.norm(y)

    def sesquilinear(self, v: Vec, w: Vec):
        """B(v, w) = v* A w in O_D coordinates (exact field element as pair of Fractions)."""
        ctx = self.ctx
        x, y = v
        u, z = w
        # entries of A in field coordinates: b = (b1, b2), conj(b) = (b1 + D*b2, -b2)
        xb, yb = ctx.conj(x), ctx.conj(y)
        t1 = _fscale(self.a, ctx.mul(xb, u))
        b = (self.b1, self.b2)
        bbar = (self.b1 + ctx.D * self.b2, -self.b2)
        t2 = _fmul(ctx, b, ctx.mul(xb, z))
        t3 = _fmul(ctx, bbar, ctx.mul(yb, u))
        t4 = _fscale(self.c, ctx.mul(yb, z))
        return (t1[0] + t2[0] + t3[0] + t4[0], t1[1] + t2[1] + t3[1] + t4[1])

    # -- coordinates ---------------------------------------------------------

    def gram4(self) -> list[list[Fraction]]:
        """Gram matrix of phi on Z^4 via the basis (1,0), (omega,0), (0,1), (0,omega)."""
        basis = _z4_basis()
        vals = [self.evaluate(e) for e in basis]
        G = [[Fraction(0)] * 4 for _ in range(4)]
        for i in range(4):
            G[i][i] = vals[i]
        for i in range(4):
            for j in range(i + 1, 4):
                vij = self.evaluate(self.ctx.vec_add(basis[i], basis[j]))
                G[i][j] = G[j][i] = (vij - vals[i] - vals[j]) / 2
        return G

    def integer_rescaled(self) -> tuple[int, int, int, int]:
        """Positive multiple of phi with primitive integer coordinates."""
        prim = scale_primitive(self.coords)
        lead = next(t for t in prim if t != 0)
        if lead < 0:
            prim = tuple(-t for t in prim)
        return prim


def _fscale(t: Fraction, a) :
    return (t * a[0], t * a[1])


def _fmul(ctx: OrderContext, a, b):
    """Product in the field with Fraction coordinates allowed."""
    x, y = a
    u, v = b
    return (x * u - ctx.n * y * v, x * v + y * u + ctx.D * y * v)


def _z4_basis() -> list[Vec]:
    return [((1, 0), (0, 0)), ((0, 1), (0, 0)), ((0, 0), (1, 0)), ((0, 0), (0, 1))]


def vec_from_z4(t) -> Vec:
    return ((t[0], t[1]), (t[2], t[3]))


def vec_to_z4(v: Vec):
    return (*v[0], *v[1])


# -- rank-one points and the trace pairing ------------------------------------

def rank_one(ctx: OrderContext, v: Vec) -> tuple[int, int, int, int]:
    """The rank-one Hermitian point q(v) = v v* with <phi, q(v)> = phi(v)."""
    x, y = v
    s = ctx.mul(x, ctx.conj(y))
    return (ctx.norm(x), s[0], s[1], ctx.norm(y))


def pairing(ctx: OrderContext, phi: Coords, psi: Coords):
    """Trace form <phi, psi> = trace(A_phi * A_psi) on coordinate 4-tuples."""
    a, b1, b2, c = phi
    a2, c1, c2, c4 = psi[0], psi[1], psi[2], psi[3]
    tr_bb = (2 * b1 * c1 + ctx.D * (b1 * c2 + b2 * c1) + 2 * ctx.n * b2 * c2)
    return a * a2 + c * c4 + tr_bb


def pairing_matrix(ctx: OrderContext) -> list[list[int]]:
    D, n = ctx.D, ctx.n
    return [[1, 0, 0, 0], [0, 2, D, 0], [0, D, 2 * n, 0], [0, 0, 0, 1]]


def eval_coords(ctx: OrderContext, coords: Coords, v: Vec):
    """Value of the form with the given coordinates on v (works for int tuples)."""
    a, b1, b2, c = coords
    x, y = v
    s = ctx.mul(ctx.conj(x), y)
    tr = b1 * (2 * s[0] + ctx.D * s[1]) + b2 * (ctx.D * s[0] + ((ctx.D * ctx.D + ctx.D) // 2) * s[1])
    return a * ctx.norm(x) + tr + c * ctx.norm(y)


def adjugate(coords: Coords) -> Coords:
    """Adjugate of the 2x2 Hermitian matrix: (a,b,c) -> (c,-b,a)."""
    a, b1, b2, c = coords
    return (c, -b1, -b2, a)


# -- exact shortest-vector enumeration ----------------------------------------

class EnumerationError(RuntimeError):
    """Internal guard: enumeration called on a non-definite form."""


def _gso(M):
    """Gram-Schmidt data (mu, Bstar) of the quadratic form with Gram matrix M."""
    n = len(M)
    mu = [[Fraction(0)] * n for _ in range(n)]
    B = [Fraction(0)] * n
    for i in range(n):
        for j in range(i):
            s = M[i][j]
            for l in range(j):
                s -= mu[j][l] * mu[i][l] * B[l]
            if B[j] <= 0:
                raise EnumerationError("form is not positive definite")
            mu[i][j] = s / B[j]
        s = M[i][i]
        for l in range(i):
            s -= mu[i][l] * mu[i][l] * B[l]
        B[i] = s
        if B[i] <= 0:
            raise EnumerationError("form is not positive definite")
    return mu, B


_LLL_DELTA = Fraction(99, 100)


def lll_gram(G):
    """LLL reduction of a PD Gram matrix: returns (M, U) with M = U G U^T.

    Rows of the integer matrix U are the reduced basis in the original
    coordinates; exact arithmetic throughout.
    """
    n = len(G)
    M = [[Fraction(x) for x in row] for row in G]
    U = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def row_op(k, j, q):
        # b_k <- b_k - q b_j
        for t in range(n):
            U[k][t] -= q * U[j][t]
        for t in range(n):
            M[k][t] -= q * M[j][t]
        for t in range(n):
            M[t][k] -= q * M[t][j]

    def swap(k):
        U[k], U[k - 1] = U[k - 1], U[k]
        M[k], M[k - 1] = M[k - 1], M[k]
        for t in range(n):
            M[t][k], M[t][k - 1] = M[t][k - 1], M[t][k]

    k = 1
    while k < n:
        mu, B = _gso(M)
        for j in range(k - 1, -1, -1):
            half = Fraction(1, 2)
            q = (mu[k][j] + half).__floor__()
            if q:
                row_op(k, j, q)
                mu, B = _gso(M)
        if B[k] >= (_LLL_DELTA - mu[k][k - 1] * mu[k][k - 1]) * B[k - 1]:
            k += 1
        else:
            swap(k)
            k = max(1, k - 1)
    return M, U


def _ldl(G: list[list[Fraction]]):
    """LDL^T data (d_i, u_ij) for Q(x) = sum_i d_i (x_i + sum_{j>i} u_ij x_j)^2."""
    m = [row[:] for row in G]
    nrow = len(m)
    d = [Fraction(0)] * nrow
    u = [[Fraction(0)] * nrow for _ in range(nrow)]
    for i in range(nrow):
        d[i] = m[i][i]
        if d[i] <= 0:
            raise EnumerationError("form is not positive definite")
        for j in range(i + 1, nrow):
            u[i][j] = m[i][j] / d[i]
        for r in range(i + 1, nrow):
            for c in range(r, nrow):
                m[r][c] -= u[i][r] * d[i] * u[i][c]
                m[c][r] = m[r][c]
    return d, u


def _collect_short(d, u, bound: Fraction) -> list[tuple[Fraction, tuple]]:
    """Vectors with Q(x) <= bound (one per +- pair) for LDL data (d, u)."""
    out = []
    x = [0, 0, 0, 0]

    def descend(i: int, remaining: Fraction, sign_locked: bool):
        # feasible x_i form the interval |x_i + center| <= sqrt(remaining/d_i);
        # it always lies within one step of floor(-center), so expand outward
        center = Fraction(0)
        for j in range(i + 1, 4):
            center += u[i][j] * x[j]
        neg_c = -center
        m = neg_c.numerator // neg_c.denominator
        di = d[i]

        def feasible(xi: int) -> bool:
            return di * (xi + center) ** 2 <= remaining

        lo = m
        while feasible(lo):
            lo -= 1
        hi = m + 1
        while feasible(hi):
            hi += 1
        for xi in range(lo + 1, hi):
            if not feasible(xi):
                continue
            if sign_locked and xi < 0:
                continue
            term = di * (xi + center) ** 2
            x[i] = xi
            locked = sign_locked and xi == 0
            if i == 0:
                if any(x):
                    val = bound - (remaining - term)
                    out.append((val, tuple(x)))
            else:
                descend(i - 1, remaining - term, locked)
        x[i] = 0

    descend(3, bound, True)
    return out


def _canonical_sign(x: tuple) -> tuple:
    for t in reversed(x):
        if t:
            return x if t > 0 else tuple(-s for s in x)
    return x


def _map_back(found, U) -> list[tuple[Fraction, tuple]]:
    out = []
    for val, xr in found:
        xo = tuple(sum(xr[i] * U[i][j] for i in range(4)) for j in range(4))
        out.append((val, _canonical_sign(xo)))
    out.sort()
    return out


def enumerate_short_z4(G: list[list[Fraction]], bound) -> list[tuple[Fraction, tuple]]:
    """All nonzero integer vectors (up to global sign) with Q(x) <= bound.

    Returns sorted (value, x) pairs, one per +-x pair; callers mirror when the
    full set is needed.  The Gram matrix is LLL reduced before the search and
    all arithmetic is exact.
    """
    bound = Fraction(bound)
    if bound < 0:
        return []
    M, U = lll_gram(G)
    d, u = _ldl(M)
    return _map_back(_collect_short(d, u, bound), U)


def _lattice(phi: HermitianForm):
    """Cached (LDL data, basis change, reduced diagonal minimum) for phi."""
    if phi._lat is None:
        if not phi.is_positive_definite():
            raise EnumerationError("enumeration on a non-definite form")
        M, U = lll_gram(phi.gram4())
        d, u = _ldl(M)
        diag_min = min(M[i][i] for i in range(4))
        phi._lat = (d, u, U, diag_min)
    return phi._lat


def _enumerate_form(phi: HermitianForm, bound) -> list[tuple[Fraction, tuple]]:
    bound = Fraction(bound)
    if bound < 0:
        return []
    d, u, U, _ = _lattice(phi)
    return _map_back(_collect_short(d, u, bound), U)


class MinimalVectors:
    """Minimum and minimal vectors (canonical unit-orbit reps) of a PD form."""

    __slots__ = ("min_value", "reps", "all_vectors")

    def __init__(self, min_value: Fraction, reps: tuple[Vec, ...], all_vectors: tuple[Vec, ...]):
        self.min_value = min_value
        self.reps = reps
        self.all_vectors = all_vectors


def minimal_vectors(phi: HermitianForm) -> MinimalVectors:
    """Exact minimum of phi over nonzero module vectors, up to unit factor."""
    ctx = phi.ctx
    bound = _lattice(phi)[3]
    found = _enumerate_form(phi, bound)
    assert found, "a reduced basis vector realizes the bound, enumeration cannot be empty"
    min_value = found[0][0]
    vecs = []
    for val, t in found:
        if val == min_value:
            vecs.append(vec_from_z4(t))
            vecs.append(vec_from_z4(tuple(-s for s in t)))
    reps = sorted({ctx.unit_orbit_rep(v) for v in vecs}, key=vec_to_z4)
    return MinimalVectors(min_value, tuple(reps), tuple(sorted(vecs, key=vec_to_z4)))


def vectors_of_value(phi: HermitianForm, value) -> list[Vec]:
    """All module vectors v (both signs) with phi(v) == value, sorted."""
    value = Fraction(value)
    if value < 0:
        return []
    out = []
    for val, t in _enumerate_form(phi, value):
        if val == value:
            out.append(vec_from_z4(t))
            out.append(vec_from_z4(tuple(-s for s in t)))
    return sorted(out, key=vec_to_z4)


def vectors_below(phi: HermitianForm, bound) -> list[tuple[Fraction, Vec]]:
    """All (value, v) with 0 < phi(v) <= bound, both signs, sorted by value then coords."""
    out = []
    for val, t in _enumerate_form(phi, bound):
        out.append((val, vec_from_z4(t)))
        out.append((val, vec_from_z4(tuple(-s for s in t))))
    return sorted(out, key=lambda p: (p[0], vec_to_z4(p[1])))
