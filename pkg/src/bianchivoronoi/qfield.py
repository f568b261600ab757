"""Exact arithmetic in an imaginary quadratic order O_D = Z[omega].

Everything downstream works over the maximal order of Q(sqrt(D)) for a
negative fundamental discriminant D.  Elements are integer pairs (x, y)
meaning x + y*omega with omega = (D + sqrt(D))/2, so the whole pipeline
stays in arbitrary-precision integer arithmetic.
"""

from __future__ import annotations


class InvalidDiscriminantError(ValueError):
    """D is not a negative fundamental discriminant."""


class NonFundamentalDiscriminantError(InvalidDiscriminantError):
    """D is negative and 0/1 mod 4 but carries a square factor."""


def _is_squarefree(m: int) -> bool:
    if m % 4 == 0:
        return False
    p = 3
    while p * p <= m:
        if m % (p * p) == 0:
            return False
        p += 2
    return True


def is_fundamental(D: int) -> bool:
    """True iff D is a negative fundamental discriminant."""
    if D >= 0:
        return False
    r = D % 4
    if r == 1:
        return _is_squarefree(-D)
    if r == 0:
        m = D // 4
        return m % 4 in (2, 3) and _is_squarefree(-m)
    return False


def check_discriminant(D: int) -> None:
    if not isinstance(D, int) or D >= 0 or D % 4 not in (0, 1):
        raise InvalidDiscriminantError(
            f"not a negative discriminant (need D < 0, D = 0 or 1 mod 4): {D!r}")
    if not is_fundamental(D):
        raise NonFundamentalDiscriminantError(f"not fundamental: {D}")


# An order element x + y*omega is the tuple (x, y); a module vector is a
# pair of elements ((x1, x2), (y1, y2)).

Elt = tuple[int, int]
Vec = tuple[Elt, Elt]
Mat = tuple[tuple[Elt, Elt], tuple[Elt, Elt]]

ZERO: Elt = (0, 0)
ONE: Elt = (1, 0)


class OrderContext:
    """The ring O_D with Z-basis {1, omega}, omega = (D + sqrt(D))/2.

    omega has trace D and norm n = (D^2 - D)/4, i.e. it satisfies
    omega^2 = D*omega - n, which keeps all products integral.
    """

    def __init__(self, D: int):
        check_discriminant(D)
        self.D = D
        self.n = (D * D - D) // 4
        self._units = self._find_units()

    def _find_units(self) -> tuple[Elt, ...]:
        # norm 1 solutions; coefficients are tiny for every D
        units = []
        for y in range(-1, 2):
            for x in range(-3, 4):
                if (x, y) != (0, 0) and self.norm((x, y)) == 1:
                    units.append((x, y))
        return tuple(sorted(units))

    # -- element arithmetic -------------------------------------------------

    def mul(self, a: Elt, b: Elt) -> Elt:
        x, y = a
        u, v = b
        return (x * u - self.n * y * v, x * v + y * u + self.D * y * v)

    def add(self, a: Elt, b: Elt) -> Elt:
        return (a[0] + b[0], a[1] + b[1])

    def sub(self, a: Elt, b: Elt) -> Elt:
        return (a[0] - b[0], a[1] - b[1])

    def neg(self, a: Elt) -> Elt:
        return (-a[0], -a[1])

    def conj(self, a: Elt) -> Elt:
        # conjugate of omega is D - omega
        return (a[0] + self.D * a[1], -a[1])

    def norm(self, a: Elt) -> int:
        x, y = a
        return x * x + self.D * x * y + self.n * y * y

    def trace(self, a: Elt) -> int:
        return 2 * a[0] + self.D * a[1]

    def units(self) -> tuple[Elt, ...]:
        """Unit group of O_D: order 6 for D=-3, 4 for D=-4, else {+-1}."""
        return self._units

    def is_unit(self, a: Elt) -> bool:
        return self.norm(a) == 1

    def divides(self, d: Elt, a: Elt) -> bool:
        return self.exact_div(a, d) is not None

    def exact_div(self, a: Elt, d: Elt) -> Elt | None:
        """a/d if it lies in O_D, else None."""
        nd = self.norm(d)
        if nd == 0:
            raise ZeroDivisionError("division by zero in order")
        num = self.mul(a, self.conj(d))
        if num[0] % nd or num[1] % nd:
            return None
        return (num[0] // nd, num[1] // nd)

    # -- module vectors and 2x2 matrices ------------------------------------

    def vec_add(self, v: Vec, w: Vec) -> Vec:
        return (self.add(v[0], w[0]), self.add(v[1], w[1]))

    def vec_scale(self, a: Elt, v: Vec) -> Vec:
        return (self.mul(a, v[0]), self.mul(a, v[1]))

    def act(self, g: Mat, v: Vec) -> Vec:
        """Matrix times column vector over O_D."""
        (g11, g12), (g21, g22) = g
        x, y = v
        return (
            self.add(self.mul(g11, x), self.mul(g12, y)),
            self.add(self.mul(g21, x), self.mul(g22, y)),
        )

    def mat_mul(self, g: Mat, h: Mat) -> Mat:
        (a, b), (c, d) = g
        (e, f), (p, q) = h
        return (
            (self.add(self.mul(a, e), self.mul(b, p)),
             self.add(self.mul(a, f), self.mul(b, q))),
            (self.add(self.mul(c, e), self.mul(d, p)),
             self.add(self.mul(c, f), self.mul(d, q))),
        )

    def mat_det(self, g: Mat) -> Elt:
        (a, b), (c, d) = g
        return self.sub(self.mul(a, d), self.mul(b, c))

    def mat_conj_transpose(self, g: Mat) -> Mat:
        (a, b), (c, d) = g
        return ((self.conj(a), self.conj(c)), (self.conj(b), self.conj(d)))

    def mat_inv(self, g: Mat) -> Mat:
        """Inverse of a matrix with unit determinant."""
        det = self.mat_det(g)
        if not self.is_unit(det):
            raise ValueError("matrix determinant is not a unit")
        dinv = self.conj(det)  # norm-1 elements invert to their conjugate
        (a, b), (c, d) = g
        return (
            (self.mul(dinv, d), self.mul(dinv, self.neg(b))),
            (self.mul(dinv, self.neg(c)), self.mul(dinv, a)),
        )

    def identity_matrix(self) -> Mat:
        return ((ONE, ZERO), (ZERO, ONE))

    # -- canonical representatives ------------------------------------------

    def unit_orbit_rep(self, v: Vec) -> Vec:
        """Lexicographically smallest of u*v over units u."""
        best = None
        for u in self._units:
            cand = (self.mul(u, v[0]), self.mul(u, v[1]))
            flat = (*cand[0], *cand[1])
            if best is None or flat < best[0]:
                best = (flat, cand)
        return best[1]

    def vec_is_zero(self, v: Vec) -> bool:
        return v[0] == ZERO and v[1] == ZERO

    def __repr__(self) -> str:
        return f"OrderContext(D={self.D})"
