"""Quadratic extensions Qp[alpha], alpha^2 = d, with rational coordinates.

Elements are formal pairs re + im*alpha.  The pair representation is kept
even when d happens to be a square in Qp; callers branch on that first.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .padic_core import (
    INF,
    PadicContext,
    PadicError,
    Q,
    dsq_contains_base,
    is_square,
    ord_p,
    residue,
    sqrt_approx,
    square_class,
)


class ExtError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ExtField:
    ctx: PadicContext
    d: Fraction

    def __post_init__(self):
        object.__setattr__(self, "d", Q(self.d))
        if self.d == 0:
            raise ExtError("extension needs d != 0")

    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def degenerate(self) -> bool:
        """True when d is a square in Qp, so the pairs are not a field."""
        return is_square(self.d, self.ctx)

    def __call__(self, re=0, im=0) -> "ExtElem":
        return ExtElem(Q(re), Q(im), self)

    @property
    def alpha(self) -> "ExtElem":
        return ExtElem(Fraction(0), Fraction(1), self)

    def to_json(self) -> dict:
        return {"d": str(self.d)}


@dataclass(frozen=True)
class ExtElem:
    re: Fraction
    im: Fraction
    field: ExtField

    def _lift(self, other) -> "ExtElem":
        if isinstance(other, ExtElem):
            if other.field != self.field:
                raise ExtError("elements live in different extensions")
            return other
        return ExtElem(Q(other), Fraction(0), self.field)

    def __add__(self, other):
        o = self._lift(other)
        return ExtElem(self.re + o.re, self.im + o.im, self.field)

    __radd__ = __add__

    def __neg__(self):
        return ExtElem(-self.re, -self.im, self.field)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        d = self.field.d
        return ExtElem(self.re * o.re + d * self.im * o.im,
                       self.re * o.im + self.im * o.re, self.field)

    __rmul__ = __mul__

    def conj(self) -> "ExtElem":
        return ExtElem(self.re, -self.im, self.field)

    def norm(self) -> Fraction:
        return self.re * self.re - self.field.d * self.im * self.im

    def inverse(self) -> "ExtElem":
        n = self.norm()
        if n == 0:
            raise ExtError("element is not invertible")
        return ExtElem(self.re / n, -self.im / n, self.field)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = ExtElem(Fraction(1), Fraction(0), self.field)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __eq__(self, other):
        if isinstance(other, ExtElem):
            return (self.re, self.im, self.field) == (other.re, other.im, other.field)
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im, self.field))

    def __repr__(self):
        return f"({self.re}) + ({self.im})*sqrt({self.field.d})"

    def to_json(self) -> dict:
        return {"re": str(self.re), "im": str(self.im), "d": str(self.field.d)}


def ext_arith(e1: ExtElem, e2: ExtElem, op: str) -> ExtElem:
    ops = {"+": lambda a, b: a + b, "-": lambda a, b: a - b,
           "*": lambda a, b: a * b, "/": lambda a, b: a / b}
    try:
        return ops[op](e1, e2)
    except KeyError:
        raise ExtError(f"unknown operation {op!r}") from None


def ext_ord(e: ExtElem) -> Fraction | float:
    """Order of e, ord(norm e)/2; a half-integer in ramified extensions."""
    n = e.norm()
    if n == 0:
        if e.is_zero():
            return INF
        raise ExtError("zero divisor: d is a square, order is not defined")
    return Fraction(ord_p(n, e.field.ctx), 2)


def ext_leading(e: ExtElem) -> tuple[int, int]:
    """Leading coefficient of e * p^(-ord e) as a pair of residues mod p."""
    F = e.field
    p = F.p
    if ord_p(F.d, p) != 0:
        raise ExtError("leading digit defined per half-power; use expansion")
    if e.is_zero():
        raise ExtError("zero has no leading digit")
    v = min(ord_p(e.re, p), ord_p(e.im, p))
    scale = Fraction(p) ** v
    return residue(e.re / scale, p), residue(e.im / scale, p)


def ext_sqrt(x, field: ExtField, N: int | None = None) -> ExtElem:
    """A square root of the rational x inside Qp[alpha].

    When x/d is a square the result is pure imaginary.  Non-rational roots
    come back as truncated Hensel approximations.
    """
    x = Q(x)
    ctx = field.ctx
    if x == 0:
        return field(0, 0)
    if is_square(x / field.d, ctx):
        s, _ = sqrt_approx(x / field.d, ctx, N)
        return field(0, s)
    if is_square(x, ctx):
        s, _ = sqrt_approx(x, ctx, N)
        return field(s, 0)
    raise ExtError(f"{x} has no square root in Qp[sqrt({field.d})]: "
                   f"neither x nor x/d is a square")


def dsq_contains(c, x, ctx: PadicContext | None = None) -> bool:
    """Membership in DSq(., c) = {r^2 + c s^2}.

    For a rational x this is the base-field test (always true when -c is a
    square, otherwise a Hilbert symbol).  For x = r' + s' alpha in a
    ramified extension alpha = sqrt(+-p) the criterion is ord r' <= ord s'.
    """
    c = Q(c)
    if c == 0:
        raise ExtError("DSq needs c != 0")
    if isinstance(x, ExtElem):
        if x.im == 0:
            return True
        if x.re == 0:
            return False
        p = x.field.p
        return ord_p(x.re, p) <= ord_p(x.im, p)
    if ctx is None:
        raise ExtError("a context is needed for the base-field test")
    return dsq_contains_base(c, x, ctx)


def eigenvector_of(A: Sequence[Sequence[ExtElem]], lam: ExtElem) -> list[ExtElem]:
    """Kernel vector of A - lam I by exact elimination over the extension."""
    n = len(A)
    F = lam.field
    M = [[A[i][j] - (lam if i == j else 0) for j in range(n)] for i in range(n)]
    M = [[F(0) + e for e in row] for row in M]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, n) if not M[i][col].is_zero()), None)
        if piv is None:
            continue
        if M[piv][col].norm() == 0:
            raise ExtError("pivot is a zero divisor; d is a square")
        M[r], M[piv] = M[piv], M[r]
        inv = M[r][col].inverse()
        M[r] = [e * inv for e in M[r]]
        for i in range(n):
            if i != r and not M[i][col].is_zero():
                f = M[i][col]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(col)
        r += 1
        if r == n:
            break
    free = [c for c in range(n) if c not in pivots]
    if not free:
        raise ExtError("lambda is not an eigenvalue")
    if len(free) > 1:
        raise ExtError("repeated eigenvalue")
    f = free[0]
    v = [F(0)] * n
    v[f] = F(1)
    for row, col in enumerate(pivots):
        v[col] = -M[row][f]
    lead = next(e for e in v if not e.is_zero())
    inv = lead.inverse()
    return [e * inv for e in v]


def mat_vec(A, v):
    return [sum((a * b for a, b in zip(row, v)), v[0] * 0) for row in A]


# --- p-adic evaluation of a + b*sqrt(r) with sqrt(r) in Qp -----------------

def approx_plus_sqrt(a, b, r, ctx: PadicContext, digits: int = 4) -> Fraction:
    """Rational approximation of a + b*sqrt(r), r a square in Qp.

    The approximation agrees with the true value in at least `digits`
    leading p-adic digits.  The square root branch is the hensel_sqrt one.
    Raises when the value is exactly zero.
    """
    a, b, r = Q(a), Q(b), Q(r)
    p = ctx.p
    if b == 0 or r == 0:
        if a == 0:
            raise ExtError("value is zero")
        return a
    s, exact = sqrt_approx(r, ctx, 8)
    if exact:
        v = a + b * s
        if v == 0:
            raise ExtError("value is zero")
        return v
    N = 16
    while True:
        s, _ = sqrt_approx(r, ctx, N)
        v = a + b * s
        # error in s is below p^(ord(r)/2 + N - 2)
        err = ord_p(b, p) + ord_p(r, p) // 2 + N - 2
        if v != 0 and ord_p(v, p) + digits + 3 <= err:
            return v
        if N > 4000:
            raise ExtError("precision exhausted: value indistinguishable from 0")
        N *= 2


def ord_plus_sqrt(a, b, r, ctx: PadicContext) -> int:
    return ord_p(approx_plus_sqrt(a, b, r, ctx), ctx)


def class_plus_sqrt(a, b, r, ctx: PadicContext) -> Fraction:
    return square_class(approx_plus_sqrt(a, b, r, ctx), ctx)


def as_ext(x, field: ExtField) -> ExtElem:
    if isinstance(x, ExtElem):
        return x
    return field(Q(x), 0)


__all__ = [
    "ExtField", "ExtElem", "ExtError", "ext_arith", "ext_ord", "ext_leading",
    "ext_sqrt", "dsq_contains", "eigenvector_of", "approx_plus_sqrt",
    "ord_plus_sqrt", "class_plus_sqrt", "PadicError", "mat_vec", "as_ext",
]
