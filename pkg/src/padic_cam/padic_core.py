"""Exact p-adic predicates on rational numbers.

Every element of Qp that the rest of the package touches is a rational
number, so valuations, residues and square classes are computed exactly.
Truncated expansions only appear as witnesses (square roots) or output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Union

INF = math.inf

Number = Union[int, Fraction, str]


class PadicError(ValueError):
    """Raised when a p-adic precondition fails."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class PadicContext:
    """A prime p together with the number of digits used for expansions."""

    p: int
    N: int = 32

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise PadicError(f"p={self.p!r} is not prime")
        if self.N < 1:
            raise PadicError("precision N must be at least 1")

    def with_precision(self, N: int) -> "PadicContext":
        return PadicContext(self.p, N)


def _prime(ctx) -> int:
    return ctx.p if isinstance(ctx, PadicContext) else int(ctx)


def _ctx(ctx) -> PadicContext:
    return ctx if isinstance(ctx, PadicContext) else PadicContext(int(ctx))


def Q(x: Number) -> Fraction:
    """Coerce ints, Fractions and 'a/b' strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"cannot read {x!r} as a rational")


def _int_ord(n: int, p: int) -> int:
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def ord_p(x: Number, ctx) -> Union[int, float]:
    """p-adic order of a rational; math.inf for zero."""
    x = Q(x)
    if x == 0:
        return INF
    p = _prime(ctx)
    return _int_ord(x.numerator, p) - _int_ord(x.denominator, p)


def unit_part(x: Number, ctx) -> Fraction:
    """x * p^(-ord x)."""
    x = Q(x)
    if x == 0:
        raise PadicError("zero has no unit part")
    p = _prime(ctx)
    v = ord_p(x, p)
    return x / Fraction(p) ** v


def residue(x: Number, modulus: int) -> int:
    """Image of a rational with denominator prime to modulus in Z/modulus."""
    x = Q(x)
    d = x.denominator % modulus
    if math.gcd(d, modulus) != 1:
        raise PadicError(f"{x} is not integral at the modulus {modulus}")
    return (x.numerator * pow(d, -1, modulus)) % modulus


def leading_digit(x: Number, ctx) -> int:
    x = Q(x)
    if x == 0:
        raise PadicError("zero has no leading digit")
    p = _prime(ctx)
    return residue(unit_part(x, p), p)


@dataclass(frozen=True)
class Expansion:
    """Truncated expansion sum(digits[j] * p^(ord + j))."""

    ord: Union[int, float]
    digits: tuple = field(default_factory=tuple)
    p: int = 0

    @property
    def is_zero(self) -> bool:
        return self.ord == INF

    def value(self) -> Fraction:
        """The rational number the truncation denotes."""
        if self.is_zero:
            return Fraction(0)
        n = sum(d * self.p ** j for j, d in enumerate(self.digits))
        return Fraction(n) * Fraction(self.p) ** self.ord

    def to_json(self) -> dict:
        if self.is_zero:
            return {"ord": "inf", "digits": []}
        return {"ord": self.ord, "digits": list(self.digits)}


def digits_of(n: int, p: int, count: int) -> tuple:
    out = []
    for _ in range(count):
        out.append(n % p)
        n //= p
    return tuple(out)


def expand(x: Number, ctx, N: int | None = None) -> Expansion:
    ctx = _ctx(ctx)
    p = ctx.p
    N = ctx.N if N is None else N
    x = Q(x)
    if x == 0:
        return Expansion(INF, (), p)
    v = ord_p(x, p)
    u = residue(unit_part(x, p), p ** N)
    return Expansion(v, digits_of(u, p, N), p)


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def is_square(x: Number, ctx) -> bool:
    x = Q(x)
    if x == 0:
        return True
    p = _prime(ctx)
    if ord_p(x, p) % 2:
        return False
    u = unit_part(x, p)
    if p == 2:
        return residue(u, 8) == 1
    return legendre(residue(u, p), p) == 1


@lru_cache(maxsize=None)
def smallest_nonresidue(p: int) -> int:
    if p == 2:
        raise PadicError("c0 undefined for p=2")
    if not is_prime(p):
        raise PadicError(f"p={p} is not prime")
    c = 2
    while legendre(c, p) != -1:
        c += 1
    return c


def _unit_sqrt_mod(u: int, p: int, k: int) -> int:
    """Square root of the unit u modulo p^k (k >= 1), canonical branch."""
    if p == 2:
        # u = 1 mod 8; lift bit by bit, keeping r = 1 mod 4
        r = 1
        for j in range(3, k + 1):
            if (r * r - u) % (1 << (j + 1)):
                r += 1 << (j - 1)
        return r % (1 << k) if k >= 1 else 0
    r0 = next(r for r in range(1, p) if (r * r - u) % p == 0)
    r = r0
    mod = p
    while mod < p ** k:
        mod = min(mod * mod, p ** k)
        r = (r - (r * r - u) * pow(2 * r, -1, mod)) % mod
    return r


def hensel_sqrt(x: Number, ctx, N: int | None = None) -> Expansion:
    """Square root of x as a truncated expansion with N digits.

    Of the two roots the one with the smaller leading digit is returned
    (for p=2 the root congruent to 1 mod 4 after removing the power of 2).
    For odd p the result s satisfies s^2 = x mod p^(ord x + N); for p=2 the
    guarantee is mod 2^(ord x + N - 2).
    """
    ctx = _ctx(ctx)
    p = ctx.p
    N = ctx.N if N is None else N
    x = Q(x)
    if x == 0:
        return Expansion(INF, (), p)
    if not is_square(x, p):
        raise PadicError("not a square in Qp")
    v = ord_p(x, p)
    u = unit_part(x, p)
    if p == 2:
        r = _unit_sqrt_mod(residue(u, 2 ** (N + 3)), 2, N + 2)
    else:
        r = _unit_sqrt_mod(residue(u, p ** N), p, N)
    return Expansion(v // 2, digits_of(r % p ** N, p, N), p)


def rational_sqrt(x: Fraction) -> Fraction | None:
    """Nonnegative rational square root when x is a rational square."""
    if x < 0:
        return None
    a, b = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if a * a == x.numerator and b * b == x.denominator:
        return Fraction(a, b)
    return None


def sqrt_approx(x: Number, ctx, N: int | None = None) -> tuple[Fraction, bool]:
    """A rational s with s^2 close to x p-adically, and whether s^2 == x.

    Exact rational roots are returned exactly, using the same branch as
    hensel_sqrt; otherwise the truncated Hensel root is returned.
    """
    ctx = _ctx(ctx)
    x = Q(x)
    if x == 0:
        return Fraction(0), True
    exp = hensel_sqrt(x, ctx, N)
    r = rational_sqrt(x)
    if r is not None:
        p = ctx.p
        # same branch as the truncated root: compare leading digits mod 4 / mod p
        m = 4 if p == 2 else p
        lead = exp.value() / Fraction(p) ** exp.ord
        s = r if residue(r / Fraction(p) ** exp.ord - lead, m) == 0 else -r
        return s, True
    return exp.value(), False


def square_class(x: Number, ctx) -> Fraction:
    """Canonical representative of the class of x modulo nonzero squares."""
    x = Q(x)
    if x == 0:
        raise PadicError("zero has no square class")
    p = _prime(ctx)
    e = ord_p(x, p) % 2
    u = unit_part(x, p)
    if p == 2:
        unit = {1: 1, 7: -1, 5: 5, 3: -5}[residue(u, 8)]
    else:
        unit = 1 if legendre(residue(u, p), p) == 1 else smallest_nonresidue(p)
    return Fraction(unit * p ** e)


def square_class_reps(p: int) -> list[Fraction]:
    if p == 2:
        return [Fraction(v) for v in (1, -1, 2, -2, 5, -5, 10, -10)]
    c0 = smallest_nonresidue(p)
    return [Fraction(v) for v in (1, c0, p, c0 * p)]


def same_class(a: Number, b: Number, ctx) -> bool:
    return square_class(a, ctx) == square_class(b, ctx)


def xp_set(p: int) -> list[Fraction]:
    if p == 2:
        vals = [1, -1, 2, -2, 3, -3, 6, -6, 12, -18, 24]
    elif p % 4 == 3:
        vals = [1, -1, p, -p, p * p]
    else:
        c0 = smallest_nonresidue(p)
        vals = [1, c0, p, c0 * p, c0 ** 2 * p, c0 ** 3 * p, c0 * p * p]
    return [Fraction(v) for v in vals]


def yp_set(p: int) -> list[Fraction]:
    if p == 2:
        vals = [-1, 2, -2, 3, -3, 6, -6]
    elif p % 4 == 3:
        vals = [-1, p, -p]
    else:
        c0 = smallest_nonresidue(p)
        vals = [c0, p, c0 * p]
    return [Fraction(v) for v in vals]


def hilbert_symbol(a: Number, b: Number, ctx) -> int:
    a, b = Q(a), Q(b)
    if a == 0 or b == 0:
        raise PadicError("Hilbert symbol needs nonzero arguments")
    p = _prime(ctx)
    al, be = ord_p(a, p), ord_p(b, p)
    u, v = unit_part(a, p), unit_part(b, p)
    if p == 2:
        u8, v8 = residue(u, 8), residue(v, 8)

        def eps(w):
            return ((w - 1) // 2) % 2

        def omega(w):
            return ((w * w - 1) // 8) % 2

        e = eps(u8) * eps(v8) + al * omega(v8) + be * omega(u8)
        return -1 if e % 2 else 1
    sign = -1 if (al * be * ((p - 1) // 2)) % 2 else 1
    lu = legendre(residue(u, p), p) ** (be % 2)
    lv = legendre(residue(v, p), p) ** (al % 2)
    return sign * lu * lv


def two_squares_exists(a: Number, ctx) -> bool:
    a = Q(a)
    if a == 0:
        return True
    return hilbert_symbol(a, -1, ctx) == 1


def dsq_contains_base(c: Number, x: Number, ctx) -> bool:
    """Whether x = r^2 + c s^2 for some r, s in Qp."""
    c, x = Q(c), Q(x)
    if c == 0:
        raise PadicError("DSq needs c != 0")
    if x == 0 or is_square(-c, ctx):
        return True
    return hilbert_symbol(x, -c, ctx) == 1


def parse_padic_literal(text: str, p: int) -> Fraction:
    """Read 'd0.d1.d2;e' as sum d_j p^(e+j)."""
    body, _, e = text.partition(";")
    e = int(e) if e.strip() else 0
    digits = [int(d) for d in body.split(".") if d.strip() != ""]
    if not digits:
        raise PadicError(f"empty p-adic literal {text!r}")
    for d in digits:
        if not 0 <= d < p:
            raise PadicError(f"digit {d} out of range for p={p}")
    return sum(Fraction(d) * Fraction(p) ** (e + j) for j, d in enumerate(digits))
