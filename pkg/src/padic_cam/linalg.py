"""Small exact linear algebra over Q and Q[x]: matrices are lists of rows."""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from typing import Sequence

Matrix = list  # list[list[Fraction]]
Poly = tuple  # coefficients, lowest degree first


def zeros(n: int, m: int | None = None) -> Matrix:
    return [[Fraction(0)] * (n if m is None else m) for _ in range(n)]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def mat_mul(A, B) -> Matrix:
    return [[sum((a * B[k][j] for k, a in enumerate(row)), Fraction(0))
             for j in range(len(B[0]))] for row in A]


def mat_add(A, B) -> Matrix:
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(c, A) -> Matrix:
    return [[c * a for a in row] for row in A]


def transpose(A) -> Matrix:
    return [list(r) for r in zip(*A)]


def is_symmetric(A) -> bool:
    return all(A[i][j] == A[j][i] for i in range(len(A)) for j in range(len(A)))


def is_antisymmetric(A) -> bool:
    return all(A[i][j] == -A[j][i] for i in range(len(A)) for j in range(len(A)))


def rref(A) -> tuple[Matrix, list[int]]:
    M = [list(map(Fraction, row)) for row in A]
    rows, cols = len(M), len(M[0]) if M else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return M, pivots


def rank(A) -> int:
    if not A:
        return 0
    return len(rref(A)[1])


def inverse(A) -> Matrix:
    n = len(A)
    aug = [list(row) + identity(n)[i] for i, row in enumerate(A)]
    R, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in R]


def det(A) -> Fraction:
    """Bareiss-free Gaussian determinant over Q."""
    M = [list(map(Fraction, row)) for row in A]
    n = len(M)
    d = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            d = -d
        d *= M[c][c]
        for i in range(c + 1, n):
            f = M[i][c] / M[c][c]
            if f:
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return d


# --- polynomials ---------------------------------------------------------

def ptrim(a) -> Poly:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def padd(a, b) -> Poly:
    n = max(len(a), len(b))
    return ptrim((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                 for i in range(n))


def pneg(a) -> Poly:
    return tuple(-x for x in a)


def psub(a, b) -> Poly:
    return padd(a, pneg(b))


def pmul(a, b) -> Poly:
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return ptrim(out)


def pscale(c, a) -> Poly:
    return ptrim(c * x for x in a)


def pmod(a, m) -> Poly:
    """Remainder of a modulo the monic polynomial m."""
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        c = a[-1]
        if c:
            shift = len(a) - 1 - dm
            for i, y in enumerate(m):
                a[shift + i] -= c * y
        a.pop()
        while a and a[-1] == 0:
            a.pop()
    return ptrim(a)


def pflip(a) -> Poly:
    """a(-x)."""
    return tuple(x if i % 2 == 0 else -x for i, x in enumerate(a))


def peval(a, x):
    out = 0
    for c in reversed(a):
        out = out * x + c
    return out


def poly_det(M) -> Poly:
    """Determinant of a square matrix of polynomials by full expansion."""
    n = len(M)
    total: Poly = ()
    for perm in permutations(range(n)):
        sign = 1
        seen = list(perm)
        for i in range(n):
            for j in range(i + 1, n):
                if seen[i] > seen[j]:
                    sign = -sign
        term: Poly = (Fraction(sign),)
        for i, j in enumerate(perm):
            term = pmul(term, M[i][j])
            if not term:
                break
        total = padd(total, term)
    return total


def char_matrix(A) -> list:
    """x*I - A as a matrix of polynomials."""
    n = len(A)
    return [[ptrim(((-A[i][j]), Fraction(int(i == j)))) for j in range(n)]
            for i in range(n)]


def charpoly(A) -> Poly:
    """det(x I - A) by direct expansion."""
    return poly_det(char_matrix(A))


def minor(M, i, j):
    return [row[:j] + row[j + 1:] for k, row in enumerate(M) if k != i]


def adjugate_column(M, j) -> list:
    """Column j of adj(M) for a polynomial matrix M."""
    n = len(M)
    col = []
    for i in range(n):
        c = poly_det(minor(M, j, i))
        col.append(c if (i + j) % 2 == 0 else pneg(c))
    return col


def fmt_matrix(A) -> list:
    return [[str(x) for x in row] for row in A]


def to_fraction_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]
