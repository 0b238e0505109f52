import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from padic_cam.cam_system import A_closed_form, char_coefficients, make_params
from padic_cam.padic_core import PadicContext, rational_sqrt
from padic_cam.quad_ext import (
    ExtError,
    ExtField,
    dsq_contains,
    eigenvector_of,
    ext_ord,
    ext_sqrt,
)

C7 = PadicContext(7)
small_q = st.builds(Fraction, st.integers(-500, 500), st.integers(1, 50))


def test_ext_ord_one_plus_i():
    E = ExtField(C7, -1)
    # norm 1 + 1 = 2 is a unit at 7
    assert ext_ord(E(1, 1)) == 0
    assert ext_ord(E(7, 0)) == 1


def test_ext_ord_ramified_half_integer():
    E = ExtField(C7, 7)
    assert ext_ord(E.alpha) == Fraction(1, 2)


def test_ext_sqrt_matches_hensel():
    E = ExtField(C7, -1)
    r = ext_sqrt(2, E, 3)
    assert r.im == 0 and r.re.denominator == 1 and r.re % 343 in (108, 343 - 108)


def test_ext_sqrt_pure_imaginary():
    E = ExtField(C7, -1)
    r = ext_sqrt(-4, E)
    assert r.re == 0 and r * r == E(-4, 0)


def test_dsq_extension_criterion():
    E = ExtField(C7, 7)
    assert dsq_contains(1, E(1, 7))
    assert dsq_contains(1, E(3, 0))
    assert not dsq_contains(1, E(0, 1))
    assert not dsq_contains(1, E(7, 1))


def test_zero_divisor_detected():
    E = ExtField(C7, 4)  # 4 is a square: not a field
    with pytest.raises(ExtError):
        ext_ord(E(2, 1))


@given(small_q, small_q, small_q, small_q)
def test_field_axioms(a, b, c, d):
    E = ExtField(C7, 3)
    x, y = E(a, b), E(c, d)
    assert x * y == y * x
    assert (x * y).norm() == x.norm() * y.norm()
    if x.norm() != 0:
        assert (y / x) * x == y


def _exact_eigen_cases():
    for p in (3, 5, 7):
        ctx = PadicContext(p)
        for t, kn, ke in itertools.product(range(2, 30), range(-9, 10), (1, 2, 3)):
            if kn == 0 or kn % p == 0:
                continue
            params = make_params(p, t, p ** ke, kn)
            for z1, z2 in ((1, 1), (-1, 1), (1, -1), (-1, -1)):
                b, g = char_coefficients(params, z1, z2)
                D = -b * b - 4 * g
                d = rational_sqrt(D)
                if d is not None and D != 0:
                    yield ctx, params, z1, z2, b, d


def test_eigenvector_formula_exact():
    # when the discriminant is a rational square, the eigenvalues lie in Q(i)
    cases = list(_exact_eigen_cases())
    assert len(cases) >= 5
    for ctx, params, z1, z2, b, d in cases:
        E = ExtField(ctx, -1)
        i = E(0, 1)
        t = params.t
        A = [[E(x) for x in row] for row in A_closed_form(params, z1, z2)]
        for s in (1, -1):
            lam = E(s * d / 2, -b / 2)
            v = [t * z1 - i * lam, -i * t * z1 - lam, E(t * z2), -i * t * z2]
            Av = [sum((A[r][c] * v[c] for c in range(4)), E(0)) for r in range(4)]
            assert all((Av[r] - lam * v[r]).is_zero() for r in range(4))
            w = eigenvector_of(A, lam)
            Aw = [sum((A[r][c] * w[c] for c in range(4)), E(0)) for r in range(4)]
            assert all((Aw[r] - lam * w[r]).is_zero() for r in range(4))


def test_eigenvector_rejects_non_eigenvalue():
    E = ExtField(C7, -1)
    A = [[E(1), E(0)], [E(0), E(2)]]
    with pytest.raises(ExtError):
        eigenvector_of(A, E(5))
