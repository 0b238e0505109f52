from fractions import Fraction

import pytest
import sympy as sp

from padic_cam.normal_forms import (
    I3,
    R3,
    NormalForm,
    NormalFormError,
    candidate_forms,
    class1,
    class2,
    class3,
    eta_,
    expand_normal_form,
    model_bracket,
    x_,
    xi_,
    y_,
)
from padic_cam.padic_core import xp_set, yp_set

half = Fraction(1, 2)


@pytest.mark.parametrize("p", [2, 3, 5, 7, 13])
def test_candidates_commute(p):
    for nf in candidate_forms(p):
        g1, g2 = expand_normal_form(nf)
        assert model_bracket(g1, g2) == model_bracket(g1, g1), nf


@pytest.mark.parametrize("p,n_class3", [(7, 4), (5, 0), (2, 0)])
def test_candidate_counts(p, n_class3):
    # class 1 pairs + class 2 + class 3 + R3 + I3
    nx, ny = len(xp_set(p)), len(yp_set(p))
    assert len(candidate_forms(p)) == nx * (nx + 1) // 2 + ny + n_class3 + 1 + ny


def test_class2_minus_one():
    g1, g2 = expand_normal_form(class2(-1))
    assert g1 == x_ * eta_ - y_ * xi_
    assert g2 == x_ * xi_ + y_ * eta_


def test_R3_shape():
    g1, g2 = expand_normal_form(R3)
    assert (g1, g2) == (x_ * xi_ + y_ * eta_, y_ * xi_)


def test_I3_uses_y_squared():
    c = Fraction(-1)
    g1, g2 = expand_normal_form(I3(c))
    assert g2 == half * (x_ * x_ - c * y_ * y_)
    # with xi^2 in place of y^2 the pair would not commute
    bad = half * (x_ * x_ - c * xi_ * xi_)
    assert model_bracket(g1, bad) != model_bracket(g1, g1)


def test_class3_example_g1():
    p = 7
    g1, _ = expand_normal_form(class3(p, -1, 0, 1, 0))
    want = (x_ * x_ * Fraction(1, 2 * p) + half * y_ * y_ + half * eta_ * eta_
            + Fraction(p, 2) * xi_ * xi_)
    assert g1 == want


def _sympy_class3(c, t1, t2, a, b):
    """Independent substitution into the coefficient formulas with sympy."""
    c, t1, t2, a, b = map(sp.nsimplify, (c, t1, t2, a, b))
    x, xi, y, eta = sp.symbols("x xi y eta")
    Cc = {(1, 0): a * c / (2 * (c - b ** 2)), (1, 1): b / (b ** 2 - c),
          (1, 2): 1 / (2 * a * (c - b ** 2)), (2, 0): a * b * c / (2 * (b ** 2 - c)),
          (2, 1): c / (c - b ** 2), (2, 2): b / (2 * a * (b ** 2 - c))}
    Dd = {(1, 0): -(t1 + b * t2) / (2 * a), (1, 1): -b * t1 - c * t2,
          (1, 2): -a * c * (t1 + b * t2) / 2, (2, 0): -(b * t1 + c * t2) / (2 * a),
          (2, 1): -c * (t1 + b * t2), (2, 2): -a * c * (b * t1 + c * t2) / 2}
    out = []
    for j in (1, 2):
        out.append(sp.expand(sum(Cc[(j, i)] * x ** i * y ** (2 - i) + Dd[(j, i)] * xi ** i * eta ** (2 - i)
                                 for i in range(3))))
    return out, (x, xi, y, eta)


@pytest.mark.parametrize("params", [(7, -1, 0, 1, 0), (-7, -1, 0, 1, 1), (3, 2, 5, -1, 1),
                                    (Fraction(1, 3), 1, -2, 3, 2)])
def test_class3_against_sympy(params):
    ours = expand_normal_form(class3(*params))
    theirs, syms = _sympy_class3(*params)
    for o, s in zip(ours, theirs):
        poly = sp.Poly(s, *syms)
        for mono, coeff in poly.terms():
            assert o.terms.get(tuple(mono), 0) == Fraction(str(coeff))
        assert len(o.terms) == len(poly.terms())


def test_class3_invalid_tuple():
    with pytest.raises(NormalFormError):
        expand_normal_form(class3(4, 1, 0, 1, 2))


def test_json_roundtrip_and_order():
    nf = class1(7, 49, 1)
    assert nf.params == (1, 49)
    assert NormalForm.from_json(nf.to_json()) == nf
    assert nf.to_json() == {"class": "1", "params": ["1", "49"]}
    with pytest.raises(NormalFormError):
        NormalForm("2", (1, 2))
