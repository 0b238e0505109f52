"""Williamson-type normal forms in dimension four and their quadratic models.

Coordinates of the models are (x, xi, y, eta) with {x, xi} = {y, eta} = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cam_system import Observable
from .padic_core import Q, smallest_nonresidue, xp_set, yp_set

x_, xi_, y_, eta_ = (Observable.var(i, 4) for i in range(4))

# symplectic matrix of the model coordinates; X = Omega^-1 M is the
# linearised flow up to sign, with the same convention as cam_system
OMEGA0 = [[Fraction(v) for v in row] for row in
          ([0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0])]


class NormalFormError(ValueError):
    pass


@dataclass(frozen=True)
class NormalForm:
    kind: str  # "1", "2", "3", "R3", "I3"
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in ("1", "2", "3", "R3", "I3"):
            raise NormalFormError(f"unknown class {self.kind!r}")
        object.__setattr__(self, "params", tuple(Q(v) for v in self.params))
        need = {"1": 2, "2": 1, "3": 5, "R3": 0, "I3": 1}[self.kind]
        if len(self.params) != need:
            raise NormalFormError(f"class {self.kind} takes {need} parameters")

    @property
    def degenerate(self) -> bool:
        return self.kind in ("R3", "I3")

    def to_json(self) -> dict:
        return {"class": self.kind, "params": [str(v) for v in self.params]}

    @classmethod
    def from_json(cls, data: dict) -> "NormalForm":
        return cls(data["class"], tuple(Q(v) for v in data["params"]))

    def __str__(self):
        if not self.params:
            return self.kind
        return f"{self.kind}({', '.join(str(v) for v in self.params)})"


def _x_rank(p: int, c) -> int:
    xs = xp_set(p)
    try:
        return xs.index(Q(c))
    except ValueError:
        return len(xs)


def class1(p: int, c1, c2) -> NormalForm:
    """Class (1) form with the pair sorted in the order of X_p."""
    a, b = sorted((Q(c1), Q(c2)), key=lambda c: (_x_rank(p, c), c))
    return NormalForm("1", (a, b))


def class2(c) -> NormalForm:
    return NormalForm("2", (c,))


def class3(c, t1, t2, a, b) -> NormalForm:
    return NormalForm("3", (c, t1, t2, a, b))


R3 = NormalForm("R3")


def I3(c) -> NormalForm:
    return NormalForm("I3", (c,))


def normalize(p: int, nf: NormalForm) -> NormalForm:
    if nf.kind == "1":
        return class1(p, *nf.params)
    return nf


def _class3_coefficients(c, t1, t2, a, b):
    if c == b * b:
        raise NormalFormError("invalid class-3 tuple: c = b^2")
    if a == 0:
        raise NormalFormError("invalid class-3 tuple: a = 0")
    C = {
        (1, 0): a * c / (2 * (c - b * b)),
        (1, 1): b / (b * b - c),
        (1, 2): 1 / (2 * a * (c - b * b)),
        (2, 0): a * b * c / (2 * (b * b - c)),
        (2, 1): c / (c - b * b),
        (2, 2): b / (2 * a * (b * b - c)),
    }
    D = {
        (1, 0): -(t1 + b * t2) / (2 * a),
        (1, 1): -b * t1 - c * t2,
        (1, 2): -a * c * (t1 + b * t2) / 2,
        (2, 0): -(b * t1 + c * t2) / (2 * a),
        (2, 1): -c * (t1 + b * t2),
        (2, 2): -a * c * (b * t1 + c * t2) / 2,
    }
    return C, D


def expand_normal_form(nf: NormalForm) -> tuple[Observable, Observable]:
    """The pair (g1, g2) of quadratic polynomials in (x, xi, y, eta)."""
    k = nf.kind
    if k == "1":
        c1, c2 = nf.params
        return x_ * x_ + c1 * xi_ * xi_, y_ * y_ + c2 * eta_ * eta_
    if k == "2":
        (c,) = nf.params
        return x_ * eta_ + c * y_ * xi_, x_ * xi_ + y_ * eta_
    if k == "R3":
        return x_ * xi_ + y_ * eta_, y_ * xi_
    if k == "I3":
        # second component uses y^2; with xi^2 the pair does not commute
        (c,) = nf.params
        return (x_ * eta_ + c * y_ * xi_ + (1 + c) / Fraction(2) * y_ * y_,
                (x_ * x_ - c * y_ * y_) * Fraction(1, 2))
    C, D = _class3_coefficients(*nf.params)
    out = []
    for j in (1, 2):
        g = Observable({}, 4)
        for i in range(3):
            g = g + C[(j, i)] * _power(x_, i) * _power(y_, 2 - i)
            g = g + D[(j, i)] * _power(xi_, i) * _power(eta_, 2 - i)
        out.append(g)
    return out[0], out[1]


def _power(o: Observable, n: int) -> Observable:
    out = Observable.const(1, 4)
    for _ in range(n):
        out = out * o
    return out


def hessian4(g: Observable) -> list:
    origin = [0] * 4
    return [[g.diff(i).diff(j)(origin) for j in range(4)] for i in range(4)]


def model_bracket(f: Observable, g: Observable) -> Observable:
    """Poisson bracket with {x, xi} = {y, eta} = 1."""
    out = Observable({}, 4)
    for q, pp in ((0, 1), (2, 3)):
        out = out + f.diff(q) * g.diff(pp) - f.diff(pp) * g.diff(q)
    return out


def candidate_forms(p: int) -> list[NormalForm]:
    """The normal forms the classifiers may return at prime p."""
    xs = xp_set(p)
    out = [class1(p, a, b) for i, a in enumerate(xs) for b in xs[i:]]
    out += [class2(c) for c in yp_set(p)]
    if p % 4 == 3:
        out += [class3(s * p, -1, 0, 1, b) for s in (1, -1) for b in (0, 1)]
    out.append(R3)
    out += [I3(c) for c in yp_set(p)]
    return out


def c0_of(p: int) -> int:
    return smallest_nonresidue(p)
