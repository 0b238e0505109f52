"""The p-adic coupled angular momentum system on a product of two spheres.

J = R1 z1 + R2 z2
H = (1 - t) z1 + t (x1 x2 + y1 y2 + z1 z2)

with parameters t in Zp and |R2|_p > |R1|_p > 0, so k = R2/R1 has
negative order.  Variables are ordered (x1, y1, z1, x2, y2, z2).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable

from . import linalg as la
from .padic_core import (
    INF,
    PadicContext,
    PadicError,
    Q,
    is_square,
    ord_p,
    rational_sqrt,
    sqrt_approx,
)
from .quad_ext import ExtElem, ExtField, ext_ord, ord_plus_sqrt


class ParameterError(ValueError):
    """Parameters outside the admissible set."""


@dataclass(frozen=True)
class SystemParams:
    ctx: PadicContext
    t: Fraction
    R1: Fraction
    R2: Fraction

    def __post_init__(self):
        for name in ("t", "R1", "R2"):
            object.__setattr__(self, name, Q(getattr(self, name)))
        if self.R1 == 0 or self.R2 == 0:
            raise ParameterError("R1 and R2 must be nonzero")
        if ord_p(self.t, self.ctx) < 0:
            raise ParameterError(f"t={self.t} is not in Zp (negative order)")
        if not ord_p(self.R2, self.ctx) < ord_p(self.R1, self.ctx):
            raise ParameterError("need |R2|_p > |R1|_p, i.e. ord(R2) < ord(R1)")

    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def k(self) -> Fraction:
        return self.R2 / self.R1

    def to_json(self) -> dict:
        return {"p": self.p, "t": str(self.t), "R1": str(self.R1),
                "R2": str(self.R2), "k": str(self.k)}


def make_params(p: int, t, R1, R2, N: int = 32) -> SystemParams:
    return SystemParams(PadicContext(p, N), Q(t), Q(R1), Q(R2))


@dataclass(frozen=True)
class SpherePoint:
    x: Fraction
    y: Fraction
    z: Fraction

    def __post_init__(self):
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, Q(getattr(self, name)))
        if self.x ** 2 + self.y ** 2 + self.z ** 2 != 1:
            raise ValueError(f"({self.x}, {self.y}, {self.z}) is not on the sphere")


@dataclass(frozen=True)
class PhasePoint:
    first: SpherePoint
    second: SpherePoint

    @classmethod
    def of(cls, x1, y1, z1, x2, y2, z2) -> "PhasePoint":
        return cls(SpherePoint(x1, y1, z1), SpherePoint(x2, y2, z2))

    @property
    def coords(self) -> tuple:
        a, b = self.first, self.second
        return (a.x, a.y, a.z, b.x, b.y, b.z)

    def to_json(self) -> list:
        return [str(c) for c in self.coords]


CRITICAL_POINTS = {
    "P": (1, 1),
    "Q": (-1, 1),
    "S": (1, -1),
    "T": (-1, -1),
}


def critical_point(tag: str) -> PhasePoint:
    z1, z2 = CRITICAL_POINTS[tag]
    return PhasePoint.of(0, 0, z1, 0, 0, z2)


# --- polynomial observables --------------------------------------------------

class Observable:
    """Sparse polynomial: exponent tuple -> nonzero rational coefficient."""

    __slots__ = ("terms", "nvars")

    def __init__(self, terms: dict | None = None, nvars: int = 6):
        self.nvars = nvars
        self.terms = {m: Q(c) for m, c in (terms or {}).items() if c != 0}

    @classmethod
    def var(cls, i: int, nvars: int = 6) -> "Observable":
        m = [0] * nvars
        m[i] = 1
        return cls({tuple(m): 1}, nvars)

    @classmethod
    def const(cls, c, nvars: int = 6) -> "Observable":
        return cls({(0,) * nvars: Q(c)}, nvars)

    def _lift(self, other) -> "Observable":
        if isinstance(other, Observable):
            return other
        return Observable.const(other, self.nvars)

    def __add__(self, other):
        o = self._lift(other)
        out = dict(self.terms)
        for m, c in o.terms.items():
            out[m] = out.get(m, 0) + c
        return Observable(out, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return Observable({m: -c for m, c in self.terms.items()}, self.nvars)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return Observable(out, self.nvars)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Observable):
            other = Observable.const(other, self.nvars)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def diff(self, i: int) -> "Observable":
        out = {}
        for m, c in self.terms.items():
            if m[i]:
                mm = list(m)
                mm[i] -= 1
                out[tuple(mm)] = c * m[i]
        return Observable(out, self.nvars)

    def __call__(self, point: Iterable) -> Fraction:
        pt = [Q(v) for v in point]
        total = Fraction(0)
        for m, c in self.terms.items():
            term = c
            for v, e in zip(pt, m):
                if e:
                    term *= v ** e
            total += term
        return total

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    def subs(self, values: dict) -> "Observable":
        """Substitute observables for some variables."""
        out = Observable({}, self.nvars)
        for m, c in self.terms.items():
            term = Observable.const(c, self.nvars)
            for i, e in enumerate(m):
                if e:
                    base = values.get(i, Observable.var(i, self.nvars))
                    for _ in range(e):
                        term = term * base
            out = out + term
        return out

    def truncate(self, deg: int) -> "Observable":
        return Observable({m: c for m, c in self.terms.items() if sum(m) <= deg},
                          self.nvars)

    def __repr__(self):
        return f"Observable({self.terms})"


X1, Y1, Z1, X2, Y2, Z2 = (Observable.var(i) for i in range(6))


def J_obs(params: SystemParams) -> Observable:
    return params.R1 * Z1 + params.R2 * Z2


def H_obs(params: SystemParams) -> Observable:
    t = params.t
    return (1 - t) * Z1 + t * (X1 * X2 + Y1 * Y2 + Z1 * Z2)


def eval_F(params: SystemParams, point: PhasePoint) -> tuple[Fraction, Fraction]:
    c = point.coords
    return J_obs(params)(c), H_obs(params)(c)


def stereographic(u, v) -> SpherePoint:
    """Rational point of the unit sphere; (0,0) maps to the south pole."""
    u, v = Q(u), Q(v)
    n = u * u + v * v + 1
    if n == 0:
        raise PadicError("pole of parametrization")
    return SpherePoint(2 * u / n, 2 * v / n, (u * u + v * v - 1) / n)


# fundamental brackets on one factor: {x,y}=z/R, {y,z}=x/R, {z,x}=y/R
_CYCLE = {(0, 1): (2, 1), (1, 2): (0, 1), (2, 0): (1, 1),
          (1, 0): (2, -1), (2, 1): (0, -1), (0, 2): (1, -1)}


def fundamental_bracket(i: int, j: int, params: SystemParams, coords) -> Fraction:
    """{u_i, u_j} at a point; variables of different factors commute."""
    if i // 3 != j // 3 or i == j:
        return Fraction(0)
    f = i // 3
    R = params.R1 if f == 0 else params.R2
    k, s = _CYCLE[(i % 3, j % 3)]
    return s * Q(coords[3 * f + k]) / R


def bracket_function(f: Observable, g: Observable, params: SystemParams):
    """point -> {f, g}(point), with the partial derivatives taken once."""
    df = [f.diff(i) for i in range(6)]
    dg = [g.diff(i) for i in range(6)]
    pairs = [(i, j) for i in range(6) for j in range(6)
             if i // 3 == j // 3 and i != j and df[i].terms and dg[j].terms]

    def at(point: PhasePoint) -> Fraction:
        c = point.coords
        total = Fraction(0)
        for i, j in pairs:
            total += df[i](c) * dg[j](c) * fundamental_bracket(i, j, params, c)
        return total

    return at


def poisson(f: Observable, g: Observable, params: SystemParams,
            point: PhasePoint) -> Fraction:
    return bracket_function(f, g, params)(point)


def gradient(f: Observable, coords) -> list[Fraction]:
    return [f.diff(i)(coords) for i in range(6)]


def jacobian_rank(params: SystemParams, point: PhasePoint) -> int:
    """Rank of dF on the tangent space of the product of spheres."""
    c = point.coords
    S1 = X1 * X1 + Y1 * Y1 + Z1 * Z1
    S2 = X2 * X2 + Y2 * Y2 + Z2 * Z2
    rows = [gradient(S1, c), gradient(S2, c),
            gradient(J_obs(params), c), gradient(H_obs(params), c)]
    return la.rank(rows) - la.rank(rows[:2])


# --- Hessians at the poles ---------------------------------------------------

@dataclass(frozen=True)
class HessianData:
    M_J: list
    M_H: list
    Omega: list
    z1: int
    z2: int

    def to_json(self) -> dict:
        return {"M_J": la.fmt_matrix(self.M_J), "M_H": la.fmt_matrix(self.M_H),
                "Omega": la.fmt_matrix(self.Omega), "z1": self.z1, "z2": self.z2}


def _check_signs(z1, z2):
    if z1 not in (1, -1) or z2 not in (1, -1):
        raise ValueError("z1 and z2 must be +1 or -1")


def omega_matrix(params: SystemParams, z1: int, z2: int) -> list:
    R1, R2 = params.R1, params.R2
    F = Fraction
    return [[F(0), R1 / z1, F(0), F(0)],
            [-R1 / z1, F(0), F(0), F(0)],
            [F(0), F(0), F(0), R2 / z2],
            [F(0), F(0), -R2 / z2, F(0)]]


def hessians(params: SystemParams, z1: int, z2: int) -> HessianData:
    _check_signs(z1, z2)
    R1, R2, t = params.R1, params.R2, params.t
    F = Fraction
    MJ = [[-R1 / z1, F(0), F(0), F(0)],
          [F(0), -R1 / z1, F(0), F(0)],
          [F(0), F(0), -R2 / z2, F(0)],
          [F(0), F(0), F(0), -R2 / z2]]
    a = (t - t * z2 - 1) / z1
    b = -t * z1 / z2
    MH = [[a, F(0), t, F(0)],
          [F(0), a, F(0), t],
          [t, F(0), b, F(0)],
          [F(0), t, F(0), b]]
    return HessianData(MJ, MH, omega_matrix(params, z1, z2), z1, z2)


_CHART = (0, 1, 3, 4)  # x1, y1, x2, y2


def chart_hessian(f: Observable, z1: int, z2: int) -> list:
    """Second derivatives of f in the chart (x1,y1,x2,y2) around a pole.

    z_i is replaced by z_i0 (1 - (x_i^2 + y_i^2)/2), its Taylor polynomial
    to second order; higher terms cannot reach the Hessian at the origin.
    """
    _check_signs(z1, z2)
    half = Fraction(1, 2)
    sub = {2: z1 * (1 - half * (X1 * X1 + Y1 * Y1)),
           5: z2 * (1 - half * (X2 * X2 + Y2 * Y2))}
    g = f.subs(sub).truncate(2)
    origin = [0] * 6
    return [[g.diff(i).diff(j)(origin) for j in _CHART] for i in _CHART]


def symplectic_A(params: SystemParams, z1: int, z2: int,
                 a_J=0, a_H=1) -> list:
    """R2 Omega^-1 (a_J M_J + a_H M_H)."""
    h = hessians(params, z1, z2)
    M = la.mat_add(la.mat_scale(Q(a_J), h.M_J), la.mat_scale(Q(a_H), h.M_H))
    return la.mat_scale(params.R2, la.mat_mul(la.inverse(h.Omega), M))


def A_closed_form(params: SystemParams, z1: int, z2: int) -> list:
    k, t = params.k, params.t
    F = Fraction
    g = k * (t - t * z2 - 1)
    return [[F(0), -g, F(0), -k * t * z1],
            [g, F(0), k * t * z1, F(0)],
            [F(0), -t * z2, F(0), t * z1],
            [t * z2, F(0), -t * z1, F(0)]]


# --- seeded samples ---------------------------------------------------------

def _rand_rational(rng, height: int) -> Fraction:
    return Fraction(rng.randint(-height, height), rng.randint(1, height))


def random_phase_point(rng, height: int = 12) -> PhasePoint:
    """Rational point of S^2 x S^2 via stereographic parameters of bounded height."""
    a = stereographic(_rand_rational(rng, height), _rand_rational(rng, height))
    b = stereographic(_rand_rational(rng, height), _rand_rational(rng, height))
    return PhasePoint(a, b)


def random_params(p: int, rng, N: int = 32) -> SystemParams:
    """A random element of the parameter set with small numerators."""
    units = [v for v in range(-3 * p, 3 * p + 1) if v % p]
    t = Fraction(rng.randint(-p ** 3, p ** 3), rng.choice([v for v in (1, 3, 5, 7) if v % p]))
    R1 = Fraction(rng.choice(units)) * Fraction(p) ** rng.randint(0, 3)
    dens = [v for v in (1, 2, 3, 5, 7) if v % p]
    k = Fraction(rng.choice(units), rng.choice(dens)) / Fraction(p) ** rng.randint(1, 5)
    return make_params(p, t, R1, k * R1, N)


# --- regions, discriminant, eigenvalues ----------------------------------------

class Region(str, Enum):
    OUTER = "outer"
    INNER = "inner"
    LIMIT = "limit"


def region_order(params: SystemParams):
    """ord(k (2t-1)^2); infinity when t = 1/2."""
    return ord_p(params.k * (2 * params.t - 1) ** 2, params.ctx)


def region(params: SystemParams) -> Region:
    if params.p == 2:
        return Region.OUTER
    v = region_order(params)
    if v < 0:
        return Region.OUTER
    if v > 0:
        return Region.INNER
    return Region.LIMIT


def delta(k, t, z1) -> Fraction:
    k, t = Q(k), Q(t)
    return -k * k * (1 - 2 * t) ** 2 - t * t + 2 * k * t * z1


@dataclass(frozen=True)
class CharQuadratic:
    """x^2 + i*beta*x + gamma, whose roots lambda, mu carry the spectrum."""

    beta: Fraction
    gamma: Fraction
    disc: Fraction
    lam: ExtElem | None
    mu: ExtElem | None
    lam_sq: ExtElem
    mu_sq: ExtElem
    ord_lam: object
    ord_mu: object
    degenerate: bool

    def coefficients(self, ctx: PadicContext) -> tuple[ExtElem, ExtElem]:
        F = ExtField(ctx, -1)
        return F(0, self.beta), F(self.gamma, 0)

    def to_json(self) -> dict:
        def o(v):
            return "inf" if v == INF else str(v)
        return {
            "beta": str(self.beta), "gamma": str(self.gamma),
            "disc": str(self.disc),
            "lambda": self.lam.to_json() if self.lam is not None else None,
            "mu": self.mu.to_json() if self.mu is not None else None,
            "lambda_sq": self.lam_sq.to_json(), "mu_sq": self.mu_sq.to_json(),
            "ord_lambda": o(self.ord_lam), "ord_mu": o(self.ord_mu),
            "degenerate": self.degenerate,
        }


def char_coefficients(params: SystemParams, z1: int, z2: int) -> tuple[Fraction, Fraction]:
    k, t = params.k, params.t
    return k * (t * z2 - t + 1) + t * z1, k * t * (t - 1) * z1


def char_quadratic(params: SystemParams, z1: int, z2: int) -> CharQuadratic:
    _check_signs(z1, z2)
    ctx = params.ctx
    beta, gamma = char_coefficients(params, z1, z2)
    D = -beta * beta - 4 * gamma
    # lambda^2, mu^2 = (D - beta^2)/4 -+ (beta/2) * sqrt(-D)
    Fsq = ExtField(ctx, -D) if D != 0 else ExtField(ctx, 1)
    sq_plus = Fsq((D - beta * beta) / 4, -beta / 2)
    sq_minus = Fsq((D - beta * beta) / 4, beta / 2)
    half = Fraction(1, 2)

    lam = mu = None
    Fi = ExtField(ctx, -1)
    if D == 0:
        r = Fi(0, -beta / 2)
        lam = mu = r
        o = ord_p(beta / 2, ctx)
        ord_l = ord_m = o
        lam_sq = mu_sq = sq_plus
    elif gamma == 0:
        # roots -i beta and 0
        lam, mu = Fi(0, -beta), Fi(0, 0)
        ord_l, ord_m = ord_p(beta, ctx), INF
        lam_sq, mu_sq = Fsq(-beta * beta, 0), Fsq(0, 0)
    elif is_square(-D, ctx):
        e, _ = sqrt_approx(-D, ctx, ctx.N)
        o_plus = Fraction(ord_plus_sqrt((D - beta * beta) / 4, -beta / 2, -D, ctx), 2)
        o_minus = Fraction(ord_plus_sqrt((D - beta * beta) / 4, beta / 2, -D, ctx), 2)
        # lambda = i(-beta + e)/2 squares to the "+ e" branch of -((-beta+e)/2)^2
        r1 = Fi(0, (-beta + e) * half)
        r2 = Fi(0, (-beta - e) * half)
        # (-beta + e)^2/4 = (beta^2 - D)/4 - beta e/2, so r1^2 = (D-beta^2)/4 + beta e/2
        pairs = [(r1, sq_minus, o_minus), (r2, sq_plus, o_plus)]
        pairs.sort(key=lambda x: (x[2], str(x[0].re), str(x[0].im)))
        (lam, lam_sq, ord_l), (mu, mu_sq, ord_m) = pairs
    else:
        o = ext_ord(sq_plus) / 2
        ord_l = ord_m = o
        lam_sq, mu_sq = sq_plus, sq_minus
        if is_square(D, ctx):
            dlt, _ = sqrt_approx(D, ctx, ctx.N)
            r1 = Fi(dlt * half, -beta * half)
            r2 = Fi(-dlt * half, -beta * half)
            pair = sorted([r1, r2], key=lambda r: (str(r.re), str(r.im)))
            lam, mu = pair
            if lam == r2:
                lam_sq, mu_sq = sq_minus, sq_plus
        elif ctx.p % 4 == 1:
            i_val, _ = sqrt_approx(-1, ctx, ctx.N)
            Fd = ExtField(ctx, D)
            lam = Fd(-i_val * beta * half, half)
            mu = Fd(-i_val * beta * half, -half)
    degenerate = D == 0 or beta == 0 or gamma == 0
    return CharQuadratic(beta, gamma, D, lam, mu, lam_sq, mu_sq, ord_l, ord_m, degenerate)


def degenerate_t_values(ctx: PadicContext, k, z1: int) -> list[Fraction]:
    """Rational t in Zp with delta(k, t, z1) = 0.

    delta is quadratic in t with discriminant 16 k^3 z1, so roots exist in
    Qp exactly when k z1 is a square; only rational roots are returned.
    """
    k = Q(k)
    if not ord_p(k, ctx) < 0:
        raise ParameterError("need ord(k) < 0")
    a = -4 * k * k - 1
    b = 4 * k * k + 2 * k * z1
    # constant term -k^2, so the discriminant is 16 k^3 z1 = (4 k s)^2
    if not is_square(k * z1, ctx):
        return []
    s = rational_sqrt(k * z1)
    if s is None:
        return []
    roots = set()
    for sign in (1, -1):
        t = (-b + sign * 4 * k * s) / (2 * a)
        if ord_p(t, ctx) >= 0:
            roots.add(t)
    out = sorted(roots)
    for t in out:
        assert delta(k, t, z1) == 0
    return out
