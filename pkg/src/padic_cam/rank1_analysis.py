"""Rank-1 critical points: locus, invariant f(c, k, t) and normal forms.

At a rank-1 point c dJ = dH for a multiplier.  Following the usual
normalisation the multiplier is written c/R1, so that c (dz1 + k dz2) = dH.
The transverse part of the normal form is x^2 + c' xi^2 with c' in X_p.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from . import linalg as la
from .cam_system import (
    H_obs,
    J_obs,
    Observable,
    PhasePoint,
    SpherePoint,
    SystemParams,
    _CYCLE,
    fundamental_bracket,
    make_params,
    stereographic,
)
from .padic_core import (
    PadicContext,
    PadicError,
    Q,
    dsq_contains_base,
    hilbert_symbol,
    is_square,
    ord_p,
    rational_sqrt,
    sqrt_approx,
    square_class,
    square_class_reps,
    two_squares_exists,
    xp_set,
)


class Rank1Error(ValueError):
    pass


BRANCHES = ("T0_pole1", "T0_pole2", "Generic", "T1_aligned", "T1_antipodal")


@dataclass(frozen=True)
class Rank1Point:
    point: PhasePoint | tuple
    c: Fraction
    branch: str
    exact: bool = True
    precision: int | None = None

    @property
    def coords(self) -> tuple:
        if isinstance(self.point, PhasePoint):
            return self.point.coords
        return tuple(self.point)

    @property
    def multiplier(self) -> Fraction:
        """The m with m dJ = dH, i.e. c / R1 for the generic branch."""
        return self.c

    def to_json(self) -> dict:
        return {"branch": self.branch, "c": str(self.c), "exact": self.exact,
                "precision": self.precision,
                "point": [str(v) for v in self.coords]}


@dataclass(frozen=True)
class Rank1Form:
    c_prime: Fraction
    f: Fraction | None = None
    r: Fraction | None = None
    dsq: bool | None = None
    candidates: tuple = ()
    rule: str = ""

    def to_json(self) -> dict:
        def s(v):
            return None if v is None else str(v)
        return {"c_prime": str(self.c_prime), "f": s(self.f), "r": s(self.r),
                "dsq": self.dsq, "candidates": [str(c) for c in self.candidates],
                "rule": self.rule}


# --- the locus ---------------------------------------------------------------

def _check_generic(c, k, t):
    c, k, t = Q(c), Q(k), Q(t)
    if c == 0:
        raise Rank1Error("c must be nonzero")
    if t == 0:
        raise Rank1Error("t = 0 has no generic rank-1 branch; use rank1_special")
    if k == 0:
        raise Rank1Error("k must be nonzero")
    if 1 - t - c == 0:
        raise Rank1Error("1 - t - c vanishes")
    return c, k, t


def locus_z(c, k, t) -> tuple[Fraction, Fraction]:
    c, k, t = _check_generic(c, k, t)
    a = 1 - t - c
    z1 = (t / (c * k) + c * k / t - c * k * t / a ** 2) / 2
    z2 = (t * a / (c * c * k * k) - t / a - a / t) / 2
    return z1, z2


def scaling(c, k, t) -> Fraction:
    """x2/x1 = y2/y1 on the generic branch."""
    c, k, t = _check_generic(c, k, t)
    return (1 - t - c) / (c * k)


def f_invariant(c, k, t) -> Fraction:
    c, k, t = _check_generic(c, k, t)
    z1, z2 = locus_z(c, k, t)
    a = 1 - t - c
    return a ** 2 * (1 - t) ** 2 * (1 - z1 ** 2) + (a ** 2 * z1 + c * c * k * z2) ** 2


def _small_rationals(height: int):
    seen = set()
    for d in range(1, height + 1):
        for n in range(-height, height + 1):
            v = Fraction(n, d)
            if v not in seen:
                seen.add(v)
                yield v


def circle_witness(q: Fraction, ctx: PadicContext, height: int = 20):
    """(x, y, exact) with x^2 + y^2 = q.

    Tries rational points of small height first; otherwise returns a
    truncated p-adic x with x^2 = q - y^2 modulo p^(ord + N).
    """
    q = Q(q)
    r = rational_sqrt(q)
    if r is not None:
        return r, Fraction(0), True
    for y in _small_rationals(height):
        x = rational_sqrt(q - y * y)
        if x is not None:
            return x, y, True
    # y must be comparable to q^(1/2) when q is far from a unit
    half = ord_p(q, ctx) // 2
    scales = [Fraction(ctx.p) ** j for j in sorted({half, half - 1, 0}, key=lambda j: abs(j - half))]
    for scale in scales:
        for y in _small_rationals(8):
            rest = q - (y * scale) ** 2
            if rest != 0 and is_square(rest, ctx):
                x, _ = sqrt_approx(rest, ctx, ctx.N)
                return x, y * scale, False
    raise Rank1Error("no circle witness found")


def rank1_locus(params: SystemParams, c, witness=None) -> Rank1Point | None:
    """The generic rank-1 point for multiplier c, or None when empty.

    witness may fix (x1, y1); otherwise one is searched for.
    """
    k, t = params.k, params.t
    z1, z2 = locus_z(c, k, t)
    q = 1 - z1 * z1
    if q == 0 or not two_squares_exists(q, params.ctx):
        return None
    s = scaling(c, k, t)
    if witness is None:
        x1, y1, exact = circle_witness(q, params.ctx)
    else:
        x1, y1 = Q(witness[0]), Q(witness[1])
        exact = x1 * x1 + y1 * y1 == q
        if not exact:
            raise Rank1Error("witness is not on the circle x1^2 + y1^2 = 1 - z1^2")
    coords = (x1, y1, z1, s * x1, s * y1, z2)
    if exact:
        pt = PhasePoint.of(*coords)
        return Rank1Point(pt, Q(c) / params.R1, "Generic", True)
    return Rank1Point(coords, Q(c) / params.R1, "Generic", False, params.ctx.N)


def rank1_special(params: SystemParams, samples: int = 3) -> list[dict]:
    """Families of rank-1 points for t = 0 or t = 1, with sampled members."""
    t = params.t
    if t not in (0, 1):
        raise Rank1Error("use rank1_locus for t not in {0, 1}")
    uv = [(Fraction(1, 2), Fraction(1, 3)), (Fraction(2), Fraction(-1, 5)),
          (Fraction(3, 7), Fraction(4)), (Fraction(-5, 3), Fraction(1, 2)),
          (Fraction(1, 11), Fraction(-6))][:samples]
    sphere = [stereographic(u, v) for u, v in uv]
    out = []
    if t == 0:
        for sgn in (1, -1):
            pole = SpherePoint(0, 0, sgn)
            pts = [Rank1Point(PhasePoint(pole, s), Fraction(0), "T0_pole1") for s in sphere]
            out.append({"branch": "T0_pole1", "form": f"(0,0,{sgn},x2,y2,z2)",
                        "multiplier": "0", "points": pts})
            pts = [Rank1Point(PhasePoint(s, pole), 1 / params.R1, "T0_pole2") for s in sphere]
            out.append({"branch": "T0_pole2", "form": f"(x1,y1,z1,0,0,{sgn})",
                        "multiplier": str(1 / params.R1), "points": pts})
    else:
        neg = [SpherePoint(-s.x, -s.y, -s.z) for s in sphere]
        out.append({"branch": "T1_aligned", "form": "(x1,y1,z1,x1,y1,z1)", "multiplier": "0",
                    "points": [Rank1Point(PhasePoint(s, s), Fraction(0), "T1_aligned")
                               for s in sphere]})
        out.append({"branch": "T1_antipodal", "form": "(x1,y1,z1,-x1,-y1,-z1)",
                    "multiplier": "0",
                    "points": [Rank1Point(PhasePoint(s, m), Fraction(0), "T1_antipodal")
                               for s, m in zip(sphere, neg)]})
    return out


# --- normal forms ------------------------------------------------------------

def _parity_c(params: SystemParams, R) -> tuple[Fraction, str]:
    p = params.p
    if p % 4 == 3 and ord_p(R, params.ctx) % 2:
        return Fraction(p * p), "odd order"
    return Fraction(1), "even order or p not 3 mod 4"


def classify_rank1(params: SystemParams, pt: Rank1Point) -> Rank1Form:
    ctx = params.ctx
    if pt.branch in ("T0_pole1", "T1_aligned", "T1_antipodal"):
        c, why = _parity_c(params, params.R1)
        return Rank1Form(c, rule=f"ord(R1): {why}")
    if pt.branch == "T0_pole2":
        c, why = _parity_c(params, params.R2)
        return Rank1Form(c, rule=f"ord(R2): {why}")
    if pt.branch != "Generic":
        raise Rank1Error(f"unknown branch {pt.branch!r}")

    c = pt.c * params.R1
    k, t = params.k, params.t
    z1, _ = locus_z(c, k, t)
    f = f_invariant(c, k, t)
    if f == 0:
        raise Rank1Error("f(c, k, t) = 0: the point is degenerate")
    fcls = square_class(f, ctx)
    cands = [cp for cp in xp_set(ctx.p) if square_class(cp, ctx) == fcls]
    if not cands:
        raise Rank1Error("classification contradiction: no c' in X_p matches f")
    if len(cands) == 1:
        r, _ = sqrt_approx(f / cands[0], ctx, ctx.N)
        return Rank1Form(cands[0], f, r, None, tuple(cands), "unique c' in the class of f")
    passing = []
    for cp in cands:
        r, _ = sqrt_approx(f / cp, ctx, ctx.N)
        for root in (r, -r):
            if dsq_contains_base(cp, root * params.R1 * (z1 * z1 - 1), ctx):
                passing.append((cp, root))
                break
    chosen = {cp for cp, _ in passing}
    if len(chosen) != 1:
        raise Rank1Error(f"classification contradiction: DSq accepts {sorted(chosen)}")
    cp, root = passing[0]
    return Rank1Form(cp, f, root, True, tuple(cands), "DSq test on r R1 (z1^2 - 1)")


def image_curve(params: SystemParams, c) -> tuple[Fraction, Fraction]:
    """F at the rank-1 point of multiplier c; independent of the witness."""
    k, t = params.k, params.t
    z1, z2 = locus_z(c, k, t)
    q = 1 - z1 * z1
    if q == 0 or not two_squares_exists(q, params.ctx):
        raise Rank1Error("the rank-1 locus is empty for this c")
    s = scaling(c, k, t)
    J = params.R1 * z1 + params.R2 * z2
    H = (1 - t) * z1 + t * (s * q + z1 * z2)
    return J, H


# --- realisation of every c' --------------------------------------------------

def _recipe_grid(p: int):
    # R1 runs over all square classes: inside one class of f the two
    # candidates c' are told apart by the class of R1 modulo norms
    reps = square_class_reps(p)
    cs = [r * Fraction(p) ** j for j in (3, 4) for r in reps if ord_p(r, p) == 0]
    for c, e, R1 in product(cs, (8, 10, 12), reps):
        yield Fraction(p * p), c, Fraction(1, p ** e), Fraction(R1)


def _wide_grid(p: int):
    reps = square_class_reps(p)
    us = [u for u in reps if ord_p(u, p) == 0] + [Fraction(v) for v in (3, 5, 7, 9, 11) if v % p]
    ts = [Fraction(v) for v in (3, 5, 7, 2, 6, 4, 9, 10)] + [Fraction(1, 3), Fraction(5, 3)]
    for j, e, u, t, R1 in product((0, 1, 2, -1), (1, 2, 3, 4), us, ts, reps):
        c = u * Fraction(p) ** j
        if ord_p(t, p) < 0:
            continue
        yield t, c, Fraction(1, p ** e), Fraction(R1)


_REALIZED: dict = {}


def _scan(ctx: PadicContext, wide: bool):
    grids = [_recipe_grid(ctx.p)] + ([_wide_grid(ctx.p)] if wide else [])
    for grid in grids:
        for t, c, k, R1 in grid:
            try:
                params = SystemParams(ctx, t, R1, k * R1)
                pt = rank1_locus(params, c)
                if pt is None:
                    continue
                yield params, c, classify_rank1(params, pt).c_prime
            except (Rank1Error, PadicError, ValueError):
                continue


def realize_rank1_form(ctx: PadicContext, c_prime, wide: bool = True):
    """(params, c) whose generic rank-1 point has normal form x^2 + c' xi^2.

    Scans the grid once per (p, N, wide), remembering the first hit for
    every c' seen on the way.
    """
    p = ctx.p
    c_prime = Q(c_prime)
    if c_prime not in xp_set(p):
        raise Rank1Error(f"{c_prime} is not in X_{p}")
    key = (p, ctx.N, wide)
    found, scan = _REALIZED.setdefault(key, ({}, _scan(ctx, wide)))
    while c_prime not in found:
        try:
            params, c, cp = next(scan)
        except StopIteration:
            raise Rank1Error(f"search exhausted without realizing c' = {c_prime}") from None
        found.setdefault(cp, (params, c))
    return found[c_prime]


# --- an independent check at exact points --------------------------------------

def _ambient_poisson(params: SystemParams, coords) -> list:
    return [[fundamental_bracket(i, j, params, coords) for j in range(6)] for i in range(6)]


def _solve(A, b):
    """Some x with A x = b (A may be singular); raises if inconsistent."""
    n = len(A[0])
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, piv = la.rref(aug)
    if n in piv:
        raise Rank1Error("inconsistent linear system")
    x = [Fraction(0)] * n
    for r, c in enumerate(piv):
        x[c] = R[r][n]
    return x


def transverse_data(params: SystemParams, coords, multiplier) -> tuple:
    """Exact transverse data of G = H - m J at a rational rank-1 point.

    Returns (ell, beta): ell is the square of the nonzero eigenvalues of the
    linearised flow of G on the tangent space, beta the eigenvector pairing
    divided by the eigenvalue.  Computed from the ambient Lie-Poisson
    structure, without charts.
    """
    coords = tuple(Q(v) for v in coords)
    G = H_obs(params) - Q(multiplier) * J_obs(params)
    Pi_obs = [[Observable({}) for _ in range(6)] for _ in range(6)]
    for (a, b), (k3, sign) in _CYCLE.items():
        for f, R in ((0, params.R1), (1, params.R2)):
            Pi_obs[3 * f + a][3 * f + b] = Observable.var(3 * f + k3) * (Fraction(sign) / R)
    grad = [G.diff(j) for j in range(6)]
    field_ = [sum((Pi_obs[i][j] * grad[j] for j in range(6)), Observable({}))
              for i in range(6)]
    if any(v(coords) != 0 for v in field_):
        raise Rank1Error("G is not critical at the point")
    L = [[field_[i].diff(k)(coords) for k in range(6)] for i in range(6)]
    # tangent space basis
    normals = [[2 * coords[j] if j // 3 == f else Fraction(0) for j in range(6)]
               for f in (0, 1)]
    R_, piv = la.rref(normals)
    free = [c for c in range(6) if c not in piv]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * 6
        v[fcol] = Fraction(1)
        for r, c in enumerate(piv):
            v[c] = -R_[r][fcol]
        basis.append(v)
    B = la.transpose(basis)  # 6 x 4
    # L restricted to the tangent space, in the basis
    LB = la.mat_mul(L, B)
    Lt = [_solve(B, [LB[i][j] for i in range(6)]) for j in range(4)]
    Lt = la.transpose(Lt)
    cp = list(la.charpoly(Lt)) + [Fraction(0)] * 5
    # x^4 + e1 x^2 with e0 = 0 (the J direction) and ell = -e1
    if cp[0] != 0 or cp[1] != 0 or cp[3] != 0:
        raise Rank1Error("unexpected spectrum at a rank-1 point")
    ell = -cp[2]
    if ell == 0:
        raise Rank1Error("transverse part is nilpotent")
    Pi = _ambient_poisson(params, coords)

    def omega(u, v):
        a = _solve(Pi, u)
        return sum((x * y for x, y in zip(a, v)), Fraction(0))

    return ell, _pairing_over_root(Lt, ell, lambda u, v: omega(_apply(B, u),
                                                                  _apply(B, v)))


def _apply(B, u):
    return [sum((b * x for b, x in zip(row, u)), Fraction(0)) for row in B]


def _pairing_over_root(L, ell, form):
    """beta with omega(v(s), v(-s)) = s * beta for an eigenvector v of L at s^2 = ell.

    Elements of Q[s]/(s^2 - ell) are pairs (a, b) = a + b s.
    """
    n = len(L)

    def mul(x, y):
        return (x[0] * y[0] + ell * x[1] * y[1], x[0] * y[1] + x[1] * y[0])

    # M = s I - L over Q[s]
    M = [[(-L[i][j], Fraction(int(i == j))) for j in range(n)] for i in range(n)]
    zero = (Fraction(0), Fraction(0))
    for j in range(n):
        col = []
        for i in range(n):
            minor = [[M[r][c] for c in range(n) if c != i] for r in range(n) if r != j]
            d = _det_pairs(minor, mul)
            col.append(d if (i + j) % 2 == 0 else (-d[0], -d[1]))
        if all(e == zero for e in col):
            continue
        conj = [(e[0], -e[1]) for e in col]
        # the form is bilinear over Q: expand in the two components
        re_u = [e[0] for e in col]
        im_u = [e[1] for e in col]
        re_v = [e[0] for e in conj]
        im_v = [e[1] for e in conj]
        a = form(re_u, re_v) + ell * form(im_u, im_v)
        b = form(re_u, im_v) + form(im_u, re_v)
        if a != 0:
            raise Rank1Error("pairing is not odd in s")
        if b != 0:
            return b
    raise Rank1Error("no usable eigenvector")


def _det_pairs(M, mul):
    n = len(M)
    if n == 1:
        return M[0][0]
    total = (Fraction(0), Fraction(0))
    for j in range(n):
        if M[0][j] == (0, 0):
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        d = mul(M[0][j], _det_pairs(minor, mul))
        if j % 2:
            d = (-d[0], -d[1])
        total = (total[0] + d[0], total[1] + d[1])
    return total


def transverse_class(ell, beta, ctx: PadicContext) -> tuple:
    """(class of ell, norm-residue sign) for the transverse block."""
    l0 = square_class(ell, ctx)
    if l0 == 1 or hilbert_symbol(-1, l0, ctx) == -1:
        return (l0, 0)
    r, _ = sqrt_approx(ell / l0, ctx, 14)
    return (l0, 1 if dsq_contains_base(-l0, beta * r, ctx) else -1)


def model_transverse_table(p: int) -> dict:
    """(class, sign) -> c' for the models x^2 + c' xi^2 with {x, xi} = 1."""
    ctx = PadicContext(p)
    out = {}
    Pi = [[Fraction(0), Fraction(1)], [Fraction(-1), Fraction(0)]]
    for cp in xp_set(p):
        hess = [[Fraction(2), Fraction(0)], [Fraction(0), 2 * cp]]
        L = la.mat_mul(Pi, hess)
        ell = -la.det(L)

        def form(u, v):
            a = _solve(Pi, u)
            return sum((x * y for x, y in zip(a, v)), Fraction(0))

        beta = _pairing_over_root(L, ell, form)
        key = transverse_class(ell, beta, ctx)
        if key in out:
            raise Rank1Error(f"models {out[key]} and {cp} are not separated")
        out[key] = cp
    return out


def classify_rank1_oracle(params: SystemParams, pt: Rank1Point) -> Fraction:
    """c' from the transverse linearised flow at an exact point."""
    if not pt.exact:
        raise Rank1Error("the oracle needs exact coordinates")
    ell, beta = transverse_data(params, pt.coords, pt.multiplier)
    key = transverse_class(ell, beta, params.ctx)
    table = model_transverse_table(params.p)
    if key not in table:
        raise Rank1Error(f"no model x^2 + c' xi^2 has invariants {key}")
    return table[key]


def rational_generic_sample(p: int, uv, t, m, sign: int = 1, R1=1):
    """Parameters and multiplier whose generic rank-1 point has a rational
    witness on the first sphere at stereographic(u, v).

    Returns (params, c, (x1, y1)) or None when the construction leaves the
    parameter set.
    """
    sp = stereographic(*uv)
    x1, y1, z1 = sp.x, sp.y, sp.z
    t, m = Q(t), Q(m)
    qq = x1 * x1 + y1 * y1
    if qq == 0 or m == 0 or t == 0:
        return None
    rho = (m + qq / m) / 2
    w = (m - qq / m) / 2
    if rho == 0:
        return None
    c = 1 - t - t / rho
    if c == 0:
        return None
    A = 1 / t - t / (1 - t - c) ** 2
    if A == 0:
        return None
    u = (z1 + sign * w) / A
    if u == 0:
        return None
    k = u / c
    try:
        params = make_params(p, t, R1, k * Q(R1))
    except ValueError:
        return None
    return params, c, (x1, y1)
