"""Normal forms of the rank-0 critical points P, Q, S, T.

Two independent routes:

classify_lemma  dispatches on region, residue class of p and square classes
                of k, k*z1 or Delta, following the closed-form case analysis.
classify_oracle never looks at regions.  It takes a regular element X of the
                Hessian pencil, computes exact invariants of the Cartan
                subalgebra it spans (eigenvalue square classes plus a
                norm-residue invariant of the eigenvector pairing), and
                matches them against the same invariants of every
                candidate model form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
import random

from . import linalg as la
from .cam_system import (
    CRITICAL_POINTS,
    Region,
    SystemParams,
    char_quadratic,
    critical_point,
    delta,
    degenerate_t_values,
    hessians,
    make_params,
    region,
)
from .normal_forms import (
    OMEGA0,
    R3,
    I3,
    NormalForm,
    candidate_forms,
    class1,
    class2,
    class3,
    expand_normal_form,
    hessian4,
)
from .padic_core import (
    INF,
    PadicContext,
    Q,
    dsq_contains_base,
    hilbert_symbol,
    is_square,
    ord_p,
    smallest_nonresidue,
    sqrt_approx,
    square_class,
    square_class_reps,
)
from .quad_ext import ExtField, approx_plus_sqrt, ext_ord


class ClassificationError(RuntimeError):
    """The oracle could not match the invariants to a single model."""


@dataclass(frozen=True)
class CriticalPoint:
    tag: str

    def __post_init__(self):
        if self.tag not in CRITICAL_POINTS:
            raise ValueError(f"unknown critical point {self.tag!r}")

    @property
    def z1(self) -> int:
        return CRITICAL_POINTS[self.tag][0]

    @property
    def z2(self) -> int:
        return CRITICAL_POINTS[self.tag][1]

    @property
    def coords(self) -> tuple:
        return critical_point(self.tag).coords


def as_point(point) -> CriticalPoint:
    return point if isinstance(point, CriticalPoint) else CriticalPoint(str(point))


def _fmt(v):
    if v is None:
        return None
    if v == INF:
        return "inf"
    if isinstance(v, (Fraction, int)):
        return str(v)
    if isinstance(v, tuple):
        return [_fmt(x) for x in v]
    return v


@dataclass
class ClassifierTrace:
    method: str
    point: str
    region: str
    steps: list = field(default_factory=list)
    eigen: dict | None = None
    degenerate: bool = False

    def note(self, test: str, value=None, outcome=None):
        self.steps.append({"test": test, "value": _fmt(value), "outcome": _fmt(outcome)})

    def to_json(self) -> dict:
        return {"method": self.method, "point": self.point, "region": self.region,
                "degenerate": self.degenerate, "eigen": self.eigen, "steps": self.steps}


# --- lemma route -----------------------------------------------------------

def _branch(v, ctx) -> str:
    """One of square / even / psquare / odd for a nonzero rational."""
    c = square_class(v, ctx)
    if c == 1:
        return "square"
    if ord_p(v, ctx) % 2 == 0:
        return "even"
    return "psquare" if c == ctx.p else "odd"


def _parity_pair(params: SystemParams, trace: ClassifierTrace) -> NormalForm:
    p = params.p
    if p % 4 != 3:
        trace.note("p mod 4", p % 4 if p != 2 else 2, "(1,1)")
        return class1(p, 1, 1)
    cs = []
    for name, R in (("R1", params.R1), ("R2", params.R2)):
        o = ord_p(R, params.ctx)
        c = 1 if o % 2 == 0 else p * p
        trace.note(f"ord({name}) parity", o, c)
        cs.append(c)
    return class1(p, *cs)


def classify_lemma(params: SystemParams, point) -> tuple[NormalForm, ClassifierTrace]:
    pt = as_point(point)
    p, ctx = params.p, params.ctx
    reg = region(params)
    trace = ClassifierTrace("lemma", pt.tag, reg.value)
    cq = char_quadratic(params, pt.z1, pt.z2)
    trace.eigen = cq.to_json()

    if params.t in (0, 1):
        trace.note("t in {0,1}", params.t, "parity rule")
        return _parity_pair(params, trace), trace
    if pt.z2 == 1 or reg is Region.OUTER:
        trace.note("z2 == 1 or outer region", (pt.z2, reg.value), "parity rule")
        return _parity_pair(params, trace), trace

    k, z1 = params.k, pt.z1
    if reg is Region.INNER:
        key = k if p % 4 == 1 else k * z1
        key_name = "k" if p % 4 == 1 else "k*z1"
        b = 0
    else:
        key = delta(k, params.t, z1)
        key_name = "Delta"
        b = 1
        if key == 0:
            trace.degenerate = True
            nf = R3 if p % 4 == 1 else I3(-1)
            trace.note("Delta == 0", 0, str(nf))
            return nf, trace
    br = _branch(key, ctx)
    trace.note(f"square class of {key_name}", square_class(key, ctx), br)

    if p % 4 == 1:
        c0 = smallest_nonresidue(p)
        nf = {"square": class1(p, 1, 1), "even": class2(c0),
              "psquare": class2(p), "odd": class2(c0 * p)}[br]
        return nf, trace
    if br == "square":
        return class2(-1), trace
    if br == "even":
        if reg is Region.INNER:
            o = ord_p(params.R2, ctx)
            trace.note("ord(R2) parity", o, o % 2 == 0)
            even = o % 2 == 0
        else:
            o = ord_p(params.R1 * params.R2 * key, ctx)
            trace.note("ord(R1 R2 Delta) mod 4", o, o % 4 == 0)
            even = o % 4 == 0
        return (class1(p, 1, 1) if even else class1(p, p * p, p * p)), trace
    c = -p if br == "psquare" else p
    return class3(c, -1, 0, 1, b), trace


# --- oracle route ----------------------------------------------------------

BASE_PENCIL = ((0, 1), (1, 0), (1, 1), (1, -1), (1, 2), (2, 1), (1, -2),
               (2, -1), (1, 3), (3, 1), (2, 3), (3, -2), (1, 5), (5, 2))
PENCIL_SIZE = 12


def pencil_directions(extra=()) -> list[tuple[Fraction, Fraction]]:
    """12 pairwise non-proportional (a1, a2), the extra ones first."""
    out = []
    for a1, a2 in list(extra) + list(BASE_PENCIL):
        a1, a2 = Q(a1), Q(a2)
        if a1 == 0 and a2 == 0:
            continue
        if any(a1 * b2 == a2 * b1 for b1, b2 in out):
            continue
        out.append((a1, a2))
        if len(out) == PENCIL_SIZE:
            break
    return out


@dataclass(frozen=True)
class PencilElement:
    a: tuple
    X: list
    e1: Fraction
    e0: Fraction

    @property
    def disc(self) -> Fraction:
        return self.e1 * self.e1 - 4 * self.e0

    @property
    def regular(self) -> bool:
        return self.e0 != 0 and self.disc != 0


def pencil_element(MA, MB, Omega_inv, a) -> PencilElement:
    M = la.mat_add(la.mat_scale(a[0], MA), la.mat_scale(a[1], MB))
    X = la.mat_mul(Omega_inv, M)
    cp = list(la.charpoly(X)) + [Fraction(0)] * 5
    if cp[1] or cp[3]:
        raise ClassificationError("characteristic polynomial is not even")
    return PencilElement(a, X, cp[2], cp[0])


_COLUMN_MIXES = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1),
                 (1, 0, 1, 0), (1, 1, 1, 1), (1, 2, 3, 5), (3, -1, 2, 7))


def _pairing_poly(X, Omega, e1, e0):
    """y(x) = v(x)^T Omega v(-x) mod charpoly, for an eigenvector v(x).

    v is a combination of adjugate columns of xI - X.  Returns (u, w) with
    y = x (u + w x^2), for the first combination making y invertible in
    Q[x]/charpoly, i.e. nonzero at every root.
    """
    chi = (e0, Fraction(0), e1, Fraction(0), Fraction(1))
    Mx = la.char_matrix(X)
    cols = [[la.pmod(c, chi) for c in la.adjugate_column(Mx, j)] for j in range(4)]
    for mix in _COLUMN_MIXES:
        v = [()] * 4
        for c, col in zip(mix, cols):
            if c:
                v = [la.padd(a, la.pscale(Fraction(c), b)) for a, b in zip(v, col)]
        y = ()
        for i in range(4):
            for k in range(4):
                if Omega[i][k]:
                    y = la.padd(y, la.pscale(Omega[i][k], la.pmul(v[i], la.pflip(v[k]))))
        y = list(la.pmod(y, chi)) + [Fraction(0)] * 4
        if y[0] or y[2]:
            raise ClassificationError("pairing is not odd")
        u, w = y[1], y[3]
        if u * u - e1 * u * w + e0 * w * w != 0:
            return u, w
    raise ClassificationError("no eigenvector combination gives an invertible pairing")


def cartan_signature(el: PencilElement, Omega, ctx: PadicContext,
                     trace: ClassifierTrace | None = None) -> tuple:
    """Invariants of the Cartan subalgebra containing the regular element."""
    p = ctx.p
    e1, e0, disc = el.e1, el.e0, el.disc
    u, w = _pairing_poly(el.X, Omega, e1, e0)
    note = trace.note if trace else (lambda *a, **k: None)
    note("charpoly x^4 + e1 x^2 + e0", (e1, e0))
    note("pairing y = x(u + w x^2)", (u, w))

    if is_square(disc, ctx):
        note("disc square class", square_class(disc, ctx), "split: class 1")
        blocks = []
        for sgn in (1, -1):
            ell = approx_plus_sqrt(-e1 / 2, Fraction(sgn, 2), disc, ctx, digits=12)
            beta = approx_plus_sqrt(u - w * e1 / 2, Fraction(sgn * 1, 2) * w, disc, ctx,
                                    digits=12)
            l0 = square_class(ell, ctx)
            if l0 == 1 or hilbert_symbol(-1, l0, ctx) == -1:
                h = 0
            else:
                r, _ = sqrt_approx(ell / l0, ctx, 14)
                inside = dsq_contains_base(-l0, beta * r, ctx)
                note(f"beta*r in DSq(-{l0})", beta * r, inside)
                h = 1 if inside else -1
            note("block eigenvalue^2 class", l0, h)
            blocks.append((l0, h))
        return ("1", tuple(sorted(blocks)))

    dclass = square_class(disc, ctx)
    note("disc square class", dclass, "nonsplit")
    if is_square(e0, ctx):
        for sgn in (1, -1):
            val = approx_plus_sqrt(-e1, 2 * sgn, e0, ctx, digits=12)
            if is_square(val, ctx):
                note("eigenvalue^2 is a square over Qp(sqrt disc)", val, "class 2")
                return ("2", dclass)
    F = ExtField(ctx, disc)
    ell = F(-e1 / 2, Fraction(1, 2))
    y0 = F(u, 0) + w * ell
    e = 2 if ord_p(disc, ctx) % 2 else 1
    vl = int(e * ext_ord(ell))
    inv = None
    if p != 2 and vl % 2 == 0:
        ord_y = ext_ord(ell) / 2 + ext_ord(y0)
        inv = ord_y % Fraction(2, e)
        note("ord(y) mod 2/e", ord_y, inv)
    sig = ("3", dclass, square_class(e0, ctx), vl % 2, inv)
    note("class 3 invariants", sig[1:])
    return sig


def degenerate_signature(elements, ctx: PadicContext) -> tuple:
    for el in elements:
        if el.e0 != 0 and el.disc == 0:
            return ("D", square_class(-el.e1 / 2, ctx))
    return ("D0",)


def _signature_from_hessians(MA, MB, Omega, ctx, extra=(), trace=None):
    Oinv = la.inverse(Omega)
    elements = []
    for a in pencil_directions(extra):
        el = pencil_element(MA, MB, Oinv, a)
        elements.append(el)
        if el.regular:
            if trace:
                trace.note("regular pencil element (a1, a2)", a)
            return cartan_signature(el, Omega, ctx, trace), el
    if trace:
        trace.note("all pencil elements repeated", len(elements), "degenerate")
    return degenerate_signature(elements, ctx), None


@lru_cache(maxsize=None)
def model_signatures(p: int) -> dict:
    """Signature -> model normal form, for every candidate at p."""
    ctx = PadicContext(p)
    table = {}
    for nf in candidate_forms(p):
        g1, g2 = expand_normal_form(nf)
        sig, _ = _signature_from_hessians(hessian4(g1), hessian4(g2), OMEGA0, ctx)
        if sig in table:
            raise ClassificationError(f"models {table[sig]} and {nf} share invariants {sig}")
        table[sig] = nf
    return table


def classify_oracle(params: SystemParams, point) -> tuple[NormalForm, ClassifierTrace]:
    pt = as_point(point)
    ctx = params.ctx
    trace = ClassifierTrace("oracle", pt.tag, region(params).value)
    h = hessians(params, pt.z1, pt.z2)
    trace.eigen = char_quadratic(params, pt.z1, pt.z2).to_json()
    extra = [(0, 1), (-params.t * pt.z1, 1)]
    sig, el = _signature_from_hessians(h.M_J, h.M_H, h.Omega, ctx, extra, trace)
    trace.degenerate = el is None
    table = model_signatures(params.p)
    if sig not in table:
        trace.note("signature", str(sig), "no model")
        raise ClassificationError(f"no candidate normal form has invariants {sig}")
    nf = table[sig]
    trace.note("signature", str(sig), str(nf))
    return nf, trace


def classify(params: SystemParams, point, method: str = "lemma"):
    if method == "lemma":
        return classify_lemma(params, point)
    if method == "oracle":
        return classify_oracle(params, point)
    raise ValueError(f"unknown method {method!r}")


# --- branch-covering parameter families ------------------------------------

def _limit_t_values(p: int, m: int, count: int) -> list[Fraction]:
    """t in Zp with ord(2t - 1) = m."""
    out = []
    for w in range(1, p * 4):
        if w % p == 0:
            continue
        out.append(Fraction(1 + w * p ** m, 2))
        if len(out) == count:
            break
    return out


def constructed_params(p: int, point, per_family: int = 4, minimum: int = 0,
                       seed: int = 0) -> list[SystemParams]:
    """Parameters hitting every branch of the case analysis at a point.

    Regions are reached by fixing ord(2t-1) and ord(k); square classes of
    k (or k*z1) by multiplying class representatives by even powers of p;
    parities of ord(R_i) by R1 in {1, p}.  With minimum > 0 the list is
    padded with seeded random tuples until it has that many entries.
    """
    pt = as_point(point)
    z1 = pt.z1
    reps = square_class_reps(p)
    out = []
    seen = set()

    def add(t, k, R1):
        t, k, R1 = Q(t), Q(k), Q(R1)
        key = (t, k, R1)
        if key in seen:
            return
        seen.add(key)
        try:
            out.append(make_params(p, t, R1, k * R1))
        except ValueError:
            pass

    # outer region, including t = 0 and t = 1
    for t in (0, 1, 2, 3, Fraction(1, 3) if p != 3 else 5)[:per_family + 1]:
        for j in (1, 2, 3):
            for R1 in (1, p):
                add(t, Fraction(1, p ** j) * (1 if j % 2 else reps[1]), R1)
    if p == 2:
        for c in reps:
            for t in (2, 3, 5):
                add(t, c / 8, 1)
        _pad(p, out, add, minimum, seed)
        return out
    # inner region: t = (1 + p^m)/2 with 2m > -ord(k), plus t = 1/2
    for c in reps:
        for j in (1, 2):
            k = z1 * c / p ** (2 * j)
            ordk = ord_p(k, p)
            for m in (-ordk // 2 + 1, -ordk // 2 + 2):
                for R1 in (1, p):
                    add(Fraction(1 + p ** m, 2), k, R1)
                    add(Fraction(1 - 3 * p ** m, 2), k, R1)
            add(Fraction(1, 2), k, 1)
    # limit region: ord(k) = -2m, ord(2t-1) = m; search units for Delta classes
    for m in (1, 2):
        for u in range(1, 3 * p):
            if u % p == 0:
                continue
            for s in (1, -1):
                k = Fraction(s * u, p ** (2 * m))
                for t in _limit_t_values(p, m, per_family):
                    for R1 in (1, p):
                        add(t, k, R1)
        # exact degenerate values when k z1 is a rational square
        for s in (1, 2, 3, 4):
            if s % p == 0:
                continue
            k = Fraction(z1 * s * s, p ** (2 * m))
            for t in degenerate_t_values(PadicContext(p), k, z1):
                for R1 in (1, p):
                    add(t, k, R1)
    _pad(p, out, add, minimum, seed)
    return out


def _pad(p: int, out: list, add, minimum: int, seed: int) -> None:
    rng = random.Random(seed * 1009 + p)
    while len(out) < minimum:
        unit = lambda: Fraction(rng.choice([v for v in range(-4 * p, 4 * p + 1) if v % p]))
        j = rng.randint(1, 6)
        k = unit() / rng.choice([1, 3, 5, 7, 11]) * Fraction(1, p ** j)
        shape = rng.randrange(3)
        if shape == 0:  # anywhere in Z_p
            t = Fraction(rng.randint(-p ** 4, p ** 4), rng.choice([v for v in (1, 3, 5, 7) if v % p]))
        else:  # near t = 1/2, so inner and limit regions occur
            m = rng.randint(0, j + 2)
            t = (1 + unit() * Fraction(p) ** m) / 2
        R1 = unit() * Fraction(p) ** rng.randint(0, 3)
        add(t, k, R1)


def enumerate_forms(p: int, point, sweep=None, method: str = "lemma") -> set:
    """Distinct normal forms over a parameter grid (constructed by default)."""
    grid = constructed_params(p, point) if sweep is None else list(sweep)
    forms = set()
    for params in grid:
        nf, _ = classify(params, point, method)
        forms.add(nf)
    return forms


def points() -> list[str]:
    return list(CRITICAL_POINTS)
