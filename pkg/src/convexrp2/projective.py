"""Flags in RP^2 and their closed-form projective invariants.

A flag is a point of the projective plane together with a line through it.
All invariants here (triple ratio, edge functions, cross ratios, harmonic
cross ratio) are ratios of 3x3 determinants in which every scale choice
cancels, so flags are stored as unit (point, line-covector) pairs and no
basis ever needs to be fixed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    DegenerateCrossRatio,
    DegenerateSpan,
    NonGenericFlags,
)
from .linalg3 import (
    Mat3,
    Vec3,
    adjugate3,
    cross3,
    det3,
    dot3,
    matvec,
    norm3,
    scale3,
    unit3,
    vecmat,
)

# A determinant of unit vectors below this is treated as zero.  All
# genericity tests normalize their inputs first so the threshold is
# scale-free.
GENERIC_TOL = 1e-10

# Magnitude at which invariant evaluation switches to the log domain.
LOG_DOMAIN_CUTOFF = 1e150

# Fixed probe directions used to condition pencil parametrizations; chosen
# once, irrational-ish so they are generic against the rational fixtures.
_PROBES: tuple[Vec3, ...] = (
    (0.5403023058681398, 0.8414709848078965, 0.30102999566398120),
    (-0.70710678118654760, 0.5877852522924731, 0.42261826174069944),
    (0.30901699437494745, -0.9510565162951535, 0.80901699437494745),
    (1.0, 0.0, 0.0),
    (0.0, 1.0, 0.0),
    (0.0, 0.0, 1.0),
)


@dataclass(frozen=True)
class Flag:
    """Incident (point, line) pair, both stored as unit 3-vectors.

    ``line`` is the covector whose kernel is the projective line.
    """

    point: Vec3
    line: Vec3

    def __post_init__(self):
        p, l = self.point, self.line
        np_, nl = norm3(p), norm3(l)
        if np_ == 0.0 or nl == 0.0:
            raise ValueError("flag components must be nonzero")
        p = scale3(p, 1.0 / np_)
        l = scale3(l, 1.0 / nl)
        v = dot3(l, p)
        if abs(v) > 1e-4:
            raise ValueError("flag incidence violated: <line, point> = %.3e" % v)
        if v != 0.0:
            # transport through ill-conditioned words leaves a small
            # incidence defect; project it out instead of carrying it
            l = unit3((l[0] - v * p[0], l[1] - v * p[1], l[2] - v * p[2]))
        object.__setattr__(self, "point", p)
        object.__setattr__(self, "line", l)


def flag_basis(f: Flag) -> tuple[Vec3, Vec3, Vec3]:
    """Complete a flag to a basis (f1, f2, f3): f1 spans the point,
    (f1, f2) span the line, det > 0."""
    f1 = f.point
    f2 = unit3(cross3(f.line, f1))
    f3 = f.line if det3(f1, f2, f.line) > 0 else scale3(f.line, -1.0)
    return f1, f2, f3


def apply_matrix(m: Mat3, f: Flag) -> Flag:
    """Image flag under a projective transformation.

    Points push forward by m, line covectors by the adjugate (the inverse
    transpose up to the determinant, which is projectively irrelevant).
    """
    return Flag(matvec(m, f.point), vecmat(f.line, adjugate3(m)))


def wedge2(u: Vec3, v: Vec3) -> Vec3:
    """Covector annihilating span(u, v); bilinear and antisymmetric."""
    w = cross3(u, v)
    if norm3(w) <= GENERIC_TOL * norm3(u) * norm3(v):
        raise DegenerateSpan("vectors are numerically parallel")
    return w


def join(p: Vec3, q: Vec3) -> Vec3:
    """Line through two points (alias of wedge2 with the dual reading)."""
    return wedge2(p, q)


def meet(l: Vec3, m: Vec3) -> Vec3:
    """Intersection point of two lines."""
    return wedge2(l, m)


def _checked_factors(factors: Sequence[float], label: str) -> None:
    for x in factors:
        if abs(x) <= GENERIC_TOL:
            raise NonGenericFlags(f"{label}: vanishing determinant factor")


def _ratio_of_products(num: Sequence[float], den: Sequence[float]) -> float:
    # Go through logs when any factor leaves the comfortable float range;
    # holonomy words of length ~100 do produce such factors upstream.
    big = any(abs(x) > LOG_DOMAIN_CUTOFF or abs(x) < 1.0 / LOG_DOMAIN_CUTOFF
              for x in (*num, *den))
    if not big:
        r = 1.0
        for x in num:
            r *= x
        for x in den:
            r /= x
        return r
    sign = 1.0
    acc = 0.0
    for x in num:
        sign = math.copysign(sign, x)
        acc += math.log(abs(x))
    for x in den:
        sign = math.copysign(sign, x)
        acc -= math.log(abs(x))
    return sign * math.exp(acc)


def triple_ratio(f: Flag, g: Flag, h: Flag) -> float:
    """Triple ratio of a generic flag triple.

    Invariant under simultaneous projective transformation, cyclic in its
    arguments, and sent to its reciprocal by swapping any two flags.
    Equals 1 exactly on triples tangent to a conic.
    """
    n = (dot3(f.line, g.point), dot3(g.line, h.point), dot3(h.line, f.point))
    d = (dot3(f.line, h.point), dot3(g.line, f.point), dot3(h.line, g.point))
    _checked_factors((*n, *d), "triple_ratio")
    return _ratio_of_products(n, d)


def log_triple_ratio(f: Flag, g: Flag, h: Flag) -> float:
    """log of the triple ratio; raises NonGenericFlags if the ratio is not
    positive (it is positive on every positive configuration)."""
    t = triple_ratio(f, g, h)
    if t <= 0.0:
        raise NonGenericFlags("triple ratio is not positive")
    return math.log(t)


def edge_function(i: int, x: Flag, y: Flag, z: Flag, w: Flag) -> float:
    """Edge function D_i of a flag quadruple along the diagonal (x, y).

    Slot convention: the quadrilateral in cyclic order is (x, w, y, z), so
    z is the third vertex of the triangle left of x->y and w the third
    vertex right of it.  D_1(X,Y,Z,W) = D_2(Y,X,W,Z) holds identically, and
    both are negative on positive configurations.
    """
    if i == 1:
        n = (dot3(x.line, z.point), det3(x.point, y.point, w.point))
        d = (dot3(x.line, w.point), det3(x.point, y.point, z.point))
    elif i == 2:
        n = (dot3(y.line, w.point), det3(x.point, y.point, z.point))
        d = (dot3(y.line, z.point), det3(x.point, y.point, w.point))
    else:
        raise ValueError("edge function index must be 1 or 2")
    _checked_factors((*n, *d), "edge_function")
    return _ratio_of_products(n, d)


# ---------------------------------------------------------------------------
# cross ratios
# ---------------------------------------------------------------------------

# Projective scalars are (u, v) pairs meaning v/u, with infinity = (0, 1).
ProjScalar = tuple[float, float]


def _as_pair(x) -> ProjScalar:
    if isinstance(x, tuple):
        return x
    if math.isinf(x):
        return (0.0, 1.0 if x > 0 else -1.0)
    return (1.0, float(x))


def _pd(a: ProjScalar, b: ProjScalar) -> float:
    # numerator of the affine difference (v_a/u_a - v_b/u_b)
    return a[1] * b[0] - b[1] * a[0]


def cross_ratio(alpha, beta, gamma, delta) -> float:
    """CR(a,b,c,d) = (a-c)/(a-d) * (b-d)/(b-c).

    Arguments may be floats, math.inf, or (u, v) pairs representing v/u;
    the pair form makes the infinity conventions exact instead of limiting.
    CR(0,1,inf,x) = (x-1)/x under this convention.
    """
    a, b, c, d = (_as_pair(t) for t in (alpha, beta, gamma, delta))
    n1, n2 = _pd(a, c), _pd(b, d)
    d1, d2 = _pd(a, d), _pd(b, c)
    scale = max(abs(v) for p in (a, b, c, d) for v in p) ** 2
    if abs(d1) <= GENERIC_TOL * scale or abs(d2) <= GENERIC_TOL * scale:
        raise DegenerateCrossRatio("coincident forbidden pair in cross ratio")
    return (n1 * n2) / (d1 * d2)


def collinear_parameters(points: Sequence[Vec3], base0: Vec3, base1: Vec3
                         ) -> list[ProjScalar]:
    """Projective parameters of collinear points w.r.t. a base pair.

    Each p = u*base0 + v*base1; returns the (u, v) pairs.  The two base
    points get (1,0) and (0,1).
    """
    w0 = cross3(base1, base0)
    n0 = dot3(w0, w0)
    out = []
    for p in points:
        # p x base1 = u (base0 x base1); project on the common direction
        u = dot3(cross3(p, base1), cross3(base0, base1))
        v = dot3(cross3(p, base0), cross3(base1, base0))
        if u == 0.0 and v == 0.0:
            raise NonGenericFlags("point not on the base line")
        out.append((u / n0, v / n0))
    return out


def cross_ratio_collinear(p1: Vec3, p2: Vec3, p3: Vec3, p4: Vec3) -> float:
    """Cross ratio of four collinear points, same slot convention as
    cross_ratio."""
    params = collinear_parameters([p1, p2, p3, p4], p1, p3)
    return cross_ratio(*params)


# ---------------------------------------------------------------------------
# pencils of lines
# ---------------------------------------------------------------------------


def _pencil_frame(p: Vec3, lines: Sequence[Vec3]):
    """Basis (P, Q) of the pencil of lines through p plus a covector m with
    m(p) != 0, all chosen from fixed probes for conditioning."""
    best = None
    for r in _PROBES:
        # probe point must not be on the pencil base point's "antipode"
        c = cross3(p, r)
        n = norm3(c)
        if best is None or n > best[0]:
            best = (n, r)
    r1 = best[1]
    p_line = unit3(cross3(p, r1))
    # second basis line from the probe giving the most independent line
    best2 = None
    for r in _PROBES:
        try:
            q_line = cross3(p, r)
        except Exception:  # pragma: no cover
            continue
        n = norm3(q_line)
        if n < 1e-12:
            continue
        q_line = scale3(q_line, 1.0 / n)
        indep = norm3(cross3(p_line, q_line))
        if best2 is None or indep > best2[0]:
            best2 = (indep, q_line)
    q_line = best2[1]
    # covector with m(p) != 0
    m = max(_PROBES, key=lambda r: abs(dot3(r, p)))
    denom = det3(p_line, q_line, m)
    if abs(denom) < 1e-14:
        raise NonGenericFlags("pencil frame is degenerate")
    return p_line, q_line, m, denom


def pencil_parameters(p: Vec3, lines: Sequence[Vec3]) -> list[ProjScalar]:
    """Projective parameters of lines through a common point p.

    Any projective parametrization of the pencil computes the same cross
    ratios; this one expands each line over a fixed basis pair of the
    pencil.
    """
    p_line, q_line, m, denom = _pencil_frame(p, lines)
    out = []
    for l in lines:
        u = det3(l, q_line, m) / denom
        v = det3(p_line, l, m) / denom
        if abs(u) < 1e-14 and abs(v) < 1e-14:
            raise NonGenericFlags("line does not lie in the pencil")
        out.append((u, v))
    return out


def cross_ratio_pencil(p: Vec3, l1: Vec3, l2: Vec3, l3: Vec3, l4: Vec3
                       ) -> float:
    """Cross ratio of four concurrent lines through p."""
    return cross_ratio(*pencil_parameters(p, [l1, l2, l3, l4]))


def solve_pencil_slot(p: Vec3, lines: Sequence[Vec3 | None], value: float
                      ) -> Vec3:
    """Find the line completing a pencil cross ratio.

    ``lines`` holds three known lines through p and exactly one None in the
    slot to be solved; ``value`` is the target CR of the full quadruple.
    The CR equation is linear-fractional in the unknown parameter, so the
    solution is unique (no branch choice).
    """
    missing = [i for i, l in enumerate(lines) if l is None]
    if len(missing) != 1:
        raise ValueError("exactly one pencil slot must be unknown")
    slot = missing[0]
    if slot not in (2, 3):
        raise ValueError("only the gamma and delta slots are solvable here")
    known = [l for l in lines if l is not None]
    p_line, q_line, m, denom = _pencil_frame(p, known)
    pars: list[ProjScalar | None] = []
    for l in lines:
        if l is None:
            pars.append(None)
            continue
        u = det3(l, q_line, m) / denom
        v = det3(p_line, l, m) / denom
        pars.append((u, v))
    c = value
    if slot == 3:
        a, b, g = pars[0], pars[1], pars[2]
        k, kp = _pd(a, g), _pd(b, g)
        u4 = k * b[0] - c * kp * a[0]
        v4 = k * b[1] - c * kp * a[1]
        sol = (u4, v4)
    else:
        a, b, d = pars[0], pars[1], pars[3]
        k2, k2p = _pd(b, d), _pd(a, d)
        u3 = a[0] * k2 - c * k2p * b[0]
        v3 = a[1] * k2 - c * k2p * b[1]
        sol = (u3, v3)
    line = (
        sol[0] * p_line[0] + sol[1] * q_line[0],
        sol[0] * p_line[1] + sol[1] * q_line[1],
        sol[0] * p_line[2] + sol[1] * q_line[2],
    )
    n = norm3(line)
    if n < 1e-14:
        raise NonGenericFlags("pencil solve degenerated")
    return scale3(line, 1.0 / n)


# ---------------------------------------------------------------------------
# harmonic cross ratio
# ---------------------------------------------------------------------------


def _tangency_conic(b: Flag, d: Flag, through: Vec3):
    """Symmetric matrix of the unique conic tangent to b.line at b.point,
    tangent to d.line at d.point, and passing through the given point."""
    lb, ld = b.line, d.line
    chord = join(b.point, d.point)
    lam = dot3(chord, through) ** 2
    mu = -dot3(lb, through) * dot3(ld, through)
    if abs(lam) <= GENERIC_TOL and abs(mu) <= GENERIC_TOL:
        raise NonGenericFlags("conic completion is degenerate")
    q = [[0.0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            q[i][j] = (
                lam * 0.5 * (lb[i] * ld[j] + lb[j] * ld[i])
                + mu * chord[i] * chord[j]
            )
    return tuple(tuple(row) for row in q)


def _conic_apply(q, p: Vec3) -> float:
    return dot3(matvec(q, p), p)


def _conic_bilinear(q, p1: Vec3, p2: Vec3) -> float:
    return dot3(matvec(q, p1), p2)


def harmonic_cross_ratio(b: Flag, c: Flag, d: Flag) -> float:
    """Cross ratio of the harmonic quadruplet determined by (b, c, d).

    y is the meet of the tangent lines at b and d; the line through y and c
    recuts the tangency conic through (b, c, d) in a fourth point a, and
    x is where that line crosses the chord bd.  The value is
    |xc|/|ax| * |ay|/|cy|, equal to 1 on any conic (a, c; x, y is then a
    harmonic range).  Swapping b and d leaves it unchanged; exchanging the
    roles of a and c inverts it.
    """
    y = meet(b.line, d.line)
    line = join(y, c.point)
    chord = join(b.point, d.point)
    x = meet(line, chord)
    conic = _tangency_conic(b, d, c.point)
    # other intersection of `line` with the conic, in the (y, c) base
    qa = _conic_apply(conic, y)
    qb = 2.0 * _conic_bilinear(conic, y, c.point)
    if abs(qa) <= GENERIC_TOL * max(abs(qb), 1e-300):
        raise NonGenericFlags("harmonic construction degenerate: y on conic")
    a = (
        qb * y[0] - qa * c.point[0],
        qb * y[1] - qa * c.point[1],
        qb * y[2] - qa * c.point[2],
    )
    if norm3(a) < 1e-14:
        raise NonGenericFlags("harmonic fourth point degenerate")
    pars = collinear_parameters([x, y, c.point, a], y, c.point)
    return abs(cross_ratio(*pars))


def harmonic_fourth_flag(b: Flag, c: Flag, d: Flag) -> Flag:
    """The flag at the fourth harmonic point: the conic's own tangent there.

    Useful for symmetry tests: harmonic_cross_ratio(b, a_flag, d) is the
    reciprocal of harmonic_cross_ratio(b, c, d).
    """
    y = meet(b.line, d.line)
    conic = _tangency_conic(b, d, c.point)
    qa = _conic_apply(conic, y)
    qb = 2.0 * _conic_bilinear(conic, y, c.point)
    a = (
        qb * y[0] - qa * c.point[0],
        qb * y[1] - qa * c.point[1],
        qb * y[2] - qa * c.point[2],
    )
    tangent = matvec(conic, unit3(a))
    return Flag(a, tangent)


# ---------------------------------------------------------------------------
# genericity
# ---------------------------------------------------------------------------


def is_generic(flags: Sequence[Flag], tol: float = GENERIC_TOL) -> bool:
    """True iff every required direct-sum condition holds within tolerance.

    Pairwise: points distinct, and no point on the other flag's line.
    Triples: points not collinear.  Total function: never raises.
    """
    n = len(flags)
    if n < 2:
        return True
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if abs(dot3(flags[i].line, flags[j].point)) <= tol:
                return False
    for i in range(n):
        for j in range(i + 1, n):
            if norm3(cross3(flags[i].point, flags[j].point)) <= tol:
                return False
            for k in range(j + 1, n):
                if abs(det3(flags[i].point, flags[j].point,
                            flags[k].point)) <= tol:
                    return False
    return True


# ---------------------------------------------------------------------------
# conic fixtures (used throughout the tests as the Fuchsian locus model)
# ---------------------------------------------------------------------------


def conic_flag(t: float | None) -> Flag:
    """Tangent flag to the conic y^2 = xz at parameter t (None = infinity).

    Points (1, t, t^2) with tangent lines (t^2, -2t, 1); every triple of
    these has triple ratio exactly 1.
    """
    if t is None:
        return Flag((0.0, 0.0, 1.0), (1.0, 0.0, 0.0))
    return Flag((1.0, t, t * t), (t * t, -2.0 * t, 1.0))
