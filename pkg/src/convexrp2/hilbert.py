"""Hilbert metric, Finsler norms, Busemann density and areas on convex
domains approximated from limit sets.

The domain is carried as an angularly ordered list of boundary flags
(point + tangent line from the holonomy's fixed flags).  Between samples
the boundary is interpolated by the circumscribed tangent polygon, whose
vertices are intersections of consecutive tangents: second-order accurate
and free, since tangent data comes with every flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    NoConvergence,
    NonGenericFlags,
    NotLoxodromic,
    PointOutsideDomain,
    RegionOutsideDomain,
)
from .linalg3 import Vec3, cross3, det3, dot3, matvec, norm3, scale3, unit3
from .projective import Flag, GENERIC_TOL, apply_matrix, join, meet
from .holonomy import Representation, canonical_flag, torus_corner_flag
from . import words as W

EUCLIDEAN_UNIT_BALL_AREA = math.pi  # the density normalization constant


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


@dataclass
class ConvexDomain:
    """Angularly ordered boundary samples with tangents, in an affine
    chart where the domain is bounded.

    points: (n, 2) boundary sample coordinates
    tangents: (n, 3) affine tangent lines (a, b, c) with a x + b y + c = 0
    vertices: (n, 2) circumscribed tangent-polygon vertices; vertex i is
    the meet of tangents i and i+1, so the polygon edge lying on tangent
    line i connects vertex i-1 to vertex i.
    center: interior base point.
    """

    points: np.ndarray
    tangents: np.ndarray
    vertices: np.ndarray
    center: np.ndarray
    chart: tuple[Vec3, Vec3, Vec3]
    flags: list[Flag]

    @property
    def n(self) -> int:
        return len(self.points)


def _chart_coords(chart, p: Vec3) -> tuple[float, float]:
    r1, r2, linf = chart
    w = dot3(linf, p)
    if w == 0.0:
        raise PointOutsideDomain("point on the line at infinity")
    return dot3(r1, p) / w, dot3(r2, p) / w


def _chart_line(chart, l: Vec3) -> tuple[float, float, float]:
    # affine line coefficients: l(p) = 0 with p = x*B1 + y*B2 + B3 in the
    # basis dual to (r1, r2, linf)
    r1, r2, linf = chart
    m = np.array([r1, r2, linf], dtype=float)
    binv = np.linalg.inv(m)  # columns of binv are the dual basis vectors
    lv = np.array(l, dtype=float)
    coeffs = lv @ binv
    return float(coeffs[0]), float(coeffs[1]), float(coeffs[2])


def domain_from_flags(flags: list[Flag],
                      interior_point: Vec3 | None = None) -> ConvexDomain:
    """Build the chart, order the samples angularly, validate convexity
    and tangent support.

    ``interior_point`` (a projective interior point, e.g. the crossing of
    two axes of the holonomy) pins the chart; without it a chord-crossing
    candidate search is used.
    """
    if len(flags) < 5:
        raise NonGenericFlags("need at least 5 boundary flags")
    pts3 = [f.point for f in flags]
    if interior_point is not None:
        return _domain_with_center(flags, pts3, unit3(interior_point))
    n = len(flags)
    last_err: Exception | None = None
    for (i, j, k, l) in ((0, n // 2, n // 4, (3 * n) // 4),
                         (0, n // 3, n // 5, (4 * n) // 5),
                         (1, (2 * n) // 3, n // 6, (5 * n) // 6)):
        try:
            c0 = unit3(cross3(cross3(pts3[i], pts3[j]),
                              cross3(pts3[k], pts3[l])))
            dom = _domain_with_center(flags, pts3, c0)
            if dom.n >= max(5, int(0.5 * n)):
                return dom
        except Exception as exc:
            last_err = exc
    raise NonGenericFlags("no valid chart found: %s" % last_err)


def _domain_with_center(flags: list[Flag], pts3, c0: Vec3) -> ConvexDomain:
    # least-squares conic through the samples fixes the line at infinity
    # as the polar of the interior point
    a = np.array([[p[0] * p[0], p[1] * p[1], p[2] * p[2],
                   p[0] * p[1], p[0] * p[2], p[1] * p[2]] for p in pts3])
    _, _, vt = np.linalg.svd(a, full_matrices=False)
    q = vt[-1]
    qm = ((q[0], q[3] / 2, q[4] / 2),
          (q[3] / 2, q[1], q[5] / 2),
          (q[4] / 2, q[5] / 2, q[2]))
    linf = matvec(qm, c0)
    if abs(dot3(linf, c0)) < 1e-14:
        raise NonGenericFlags("degenerate polar chart")
    # sign-align so every sample has positive weight
    if dot3(linf, c0) < 0:
        linf = scale3(linf, -1.0)
    linf = unit3(linf)
    probes = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))
    r1, r2 = None, None
    for rr in probes:
        cand = cross3(linf, rr)
        if norm3(cand) > 0.3:
            if r1 is None:
                r1 = unit3(cand)
            else:
                r2 = unit3(cross3(linf, r1))
                break
    chart = (r1, r2, linf)
    weights = [dot3(linf, unit3(p)) for p in pts3]
    if min(weights) <= 0 < max(weights) and max(weights) > 0:
        signs = [1.0 if w > 0 else -1.0 for w in weights]
    else:
        signs = [1.0] * len(pts3)
    coords = []
    for f, s in zip(flags, signs):
        p = scale3(f.point, s)
        if dot3(linf, p) <= 0:
            raise NonGenericFlags("sample outside the affine chart")
        coords.append(_chart_coords(chart, p))
    cx, cy = _chart_coords(chart, c0)
    # flag extraction noise (~1e-9 of the projective scale) can push
    # ultra-close samples out of convex position; the convex hull keeps a
    # maximal convex subset, and the tangent polygon interpolates the rest
    kept = _hull_indices(np.array(coords))
    pts = np.array([coords[i] for i in kept])
    fl = [flags[i] for i in kept]
    tans = np.array([_chart_line(chart, f.line) for f in fl])
    # orient tangents so the center is on the positive side
    val = tans[:, 0] * cx + tans[:, 1] * cy + tans[:, 2]
    tans[val < 0] *= -1.0
    dom = ConvexDomain(pts, tans, np.empty((0, 2)), np.array([cx, cy]),
                       chart, fl)
    dom.vertices = _tangent_vertices(dom)
    _validate_convex(dom)
    return dom


def _hull_indices(coords: np.ndarray) -> list[int]:
    """Convex hull (monotone chain), anticlockwise, as indices."""
    order = np.lexsort((coords[:, 1], coords[:, 0]))

    def half(idx_iter):
        out: list[int] = []
        for i in idx_iter:
            while len(out) >= 2:
                o, a_ = coords[out[-2]], coords[out[-1]]
                cr = ((a_[0] - o[0]) * (coords[i][1] - o[1])
                      - (a_[1] - o[1]) * (coords[i][0] - o[0]))
                if cr <= 0:
                    out.pop()
                else:
                    break
            out.append(int(i))
        return out

    lower = half(order)
    upper = half(order[::-1])
    return lower[:-1] + upper[:-1]


def _tangent_vertices(dom: ConvexDomain) -> np.ndarray:
    """Boundary polygon nodes: the samples interleaved with the meets of
    consecutive tangents.

    A tangent meet is kept only when it is a proper outward bulge of
    bounded size; elsewhere the polygon follows the chord.  Edges through
    a kept meet are collinear with the tangent lines, so the polygon is
    convex up to rounding and second-order close to the true boundary.
    """
    t1 = dom.tangents
    t2 = np.roll(dom.tangents, -1, axis=0)
    d = t1[:, 0] * t2[:, 1] - t1[:, 1] * t2[:, 0]
    ok = np.abs(d) > 1e-14
    dd = np.where(ok, d, 1.0)
    x = (-t1[:, 2] * t2[:, 1] + t2[:, 2] * t1[:, 1]) / dd
    y = (-t1[:, 0] * t2[:, 2] + t2[:, 0] * t1[:, 2]) / dd
    p1 = dom.points
    p2 = np.roll(dom.points, -1, axis=0)
    e = p2 - p1
    gap = np.hypot(e[:, 0], e[:, 1])
    mid = 0.5 * (p1 + p2)
    off = np.hypot(x - mid[:, 0], y - mid[:, 1])
    # outward for an anticlockwise polygon = right of the directed chord,
    # and the meet must project strictly inside the chord so the node
    # sequence stays monotone
    side = e[:, 0] * (y - p1[:, 1]) - e[:, 1] * (x - p1[:, 0])
    proj = ((x - p1[:, 0]) * e[:, 0] + (y - p1[:, 1]) * e[:, 1]) \
        / np.maximum(gap * gap, 1e-300)
    ok &= (off <= 4.0 * gap + 1e-12) & (side < 0)
    ok &= (proj > 0.02) & (proj < 0.98)
    nodes: list[tuple[float, float]] = []
    for i in range(len(p1)):
        nodes.append((p1[i, 0], p1[i, 1]))
        if ok[i]:
            nodes.append((float(x[i]), float(y[i])))
    arr = np.array(nodes)
    # drop sub-resolution nodes whose edge direction is pure noise
    span = float(np.max(arr.max(axis=0) - arr.min(axis=0)))
    keep = [0]
    for i in range(1, len(arr)):
        d = arr[i] - arr[keep[-1]]
        if math.hypot(d[0], d[1]) > 1e-8 * span:
            keep.append(i)
    if len(keep) > 1:
        d = arr[keep[0]] - arr[keep[-1]]
        if math.hypot(d[0], d[1]) <= 1e-8 * span:
            keep.pop()
    return arr[keep]


def _validate_convex(dom: ConvexDomain) -> None:
    # the sample points must be in strictly convex position; the tangent
    # polygon may dip inward by rounding noise at clamped vertices
    v = dom.points
    e1 = np.roll(v, -1, axis=0) - v
    e2 = np.roll(e1, -1, axis=0)
    crosses = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    # turn angles, not raw cross products: cusp-adjacent edges are tiny
    scale = np.hypot(e1[:, 0], e1[:, 1]) * np.hypot(e2[:, 0], e2[:, 1])
    turn = crosses / np.maximum(scale, 1e-300)
    pos, neg = np.sum(turn > 1e-9), np.sum(turn < -1e-9)
    if pos and neg:
        raise NonGenericFlags("boundary samples are not convex in the chart")


def limit_set(rep: Representation, depth: int) -> ConvexDomain:
    """Attracting fixed flags of all reduced words up to the given length
    (plus the puncture orbit on the torus), deduplicated angularly.

    Approximates the invariant convex domain of a positive representation.
    """
    flags: list[Flag] = []
    corner = None
    if rep.surface.kind == "torus":
        try:
            corner = torus_corner_flag(rep)
        except NotLoxodromic:
            corner = None
    letters = "aAbB" if rep.surface.kind == "torus" else "aAbBcC"
    for word in W.reduced_words(depth, letters):
        try:
            m = rep.matrix(word)
            flags.append(canonical_flag(m, "plus"))
        except (NotLoxodromic, ValueError):
            pass
        if corner is not None and len(word) <= depth - 1:
            try:
                flags.append(apply_matrix(rep.matrix(word), corner))
            except (ValueError, ZeroDivisionError):
                pass
    if corner is not None:
        flags.append(corner)
    if not flags:
        raise NotLoxodromic("no loxodromic words found")
    # dedupe by projective direction
    seen = {}
    for f in flags:
        p = f.point
        if p[0] < 0 or (p[0] == 0 and (p[1] < 0 or (p[1] == 0 and p[2] < 0))):
            p = scale3(p, -1.0)
        key = (round(p[0] / 1e-9), round(p[1] / 1e-9), round(p[2] / 1e-9))
        if key not in seen:
            seen[key] = f
    # the two generator axes cross inside the invariant domain
    interior = None
    try:
        ga, gb = rep.gens["a"], rep.gens["b"]
        chord_a = cross3(canonical_flag(ga, "plus").point,
                         canonical_flag(ga, "minus").point)
        chord_b = cross3(canonical_flag(gb, "plus").point,
                         canonical_flag(gb, "minus").point)
        interior = unit3(cross3(chord_a, chord_b))
    except (NotLoxodromic, ZeroDivisionError):
        interior = None
    return domain_from_flags(list(seen.values()), interior)


def disk_domain(n: int = 16384) -> ConvexDomain:
    """Unit-circle fixture: n tangent flags to x^2 + y^2 = 1."""
    thetas = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    flags = [Flag((math.cos(t), math.sin(t), 1.0),
                  (math.cos(t), math.sin(t), -1.0)) for t in thetas]
    return domain_from_flags(flags)


def conic_fit_residual(dom: ConvexDomain) -> float:
    """RMS algebraic residual of the best conic through the samples; ~0
    exactly on the Fuchsian locus."""
    pts3 = [unit3(f.point) for f in dom.flags]
    a = np.array([[p[0] * p[0], p[1] * p[1], p[2] * p[2],
                   p[0] * p[1], p[0] * p[2], p[1] * p[2]] for p in pts3])
    _, s, _ = np.linalg.svd(a, full_matrices=False)
    return float(s[-1] / math.sqrt(len(pts3)))


# ---------------------------------------------------------------------------
# ray casting against the tangent polygon
# ---------------------------------------------------------------------------


def _ray_hits(dom: ConvexDomain, origins: np.ndarray, dirs: np.ndarray,
              hint: int | None = None) -> np.ndarray:
    """Forward intersection parameters: hit = origin + t * dir with t > 0
    on the tangent polygon, vectorized over rays.

    The polygon is star-shaped around every interior point, so the signs
    of cross(dir, vertex - origin) form two arcs; the forward transition
    is located by bisection over the angular order.  ``hint`` widens the
    anchor scan around a boundary index near which the origins sit, which
    is what keeps deep-cusp evaluations (tiny backward arcs) anchored.
    """
    v = dom.vertices
    n = len(v)
    m = len(origins)
    idx = np.arange(n)

    def sign_at(i_arr):
        vv = v[i_arr % n]
        rel = vv - origins
        return dirs[:, 0] * rel[:, 1] - dirs[:, 1] * rel[:, 0]

    # coarse scan over strided vertices (plus the hint window) to find one
    # positive and one negative sample per ray
    stride = max(1, n // 64)
    coarse = idx[::stride]
    if hint is not None:
        window = (np.arange(hint - 8, hint + 9)) % n
        coarse = np.unique(np.concatenate([coarse, window]))
    rel = v[coarse][None, :, :] - origins[:, None, :]
    cr = dirs[:, None, 0] * rel[:, :, 1] - dirs[:, None, 1] * rel[:, :, 0]
    pos_pos = np.argmax(cr > 0, axis=1)
    neg_pos = np.argmax(cr < 0, axis=1)
    ok = (cr > 0).any(axis=1) & (cr < 0).any(axis=1)
    i_pos = coarse[pos_pos].astype(np.int64)
    i_neg = coarse[neg_pos].astype(np.int64)
    if not ok.all():
        # origins very close to the boundary see one side only through a
        # tiny angular arc the strided scan can miss: full scan for those
        bad_rows = np.nonzero(~ok)[0]
        rel_f = v[None, :, :] - origins[bad_rows][:, None, :]
        cr_f = (dirs[bad_rows, None, 0] * rel_f[:, :, 1]
                - dirs[bad_rows, None, 1] * rel_f[:, :, 0])
        ok_f = (cr_f > 0).any(axis=1) & (cr_f < 0).any(axis=1)
        if not ok_f.all():
            raise PointOutsideDomain("ray cast failed: origin outside domain?")
        i_pos[bad_rows] = np.argmax(cr_f > 0, axis=1)
        i_neg[bad_rows] = np.argmax(cr_f < 0, axis=1)
    # ensure i_neg is "ahead" of i_pos cyclically for bisection
    ahead = (i_neg - i_pos) % n
    lo = i_pos.copy()
    span = ahead
    for _ in range(int(math.ceil(math.log2(n))) + 2):
        half = span // 2
        mid = (lo + half) % n
        s = sign_at(mid)
        take = s > 0
        lo = np.where(take, mid, lo)
        span = np.where(take, span - half, half)
        span = np.maximum(span, 1)
    def edge_hit(edge_idx):
        va = v[edge_idx % n]
        vb = v[(edge_idx + 1) % n]
        ex, ey = vb[:, 0] - va[:, 0], vb[:, 1] - va[:, 1]
        denom = dirs[:, 0] * ey - dirs[:, 1] * ex
        relx, rely = va[:, 0] - origins[:, 0], va[:, 1] - origins[:, 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            return (relx * ey - rely * ex) / denom

    # transition edge between vertex lo (positive side) and lo+1
    t = edge_hit(lo % n)
    bad = ~np.isfinite(t) | (t <= 0)
    if bad.any():
        # the transition found the backward crossing: search the other arc
        lo2 = i_neg.copy()
        span2 = (i_pos - i_neg) % n
        for _ in range(int(math.ceil(math.log2(n))) + 2):
            half = span2 // 2
            mid = (lo2 + half) % n
            s = sign_at(mid)
            take = s < 0
            lo2 = np.where(take, mid, lo2)
            span2 = np.where(take, span2 - half, half)
            span2 = np.maximum(span2, 1)
        t2 = edge_hit(lo2 % n)
        t = np.where(bad & np.isfinite(t2) & (t2 > 0), t2, t)
    if (~np.isfinite(t) | (t <= 0)).any():
        raise PointOutsideDomain("ray cast found no forward boundary hit")
    return t


def boundary_distances(dom: ConvexDomain, x: np.ndarray, d: np.ndarray,
                       hint: int | None = None
                       ) -> tuple[np.ndarray, np.ndarray]:
    """(forward, backward) distances from points x to the boundary along
    unit directions d."""
    fwd = _ray_hits(dom, x, d, hint)
    bwd = _ray_hits(dom, x, -d, hint)
    return fwd, bwd


def contains(dom: ConvexDomain, p) -> bool:
    v = dom.vertices
    rel = v - np.asarray(p)[None, :]
    e = np.roll(v, -1, axis=0) - v
    cr = e[:, 0] * rel[:, 1] - e[:, 1] * rel[:, 0]
    scale = np.hypot(e[:, 0], e[:, 1]) * np.hypot(rel[:, 0], rel[:, 1])
    crn = cr / np.maximum(scale, 1e-300)
    return bool((crn > -1e-9).all() or (crn < 1e-9).all())


# ---------------------------------------------------------------------------
# metric quantities
# ---------------------------------------------------------------------------


def hilbert_distance(dom: ConvexDomain, a, b) -> float:
    """Half-log cross ratio of (a, b; boundary hits)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if not contains(dom, a) or not contains(dom, b):
        raise PointOutsideDomain("hilbert distance needs interior points")
    d = b - a
    nd = float(np.hypot(d[0], d[1]))
    if nd == 0.0:
        return 0.0
    d = d / nd
    fwd, bwd = boundary_distances(dom, a[None, :], d[None, :])
    # p_b beyond b (forward), p_a behind a (backward)
    t_b = float(fwd[0])
    t_a = float(bwd[0])
    if t_b <= nd:
        raise PointOutsideDomain("second point is outside the boundary")
    return 0.5 * math.log((t_a + nd) / (t_b - nd) * t_b / t_a)


def finsler_norm(dom: ConvexDomain, x, v) -> float:
    """(1/|x - x^-| + 1/|x - x^+|) |v| / 2."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    nv = float(np.hypot(v[0], v[1]))
    if nv == 0.0:
        return 0.0
    if not contains(dom, x):
        raise PointOutsideDomain("finsler norm needs an interior point")
    d = v / nv
    fwd, bwd = boundary_distances(dom, x[None, :], d[None, :])
    return 0.5 * (1.0 / float(fwd[0]) + 1.0 / float(bwd[0])) * nv


@dataclass(frozen=True)
class DensityValue:
    position: tuple[float, float]
    unit_ball_area: float
    density: float


def busemann_density(dom: ConvexDomain, x, n_angles: int = 256,
                     tol: float = 1e-6) -> DensityValue:
    """pi / Leb(unit Finsler ball), the Busemann area density.

    The ball area is the polar integral of r(theta)^2 / 2 with
    r = harmonic mean of the two boundary distances; the periodic
    trapezoid rule converges spectrally and is refined until stable.
    """
    x = np.asarray(x, dtype=float)
    if not contains(dom, x):
        raise PointOutsideDomain("density needs an interior point")
    prev = None
    k = n_angles
    while True:
        thetas = np.linspace(0.0, math.pi, k, endpoint=False)
        dirs = np.column_stack([np.cos(thetas), np.sin(thetas)])
        origins = np.broadcast_to(x, (k, 2))
        fwd, bwd = boundary_distances(dom, origins, dirs)
        r = 2.0 / (1.0 / fwd + 1.0 / bwd)
        # r(theta + pi) = r(theta): integrate the half circle twice
        leb = float(np.sum(r * r) * (math.pi / k))
        if prev is not None and abs(leb - prev) <= tol * abs(leb):
            break
        if k >= 16 * n_angles:
            break
        prev = leb
        k *= 2
    return DensityValue((float(x[0]), float(x[1])), leb,
                        EUCLIDEAN_UNIT_BALL_AREA / leb)


# ---------------------------------------------------------------------------
# areas
# ---------------------------------------------------------------------------


def _segment_max_param(c: np.ndarray, dirs: np.ndarray, a: np.ndarray,
                       b: np.ndarray) -> np.ndarray:
    """Per-direction distance from c to segment [a, b] (inf if missed)."""
    e = b - a
    denom = dirs[:, 0] * (-e[1]) + dirs[:, 1] * e[0]
    rel = a - c
    t = (rel[0] * (-e[1]) + rel[1] * e[0]) / np.where(np.abs(denom) < 1e-300,
                                                      np.nan, denom)
    hit = c[None, :] + t[:, None] * dirs
    s = np.where(np.abs(e[0]) > np.abs(e[1]),
                 (hit[:, 0] - a[0]) / e[0], (hit[:, 1] - a[1]) / e[1])
    ok = np.isfinite(t) & (t > 0) & (s >= -1e-12) & (s <= 1 + 1e-12)
    return np.where(ok, t, np.inf)


def _hilbert_distance_batch(dom: ConvexDomain, c: np.ndarray,
                            pts: np.ndarray,
                            hint: int | None = None) -> np.ndarray:
    rel = pts - c[None, :]
    nd = np.hypot(rel[:, 0], rel[:, 1])
    nz = nd > 0
    dirs = np.where(nz[:, None], rel / np.where(nz, nd, 1.0)[:, None],
                    np.array([1.0, 0.0])[None, :])
    origins = np.broadcast_to(c, pts.shape)
    fwd, bwd = boundary_distances(dom, origins, dirs, hint)
    out = np.zeros(len(pts))
    ratio = (bwd + nd) / (bwd) * fwd / np.maximum(fwd - nd, 1e-300)
    out[nz] = 0.5 * np.log(ratio[nz])
    return out


def _is_ideal(dom: ConvexDomain, c: np.ndarray, p: np.ndarray) -> bool:
    """A region vertex is ideal when it sits on the boundary polygon."""
    rel = p - c
    nd = float(np.hypot(rel[0], rel[1]))
    if nd == 0.0:
        return False
    d = rel / nd
    fwd = _ray_hits(dom, c[None, :], d[None, :])
    return nd >= float(fwd[0]) * (1.0 - 1e-9)


def _piece_area(dom: ConvexDomain, corner, a, b, ideal: bool,
                ball_center, r_cut: float, n_phi: int, n_rad: int) -> float:
    """Busemann area of the triangle (corner, a, b), integrated in polar
    coordinates around the corner.

    For an ideal corner the radial variable is logarithmic and the cusp
    is clipped where the ray enters the Hilbert ball of radius r_cut
    around ball_center; an interior corner uses plain Gauss in s.
    """
    corner = np.asarray(corner, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    hint = None
    if ideal:
        d2 = np.sum((dom.points - corner[None, :]) ** 2, axis=1)
        hint = int(np.argmin(d2))
    va, vb = a - corner, b - corner
    phi_a = math.atan2(va[1], va[0])
    phi_b = math.atan2(vb[1], vb[0])
    dphi = (phi_b - phi_a) % (2.0 * math.pi)
    if dphi > math.pi:
        phi_a, phi_b = phi_b, phi_a
        dphi = 2.0 * math.pi - dphi
    if dphi < 1e-14:
        return 0.0
    gx, gw = np.polynomial.legendre.leggauss(n_phi)
    phis = phi_a + 0.5 * dphi * (gx + 1.0)
    wphi = 0.5 * dphi * gw
    dirs = np.column_stack([np.cos(phis), np.sin(phis)])
    s_max = _segment_max_param(corner, dirs, a, b)
    if not np.isfinite(s_max).all():
        raise RegionOutsideDomain("corner rays miss the opposite side")
    # keep strictly inside the domain
    if not ideal:
        fwd = _ray_hits(dom, np.broadcast_to(corner, dirs.shape), dirs)
        s_max = np.minimum(s_max, fwd * (1.0 - 1e-12))
    else:
        s_max = s_max * (1.0 - 1e-12)
    rx, rw = np.polynomial.legendre.leggauss(n_rad)
    total = 0.0
    if not ideal:
        for iw in range(n_rad):
            s = 0.5 * s_max * (rx[iw] + 1.0)
            ws = 0.5 * s_max * rw[iw]
            pts = corner[None, :] + s[:, None] * dirs
            h = _density_batch(dom, pts)
            total += float(np.sum(h * s * ws * wphi))
        return total
    # ideal corner: find the entry of each ray into the clipping ball by
    # bisection in log s
    bc = np.asarray(ball_center, dtype=float)
    lo = np.log(s_max) - (2.0 * r_cut + 8.0)
    hi = np.log(s_max)
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        pts = corner[None, :] + np.exp(mid)[:, None] * dirs
        d = _hilbert_distance_batch(dom, bc, pts, hint)
        inside = d <= r_cut
        lo = np.where(inside, lo, mid)
        hi = np.where(inside, mid, hi)
    w_min = 0.5 * (lo + hi)
    w_max = np.log(s_max)
    span = np.maximum(w_max - w_min, 0.0)
    for iw in range(n_rad):
        wlog = w_min + 0.5 * span * (rx[iw] + 1.0)
        wq = 0.5 * span * rw[iw]
        s = np.exp(wlog)
        pts = corner[None, :] + s[:, None] * dirs
        h = _density_batch(dom, pts, hint=hint)
        total += float(np.sum(h * s * s * wq * wphi))
    return total


def area(dom: ConvexDomain, region: list, radii=(4.0, 5.0, 6.0),
         n_phi: int = 96, n_rad: int = 48, tol: float = 0.02) -> dict:
    """Busemann area of a polygonal region (vertices interior or ideal).

    The region is fanned from its centroid; pieces with ideal corners are
    integrated in cusp-adapted polar coordinates around the corner and
    clipped at Hilbert distance R from the centroid for each R in radii,
    with Aitken extrapolation of the truncation sequence.  Radii beyond
    ~half the log of the boundary sampling density see the polygonal
    interpolation instead of the domain, so the default stays moderate
    and extrapolates the exponentially decaying cusp tails.
    """
    region = [np.asarray(p, dtype=float) for p in region]
    if len(region) < 3:
        raise RegionOutsideDomain("region needs at least 3 vertices")
    c = np.mean(region, axis=0)
    if not contains(dom, c):
        raise RegionOutsideDomain("region centroid escaped the domain")
    # fan pieces (c, P, Q); a piece with two ideal corners is split at the
    # chord midpoint so each piece has at most one cusp
    pieces = []
    ideal_flags = [_is_ideal(dom, c, p) for p in region]
    for i in range(len(region)):
        p, q = region[i], region[(i + 1) % len(region)]
        ip, iq = ideal_flags[i], ideal_flags[(i + 1) % len(region)]
        if ip and iq:
            mid = 0.5 * (p + q)
            pieces.append((p, c, mid, True))
            pieces.append((q, mid, c, True))
        elif ip:
            pieces.append((p, c, q, True))
        elif iq:
            pieces.append((q, p, c, True))
        else:
            pieces.append((c, p, q, False))
    values = []
    for r_cut in radii:
        total = 0.0
        for corner, a_, b_, ideal in pieces:
            total += _piece_area(dom, corner, a_, b_, ideal, c, r_cut,
                                 n_phi, n_rad)
        values.append(total)
    table = dict(zip(radii, values))
    est = values[-1]
    if len(values) >= 3:
        d1, d2 = values[-2] - values[-3], values[-1] - values[-2]
        if abs(d2 - d1) > 1e-300:
            aitken = values[-1] + d2 * d2 / (d1 - d2)
            if abs(aitken - values[-1]) < 0.25 * abs(values[-1]):
                est = aitken
        if abs(values[-1] - values[-2]) > tol * max(abs(est), 1e-12):
            raise NoConvergence(
                "truncation sequence disagrees: %r" % (table,))
    return {"area": est, "truncations": table}


def _density_batch(dom: ConvexDomain, pts: np.ndarray, k: int = 128,
                   hint: int | None = None) -> np.ndarray:
    """Busemann density at a batch of interior points (fixed theta grid)."""
    m = len(pts)
    thetas = np.linspace(0.0, math.pi, k, endpoint=False)
    dirs = np.column_stack([np.cos(thetas), np.sin(thetas)])
    origins = np.repeat(pts, k, axis=0)
    dd = np.tile(dirs, (m, 1))
    fwd, bwd = boundary_distances(dom, origins, dd, hint)
    r = 2.0 / (1.0 / fwd + 1.0 / bwd)
    r2 = (r * r).reshape(m, k)
    leb = r2.sum(axis=1) * (math.pi / k)
    return EUCLIDEAN_UNIT_BALL_AREA / leb


def ideal_triangle_area(dom: ConvexDomain, i: int, j: int, k: int,
                        **kwargs) -> dict:
    """Area of the ideal triangle spanned by three boundary samples."""
    region = [dom.points[i], dom.points[j], dom.points[k]]
    return area(dom, region, **kwargs)


def canonical_area_s11_unipotent(rep: Representation, depth: int = 8,
                                 **kwargs) -> dict:
    """Area of the standard two-triangle fundamental domain of a cusped
    torus inside its invariant domain.

    The four square corners are the puncture orbit (p, a p, ab p, b p) of
    the corner-word fixed flag.
    """
    from .holonomy import is_unipotent
    if not is_unipotent(rep.matrix("abAB")):
        raise NotLoxodromic("boundary monodromy is not unipotent")
    dom = limit_set(rep, depth)
    corner = torus_corner_flag(rep)
    ma, mb = rep.gens["a"], rep.gens["b"]
    c0 = corner
    c1 = apply_matrix(ma, c0)
    c3 = apply_matrix(mb, c0)
    c2 = apply_matrix(ma, c3)
    quad = []
    for f in (c0, c1, c2, c3):
        p = f.point
        w = dot3(dom.chart[2], p)
        if w < 0:
            p = scale3(p, -1.0)
        quad.append(np.array(_chart_coords(dom.chart, p)))
    t1 = area(dom, [quad[0], quad[1], quad[2]], **kwargs)
    t2 = area(dom, [quad[0], quad[2], quad[3]], **kwargs)
    return {
        "area": t1["area"] + t2["area"],
        "triangles": (t1, t2),
    }


def domain_to_csv(dom: ConvexDomain) -> str:
    lines = ["x,y,tangent_a,tangent_b,tangent_c"]
    for p, t in zip(dom.points, dom.tangents):
        lines.append("%.17g,%.17g,%.17g,%.17g,%.17g"
                     % (p[0], p[1], t[0], t[1], t[2]))
    return "\n".join(lines) + "\n"
