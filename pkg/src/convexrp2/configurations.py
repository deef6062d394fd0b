"""Positive flag configurations over a triangulated polygon.

Positive tuples of flags are parameterized by one positive triple ratio per
triangle and a pair of positive edge invariants (-D1, -D2) per diagonal.
This module computes those parameters from flags, reconstructs flags from
parameters (the inverse map, built triangle by triangle through pencil
solves), and implements the rational coordinate change under a diagonal
flip of a quadrilateral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .errors import GluingInconsistent, NonGenericFlags, NotPositive
from .projective import (
    Flag,
    GENERIC_TOL,
    edge_function,
    is_generic,
    join,
    meet,
    solve_pencil_slot,
    triple_ratio,
)
from .linalg3 import Vec3, cross3, det3, dot3, norm3, scale3, unit3


# ---------------------------------------------------------------------------
# triangulations of the d-gon
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolygonTriangulation:
    """Triangulation of a convex d-gon with vertices 0..d-1 anticlockwise.

    Diagonals are stored with the lexicographically smaller vertex first;
    triangle triples (i, j, k) with i < j < k are automatically
    anticlockwise.
    """

    d: int
    diagonals: frozenset[tuple[int, int]]

    def __post_init__(self):
        if self.d < 3:
            raise ValueError("need at least 3 vertices")
        diags = {tuple(sorted(e)) for e in self.diagonals}
        object.__setattr__(self, "diagonals", frozenset(diags))
        if len(diags) != self.d - 3:
            raise ValueError("a triangulation of a %d-gon has %d diagonals"
                             % (self.d, self.d - 3))
        for (a, b) in diags:
            if not (0 <= a < b < self.d) or b - a in (1, self.d - 1):
                raise ValueError("not a diagonal: (%d, %d)" % (a, b))
        for (a, b) in diags:
            for (c, e) in diags:
                if (a, b) < (c, e) and _crossing(a, b, c, e):
                    raise ValueError("crossing diagonals (%d,%d) x (%d,%d)"
                                     % (a, b, c, e))

    @classmethod
    def fan(cls, d: int) -> "PolygonTriangulation":
        return cls(d, frozenset((0, i) for i in range(2, d - 1)))

    @property
    def chords(self) -> set[tuple[int, int]]:
        sides = {tuple(sorted((i, (i + 1) % self.d))) for i in range(self.d)}
        return sides | set(self.diagonals)

    @property
    def triangles(self) -> list[tuple[int, int, int]]:
        ch = self.chords
        out = []
        for i in range(self.d):
            for j in range(i + 1, self.d):
                if (i, j) not in ch:
                    continue
                for k in range(j + 1, self.d):
                    if (i, k) in ch and (j, k) in ch:
                        out.append((i, j, k))
        if len(out) != self.d - 2:
            raise ValueError("inconsistent triangulation")
        return out

    def wings(self, diag: tuple[int, int]) -> tuple[int, int]:
        """(k, l) for the oriented diagonal (i, j): (i, j, k) and (i, l, j)
        are the two adjacent anticlockwise triangles, k outside the index
        range (j, i) and l strictly between i and j."""
        i, j = diag
        k = l = -1
        for tri in self.triangles:
            if i in tri and j in tri:
                (m,) = (v for v in tri if v not in (i, j))
                if i < m < j:
                    l = m
                else:
                    k = m
        if k < 0 or l < 0:
            raise ValueError("diagonal %r does not bound two triangles" % (diag,))
        return k, l


def _crossing(a: int, b: int, c: int, e: int) -> bool:
    def inside(x, lo, hi):
        return lo < x < hi
    return (inside(c, a, b) != inside(e, a, b)) and len({a, b, c, e}) == 4


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------


@dataclass
class ConfParams:
    """Positive coordinates of a flag configuration: triple ratio per
    anticlockwise triangle, (-D1, -D2) per oriented diagonal (small index
    first).  3d-8 numbers in total for a d-gon."""

    triangle_ratios: dict[tuple[int, int, int], float]
    edge_invariants: dict[tuple[int, int], tuple[float, float]]

    def values(self) -> list[float]:
        out = list(self.triangle_ratios.values())
        for m1, m2 in self.edge_invariants.values():
            out.extend((m1, m2))
        return out

    def to_text(self) -> str:
        lines = []
        for tri in sorted(self.triangle_ratios):
            lines.append("T:%s = %.17g" % ("-".join(map(str, tri)),
                                           self.triangle_ratios[tri]))
        for e in sorted(self.edge_invariants):
            m1, m2 = self.edge_invariants[e]
            key = "-".join(map(str, e))
            lines.append("D1:%s = %.17g" % (key, m1))
            lines.append("D2:%s = %.17g" % (key, m2))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ConfParams":
        tris: dict[tuple[int, int, int], float] = {}
        edges: dict[tuple[int, int], list[float]] = {}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, val = line.partition("=")
            key, val = key.strip(), float(val.strip())
            kind, _, idx = key.partition(":")
            parts = tuple(int(x) for x in idx.split("-"))
            if kind == "T":
                tris[parts] = val  # type: ignore[index]
            elif kind in ("D1", "D2"):
                slot = edges.setdefault(parts, [math.nan, math.nan])  # type: ignore[arg-type]
                slot[0 if kind == "D1" else 1] = val
            else:
                raise ValueError("unknown key %r" % key)
        return cls(tris, {e: (v[0], v[1]) for e, v in edges.items()})


class QuadParams(NamedTuple):
    """(A, B, C, D) for a quadrilateral with cyclic flags (X, W, Y, Z) and
    diagonal (X, Y): A = T(X,W,Y), B = -D1(X,Y,Z,W), C = -D2(X,Y,Z,W),
    D = T(X,Y,Z)."""

    a: float
    b: float
    c: float
    d: float


# ---------------------------------------------------------------------------
# parametrize
# ---------------------------------------------------------------------------


def parametrize(flags: Sequence[Flag], tri: PolygonTriangulation) -> ConfParams:
    """Triangle ratios and oriented-diagonal edge invariants of a flag tuple.

    Raises NotPositive (naming the offending invariant) unless every value
    is strictly positive, which is the positivity criterion.
    """
    if len(flags) != tri.d:
        raise ValueError("flag count does not match the polygon")
    if not is_generic(flags):
        raise NonGenericFlags("configuration is not generic")
    tris = {}
    for (i, j, k) in tri.triangles:
        t = triple_ratio(flags[i], flags[j], flags[k])
        if t <= 0:
            raise NotPositive("T:%d-%d-%d" % (i, j, k))
        tris[(i, j, k)] = t
    edges = {}
    for diag in sorted(tri.diagonals):
        i, j = diag
        k, l = tri.wings(diag)
        m1 = -edge_function(1, flags[i], flags[j], flags[k], flags[l])
        m2 = -edge_function(2, flags[i], flags[j], flags[k], flags[l])
        if m1 <= 0:
            raise NotPositive("D1:%d-%d" % diag)
        if m2 <= 0:
            raise NotPositive("D2:%d-%d" % diag)
        edges[diag] = (m1, m2)
    return ConfParams(tris, edges)


# ---------------------------------------------------------------------------
# reconstruct
# ---------------------------------------------------------------------------


def standard_triple(t: float) -> tuple[Flag, Flag, Flag]:
    """Normalized positive flag triple with prescribed triple ratio t:
    points e1, e2, e3 and lines chosen so all six pairings are unit."""
    if t <= 0:
        raise NotPositive("triple ratio must be positive")
    f1 = Flag((1.0, 0.0, 0.0), (0.0, 1.0, 1.0))
    f2 = Flag((0.0, 1.0, 0.0), (1.0, 0.0, 1.0))
    f3 = Flag((0.0, 0.0, 1.0), (1.0, 1.0 / t, 0.0))
    return f1, f2, f3


def extend_quad(x: Flag, y: Flag, z: Flag, minus_d1: float, minus_d2: float,
                t_new: float) -> Flag:
    """Fourth flag W of the quadruple (X, Y, Z, W) from its invariants.

    Given the triangle (X, Y, Z) and positive targets -D1, -D2 and
    T(X, W, Y), W is cut out by two pencil cross-ratio equations (one at
    X.point fixing the line X-W, one at Y.point fixing Y-W) and one triple
    ratio fixing its own line.  Each equation is linear-fractional, so the
    solution is unique.
    """
    xp, yp, zp = x.point, y.point, z.point
    l_xy, l_xz = join(xp, yp), join(xp, zp)
    l_yx, l_yz = join(yp, xp), join(yp, zp)
    # D1 = CR(X.line, x~y, x~z, x~w): solve the delta slot
    l_xw = solve_pencil_slot(xp, [x.line, l_xy, l_xz, None], -minus_d1)
    # D2 = CR(Y.line, y~x, y~w, y~z): solve the gamma slot
    l_yw = solve_pencil_slot(yp, [y.line, l_yx, None, l_yz], -minus_d2)
    try:
        wp = unit3(meet(l_xw, l_yw))
    except Exception as exc:
        raise GluingInconsistent("pencil lines do not meet transversally") from exc
    lx_w, ly_w = dot3(x.line, wp), dot3(y.line, wp)
    lx_y, ly_x = dot3(x.line, yp), dot3(y.line, xp)
    if min(abs(lx_w), abs(ly_w), abs(lx_y), abs(ly_x)) <= GENERIC_TOL:
        raise GluingInconsistent("extension produced a non-generic flag")
    # T(X, W, Y) = [lX(w) lW(y) lY(x)] / [lX(y) lW(x) lY(w)]
    r = t_new * lx_y * ly_w / (lx_w * ly_x)
    w_line = (
        cross3(wp, yp)[0] - r * cross3(wp, xp)[0],
        cross3(wp, yp)[1] - r * cross3(wp, xp)[1],
        cross3(wp, yp)[2] - r * cross3(wp, xp)[2],
    )
    if norm3(w_line) < 1e-14:
        raise GluingInconsistent("degenerate line for the extended flag")
    return Flag(wp, w_line)


def extend_quad_other_side(x: Flag, y: Flag, w: Flag, minus_d1: float,
                           minus_d2: float, t_new: float) -> Flag:
    """Third flag Z of (X, Y, Z, W) given the triangle (X, W, Y).

    Uses the relabeling D_i(X,Y,Z,W) = D_{3-i}(Y,X,W,Z): solving the Z slot
    of the original quadruple is solving the W slot of the swapped one.
    """
    return extend_quad(y, x, w, minus_d2, minus_d1, t_new)


def reconstruct(params: ConfParams, tri: PolygonTriangulation
                ) -> list[Flag]:
    """Flag tuple realizing the given positive parameters.

    Normalized so the first (lexicographically smallest) triangle is the
    standard triple; parametrize(reconstruct(p)) == p to float accuracy.
    """
    for key, t in params.triangle_ratios.items():
        if t <= 0:
            raise NotPositive("T:%s" % (key,))
    for key, (m1, m2) in params.edge_invariants.items():
        if m1 <= 0 or m2 <= 0:
            raise NotPositive("D:%s" % (key,))
    faces = tri.triangles
    first = min(faces)
    flags: dict[int, Flag] = {}
    f1, f2, f3 = standard_triple(params.triangle_ratios[first])
    flags[first[0]], flags[first[1]], flags[first[2]] = f1, f2, f3
    done = {first}
    pending = True
    while pending:
        pending = False
        for diag in sorted(tri.diagonals):
            i, j = diag
            k, l = tri.wings(diag)
            m1, m2 = params.edge_invariants[diag]
            tri_k = tuple(sorted((i, j, k)))
            tri_l = tuple(sorted((i, j, l)))
            if tri_l in done and tri_k not in done:
                t_new = params.triangle_ratios[tri_k]
                flags[k] = extend_quad_other_side(
                    flags[i], flags[j], flags[l], m1, m2, t_new)
                done.add(tri_k)
                pending = True
            elif tri_k in done and tri_l not in done:
                t_new = params.triangle_ratios[tri_l]
                flags[l] = extend_quad(
                    flags[i], flags[j], flags[k], m1, m2, t_new)
                done.add(tri_l)
                pending = True
    if len(flags) != tri.d:
        raise GluingInconsistent("triangulation is not connected")
    return [flags[i] for i in range(tri.d)]


# ---------------------------------------------------------------------------
# quadrilateral flip
# ---------------------------------------------------------------------------

_QUAD_TRI = PolygonTriangulation(4, frozenset({(0, 2)}))
_QUAD_TRI_OTHER = PolygonTriangulation(4, frozenset({(1, 3)}))


def quad_parametrize(flags: Sequence[Flag]) -> QuadParams:
    """QuadParams of four cyclically ordered flags with diagonal (0, 2)."""
    p = parametrize(flags, _QUAD_TRI)
    return QuadParams(
        p.triangle_ratios[(0, 1, 2)],
        p.edge_invariants[(0, 2)][0],
        p.edge_invariants[(0, 2)][1],
        p.triangle_ratios[(0, 2, 3)],
    )


def quad_reconstruct(q: QuadParams) -> list[Flag]:
    params = ConfParams(
        {(0, 1, 2): q.a, (0, 2, 3): q.d},
        {(0, 2): (q.b, q.c)},
    )
    return reconstruct(params, _QUAD_TRI)


def flip(q: QuadParams) -> QuadParams:
    """Coordinate change when the diagonal of the quadrilateral is switched.

    Output slots, in terms of the original flags (X, W, Y, Z):
        (A', B', C', D') = (-D2(Z,W,Y,X), T(Z,X,W), T(Z,W,Y), -D1(Z,W,Y,X)).
    All four outputs are positive whenever the inputs are.
    """
    a, b, c, d = q
    if min(a, b, c, d) <= 0:
        raise NotPositive("flip requires positive quad parameters")
    p = 1.0 + c + c * a + c * a * b
    r = 1.0 + b + b * d + b * d * c
    return QuadParams(
        (1.0 + c) / (a * c * (1.0 + b)),
        d * p / r,
        a * r / p,
        (1.0 + b) / (d * b * (1.0 + c)),
    )


def flip_geometric(q: QuadParams) -> QuadParams:
    """Same coordinate change evaluated at flag level: reconstruct the
    quadrilateral and read the flipped invariants off the flags directly.
    Oracle for the rational formula."""
    f = quad_reconstruct(q)
    x, w, y, z = f[0], f[1], f[2], f[3]
    return QuadParams(
        -edge_function(2, z, w, y, x),
        triple_ratio(z, x, w),
        triple_ratio(z, w, y),
        -edge_function(1, z, w, y, x),
    )


def relabel_ccw(q: QuadParams) -> QuadParams:
    """Relabel flip output as canonical QuadParams of the new diagonal with
    the quadrilateral read (Z, X, W, Y): (o1..o4) -> (o2, o4, o1, o3)."""
    return QuadParams(q.b, q.d, q.a, q.c)


def relabel_cw(q: QuadParams) -> QuadParams:
    """Inverse relabeling, for the other orientation of the new diagonal:
    (o1..o4) -> (o3, o1, o4, o2)."""
    return QuadParams(q.c, q.a, q.d, q.b)


def double_flip(q: QuadParams) -> QuadParams:
    """Flip, relabel to the induced marking of the new diagonal, flip back.

    Exactly the identity: relabel_ccw(flip(relabel_cw(flip(q)))) == q.
    """
    return relabel_ccw(flip(relabel_cw(flip(q))))
