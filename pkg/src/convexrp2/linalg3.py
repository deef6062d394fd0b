"""Hand-rolled 3-vector / 3x3 matrix arithmetic on plain float tuples.

numpy's per-call overhead dominates at this size (a cross product is nine
multiplications), and the flip/holonomy oracles run these kernels millions
of times.  Vectors and covectors are `(float, float, float)`, matrices are
row tuples `((..),(..),(..))`.
"""

from __future__ import annotations

import math

Vec3 = tuple[float, float, float]
Mat3 = tuple[Vec3, Vec3, Vec3]

IDENTITY3: Mat3 = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))


def dot3(u: Vec3, v: Vec3) -> float:
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def cross3(u: Vec3, v: Vec3) -> Vec3:
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def det3(u: Vec3, v: Vec3, w: Vec3) -> float:
    """Determinant of the matrix with columns u, v, w."""
    return dot3(cross3(u, v), w)


def norm3(u: Vec3) -> float:
    return math.sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2])


def scale3(u: Vec3, s: float) -> Vec3:
    return (u[0] * s, u[1] * s, u[2] * s)


def add3(u: Vec3, v: Vec3) -> Vec3:
    return (u[0] + v[0], u[1] + v[1], u[2] + v[2])


def sub3(u: Vec3, v: Vec3) -> Vec3:
    return (u[0] - v[0], u[1] - v[1], u[2] - v[2])


def unit3(u: Vec3) -> Vec3:
    n = norm3(u)
    if n == 0.0:
        raise ZeroDivisionError("cannot normalize the zero vector")
    return (u[0] / n, u[1] / n, u[2] / n)


def matvec(m: Mat3, v: Vec3) -> Vec3:
    return (dot3(m[0], v), dot3(m[1], v), dot3(m[2], v))


def vecmat(v: Vec3, m: Mat3) -> Vec3:
    """Row covector times matrix."""
    return (
        v[0] * m[0][0] + v[1] * m[1][0] + v[2] * m[2][0],
        v[0] * m[0][1] + v[1] * m[1][1] + v[2] * m[2][1],
        v[0] * m[0][2] + v[1] * m[1][2] + v[2] * m[2][2],
    )


def matmul(a: Mat3, b: Mat3) -> Mat3:
    return (
        (
            a[0][0] * b[0][0] + a[0][1] * b[1][0] + a[0][2] * b[2][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1] + a[0][2] * b[2][1],
            a[0][0] * b[0][2] + a[0][1] * b[1][2] + a[0][2] * b[2][2],
        ),
        (
            a[1][0] * b[0][0] + a[1][1] * b[1][0] + a[1][2] * b[2][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1] + a[1][2] * b[2][1],
            a[1][0] * b[0][2] + a[1][1] * b[1][2] + a[1][2] * b[2][2],
        ),
        (
            a[2][0] * b[0][0] + a[2][1] * b[1][0] + a[2][2] * b[2][0],
            a[2][0] * b[0][1] + a[2][1] * b[1][1] + a[2][2] * b[2][1],
            a[2][0] * b[0][2] + a[2][1] * b[1][2] + a[2][2] * b[2][2],
        ),
    )


def transpose3(m: Mat3) -> Mat3:
    return (
        (m[0][0], m[1][0], m[2][0]),
        (m[0][1], m[1][1], m[2][1]),
        (m[0][2], m[1][2], m[2][2]),
    )


def mat_det(m: Mat3) -> float:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def adjugate3(m: Mat3) -> Mat3:
    """Adjugate (transposed cofactor matrix): m @ adj(m) = det(m) * I.

    For a rank-2 matrix the adjugate is the rank-1 outer product of the
    right and left null vectors, which is how eigenvectors are extracted.
    """
    return (
        (
            m[1][1] * m[2][2] - m[1][2] * m[2][1],
            m[0][2] * m[2][1] - m[0][1] * m[2][2],
            m[0][1] * m[1][2] - m[0][2] * m[1][1],
        ),
        (
            m[1][2] * m[2][0] - m[1][0] * m[2][2],
            m[0][0] * m[2][2] - m[0][2] * m[2][0],
            m[0][2] * m[1][0] - m[0][0] * m[1][2],
        ),
        (
            m[1][0] * m[2][1] - m[1][1] * m[2][0],
            m[0][1] * m[2][0] - m[0][0] * m[2][1],
            m[0][0] * m[1][1] - m[0][1] * m[1][0],
        ),
    )


def inverse3(m: Mat3) -> Mat3:
    d = mat_det(m)
    if d == 0.0:
        raise ZeroDivisionError("matrix is singular")
    a = adjugate3(m)
    return tuple(tuple(x / d for x in row) for row in a)  # type: ignore[return-value]


def mat_scale(m: Mat3, s: float) -> Mat3:
    return tuple(tuple(x * s for x in row) for row in m)  # type: ignore[return-value]


def mat_maxabs(m: Mat3) -> float:
    return max(abs(x) for row in m for x in row)


def mat_normalize(m: Mat3) -> Mat3:
    """Divide by the largest absolute entry (positive scalar, so the
    projective class and the determinant sign are untouched)."""
    s = mat_maxabs(m)
    if s == 0.0:
        raise ZeroDivisionError("zero matrix")
    return mat_scale(m, 1.0 / s)


def mat_sub(a: Mat3, b: Mat3) -> Mat3:
    return tuple(
        tuple(a[i][j] - b[i][j] for j in range(3)) for i in range(3)
    )  # type: ignore[return-value]


def mat_from_columns(c0: Vec3, c1: Vec3, c2: Vec3) -> Mat3:
    return (
        (c0[0], c1[0], c2[0]),
        (c0[1], c1[1], c2[1]),
        (c0[2], c1[2], c2[2]),
    )


def mat_close_to_identity(m: Mat3) -> float:
    """Max-norm distance of m from the identity after scalar normalization.

    The scalar is taken as trace/3, which is the right projective gauge when
    m is supposed to be a multiple of the identity.
    """
    tr = (m[0][0] + m[1][1] + m[2][2]) / 3.0
    if tr == 0.0:
        return float("inf")
    return max(
        abs(m[i][j] / tr - (1.0 if i == j else 0.0))
        for i in range(3)
        for j in range(3)
    )
