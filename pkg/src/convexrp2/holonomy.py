"""Positive PGL(3,R) representations of the one-holed torus and the pair
of pants.

Representations are built from Fock-Goncharov style coordinates (one
triple ratio per ideal triangle, a pair of edge invariants per edge) by
developing the equivariant flag pattern over a fundamental domain and
solving each deck transformation as the unique projective map matching a
generic flag quadruple.  Nothing here commits to an elementary-matrix
convention: the six eigenvalue/edge-invariant identities of the pair of
pants act as the correctness oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import GluingInconsistent, NonGenericFlags, NotLoxodromic, NotPositive
from .linalg3 import (
    IDENTITY3,
    Mat3,
    Vec3,
    adjugate3,
    cross3,
    det3,
    dot3,
    inverse3,
    mat_close_to_identity,
    mat_det,
    mat_from_columns,
    mat_maxabs,
    mat_normalize,
    mat_scale,
    mat_sub,
    matmul,
    matvec,
    norm3,
    scale3,
    transpose3,
    unit3,
    vecmat,
)
from .projective import Flag, apply_matrix, is_generic, meet, triple_ratio, edge_function
from .configurations import (
    ConfParams,
    PolygonTriangulation,
    extend_quad,
    extend_quad_other_side,
    reconstruct,
    standard_triple,
)
from . import words as W

# Matrix products renormalize (max entry 1) this often; pure overflow
# control, the projective class is untouched.
RENORM_EVERY = 8

EIGEN_GAP_TOL = 1e-10
UNIPOTENT_TOL = 1e-8


# ---------------------------------------------------------------------------
# eigenvalues of 3x3 matrices with positive simple spectrum
# ---------------------------------------------------------------------------


def _char_coeffs(m: Mat3) -> tuple[float, float, float]:
    """(c2, c1, c0) of det(M - x I) = -(x^3 - c2 x^2 + c1 x - c0)."""
    c2 = m[0][0] + m[1][1] + m[2][2]
    c1 = (
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
        + m[0][0] * m[2][2] - m[0][2] * m[2][0]
        + m[1][1] * m[2][2] - m[1][2] * m[2][1]
    )
    c0 = mat_det(m)
    return c2, c1, c0


def _newton_polish(lam: float, c2: float, c1: float, c0: float) -> float:
    f = ((lam - c2) * lam + c1) * lam - c0
    fp = (3.0 * lam - 2.0 * c2) * lam + c1
    if fp != 0.0:
        lam = lam - f / fp
    return lam


def _dominant_root(c2: float, c1: float, c0: float, start: float) -> float:
    """Largest real root of the cubic by damped Newton from an upper bound;
    monotone for a cubic with all-real spectrum."""
    lam = start
    for _ in range(200):
        f = ((lam - c2) * lam + c1) * lam - c0
        fp = (3.0 * lam - 2.0 * c2) * lam + c1
        if fp == 0.0:
            break
        step = f / fp
        lam -= step
        if abs(step) <= 1e-16 * abs(lam) + 1e-300:
            break
    return lam


def eigen3(m: Mat3, log_det: float | None = None) -> tuple[float, float, float]:
    """Eigenvalues lam1 > lam2 > lam3 > 0 of a loxodromic matrix.

    Closed-form (trigonometric Cardano) solve of the characteristic cubic
    with one Newton polish step per root; when the spectrum spans more
    than ~8 decades the small roots are recovered from the adjugate
    instead, which keeps the simple-root logs accurate for very long
    holonomy words.  ``log_det``, when the caller can track it exactly
    (word products do), replaces the cofactor determinant whose relative
    accuracy collapses in that regime.
    """
    s = mat_maxabs(m)
    if s == 0.0:
        raise NotLoxodromic("zero matrix")
    mh = mat_scale(m, 1.0 / s)
    c2, c1, c0 = _char_coeffs(mh)
    exact_det = log_det is not None
    if exact_det:
        c0 = math.exp(log_det - 3.0 * math.log(s))

    def robust_spread() -> tuple[float, float, float]:
        # lam2, lam3 far below lam1: dominant roots of the matrix and of
        # its adjugate (whose spectrum is det/lam_i) stay well scaled
        start = max(sum(abs(x) for x in row) for row in mh)
        r1 = _dominant_root(c2, c1, c0, start)
        adj = adjugate3(mh)
        asc = mat_maxabs(adj)
        i2, i1, i0 = _char_coeffs(mat_scale(adj, 1.0 / asc))
        astart = 3.0
        mu1 = _dominant_root(i2, i1, i0, astart)
        r3 = c0 / (mu1 * asc)
        r2 = c0 / (r1 * r3)
        return r1, r2, r3

    spread = c2 > 0.0 and c0 > 0.0 and abs(c1) < 1e-5 * c2 * c2
    if spread:
        l1, l2, l3 = robust_spread()
    else:
        # depressed cubic t^3 + p t + q = 0 under lam = t + c2/3
        p = c1 - c2 * c2 / 3.0
        q = -2.0 * c2**3 / 27.0 + c2 * c1 / 3.0 - c0
        disc = -4.0 * p**3 - 27.0 * q * q
        # floor just above the cancellation noise of the disc formula;
        # truly repeated/complex spectra land orders of magnitude below it
        scale = max(abs(p), abs(q), 1e-30) ** 3
        if disc <= 1e-13 * scale:
            raise NotLoxodromic("complex or repeated eigenvalues")
        r = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (2.0 * p) * math.sqrt(-3.0 / p)
        arg = max(-1.0, min(1.0, arg))
        phi = math.acos(arg)
        roots = sorted(
            (r * math.cos((phi - 2.0 * math.pi * k) / 3.0) + c2 / 3.0
             for k in range(3)),
            reverse=True,
        )
        roots = [_newton_polish(x, c2, c1, c0) for x in roots]
        l1, l2, l3 = roots
        if l3 <= 0.0:
            raise NotLoxodromic("eigenvalues are not all positive")
        if l3 / l1 < 1e-8:
            l1, l2, l3 = robust_spread()
    if not (l1 > l2 > l3 > 0.0):
        raise NotLoxodromic("eigenvalues not separated")
    if min((l1 - l2) / l1, (l2 - l3) / l2) <= EIGEN_GAP_TOL:
        raise NotLoxodromic("eigenvalue gap below tolerance")
    prod = l1 * l2 * l3
    # the cofactor determinant is only trustworthy while the spectrum is
    # balanced; with an exact log-determinant the check is always on
    if (exact_det or l3 / l1 > 1e-8) and abs(prod - c0) > 1e-9 * abs(c0):
        raise NotLoxodromic("cubic solve failed the determinant check")
    return l1 * s, l2 * s, l3 * s


@dataclass(frozen=True)
class SimpleRootLengths:
    """Logs of consecutive eigenvalue ratios; l1 + l2 is the Hilbert
    translation length."""

    l1: float
    l2: float
    eigenvalues: tuple[float, float, float]

    @property
    def hilbert(self) -> float:
        return self.l1 + self.l2


def simple_root_lengths(m: Mat3, log_det: float | None = None
                        ) -> SimpleRootLengths:
    l1, l2, l3 = eigen3(m, log_det)
    return SimpleRootLengths(
        math.log(l1) - math.log(l2),
        math.log(l2) - math.log(l3),
        (l1, l2, l3),
    )


def _nullish_vector(a: Mat3) -> Vec3:
    """Best right-null vector of a (numerically) rank-2 matrix.

    The adjugate of a rank-2 matrix is exactly rank one (null vector times
    left null covector), but in floating point it carries contamination
    at the ratio of the two smallest singular values; applying it twice
    more as a power iteration cubes that contamination away.
    """
    adj = adjugate3(a)
    s = mat_maxabs(adj)
    if s < 1e-250:
        raise NotLoxodromic("eigenvector extraction degenerated")
    adj = mat_scale(adj, 1.0 / s)
    cols = [(adj[0][j], adj[1][j], adj[2][j]) for j in range(3)]
    best = max(cols, key=norm3)
    v = scale3(best, 1.0 / norm3(best))
    # refine by iterating the rank-1 adjugate, which cubes away the
    # rounding contamination -- but only when it is not nilpotent (for a
    # nilpotent input, adj has zero trace and applying it annihilates v)
    if abs(adj[0][0] + adj[1][1] + adj[2][2]) > 1e-6:
        for _ in range(2):
            w = matvec(adj, v)
            n = norm3(w)
            if n < 1e-30:
                break
            v = scale3(w, 1.0 / n)
    return v


def _nullish_covector(a: Mat3) -> Vec3:
    adj = adjugate3(a)
    s = mat_maxabs(adj)
    if s < 1e-250:
        raise NotLoxodromic("left eigenvector extraction degenerated")
    adj = mat_scale(adj, 1.0 / s)
    best = max(adj, key=norm3)
    u = scale3(best, 1.0 / norm3(best))
    if abs(adj[0][0] + adj[1][1] + adj[2][2]) > 1e-6:
        for _ in range(2):
            w = vecmat(u, adj)
            n = norm3(w)
            if n < 1e-30:
                break
            u = scale3(w, 1.0 / n)
    return u


def _eigvec_for(m: Mat3, lam: float) -> Vec3:
    return _nullish_vector(mat_sub(m, mat_scale(IDENTITY3, lam)))


def _dominant_eigenvalue(m: Mat3) -> float:
    """Largest eigenvalue of a positive-spectrum matrix; well conditioned
    regardless of how small the other eigenvalues are."""
    s = mat_maxabs(m)
    mh = mat_scale(m, 1.0 / s)
    c2, c1, c0 = _char_coeffs(mh)
    if c2 <= 0.0:
        raise NotLoxodromic("dominant eigenvalue is not positive")
    start = max(sum(abs(x) for x in row) for row in mh)
    lam = _dominant_root(c2, c1, c0, start)
    if lam <= 0.0:
        raise NotLoxodromic("dominant eigenvalue is not positive")
    return lam * s


def dominant_eigenvector(m: Mat3) -> Vec3:
    s = mat_maxabs(m)
    mh = mat_scale(m, 1.0 / s)
    c2, c1, c0 = _char_coeffs(mh)
    start = max(sum(abs(x) for x in row) for row in mh)
    lam = _dominant_root(c2, c1, c0, start)
    return _eigvec_for(mh, lam)


def _unipotent_normalized(m: Mat3) -> Mat3 | None:
    """m rescaled to trace 3 if it is (numerically) regular unipotent.

    The trace is the right scale gauge here: the determinant of a widely
    conjugated unipotent cancels catastrophically, while the trace is a
    three-term sum.
    """
    tr = m[0][0] + m[1][1] + m[2][2]
    if abs(tr) <= 1e-12 * mat_maxabs(m):
        return None
    mh = mat_scale(m, 3.0 / tr)
    n = mat_sub(mh, IDENTITY3)
    n3 = matmul(n, matmul(n, n))
    if mat_maxabs(n3) > UNIPOTENT_TOL * (1.0 + mat_maxabs(n)) ** 3:
        return None
    return mh


def is_unipotent(m: Mat3, tol: float = UNIPOTENT_TOL) -> bool:
    return _unipotent_normalized(m) is not None


def canonical_flag(m: Mat3, end: str) -> Flag:
    """Fixed flag of a loxodromic matrix at its attracting ('plus') or
    repelling ('minus') end, or the unique fixed flag of a regular
    unipotent (the 'end' is then irrelevant).

    plus:  point = lam1 eigenvector, line = span of the lam1,lam2 pair;
    minus: point = lam3 eigenvector, line = span of the lam3,lam2 pair.
    The invariant lines are kernels of left eigenvectors, extracted from
    adjugates so no tiny eigenvalue is ever divided by.
    """
    if end not in ("plus", "minus"):
        raise ValueError("end must be 'plus' or 'minus'")
    try:
        l1, l2, l3 = eigen3(m)
    except NotLoxodromic:
        mh = _unipotent_normalized(m)
        if mh is None:
            raise
        a = mat_sub(mh, IDENTITY3)
        point = _nullish_vector(a)
        line = _nullish_covector(a)
        return Flag(point, line)
    s = mat_maxabs(m)
    mh = mat_scale(m, 1.0 / s)
    lams = (l1 / s, l2 / s, l3 / s)
    if end == "plus":
        point = _eigvec_for(mh, lams[0])
        # left eigenvector of lam3 = dominant right eigenvector of the
        # inverse transpose ~ adjugate transpose
        line = dominant_eigenvector(transpose3(adjugate3(mh)))
    else:
        point = _eigvec_for(mh, lams[2])
        line = dominant_eigenvector(transpose3(mh))
    return Flag(point, line)


def eigenbasis(m: Mat3, log_det: float | None = None
               ) -> tuple[Mat3, tuple[float, float, float]]:
    """Columns = eigenvectors for lam1 > lam2 > lam3."""
    l1, l2, l3 = eigen3(m, log_det)
    s = mat_maxabs(m)
    mh = mat_scale(m, 1.0 / s)
    v1 = _eigvec_for(mh, l1 / s)
    v2 = _eigvec_for(mh, l2 / s)
    v3 = _eigvec_for(mh, l3 / s)
    v = mat_from_columns(v1, v2, v3)
    if abs(mat_det(v)) < 1e-12:
        raise NotLoxodromic("eigenbasis is degenerate")
    return v, (l1, l2, l3)


def word_eigenbasis(rep: "Representation", word: str
                    ) -> tuple[Mat3, tuple[float, float, float]]:
    """Eigenbasis of a word matrix with every column obtained from a
    dominant-direction extraction, which stays accurate for arbitrarily
    long words.

    The small eigenvector is the dominant one of the inverse word (a
    fresh, well-conditioned product), and the middle one is the meet of
    the two invariant planes, i.e. the cross product of the dominant left
    covectors of the word and its inverse.
    """
    m, logdet = rep.matrix_logdet(word)
    lams = eigen3(m, logdet)
    mi = rep.matrix(W.inverse(word))
    v1 = dominant_eigenvector(m)
    v3 = dominant_eigenvector(mi)
    u1 = dominant_eigenvector(transpose3(m))
    u3 = dominant_eigenvector(transpose3(mi))
    cr = cross3(u1, u3)
    n = norm3(cr)
    if n < 1e-12:
        raise NotLoxodromic("invariant planes are degenerate")
    v2 = scale3(cr, 1.0 / n)
    v = mat_from_columns(v1, v2, v3)
    if abs(mat_det(v)) < 1e-12:
        raise NotLoxodromic("eigenbasis is degenerate")
    return v, lams


# ---------------------------------------------------------------------------
# the irreducible SL(2) -> PGL(3) lift
# ---------------------------------------------------------------------------


def fuchsian_lift(m2: Sequence[Sequence[float]]) -> Mat3:
    """Symmetric-square lift: the action of an SL(2) matrix on binary
    quadratic forms.  Multiplicative, sends diag(s, 1/s) to
    diag(s^2, 1, s^-2)."""
    (a, b), (c, d) = m2
    return (
        (a * a, 2.0 * a * b, b * b),
        (a * c, a * d + b * c, b * d),
        (c * c, 2.0 * c * d, d * d),
    )


# ---------------------------------------------------------------------------
# marked surfaces and representations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MarkedSurface:
    """Supported marked surfaces.

    torus: free group <a, b>, boundary word a b a^-1 b^-1.
    pants: generators a = alpha, b = beta, c = gamma with a c b = Id;
    the three boundary classes are a, b, c themselves.
    """

    kind: str

    def __post_init__(self):
        if self.kind not in ("torus", "pants"):
            raise ValueError("unknown surface kind %r" % self.kind)

    @property
    def generators(self) -> tuple[str, ...]:
        return ("a", "b") if self.kind == "torus" else ("a", "b", "c")

    @property
    def boundary_words(self) -> tuple[str, ...]:
        return ("abAB",) if self.kind == "torus" else ("a", "b", "c")

    @property
    def relator(self) -> str | None:
        return None if self.kind == "torus" else "acb"


TORUS = MarkedSurface("torus")
PANTS = MarkedSurface("pants")

# corner of the developed square fixed by each corner word; the boundary
# class abAB stabilizes the corner a.b of the fundamental square, so the
# corner at the base vertex is fixed by ABab
TORUS_CORNER_WORD = "ABab"


@dataclass
class Representation:
    """Generator matrices plus the consistency residual of the build.

    For the pair of pants the residual is the relator defect
    |alpha gamma beta - Id|; for the torus (free group, no relator) it is
    the worst tangent-line mismatch of the overdetermined projective
    solves.
    """

    surface: MarkedSurface
    gens: dict[str, Mat3]
    relator_residual: float = 0.0
    fg_params: dict | None = None

    def __post_init__(self):
        # determinant-positive representatives make the spectrum of every
        # positive-rep holonomy positive, and the letter log-dets below
        # keep word determinants exact where cofactor expansion cancels
        gens = {}
        for name, g in self.gens.items():
            if mat_det(g) < 0.0:
                g = mat_scale(g, -1.0)
            gens[name] = g
        object.__setattr__(self, "gens", gens)
        object.__setattr__(
            self, "_logdets",
            {name: math.log(mat_det(g)) for name, g in gens.items()})

    def matrix(self, word: str) -> Mat3:
        return self.matrix_logdet(word)[0]

    def matrix_logdet(self, word: str) -> tuple[Mat3, float]:
        """Word matrix (max entry 1) together with the exact log of its
        determinant, accumulated letterwise."""
        out = IDENTITY3
        logdet = 0.0
        n = 0
        for ch in W.reduce_word(word):
            g = self.gens.get(ch.lower())
            if g is None:
                raise KeyError("unknown generator %r" % ch)
            m = g if ch.islower() else inverse3(g)
            logdet += self._logdets[ch.lower()] * (1 if ch.islower() else -1)
            out = matmul(out, m)
            n += 1
            if n % RENORM_EVERY == 0:
                sc = mat_maxabs(out)
                out = mat_scale(out, 1.0 / sc)
                logdet -= 3.0 * math.log(sc)
        sc = mat_maxabs(out)
        if sc != 1.0:
            out = mat_scale(out, 1.0 / sc)
            logdet -= 3.0 * math.log(sc)
        return out, logdet

    def lengths(self, word: str) -> SimpleRootLengths:
        """Simple root lengths of a word, stable for any word length.

        In the det-1 gauge, with A = log lam1(w) and A' = log lam1(w^-1),
        the spectrum gives l1 = 2A - A' and l2 = 2A' - A; both are
        dominant-root computations, so nothing degrades when the spectrum
        spans hundreds of nats.
        """
        m, ld = self.matrix_logdet(word)
        mi, ldi = self.matrix_logdet(W.inverse(word))
        a1 = math.log(_dominant_eigenvalue(m)) - ld / 3.0
        a1i = math.log(_dominant_eigenvalue(mi)) - ldi / 3.0
        l1, l2 = 2.0 * a1 - a1i, 2.0 * a1i - a1
        if l1 <= EIGEN_GAP_TOL or l2 <= EIGEN_GAP_TOL:
            raise NotLoxodromic("word spectrum is not separated")
        lam1 = math.exp(a1)
        return SimpleRootLengths(l1, l2, (lam1, lam1 * math.exp(-l1),
                                          lam1 * math.exp(-l1 - l2)))

    def to_text(self) -> str:
        lines = ["surface = %s" % self.surface.kind,
                 "relator_residual = %.17g" % self.relator_residual]
        for name in sorted(self.gens):
            flat = ", ".join("%.17g" % x for row in self.gens[name] for x in row)
            lines.append("gen.%s = %s" % (name, flat))
        if self.fg_params:
            for k in sorted(self.fg_params):
                lines.append("fg.%s = %.17g" % (k, self.fg_params[k]))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Representation":
        surface = None
        gens: dict[str, Mat3] = {}
        fg: dict[str, float] = {}
        residual = 0.0
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key == "surface":
                surface = MarkedSurface(val)
            elif key == "relator_residual":
                residual = float(val)
            elif key.startswith("gen."):
                xs = [float(t) for t in val.replace(",", " ").split()]
                if len(xs) != 9:
                    raise ValueError("generator needs 9 entries")
                gens[key[4:]] = (tuple(xs[0:3]), tuple(xs[3:6]), tuple(xs[6:9]))
            elif key.startswith("fg."):
                fg[key[3:]] = float(val)
        if surface is None or not gens:
            raise ValueError("incomplete representation text")
        return cls(surface, gens, residual, fg or None)


# ---------------------------------------------------------------------------
# projective map from four point correspondences
# ---------------------------------------------------------------------------


def solve_projective_map(src: Sequence[Vec3], dst: Sequence[Vec3]) -> Mat3:
    """Unique projective map sending four generic points to four generic
    points."""
    if len(src) != 4 or len(dst) != 4:
        raise ValueError("need exactly four point pairs")
    s = mat_from_columns(src[0], src[1], src[2])
    t = mat_from_columns(dst[0], dst[1], dst[2])
    ds, dt = mat_det(s), mat_det(t)
    if abs(ds) < 1e-16 or abs(dt) < 1e-16:
        raise GluingInconsistent("projective solve: triple is degenerate")
    alpha = matvec(adjugate3(s), src[3])
    beta = matvec(adjugate3(t), dst[3])
    cols = []
    for i in range(3):
        if abs(alpha[i]) < 1e-14 * max(abs(a) for a in alpha):
            raise GluingInconsistent("projective solve: fourth point degenerate")
        col = scale3((t[0][i], t[1][i], t[2][i]), beta[i] / alpha[i] * ds / dt)
        cols.append(col)
    m = matmul(mat_from_columns(*cols), adjugate3(s))
    # projective sign gauge: pick the determinant-positive representative,
    # the one whose spectrum is positive for holonomies of positive reps
    if mat_det(m) < 0.0:
        m = mat_scale(m, -1.0)
    return mat_normalize(m)


def _line_residual(m: Mat3, pairs: Iterable[tuple[Flag, Flag]]) -> float:
    adj = adjugate3(m)
    worst = 0.0
    for fsrc, fdst in pairs:
        img = vecmat(fsrc.line, adj)
        img = scale3(img, 1.0 / norm3(img))
        worst = max(worst, 1.0 - abs(dot3(img, fdst.line)))
    return worst


# ---------------------------------------------------------------------------
# Fock-Goncharov parameters for the two supported surfaces
# ---------------------------------------------------------------------------

TORUS_PARAM_KEYS = ("T:tri", "T:tri'", "D1:d", "D2:d", "D1:a", "D2:a",
                    "D1:b", "D2:b")
PANTS_PARAM_KEYS = ("T:tri", "T:tri'", "D1:A", "D2:A", "D1:B", "D2:B",
                    "D1:C", "D2:C")


def _check_positive(params: dict) -> None:
    for k, v in params.items():
        if not (v > 0.0) or not math.isfinite(v):
            raise NotPositive(k)


def torus_params(t_tri=1.0, t_tri_p=1.0, d=(1.0, 1.0), a=(1.0, 1.0),
                 b=(1.0, 1.0)) -> dict:
    """Coordinates of the once-holed torus: triple ratios of the two
    triangles of the square plus (-D1, -D2) of the diagonal, bottom and
    right edge classes (8 positive numbers)."""
    return {
        "T:tri": t_tri, "T:tri'": t_tri_p,
        "D1:d": d[0], "D2:d": d[1],
        "D1:a": a[0], "D2:a": a[1],
        "D1:b": b[0], "D2:b": b[1],
    }


def pants_params(t_tri=1.0, t_tri_p=1.0, ea=(1.0, 1.0), eb=(1.0, 1.0),
                 ec=(1.0, 1.0)) -> dict:
    """Coordinates of the pair of pants: triple ratios of its two ideal
    triangles plus (-D1, -D2) of the three spiralling edges A, B, C
    (8 positive numbers)."""
    return {
        "T:tri": t_tri, "T:tri'": t_tri_p,
        "D1:A": ea[0], "D2:A": ea[1],
        "D1:B": eb[0], "D2:B": eb[1],
        "D1:C": ec[0], "D2:C": ec[1],
    }


# ---------------------------------------------------------------------------
# holonomy from parameters: once-holed torus
# ---------------------------------------------------------------------------


def _torus_square_flags(p: dict) -> tuple[Flag, Flag, Flag, Flag, Flag, Flag]:
    """Flags at the fundamental square corners v0..v3 (anticlockwise,
    diagonal v0-v2), plus the developed flags below the bottom edge and
    right of the right edge."""
    conf = ConfParams(
        {(0, 1, 2): p["T:tri"], (0, 2, 3): p["T:tri'"]},
        {(0, 2): (p["D1:d"], p["D2:d"])},
    )
    f0, f1, f2, f3 = reconstruct(conf, PolygonTriangulation.fan(4))
    below = extend_quad(f0, f1, f2, p["D1:a"], p["D2:a"], p["T:tri'"])
    right = extend_quad(f1, f2, f0, p["D1:b"], p["D2:b"], p["T:tri'"])
    return f0, f1, f2, f3, below, right


def build_torus_rep(params: dict) -> Representation:
    """Holonomy of the once-holed torus from its 8 edge/triangle
    coordinates.

    Deck generators are solved from flag quadruples: a carries the left
    edge of the developed square to the right edge, b the bottom to the
    top.  The returned residual is the worst mismatch of the tangent
    lines, which the point-based solve never saw.
    """
    _check_positive(params)
    f0, f1, f2, f3, below, right = _torus_square_flags(params)
    m_a = solve_projective_map(
        [f0.point, f3.point, f2.point, meet(f0.line, f3.line)],
        [f1.point, f2.point, right.point, meet(f1.line, f2.line)],
    )
    m_b = solve_projective_map(
        [f0.point, f1.point, below.point, meet(f0.line, f1.line)],
        [f3.point, f2.point, f0.point, meet(f3.line, f2.line)],
    )
    residual = max(
        _line_residual(m_a, [(f0, f1), (f3, f2), (f2, right)]),
        _line_residual(m_b, [(f0, f3), (f1, f2), (below, f0)]),
    )
    return Representation(TORUS, {"a": m_a, "b": m_b}, residual, dict(params))


def torus_corner_flag(rep: Representation) -> Flag:
    """Fixed flag of the corner word at the base vertex of the square.

    Unipotent boundary: the unique fixed flag.  Loxodromic boundary: the
    attracting flag of the corner word, which is where the developed
    square's base corner sits.
    """
    return canonical_flag(rep.matrix(TORUS_CORNER_WORD), "plus")


def parametrize_torus(rep: Representation) -> dict:
    """Read the 8 torus coordinates off a representation.

    The square corners are the orbit of the corner-word fixed flag:
    (xi0, a xi0, ab xi0, b xi0).
    """
    xi0 = torus_corner_flag(rep)
    a, b = rep.gens["a"], rep.gens["b"]
    xi1 = apply_matrix(a, xi0)
    xi3 = apply_matrix(b, xi0)
    xi2 = apply_matrix(a, xi3)
    below = apply_matrix(inverse3(b), xi0)
    right = apply_matrix(a, xi2)
    vals = {
        "T:tri": triple_ratio(xi0, xi1, xi2),
        "T:tri'": triple_ratio(xi0, xi2, xi3),
        "D1:d": -edge_function(1, xi0, xi2, xi3, xi1),
        "D2:d": -edge_function(2, xi0, xi2, xi3, xi1),
        "D1:a": -edge_function(1, xi0, xi1, xi2, below),
        "D2:a": -edge_function(2, xi0, xi1, xi2, below),
        "D1:b": -edge_function(1, xi1, xi2, xi0, right),
        "D2:b": -edge_function(2, xi1, xi2, xi0, right),
    }
    _check_positive(vals)
    return vals


# ---------------------------------------------------------------------------
# holonomy from parameters: pair of pants
# ---------------------------------------------------------------------------


def build_pants_rep(params: dict) -> Representation:
    """Holonomy of the pair of pants (marking alpha gamma beta = Id) from
    its 8 coordinates.

    The flag pattern is developed around the repelling fixed points
    q0 = gamma-, q1 = beta-, q2 = alpha-; each boundary monodromy is then
    the projective map realizing its combinatorial action on the fan of
    developed triangles.
    """
    _check_positive(params)
    t, tp = params["T:tri"], params["T:tri'"]
    ea = (params["D1:A"], params["D2:A"])
    eb = (params["D1:B"], params["D2:B"])
    ec = (params["D1:C"], params["D2:C"])
    q0, q1, q2 = standard_triple(t)
    # across the B edge (q0 -> q2): third vertex of the far triangle is
    # gamma.beta-
    q3 = extend_quad_other_side(q0, q2, q1, eb[0], eb[1], tp)
    # across the A lift (q3 -> q0): gamma.alpha-
    q4 = extend_quad(q3, q0, q2, ea[0], ea[1], t)
    m_gamma = solve_projective_map(
        [q0.point, q1.point, q2.point, meet(q0.line, q1.line)],
        [q0.point, q3.point, q4.point, meet(q0.line, q3.line)],
    )
    # across the C edge (q2 -> q1): alpha.gamma-
    q5 = extend_quad_other_side(q2, q1, q0, ec[0], ec[1], tp)
    # across the B lift (q5 -> q2): alpha.beta-
    q6 = extend_quad(q5, q2, q1, eb[0], eb[1], t)
    m_alpha = solve_projective_map(
        [q2.point, q0.point, q1.point, meet(q0.line, q1.line)],
        [q2.point, q5.point, q6.point, meet(q5.line, q6.line)],
    )
    # across the A edge (q1 -> q0): beta.alpha-
    q7 = extend_quad_other_side(q1, q0, q2, ea[0], ea[1], tp)
    # across the C lift (q7 -> q1): beta.gamma-
    q8 = extend_quad(q7, q1, q0, ec[0], ec[1], t)
    m_beta = solve_projective_map(
        [q1.point, q2.point, q0.point, meet(q2.line, q0.line)],
        [q1.point, q7.point, q8.point, meet(q7.line, q8.line)],
    )
    rel = matmul(m_alpha, matmul(m_gamma, m_beta))
    residual = mat_close_to_identity(rel)
    line_res = max(
        _line_residual(m_gamma, [(q0, q0), (q1, q3), (q2, q4)]),
        _line_residual(m_alpha, [(q2, q2), (q0, q5), (q1, q6)]),
        _line_residual(m_beta, [(q1, q1), (q2, q7), (q0, q8)]),
    )
    return Representation(PANTS, {"a": m_alpha, "b": m_beta, "c": m_gamma},
                          max(residual, line_res), dict(params))


def holonomy_from_fg(params: dict, surface: MarkedSurface) -> Representation:
    if surface.kind == "torus":
        return build_torus_rep(params)
    return build_pants_rep(params)


def _pants_base_flags(rep: Representation):
    m_alpha, m_beta, m_gamma = rep.gens["a"], rep.gens["b"], rep.gens["c"]
    q0 = canonical_flag(m_gamma, "minus")
    q1 = canonical_flag(m_beta, "minus")
    q2 = canonical_flag(m_alpha, "minus")
    q3 = apply_matrix(m_gamma, q1)   # gamma . beta-
    q5 = apply_matrix(m_alpha, q0)   # alpha . gamma-
    q7 = apply_matrix(m_beta, q2)    # beta . alpha-
    if not is_generic([q0, q1, q2]):
        raise NonGenericFlags("pants base flags are not generic")
    return q0, q1, q2, q3, q5, q7


def parametrize_pants(rep: Representation) -> dict:
    """Read the 8 pants coordinates off the canonical flags at the
    repelling boundary fixed points and their translates."""
    q0, q1, q2, q3, q5, q7 = _pants_base_flags(rep)
    vals = {
        "T:tri": triple_ratio(q2, q0, q1),
        "T:tri'": triple_ratio(q2, q3, q0),
        "D1:B": -edge_function(1, q0, q2, q3, q1),
        "D2:B": -edge_function(2, q0, q2, q3, q1),
        "D1:C": -edge_function(1, q2, q1, q5, q0),
        "D2:C": -edge_function(2, q2, q1, q5, q0),
        "D1:A": -edge_function(1, q1, q0, q7, q2),
        "D2:A": -edge_function(2, q1, q0, q7, q2),
    }
    _check_positive(vals)
    return vals


# ---------------------------------------------------------------------------
# pants invariants, the length identities, Goldman coordinates input
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PantsInvariants:
    """Log edge invariants sigma_i per edge, log triple ratios of the two
    triangles, and the derived Darboux internal coordinates."""

    sigma1: dict[str, float]
    sigma2: dict[str, float]
    t_tri: float
    t_tri_prime: float

    @property
    def x_p(self) -> float:
        return sum(self.sigma2[e] - self.sigma1[e] for e in "ABC") / 12.0

    @property
    def y_p(self) -> float:
        return -self.t_tri + self.t_tri_prime


def pants_invariants(rep: Representation) -> PantsInvariants:
    p = parametrize_pants(rep)
    return PantsInvariants(
        {e: math.log(p["D1:" + e]) for e in "ABC"},
        {e: math.log(p["D2:" + e]) for e in "ABC"},
        math.log(p["T:tri"]),
        math.log(p["T:tri'"]),
    )


def verify_length_identities(rep: Representation) -> tuple[float, ...]:
    """Residuals of the six identities tying simple-root lengths of the
    boundary monodromies to the edge/triangle invariants:

        l1(alpha) = s1(C) + s2(B)
        l2(alpha) = s2(C) + t + s1(B) + t'
    and cyclically for beta (A,C) and gamma (B,A).
    """
    inv = pants_invariants(rep)
    s1, s2 = inv.sigma1, inv.sigma2
    t, tp = inv.t_tri, inv.t_tri_prime
    la = simple_root_lengths(rep.gens["a"])
    lb = simple_root_lengths(rep.gens["b"])
    lc = simple_root_lengths(rep.gens["c"])
    return (
        abs(la.l1 - (s1["C"] + s2["B"])),
        abs(la.l2 - (s2["C"] + t + s1["B"] + tp)),
        abs(lb.l1 - (s1["A"] + s2["C"])),
        abs(lb.l2 - (s2["A"] + t + s1["C"] + tp)),
        abs(lc.l1 - (s1["B"] + s2["A"])),
        abs(lc.l2 - (s2["B"] + t + s1["A"] + tp)),
    )


# ---------------------------------------------------------------------------
# twist flows
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwistWeights:
    """Diagonal weights (a, b, c) with a + b + c = 0 of a twist flow."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        if abs(self.a + self.b + self.c) > 1e-12:
            raise ValueError("twist weights must sum to zero")


THETA1 = TwistWeights(2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0)
THETA2 = TwistWeights(1.0 / 3.0, 1.0 / 3.0, -2.0 / 3.0)
TWIST_BULGING = TwistWeights(-1.0 / 3.0, 2.0 / 3.0, -1.0 / 3.0)  # theta2 - theta1


def twist_matrix(m: Mat3, s: float, w: TwistWeights) -> Mat3:
    """exp of the diagonal generator in the eigenbasis of m."""
    v, _ = eigenbasis(m)
    d = (
        (math.exp(w.a * s), 0.0, 0.0),
        (0.0, math.exp(w.b * s), 0.0),
        (0.0, 0.0, math.exp(w.c * s)),
    )
    return matmul(v, matmul(d, inverse3(v)))


def twist_flow(rep: Representation, curve: str, s: float,
               w: TwistWeights = THETA1) -> Representation:
    """Twist deformation along a non-separating simple closed curve of the
    torus (one of the marking generators).

    The crossing generator is multiplied on the right by the diagonal
    one-parameter group of the curve's holonomy; the curve's own matrix,
    and hence its simple-root lengths and the boundary monodromy, are
    unchanged.
    """
    if rep.surface.kind != "torus":
        raise ValueError("twist flows are implemented for the torus marking")
    if curve not in ("a", "b"):
        raise ValueError("curve must be a marking generator 'a' or 'b'")
    if s == 0.0:
        return Representation(rep.surface, dict(rep.gens),
                              rep.relator_residual, rep.fg_params)
    g = twist_matrix(rep.gens[curve], s, w)
    other = "b" if curve == "a" else "a"
    gens = dict(rep.gens)
    gens[other] = mat_normalize(matmul(gens[other], g))
    return Representation(rep.surface, gens, rep.relator_residual, None)


# ---------------------------------------------------------------------------
# Fuchsian seed representations
# ---------------------------------------------------------------------------


def _mat2mul(x, y):
    return (
        (x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]),
        (x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]),
    )


def modular_torus_rep() -> Representation:
    """Symmetric-square lift of the modular once-punctured torus.

    The SL(2,Z) pair below realizes the square fundamental domain with
    Farey vertices (0, 1, oo, -1); the commutator is parabolic, so the
    boundary is unipotent and all eight coordinates equal 1.
    """
    a2 = ((2.0, 1.0), (1.0, 1.0))
    b2 = ((-2.0, 1.0), (1.0, -1.0))
    rep = Representation(TORUS, {"a": fuchsian_lift(a2), "b": fuchsian_lift(b2)},
                         0.0, torus_params())
    return rep


def fuchsian_torus_rep(boundary_length: float) -> Representation:
    """Hyperbolic once-holed torus with geodesic boundary of the given
    hyperbolic length, on the symmetric (equal traces) locus, lifted to
    PGL(3).  Boundary simple root lengths are then both equal to the
    hyperbolic length."""
    if boundary_length <= 0:
        raise ValueError("boundary length must be positive")
    c = math.cosh(boundary_length / 2.0)
    lo, hi = 3.0, 3.0 + 2.0 * c
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid**3 - 3.0 * mid**2 - (2.0 * c - 2.0) < 0.0:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    eta = 0.5 * (x + math.sqrt(x * x - 4.0))
    a2 = ((x, -1.0), (1.0, 0.0))
    b2 = ((0.0, eta), (-1.0 / eta, x))
    return Representation(TORUS, {"a": fuchsian_lift(a2), "b": fuchsian_lift(b2)})


def fuchsian_pants_rep(l1: float, l2: float, l3: float) -> Representation:
    """Hyperbolic pair of pants with cuff lengths (l1, l2, l3), lifted to
    PGL(3) with the marking alpha gamma beta = Id."""
    if min(l1, l2, l3) <= 0:
        raise ValueError("cuff lengths must be positive")
    m = math.exp(l1 / 2.0)
    g1 = ((m, 0.0), (0.0, 1.0 / m))
    target = -2.0 * math.cosh(l3 / 2.0)

    def g2_of(d):
        ch, sh = math.cosh(d / 2.0), math.sinh(d / 2.0)
        r = ((ch, sh), (sh, ch))
        r_inv = ((ch, -sh), (-sh, ch))
        d2 = ((math.exp(-l2 / 2.0), 0.0), (0.0, math.exp(l2 / 2.0)))
        return _mat2mul(r, _mat2mul(d2, r_inv))

    def trace12(d):
        g2 = g2_of(d)
        prod = _mat2mul(g1, g2)
        return prod[0][0] + prod[1][1]

    lo, hi = 0.0, 1.0
    while trace12(hi) > target:
        hi *= 2.0
        if hi > 500:
            raise ValueError("pants trace solve failed")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if trace12(mid) > target:
            lo = mid
        else:
            hi = mid
    g2 = g2_of(0.5 * (lo + hi))
    prod = _mat2mul(g1, g2)
    det = prod[0][0] * prod[1][1] - prod[0][1] * prod[1][0]
    g3 = ((prod[1][1] / det, -prod[0][1] / det), (-prod[1][0] / det, prod[0][0] / det))
    rep = Representation(PANTS, {
        "a": fuchsian_lift(g1),
        "c": fuchsian_lift(g2),
        "b": fuchsian_lift(g3),
    })
    rel = matmul(rep.gens["a"], matmul(rep.gens["c"], rep.gens["b"]))
    rep.relator_residual = mat_close_to_identity(rel)
    return rep
