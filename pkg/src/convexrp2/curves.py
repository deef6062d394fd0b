"""Oriented simple closed curves on the once-holed torus.

Curves are slopes: coprime pairs (p, q) with an orientation sign.  The
canonical word of a slope is its Christoffel word in the marking
generators a, b (inverse letters for negative entries), built off the
Stern-Brocot tree so that enumeration order and words are reproducible
run to run.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import NoValidLift
from . import words as W

BOUNDARY_WORD = "abAB"  # the distinguished boundary class alpha


@dataclass(frozen=True, order=True)
class Slope:
    """Coprime (p, q) with p > 0 (or p = 0, q = 1) plus an orientation
    sign; sign -1 is the curve with reversed orientation."""

    p: int
    q: int
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise ValueError("sign must be +-1")
        if math.gcd(self.p, self.q) != 1:
            raise ValueError("slope must be a coprime pair")
        if not (self.p > 0 or (self.p == 0 and self.q == 1)):
            raise ValueError("slope not in canonical form")

    @property
    def level(self) -> int:
        return max(abs(self.p), abs(self.q))

    def reversed(self) -> "Slope":
        return Slope(self.p, self.q, -self.sign)


def _stern_brocot_pairs(n: int) -> list[tuple[int, int]]:
    """Positive coprime pairs with max(p, q) <= n in Stern-Brocot
    breadth-first order, starting from the axes (1,0), (0,1)."""
    out = [(1, 0), (0, 1)]
    frontier = [((1, 0), (0, 1))]
    while frontier:
        nxt = []
        for left, right in frontier:
            med = (left[0] + right[0], left[1] + right[1])
            if max(med) <= n:
                out.append(med)
                nxt.append((left, med))
                nxt.append((med, right))
        frontier = nxt
    return out


def enumerate_slopes(n: int) -> list[Slope]:
    """All oriented slopes with max(|p|, |q|) <= n, both orientations,
    breadth-first so partial McShane sums are reproducible."""
    if n < 1:
        raise ValueError("level must be >= 1")
    slopes: list[Slope] = []
    seen = set()
    for (p, q) in _stern_brocot_pairs(n):
        variants = [(p, q)]
        if p > 0 and q > 0:
            variants.append((p, -q))
        for (pp, qq) in variants:
            if (pp, qq) in seen:
                continue
            seen.add((pp, qq))
            slopes.append(Slope(pp, qq, 1))
            slopes.append(Slope(pp, qq, -1))
    slopes.sort(key=lambda s: (s.level, abs(s.q), s.q < 0, -s.sign, s.p))
    return slopes


@lru_cache(maxsize=None)
def _christoffel_positive(p: int, q: int) -> str:
    """Lower Christoffel word of the positive slope (p, q): the digital
    line with p letters a and q letters b (floor-difference form)."""
    n = p + q
    letters = []
    prev = 0
    for i in range(1, n + 1):
        cur = (i * q) // n
        letters.append("a" if cur == prev else "b")
        prev = cur
    return "".join(letters)


@dataclass(frozen=True)
class CurveWord:
    """Cyclically reduced primitive word realizing a slope."""

    word: str
    slope: Slope


def christoffel_word(s: Slope) -> CurveWord:
    """Word of the oriented slope: Christoffel word of (|p|, |q|) with
    letters mirrored for negative entries, inverted for sign -1."""
    p, q = s.p, s.q
    base = _christoffel_positive(abs(p), abs(q))
    if p < 0:
        base = base.replace("a", "A")
    if q < 0:
        base = base.replace("b", "B")
    word = base if s.sign == 1 else W.inverse(base)
    return CurveWord(word, s)


# ---------------------------------------------------------------------------
# McShane lifts: pairing each oriented curve with a boundary conjugate
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _tree_factorization(p: int, q: int) -> tuple[str, str, str]:
    """(C1, C2, c) for the positive slope (p, q), p, q >= 1.

    C1 C2 is the standard factorization of the Christoffel word along the
    Stern-Brocot tree, and c is the conjugator with [C1, C2] = c (abAB)
    c^-1, maintained through the descent: left child (C1, M) multiplies c
    by C1 on the left, right child (M, C2) keeps it.
    """
    left, right = (1, 0), (0, 1)
    w_left, w_right = "a", "b"
    c = ""
    while True:
        med = (left[0] + right[0], left[1] + right[1])
        w_med = w_left + w_right
        if med == (p, q):
            return w_left, w_right, c
        # descend: target strictly inside one of the subintervals
        # slope order: (1,0) has slope q/p = 0, (0,1) slope infinity
        if p * med[1] - q * med[0] > 0:
            # target slope q/p < mediant slope: go left: (left, med)
            right, w_right = med, w_med
            c = w_left + c
        else:
            left, w_left = med, w_med


def _mirror(word: str) -> str:
    """The automorphism a -> a, b -> b^-1 (sends slope (p,q) to (p,-q))."""
    return word.translate(str.maketrans("bB", "Bb"))


# --- balancing the puncture lift along the curve axis (numerics only) ---
#
# tau is invariant under u -> gamma^k u, but the coefficients it is
# computed from scale like the hyperbolic distance of the lift from the
# middle of the axis, and the tree conjugators can park the lift
# e^(-2 length) away from a fixed point, far below double resolution.
# The right k is therefore found in exact integer arithmetic on the
# modular probe and cached with the pair.

_SL2_GEN = {
    "a": ((2, 1), (1, 1)),
    "A": ((1, -1), (-1, 2)),
    "b": ((-2, 1), (1, -1)),
    "B": ((-1, -1), (-1, -2)),
}


def _sl2_word(word: str):
    """Exact integer SL(2,Z) matrix of a word in the modular marking."""
    m = ((1, 0), (0, 1))
    for ch in word:
        x = _SL2_GEN[ch]
        m = (
            (m[0][0] * x[0][0] + m[0][1] * x[1][0],
             m[0][0] * x[0][1] + m[0][1] * x[1][1]),
            (m[1][0] * x[0][0] + m[1][1] * x[1][0],
             m[1][0] * x[0][1] + m[1][1] * x[1][1]),
        )
    return m


def _log_fraction(fr: Fraction) -> float:
    """log |fr| for fractions whose terms may exceed float range."""
    n, d = abs(fr.numerator), fr.denominator
    if n == 0:
        return -math.inf

    def _log_int(k: int) -> float:
        bits = k.bit_length()
        if bits <= 900:
            return math.log(k)
        shift = bits - 64
        return math.log(k >> shift) + shift * math.log(2.0)

    return _log_int(n) - _log_int(d)


def _balance_conjugator(gamma: str, u: str) -> str:
    """Replace u by gamma^k u so the puncture lift sits near the middle of
    the curve axis on the Fuchsian probe."""
    (a, b), (c, d) = _sl2_word(gamma)
    tr = a + d
    if c == 0 or tr * tr <= 4:
        return u
    # fixed points t = ((a-d) +- sqrt(tr^2-4)) / (2c) as high-precision
    # fractions (128 fractional bits)
    prec = 1 << 128
    root = Fraction(math.isqrt((tr * tr - 4) * prec * prec), prec)
    t1 = (Fraction(a - d) + root) / (2 * c)
    t2 = (Fraction(a - d) - root) / (2 * c)

    def coord(mat) -> Fraction | None:
        # image of infinity under an exact Mobius map, in the (t1, t2)
        # projective coordinate
        if mat[1][0] == 0:
            return None
        p = Fraction(mat[0][0], mat[1][0])
        den = p - t2
        if den == 0:
            return None
        return (p - t1) / den

    um = _sl2_word(u)
    x = coord(um)
    if x is None or x == 0:
        return u
    gm = _sl2_word(gamma)
    xg = coord((
        (gm[0][0] * um[0][0] + gm[0][1] * um[1][0],
         gm[0][0] * um[0][1] + gm[0][1] * um[1][1]),
        (gm[1][0] * um[0][0] + gm[1][1] * um[1][0],
         gm[1][0] * um[0][1] + gm[1][1] * um[1][1]),
    ))
    if xg is None or xg == 0 or (xg > 0) != (x > 0):
        return u
    log_x = _log_fraction(x)
    rate = _log_fraction(xg) - log_x
    if abs(rate) < 1e-9:
        return u
    k = round(-log_x / rate)
    k = max(-128, min(128, k))
    if k == 0:
        return u
    step = gamma if k > 0 else W.inverse(gamma)
    return W.concat(step * abs(k), u)


@lru_cache(maxsize=None)
def mcshane_pair(s: Slope, eps: int = 1) -> tuple[str, str]:
    """(curve word, conjugator u) for the pants marking of an oriented
    slope.

    The embedded pants bounded by the curve carries a marking
    alpha beta^-1 gamma = 1 with alpha = u (abAB)^eps u^-1 and beta a
    parallel copy of gamma; the pairs below satisfy that relation in the
    free group exactly.  Built from the Stern-Brocot standard
    factorization W = C1 C2 with [C1, C2] = c (abAB) c^-1:

        eps=+1, orientation +1: gamma = C2 C1,      u = c
        eps=+1, orientation -1: gamma = (C1 C2)^-1, u = c
        eps=-1, orientation +1: gamma = C1 C2,      u = W^-1 c
        eps=-1, orientation -1: gamma = (C2 C1)^-1, u = Y c

    with hand-derived pairs on the axis slopes and the a -> a, b -> b^-1
    mirror transport (which exchanges the two eps families) on the
    negative sector.  The two families select the two half-gap triangles
    of the same oriented curve.
    """
    p, q, sign = s.p, s.q, s.sign
    if (p, q) == (1, 0):
        if eps == 1:
            gamma, u = ("a", "B") if sign == 1 else ("A", "a")
        else:
            gamma, u = ("a", "") if sign == 1 else ("A", "B")
    elif (p, q) == (0, 1):
        if eps == 1:
            gamma, u = ("b", "B") if sign == 1 else ("B", "A")
        else:
            gamma, u = ("b", "A") if sign == 1 else ("B", "b")
    elif q > 0:
        c1, c2, c = _tree_factorization(p, q)
        w, y = c1 + c2, c2 + c1
        if eps == 1:
            gamma, u = (y, c) if sign == 1 else (W.inverse(w), c)
        else:
            if sign == 1:
                gamma, u = w, W.concat(W.inverse(w), c)
            else:
                gamma, u = W.inverse(y), W.concat(y, c)
    else:
        # mirror sector: transport flips the eps family and appends the
        # b^-1 fixing phi(abAB) = b^-1 (abAB)^-1 b
        c1, c2, c = _tree_factorization(p, -q)
        w, y = c1 + c2, c2 + c1
        if eps == 1:
            if sign == 1:
                gamma = _mirror(w)
                u = W.concat(_mirror(W.concat(W.inverse(w), c)), "B")
            else:
                gamma = W.inverse(_mirror(y))
                u = W.concat(_mirror(W.concat(y, c)), "B")
        else:
            if sign == 1:
                gamma = _mirror(y)
                u = W.concat(_mirror(c), "B")
            else:
                gamma = W.inverse(_mirror(w))
                u = W.concat(_mirror(c), "B")
    return gamma, _balance_conjugator(gamma, u)


def mcshane_triple(s: Slope, eps: int = 1) -> tuple[CurveWord, str]:
    """Curve word plus the boundary conjugate u (abAB)^eps u^-1 whose
    fixed flag is the puncture lift paired with the curve.  Raises
    NoValidLift if the free-group pants relation fails (it never does for
    valid slopes, but the check keeps the construction honest)."""
    gamma, u = mcshane_pair(s, eps)
    boundary = BOUNDARY_WORD if eps == 1 else W.inverse(BOUNDARY_WORD)
    beta = W.concat(gamma, u, boundary, W.inverse(u))
    if not W.are_conjugate(beta, gamma):
        raise NoValidLift("pants relation failed for slope (%d,%d,%+d)"
                          % (s.p, s.q, s.sign))
    puncture_word = W.concat(u, boundary, W.inverse(u))
    return CurveWord(gamma, s), puncture_word
