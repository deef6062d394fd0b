"""Summands and truncated sums of the generalized McShane identity on the
once-holed torus.

Cusp normalization: the gap fractions 1/(1 + e^(l1(g) + tau(g))) over all
oriented simple closed curves sum to 1.  With loxodromic boundary of first
simple root length L1, the terms D(L1, x, x) with x = l1(g) + tau(g) sum
to L1.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

from .errors import NonGenericFlags, NotLoxodromic
from .curves import BOUNDARY_WORD, Slope, enumerate_slopes, mcshane_triple
from .holonomy import Representation, canonical_flag, is_unipotent, simple_root_lengths
from .projective import Flag, apply_matrix, log_triple_ratio
from . import words as W


def D_func(a: float, b: float, c: float) -> float:
    """log((e^(a/2) + e^((b+c)/2)) / (e^(-a/2) + e^((b+c)/2))).

    Evaluated through logaddexp so it is exact for arguments of hundreds
    of nats.  Strictly between 0 and a for a > 0; D(2,0,0) = 1 exactly.
    """
    m = 0.5 * (b + c)
    return _logaddexp(0.5 * a, m) - _logaddexp(-0.5 * a, m)


def _logaddexp(x: float, y: float) -> float:
    if x < y:
        x, y = y, x
    return x + math.log1p(math.exp(y - x))


def _sigmoid(x: float) -> float:
    # 1/(1+e^x), stable both directions
    if x > 0:
        z = math.exp(-x)
        return z / (1.0 + z)
    return 1.0 / (1.0 + math.exp(x))


def H_func(x: float, y: float) -> float:
    """1/(1+e^((x+y)/2)) + 1/(1+e^((x-y)/2)); the a-derivative of D is
    H(b+c, a)/2.  Symmetric in the sign of y, values in (0, 2)."""
    return _sigmoid(0.5 * (x + y)) + _sigmoid(0.5 * (x - y))


def D_general(l1_alpha: float, phi: float, tau_b: float, l1_b: float,
              tau_c: float, l1_c: float) -> float:
    """Interior pants-pair summand as a pure function of its invariants."""
    return D_func(l1_alpha, phi + tau_b + l1_b, phi + tau_c + l1_c)


def R_general(l1_alpha: float, phi_prime: float, tau_b: float, l1_b: float,
              tau_c_inv: float, l1_c_inv: float) -> float:
    """Boundary pants-pair summand (the pants contains a second boundary
    component of the surface)."""
    return D_func(l1_alpha, phi_prime + tau_b + l1_b,
                  phi_prime - tau_c_inv - l1_c_inv)


# ---------------------------------------------------------------------------
# the triangle invariant tau
# ---------------------------------------------------------------------------


def _puncture_flag(rep: Representation, puncture_word: str) -> Flag:
    """Fixed flag of the boundary conjugate: unique for unipotent boundary,
    repelling flag for loxodromic (the spiralling vertex convention)."""
    return canonical_flag(rep.matrix(puncture_word), "minus")


# curves with l1 beyond this contribute below 1e-13 to any sum; their gap
# triple (and the middle eigenvector) is numerically degenerate at double
# precision, and tau is reported as 0 instead
TAU_LENGTH_CUTOFF = 30.0

# below this conditioning the evaluated triple ratio would carry more
# than ~1e-9 of rounding noise; for curves already longer than
# TAU_FALLBACK_LENGTH the term is insensitive to tau and 0 is reported
TAU_COND_FLOOR = 1e-6
TAU_FALLBACK_LENGTH = 12.0


def tau(rep: Representation, s: Slope, eps: int = 1) -> float:
    """log triple ratio of (p~, g p~, g+) for the puncture lift p~ paired
    with the oriented curve g by its pants marking.

    Vanishes identically on the Fuchsian locus and is antisymmetric under
    orientation reversal.  Evaluated in the eigenbasis of the curve
    matrix, where with p~ = sum a_i v_i, line = sum b_i u_i, c_i = a_i b_i
    (so c1 + c2 + c3 = 0) the ratio collapses to

        T = (c1 l1 + c2 l2 + c3 l3) / (c1 l3 + c2 l1 l3 / l2 + c3 l1);

    every term is well-scaled, and the middle-eigenvector error enters
    suppressed by l2/l1, so the value stays accurate for very long words.
    """
    from .curves import BOUNDARY_WORD, mcshane_pair
    from .holonomy import word_eigenbasis
    from .linalg3 import adjugate3, matvec, norm3, scale3, vecmat

    gamma_word, u = mcshane_pair(s, eps)
    lengths = rep.lengths(gamma_word)
    if lengths.l1 > TAU_LENGTH_CUTOFF:
        return 0.0
    base = _puncture_flag(rep, BOUNDARY_WORD if eps == 1
                          else W.inverse(BOUNDARY_WORD))
    # transport the base puncture flag by the (axis-balanced) conjugator;
    # the covector goes through the inverse word product, whose entries
    # stay O(1), never through an adjugate that can sink below the noise
    # floor for long conjugators
    point = matvec(rep.matrix(u), base.point)
    line = vecmat(base.line, rep.matrix(W.inverse(u)))
    point = scale3(point, 1.0 / norm3(point))
    line = scale3(line, 1.0 / norm3(line))
    try:
        v, (l1, l2, l3) = word_eigenbasis(rep, gamma_word)
    except NotLoxodromic:
        if lengths.l1 > TAU_FALLBACK_LENGTH:
            return 0.0
        raise
    a = matvec(adjugate3(v), point)
    b = vecmat(line, v)
    c1, c2, c3 = a[0] * b[0], a[1] * b[1], a[2] * b[2]
    sab = max(abs(x) for x in a) * max(abs(x) for x in b)
    cond = min(abs(c1), abs(c3)) / sab if sab > 0.0 else 0.0
    num = c1 * l1 + c2 * l2 + c3 * l3
    den = c1 * l3 + c2 * (l1 * l3 / l2) + c3 * l1
    if cond <= TAU_COND_FLOOR or den == 0.0 or num / den <= 0.0:
        if lengths.l1 > TAU_FALLBACK_LENGTH:
            # the half-gap sits at a worst-case offset along the axis;
            # the term is insensitive to tau at this length
            return 0.0
        raise NonGenericFlags("gap triple is not positive")
    return math.log(num / den)


def phi1(rep: Representation, beta_word: str, gamma_word: str,
         alpha_word: str | None = None) -> float:
    """log cosh-ratio of the two edge invariants of the pants quadruple
    (alpha-, gamma alpha-, beta+, gamma+); identically 0 on S_{1,1}."""
    return _phi(rep, beta_word, gamma_word, alpha_word, prime=False)


def phi1_prime(rep: Representation, beta_word: str, gamma_word: str,
               alpha_word: str | None = None) -> float:
    """Same with gamma- in the last slot (boundary pants-pair variant)."""
    return _phi(rep, beta_word, gamma_word, alpha_word, prime=True)


def _phi(rep, beta_word, gamma_word, alpha_word, prime):
    from .projective import edge_function
    if alpha_word is None:
        # marking alpha beta^-1 gamma = 1
        alpha_word = W.concat(W.inverse(gamma_word), beta_word)
    g = rep.matrix(gamma_word)
    x1 = _puncture_flag(rep, alpha_word)
    x2 = apply_matrix(g, x1)
    x3 = canonical_flag(rep.matrix(beta_word), "plus")
    x4 = canonical_flag(g, "minus" if prime else "plus")
    d1 = -edge_function(1, x1, x2, x3, x4)
    d2 = -edge_function(2, x1, x2, x3, x4)
    if d1 <= 0 or d2 <= 0:
        raise NonGenericFlags("pants quadruple is not positive")
    return math.log(math.cosh(0.5 * math.log(d2))
                    / math.cosh(0.5 * math.log(d1)))


# ---------------------------------------------------------------------------
# truncated sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SummandRecord:
    slope: Slope
    word: str
    l1: float
    l2: float
    tau: float
    term: float
    partial_sum: float


def _summands(rep: Representation, n: int, term_of, eps: int = 1):
    records: list[SummandRecord] = []
    running = 0.0
    for s in enumerate_slopes(n):
        cw, puncture_word = mcshane_triple(s, eps)
        lengths = rep.lengths(cw.word)
        t = tau(rep, s, eps)
        value = term_of(lengths, t)
        running += value
        records.append(SummandRecord(s, cw.word, lengths.l1, lengths.l2,
                                     t, value, running))
    return running, records


def mcshane_sum_unipotent(rep: Representation, n: int
                          ) -> tuple[float, list[SummandRecord]]:
    """Partial sum of 1/(1 + e^(l1+tau)) over oriented slopes of level
    <= n.  Monotone in n, converging to 1 for positive representations
    with unipotent boundary."""
    if not is_unipotent(rep.matrix(BOUNDARY_WORD)):
        raise NotLoxodromic("boundary monodromy is not unipotent")
    return _summands(rep, n, lambda l, t: _sigmoid(l.l1 + t))


def mcshane_sum_boundary(rep: Representation, n: int
                         ) -> tuple[float, list[SummandRecord]]:
    """Partial sum of D(L1, l1+tau, l1+tau) over oriented slopes,
    converging to L1 = first simple root length of the boundary."""
    l_bd = simple_root_lengths(rep.matrix(BOUNDARY_WORD))
    l1_alpha = l_bd.l1
    total, records = _summands(
        rep, n, lambda l, t: D_func(l1_alpha, l.l1 + t, l.l1 + t))
    return total, records


def boundary_target(rep: Representation) -> float:
    return simple_root_lengths(rep.matrix(BOUNDARY_WORD)).l1


def tail_report(records: list[SummandRecord]) -> dict:
    """Per-level maximum term and a crude exponential decay fit, so users
    can bound the omitted tail heuristically (no rigorous bound is
    claimed)."""
    by_level: dict[int, float] = {}
    for r in records:
        lev = r.slope.level
        by_level[lev] = max(by_level.get(lev, 0.0), r.term)
    levels = sorted(by_level)
    rate = None
    if len(levels) >= 3:
        xs = levels[-min(6, len(levels)):]
        ys = [math.log(max(by_level[x], 1e-320)) for x in xs]
        n = len(xs)
        sx, sy = sum(xs), sum(ys)
        sxx = sum(x * x for x in xs)
        sxy = sum(x * y for x, y in zip(xs, ys))
        denom = n * sxx - sx * sx
        if denom:
            rate = (n * sxy - sx * sy) / denom
    return {"max_term_by_level": by_level,
            "last_level_max_term": by_level[levels[-1]] if levels else None,
            "fitted_log_decay_rate": rate}


def records_to_csv(records: list[SummandRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["p", "q", "sign", "word", "l1", "l2", "tau", "term",
                "partial_sum"])
    for r in records:
        w.writerow([r.slope.p, r.slope.q, r.slope.sign, r.word,
                    "%.17g" % r.l1, "%.17g" % r.l2, "%.17g" % r.tau,
                    "%.17g" % r.term, "%.17g" % r.partial_sum])
    return buf.getvalue()
