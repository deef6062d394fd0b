"""Polylogarithms, Fermi-Dirac integrals, the sandwich bounds, Goldman
volume-form coordinates, and the Monte-Carlo reproduction of the
once-holed-torus symplectic volume upper bound.

The bound chain being reproduced: unfolding the McShane identity over a
single curve turns the volume of the t-bounded moduli space into an
integral over (X_P, Y_P, lengths, twists); boxing the internal and twist
coordinates by t leaves a two-dimensional length integral dominated by
complete Fermi-Dirac integrals, giving V <= -(4 t^5 + 8 t^4) Li_3(-e^t).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientSamples, UnsupportedArgument
from .holonomy import (
    PantsInvariants,
    Representation,
    TWIST_BULGING,
    canonical_flag,
    simple_root_lengths,
    twist_flow,
)
from . import words as W

LOG2 = math.log(2.0)


# ---------------------------------------------------------------------------
# polylogarithm and Fermi-Dirac integrals
# ---------------------------------------------------------------------------


def polylog(k: int, x: float) -> float:
    """Li_k(x) for integer k >= 1 and x <= 0.

    Series for |x| <= 1/2; otherwise through the complete Fermi-Dirac
    integral with t = log(-x), evaluated by quadrature.  The two branches
    agree to 1e-10 on their overlap.
    """
    if k < 1:
        raise UnsupportedArgument("polylog order must be >= 1")
    if x > 0.0:
        raise UnsupportedArgument("polylog implemented for x <= 0 only")
    if x == 0.0:
        return 0.0
    if k == 1:
        return -math.log1p(-x)
    if x >= -0.5:
        return _polylog_series(k, x)
    return -fermi_dirac(k - 1, math.log(-x)) / math.factorial(k - 1)


def _polylog_series(k: int, x: float) -> float:
    total = 0.0
    term = x
    n = 1
    while True:
        add = term / n**k
        total += add
        if abs(add) < 1e-17 * max(abs(total), 1e-300) or n > 200:
            return total
        n += 1
        term *= x


_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(48)


def _gauss_panel(f, a: float, b: float) -> float:
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return half * float(np.sum(_GAUSS_WEIGHTS * f(mid + half * _GAUSS_NODES)))


def _adaptive(f, a: float, b: float, tol: float, depth: int = 0) -> float:
    whole = _gauss_panel(f, a, b)
    mid = 0.5 * (a + b)
    left = _gauss_panel(f, a, mid)
    right = _gauss_panel(f, mid, b)
    if abs(left + right - whole) <= tol * max(1.0, abs(left + right)) or depth > 30:
        return left + right
    return (_adaptive(f, a, mid, tol / 1.4, depth + 1)
            + _adaptive(f, mid, b, tol / 1.4, depth + 1))


def fermi_dirac(d: int, t: float) -> float:
    """Complete Fermi-Dirac integral: int_0^inf x^d / (1 + e^(x-t)) dx.

    Equals -d! Li_{d+1}(-e^t); evaluated by adaptive Gauss quadrature on
    [0, t + 60d + 60].
    """
    if d < 0:
        raise UnsupportedArgument("degree must be >= 0")
    upper = max(t, 0.0) + 60.0 * d + 60.0

    def integrand(x):
        z = x - t
        out = np.empty_like(x)
        pos = z > 0
        out[pos] = np.exp(-z[pos]) / (1.0 + np.exp(-z[pos]))
        out[~pos] = 1.0 / (1.0 + np.exp(z[~pos]))
        if d:
            out *= x**d
        return out

    return _adaptive(integrand, 0.0, upper, 1e-12)


def a_constant(k: int) -> float:
    """a_k = -Li_k(-1); a_2 = pi^2/12, a_3 = 3 zeta(3)/4."""
    return -polylog(k, -1.0)


def sandwich_bounds(d: int, t: float) -> tuple[float, float, float]:
    """(lower, value, upper) with value = -Li_d(-e^t) and the polynomial
    envelope obtained by integrating t <= log(1+e^t) <= t + log 2 d-1
    times:

        lower = t^d/d! + sum_{k=2..d} a_k t^(d-k)/(d-k)!
        upper = lower + log(2) t^(d-1)/(d-1)!
    """
    if d < 2:
        raise UnsupportedArgument("sandwich bounds start at d = 2")
    if t < 0:
        raise UnsupportedArgument("sandwich bounds need t >= 0")
    lower = t**d / math.factorial(d)
    for k in range(2, d + 1):
        lower += a_constant(k) * t ** (d - k) / math.factorial(d - k)
    upper = lower + LOG2 * t ** (d - 1) / math.factorial(d - 1)
    value = -polylog(d, -math.exp(t)) if t < 700 else lower
    return lower, value, upper


# ---------------------------------------------------------------------------
# closed-form integral kernels of the volume recursion
# ---------------------------------------------------------------------------


def h_kernel(x: float, y: float) -> float:
    def sig(z):
        if z > 0:
            e = math.exp(-z)
            return e / (1.0 + e)
        return 1.0 / (1.0 + math.exp(z))
    return sig(0.5 * (x + y)) + sig(0.5 * (x - y))


def r_kernel_closed(i: int, j: int, t: float, l1_bd: float,
                    l2_gamma: float) -> float:
    """Closed form of the boundary pants-pair moment integral

        int_{0<l2<t l1} l1^i l2^j H(l1 - l2_gamma - 5t, L1) dl1 dl2
      = t^(j+1)/(j+1) 2^(i+j+2) (i+j+1)!
        (-Li_{i+j+2}(-e^((5t+l2_gamma+L1)/2)) - Li_{i+j+2}(-e^((5t+l2_gamma-L1)/2))).
    """
    if i < 0 or j < 0:
        raise UnsupportedArgument("moment exponents must be >= 0")
    m = i + j + 1
    pref = t ** (j + 1) / (j + 1) * 2 ** (m + 1) * math.factorial(m)
    return pref * (-polylog(m + 1, -math.exp(0.5 * (5 * t + l2_gamma + l1_bd)))
                   - polylog(m + 1, -math.exp(0.5 * (5 * t + l2_gamma - l1_bd))))


def r_kernel_quadrature(i: int, j: int, t: float, l1_bd: float,
                        l2_gamma: float) -> float:
    def integrand(l1):
        inner = l1 ** i * (t * l1) ** (j + 1) / (j + 1)
        hs = np.array([h_kernel(x - l2_gamma - 5.0 * t, l1_bd) for x in l1])
        return inner * hs

    upper = 5.0 * t + l2_gamma + l1_bd + 60.0 * (i + j + 2) + 60.0
    return _adaptive(integrand, 0.0, upper, 1e-10)


def d_kernel_closed(i: int, j: int, k: int, l: int, t: float,
                    l1_bd: float) -> float:
    """Closed form of the interior pants-pair moment integral

        int l1^i l2^j m1^k m2^l H(l1 + m1 - 5t, L1) over the two t-cones
      = 2^(i+j+k+l+4) (i+j+1)!(k+l+1)! t^(j+l+2)/((j+1)(l+1))
        (-Li_{i+j+k+l+4}(-e^((5t-L1)/2)) - Li_{i+j+k+l+4}(-e^((5t+L1)/2))).
    """
    if min(i, j, k, l) < 0:
        raise UnsupportedArgument("moment exponents must be >= 0")
    m = i + j + k + l + 3
    pref = (2 ** (m + 1) * math.factorial(i + j + 1) * math.factorial(k + l + 1)
            * t ** (j + l + 2) / ((j + 1) * (l + 1)))
    return pref * (-polylog(m + 1, -math.exp(0.5 * (5 * t - l1_bd)))
                   - polylog(m + 1, -math.exp(0.5 * (5 * t + l1_bd))))


def d_kernel_quadrature(i: int, j: int, k: int, l: int, t: float,
                        l1_bd: float) -> float:
    # reduce the 2-D cone integral to 1-D by the beta identity first
    m = i + j + k + l + 3
    beta = (math.factorial(i + j + 1) * math.factorial(k + l + 1)
            / math.factorial(m))
    pref = t ** (j + l + 2) / ((j + 1) * (l + 1)) * beta

    def integrand(u):
        hs = np.array([h_kernel(x - 5.0 * t, l1_bd) for x in u])
        return u ** m * hs

    upper = 5.0 * t + l1_bd + 60.0 * (m + 1) + 60.0
    return pref * _adaptive(integrand, 0.0, upper, 1e-10)


def d_kernel_quadrature_2d(i: int, j: int, k: int, l: int, t: float,
                           l1_bd: float, n: int = 400) -> float:
    """Direct 2-D tensor-Gauss evaluation of the interior kernel (slow,
    used as an independent cross-check of the closed form)."""
    upper = 5.0 * t + l1_bd + 40.0
    nodes, weights = np.polynomial.legendre.leggauss(n)
    x = 0.5 * upper * (nodes + 1.0)
    w = 0.5 * upper * weights
    fx = x ** i * (t * x) ** (j + 1) / (j + 1)
    fy = x ** k * (t * x) ** (l + 1) / (l + 1)
    h = np.array([[h_kernel(xx + yy - 5.0 * t, l1_bd) for yy in x] for xx in x])
    return float(np.einsum("i,j,ij", fx * w, fy * w, h))


# ---------------------------------------------------------------------------
# Goldman Darboux coordinates
# ---------------------------------------------------------------------------


def goldman_coordinates(pi: PantsInvariants, l1: float, l2: float,
                        theta1: float, theta2: float) -> tuple[float, ...]:
    """(X_P, Y_P, l1, l2, theta2 - theta1, (theta1 + theta2)/2): the
    coordinate system in which the symplectic volume form is Lebesgue."""
    return (pi.x_p, pi.y_p, l1, l2, theta2 - theta1,
            0.5 * (theta1 + theta2))


# ---------------------------------------------------------------------------
# Monte-Carlo volume bound for the once-holed torus
# ---------------------------------------------------------------------------


@dataclass
class VolumeEstimate:
    t: float
    boundary: tuple[float, float]
    samples: int
    seed: int
    estimate: float
    stderr: float
    chain_closed_form: float
    analytic_bound: float

    def to_json(self) -> str:
        return json.dumps({
            "t": self.t,
            "L": list(self.boundary),
            "samples": self.samples,
            "seed": self.seed,
            "estimate": self.estimate,
            "stderr": self.stderr,
            "analytic_bound": self.analytic_bound,
            "chain_values": [self.chain_closed_form, self.analytic_bound],
        }, indent=2)


def analytic_bound_s11(t: float) -> float:
    """-(4 t^5 + 8 t^4) Li_3(-e^t), the closed-form end of the chain."""
    return -(4.0 * t**5 + 8.0 * t**4) * polylog(3, -math.exp(t))


def chain_closed_form_s11(t: float, l1_bd: float = 0.0) -> float:
    """Intermediate closed-form value of the bound chain.

    Cusped case (L1 = 0): (2t^5 + 4t^4) int x^2/(1+e^(x-t)) dx, which
    equals the analytic bound exactly.  With boundary the kernel is the
    averaged pair of shifted Fermi-Dirac integrals.
    """
    if l1_bd == 0.0:
        return (2.0 * t**5 + 4.0 * t**4) * fermi_dirac(2, t) / 2.0 * 2.0
    return (t**5 + 2.0 * t**4) * (fermi_dirac(2, t + 0.5 * l1_bd)
                                  + fermi_dirac(2, t - 0.5 * l1_bd))


def mc_volume_upper_s11(t: float, boundary: tuple[float, float] = (0.0, 0.0),
                        samples: int = 100_000, seed: int = 0
                        ) -> VolumeEstimate:
    """Monte-Carlo value of the relaxed-region majorant integral.

    Uniform box sampling of X_P in [-t/4, t/4], Y_P in [-2t, 2t],
    (theta2-theta1) in [-t, t]; l1 from an exponential proposal of rate
    1/(t+1) and l2 uniform on the cone section [l1/t, t l1] with
    importance weights.  The integrand is (l1+l2)/2 times the tau-relaxed
    gap kernel; the estimate sits below the closed-form chain value by
    the genuine cone-restriction slack.
    """
    if samples < 1000:
        raise InsufficientSamples("need at least 10^3 samples")
    if t <= 0:
        raise UnsupportedArgument("t must be positive")
    l1_bd = boundary[0]
    rng = np.random.Generator(np.random.Philox(key=seed))
    # box factors: sampling them uniformly adds nothing to the variance
    # (the integrand does not depend on them) but honours the region
    box = (0.5 * t) * (4.0 * t) * (2.0 * t)
    _ = rng.uniform(-0.25 * t, 0.25 * t, samples)
    _ = rng.uniform(-2.0 * t, 2.0 * t, samples)
    _ = rng.uniform(-t, t, samples)
    rate = 1.0 / (t + 1.0)
    l1 = rng.exponential(1.0 / rate, samples)
    width = l1 * (t - 1.0 / t)
    if t == 1.0:
        weights = np.zeros(samples)
        l2 = l1.copy()
    else:
        l2 = rng.uniform(l1 / t, t * l1)
        weights = width / (rate * np.exp(-rate * l1))
    if l1_bd == 0.0:
        kern = _sigmoid_np(l1 - t) + _sigmoid_np(l2 - t)
    else:
        kern = 0.5 * (_sigmoid_np(l1 - t - 0.5 * l1_bd)
                      + _sigmoid_np(l1 - t + 0.5 * l1_bd)
                      + _sigmoid_np(l2 - t - 0.5 * l1_bd)
                      + _sigmoid_np(l2 - t + 0.5 * l1_bd))
    values = box * weights * 0.5 * (l1 + l2) * kern
    est = float(np.mean(values))
    std = float(np.std(values, ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return VolumeEstimate(
        t, boundary, samples, seed, est, std,
        chain_closed_form_s11(t, l1_bd), analytic_bound_s11(t)
        if l1_bd == 0.0 else chain_closed_form_s11(t, l1_bd),
    )


def _sigmoid_np(x):
    out = np.empty_like(x)
    pos = x > 0
    out[pos] = np.exp(-x[pos]) / (1.0 + np.exp(-x[pos]))
    out[~pos] = 1.0 / (1.0 + np.exp(x[~pos]))
    return out


def v03_bound(t: float, samples: int = 10_000, seed: int = 0
              ) -> tuple[float, float]:
    """(analytic, mc): the pair-of-pants internal-coordinate box bound
    (6t/12) * 4t = 2 t^2 and its Monte-Carlo box estimate."""
    if t <= 0:
        raise UnsupportedArgument("t must be positive")
    rng = np.random.Generator(np.random.Philox(key=seed))
    x = rng.uniform(-0.25 * t, 0.25 * t, samples)
    y = rng.uniform(-2.0 * t, 2.0 * t, samples)
    inside = (np.abs(x) <= 0.25 * t) & (np.abs(y) <= 2.0 * t)
    return 2.0 * t * t, 2.0 * t * t * float(np.mean(inside))


# ---------------------------------------------------------------------------
# truncated boundedness estimators
# ---------------------------------------------------------------------------


@dataclass
class BoundScan:
    """Truncated lower estimators of the boundedness invariants.

    Any finite scan only bounds the true suprema from below (they range
    over all ideal triangulations / all curves); the report states this.
    """

    depth: int
    m_t: float
    m_d: float
    m_l: float
    m_b: float | None = None

    def note(self) -> str:
        return ("truncated estimators: lower bounds for the suprema over "
                "all ideal triangulations and curves")


def bound_scan(rep: Representation, depth: int = 3,
               with_bulging: bool = False) -> BoundScan:
    """mT, mD, mL estimators from limit-set triangles, quadrilateral edges
    and enumerated curves up to the given depth.

    Optionally mB by bisection on the twist-bulging parameter (quadratic
    cost, off by default).
    """
    from .curves import enumerate_slopes, christoffel_word
    from .hilbert import limit_set
    from .projective import edge_function, triple_ratio

    dom = limit_set(rep, max(depth + 3, 5))
    flags = dom.flags
    n = len(flags)
    m_t = 0.0
    m_d = 0.0
    for i in range(n):
        f1, f2, f3 = flags[i], flags[(i + 1) % n], flags[(i + 2) % n]
        try:
            m_t = max(m_t, abs(math.log(triple_ratio(f1, f2, f3))))
        except Exception:
            continue
    for i in range(n):
        x, w, y, z = (flags[i], flags[(i + 1) % n], flags[(i + 2) % n],
                      flags[(i + 3) % n])
        try:
            d1 = -edge_function(1, x, y, z, w)
            d2 = -edge_function(2, x, y, z, w)
            if d1 > 0 and d2 > 0:
                m_d = max(m_d, abs(math.log(d1) - math.log(d2)))
        except Exception:
            continue
    m_l = 0.0
    if rep.surface.kind == "torus":
        words = [christoffel_word(s).word
                 for s in enumerate_slopes(depth) if s.sign == 1]
    else:
        words = ["a", "b", "c", "ab", "ac", "bc"]
    for word in words:
        try:
            lens = rep.lengths(word)
            m_l = max(m_l, lens.l2 / lens.l1, lens.l1 / lens.l2)
        except Exception:
            continue
    m_b = None
    if with_bulging and rep.surface.kind == "torus":
        m_b = _bulging_witness(rep, m_t + m_d + m_l)
    return BoundScan(depth, m_t, m_d, m_l, m_b)


def _bulging_witness(rep: Representation, threshold: float) -> float:
    """Bisection on the twist-bulging parameter until the triangle-ratio
    estimator exceeds the threshold: an upper-bound witness for the
    maximal bulging allowed inside the bounded set."""
    from .projective import triple_ratio

    def mt_of(s):
        try:
            bulged = twist_flow(rep, "a", s, TWIST_BULGING)
            p = _torus_triangle_ratio(bulged)
            return abs(math.log(p))
        except Exception:
            return math.inf

    lo, hi = 0.0, 1.0
    for _ in range(40):
        if mt_of(hi) > threshold + 1.0:
            break
        hi *= 2.0
        if hi > 64:
            return hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if mt_of(mid) > threshold + 1.0:
            hi = mid
        else:
            lo = mid
    return hi


def _torus_triangle_ratio(rep: Representation) -> float:
    from .holonomy import parametrize_torus
    return parametrize_torus(rep)["T:tri"]
