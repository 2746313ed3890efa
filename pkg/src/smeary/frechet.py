"""Analytic Frechet function of the pole-plus-hemisphere family.

Let p_delta be the point at geodesic distance delta from the pole along a
fixed meridian and

    G(delta) = E[ d(p_delta, X)^2 ],  X ~ P_{m, alpha}.

By rotational symmetry G depends only on delta, and the hemisphere part
reduces to a single series.  With gamma_m = v_{m+1}/(2 v_m) and

    c_0 = 2 gamma_m,
    c_{j+1} = c_j * (2j+1)^2 / ((2j+2)(m + 2j + 2)),

(the c_j collapse the arcsin Maclaurin coefficients against the moments of
the product-of-cosines kernel over the angular domain) one has

    G(delta) - G(0) = (1 - alpha) delta^2 - alpha * T(delta),
    T(delta)  = sum_j c_j * I_{2j+1}(delta),    I_k(d) = int_0^d sin^k,
    G'(delta) = 2 delta (1 - alpha) - alpha * B(sin delta),
    B(s)      = sum_j c_j s^{2j+1}
              = 2 gamma_m * s * 2F1(1/2, 1/2; 1 + m/2; s^2).

The direct sum converges geometrically only while sin(delta) is bounded
away from 1, and for delta > pi/2 the sine-power integrals saturate and the
terms decay just polynomially.  T is therefore evaluated regime-wise, each
regime exact:

- delta <= pi/2 - 0.1: direct series with the sine-power recurrence.
- delta >= pi/2 + 0.1: reflection T(delta) = 2 T(pi/2) - T(pi - delta),
  using the closed form T(pi/2) = (pi/2) (pi - 2 K_{m-1} / D_m) where
  K_n = int_0^{pi/2} u sin^n u du and D_m = int_0^{pi/2} sin^(m-1) u du.
- the layer around pi/2: T(delta) = T(pi/2) - sum_j c_j J_{2j+1}(e) with
  e = pi/2 - delta and J_k(e) = int_0^e cos^k u du (odd in e, so one
  formula covers both sides), summed with an Euler-Maclaurin tail estimate
  because the terms decay polynomially there.

G(0) itself, the companion additive constant, has the closed form
alpha * (pi^2 - 2 pi K_{m-1}/D_m + W_{m-1}/D_m) with
W_n = int_0^{pi/2} u^2 sin^n u du.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect
from scipy.special import gammaln, hyp2f1

from .errors import (
    ContractViolationError,
    CutLocusError,
    DomainError,
    RootBracketError,
    SeriesTruncationError,
)
from .family import SmearyFamily, gamma_m, log_sphere_volume
from .geometry import (
    CUT_LOCUS_EPS,
    ChartVector,
    SpherePoint,
    _coords,
    exp_at_north,
    project_chart,
)

_HALF_PI = 0.5 * math.pi
_LOG_PI = math.log(math.pi)

# Width of the band around pi/2 in which the mirrored (cosine-power) series
# is used for T; outside it direct summation converges geometrically.
_LAYER_HALF_WIDTH = 0.1

# Term budget for the mirrored series; with the tail estimate the absolute
# error inside the layer is ~1e-11 at m = 2 and smaller for larger m.
_LAYER_MAX_TERMS = 20000

# Above this value of sin^2(delta) the gradient series needs too many terms
# and the hypergeometric closed form is used instead.
_GRAD_SERIES_SIN2_MAX = 0.995


def arcsin_coeff(j: int) -> float:
    """Maclaurin coefficient of u^(2j+1) in arcsin(u).

    arcsin_coeff(0) = 1, arcsin_coeff(1) = 1/6, arcsin_coeff(2) = 3/40;
    computed by the recurrence a_{2j+1} = a_{2j-1} (2j-1)^2 / ((2j)(2j+1)).
    """
    if j < 0:
        raise ContractViolationError("j must be >= 0")
    a = 1.0
    for i in range(1, j + 1):
        a *= (2 * i - 1) ** 2 / ((2 * i) * (2 * i + 1))
    return a


def h_moment(m: int, k: int) -> float:
    """Moment v_{m+k} / v_{k+1} of the product-of-cosines kernel.

    Equals the integral of g(theta) h(theta)^k over the angular domain,
    where h is the product of cosines and g the uniform-measure density
    factor.  h_moment(2, 0) = 2 and h_moment(2, 2) = 4/3.
    """
    if m < 1 or k < 0:
        raise ContractViolationError("need m >= 1 and k >= 0")
    return math.exp(log_sphere_volume(m + k) - log_sphere_volume(k + 1))


def _series_c0(m: int) -> float:
    # c_0 = 2 gamma_m = v_{m+1} / v_m
    return 2.0 * gamma_m(m)


def _series_ratio(m: int, j: int) -> float:
    # c_{j+1} / c_j
    return (2 * j + 1) ** 2 / ((2 * j + 2) * (m + 2 * j + 2))


def _direct_series_T(m: int, delta: float, tol: float, max_terms: int):
    """Direct sum of c_j I_{2j+1}(delta) for delta in [0, pi/2].

    Returns (value, terms_used).  Truncates once the current term drops
    below tol times the leading term.
    """
    if delta == 0.0:
        return 0.0, 0
    s = math.sin(delta)
    cs = math.cos(delta)
    s2 = s * s
    c = _series_c0(m)
    # I_1 = 1 - cos d; recurrence I_{2j+1} = (-cos d sin^{2j} d + 2j I_{2j-1}) / (2j+1)
    i_odd = 1.0 - cs
    pow_s = s2  # sin^{2j} d, starting at j = 1
    total = c * i_odd
    lead = abs(total)
    for j in range(1, max_terms):
        c *= _series_ratio(m, j - 1)
        i_odd = (-cs * pow_s + 2 * j * i_odd) / (2 * j + 1)
        term = c * i_odd
        total += term
        if abs(term) < tol * lead:
            return total, j + 1
        pow_s *= s2
    raise SeriesTruncationError(
        f"sine-power series did not reach tol={tol:g} within {max_terms} terms "
        f"at delta={delta:.6f}"
    )


def _sin_power_half_integral(n: int) -> float:
    """int_0^{pi/2} sin^n u du via log-gamma."""
    return 0.5 * math.exp(
        0.5 * _LOG_PI + gammaln(0.5 * (n + 1)) - gammaln(0.5 * n + 1.0)
    )


def _u_sin_half_integral(n: int) -> float:
    """K_n = int_0^{pi/2} u sin^n u du by the recurrence
    K_n = (n-1)/n K_{n-2} + 1/n^2."""
    if n == 0:
        return math.pi ** 2 / 8.0
    if n == 1:
        return 1.0
    k_even, k_odd = math.pi ** 2 / 8.0, 1.0
    val = k_odd
    for i in range(2, n + 1):
        prev = k_even if i % 2 == 0 else k_odd
        val = (i - 1) / i * prev + 1.0 / (i * i)
        if i % 2 == 0:
            k_even = val
        else:
            k_odd = val
    return val


def _u2_sin_half_integral(n: int) -> float:
    """W_n = int_0^{pi/2} u^2 sin^n u du by the recurrence
    W_n = ((n-1) W_{n-2} + pi/n - 2 H_n / n) / n, H_n the plain sine-power
    half integral."""
    if n == 0:
        return math.pi ** 3 / 24.0
    if n == 1:
        return math.pi - 2.0
    w_even, w_odd = math.pi ** 3 / 24.0, math.pi - 2.0
    val = w_odd
    for i in range(2, n + 1):
        prev = w_even if i % 2 == 0 else w_odd
        h_i = _sin_power_half_integral(i)
        val = ((i - 1) * prev + math.pi / i - 2.0 * h_i / i) / i
        if i % 2 == 0:
            w_even = val
        else:
            w_odd = val
    return val


def _T_at_half_pi(m: int) -> float:
    """Closed form of T(pi/2) = (pi/2) (pi - 2 K_{m-1} / D_m)."""
    d_m = _sin_power_half_integral(m - 1)
    return _HALF_PI * (math.pi - 2.0 * _u_sin_half_integral(m - 1) / d_m)


def _layer_series_T(m: int, delta: float):
    """T(delta) near pi/2 via the mirrored cosine-power series.

    T(delta) = T(pi/2) - sum_j c_j J_{2j+1}(e), e = pi/2 - delta.  The terms
    decay like j^{-(m+3)/2} once the cosine-power integrals saturate, so the
    partial sum is completed with an Euler-Maclaurin tail estimate using an
    empirically fitted local decay exponent.
    """
    eps = _HALF_PI - delta
    base = _T_at_half_pi(m)
    if eps == 0.0:
        return base, 0
    se = math.sin(eps)
    ce = math.cos(eps)
    ce2 = ce * ce
    c = _series_c0(m)
    j_odd = se  # J_1 = sin e
    pow_c = ce2  # cos^{2j} e at j = 1
    corr = c * j_odd
    term = corr
    checkpoint_term = abs(term)
    checkpoint_j = 1
    n_terms = _LAYER_MAX_TERMS
    for j in range(1, _LAYER_MAX_TERMS):
        c *= _series_ratio(m, j - 1)
        j_odd = (se * pow_c + 2 * j * j_odd) / (2 * j + 1)
        term = c * j_odd
        corr += term
        pow_c *= ce2
        # Every 1000 terms, bound the remaining tail from the local decay
        # exponent; stop once it is negligible.
        if j % 1000 == 0:
            t_abs = abs(term)
            if t_abs == 0.0:
                n_terms = j + 1
                break
            p_hat = math.log(checkpoint_term / t_abs) / math.log(j / checkpoint_j)
            checkpoint_term, checkpoint_j = t_abs, j
            if p_hat > 1.05:
                tail = t_abs * (j / (p_hat - 1.0) + 0.5)
                if tail < 1e-13 * max(1.0, base):
                    n_terms = j + 1
                    break
    else:
        j = _LAYER_MAX_TERMS - 1
    # Euler-Maclaurin completion of the truncated tail.
    t_abs = abs(term)
    if t_abs > 0.0 and checkpoint_j < j:
        p_hat = math.log(checkpoint_term / t_abs) / math.log(j / checkpoint_j)
        if p_hat > 1.05:
            corr += math.copysign(t_abs * (j / (p_hat - 1.0) + 0.5), term)
    return base - corr, n_terms


def _T_total(m: int, delta: float, tol: float, max_terms: int):
    """Evaluate T(delta) on [0, pi), choosing the regime by delta."""
    if delta <= _HALF_PI - _LAYER_HALF_WIDTH:
        return _direct_series_T(m, delta, tol, max_terms)
    if delta >= _HALF_PI + _LAYER_HALF_WIDTH:
        val, terms = _direct_series_T(m, math.pi - delta, tol, max_terms)
        return 2.0 * _T_at_half_pi(m) - val, terms
    return _layer_series_T(m, delta)


def _B_of_sin(m: int, s: float, tol: float, max_terms: int):
    """B(s) = sum_j c_j s^{2j+1}, the gradient series.

    Uses direct summation while it converges geometrically, and the exact
    hypergeometric closed form 2 gamma_m s 2F1(1/2,1/2;1+m/2;s^2) in the
    thin band where sin^2 is close to 1.  Returns (value, terms_used);
    terms_used is 0 on the closed-form path.
    """
    if s == 0.0:
        return 0.0, 0
    s2 = s * s
    if s2 > _GRAD_SERIES_SIN2_MAX:
        return _series_c0(m) * s * float(hyp2f1(0.5, 0.5, 1.0 + 0.5 * m, s2)), 0
    c = _series_c0(m)
    pw = s
    total = c * pw
    lead = abs(total)
    for j in range(1, max_terms):
        c *= _series_ratio(m, j - 1)
        pw *= s2
        term = c * pw
        total += term
        if abs(term) < tol * lead:
            return total, j + 1
    raise SeriesTruncationError(
        f"gradient series did not reach tol={tol:g} within {max_terms} terms "
        f"at s={s:.6f}"
    )


def _check_delta(delta: float) -> float:
    d = float(delta)
    if not 0.0 <= d < math.pi:
        raise DomainError(f"delta must lie in [0, pi), got {delta}")
    return d


def population_frechet(
    family: SmearyFamily, delta: float, tol: float = 1e-12, max_terms: int = 10000
) -> float:
    """G(delta) - G(0): the Frechet function relative to its pole value.

    Args:
        family: the mixture P_{m, alpha}.
        delta: geodesic distance from the pole, in [0, pi).
        tol: relative truncation tolerance of the series.
        max_terms: term cap for the direct series.

    Raises:
        DomainError: delta outside [0, pi).
        SeriesTruncationError: tolerance not reached within the term cap.
    """
    d = _check_delta(delta)
    if d == 0.0:
        return 0.0
    t_val, _ = _T_total(family.m, d, tol, max_terms)
    return (1.0 - family.alpha) * d * d - family.alpha * t_val


def population_frechet_grad(
    family: SmearyFamily, delta: float, tol: float = 1e-12, max_terms: int = 10000
) -> float:
    """Radial derivative G'(delta) of the Frechet function.

    G'(0) = 0 exactly; at alpha = alpha_crit, G' > 0 on (0, pi) so the pole
    is the unique minimizer.
    """
    d = _check_delta(delta)
    if d == 0.0:
        return 0.0
    b_val, _ = _B_of_sin(family.m, math.sin(d), tol, max_terms)
    return 2.0 * d * (1.0 - family.alpha) - family.alpha * b_val


def population_frechet_at_center(family: SmearyFamily) -> float:
    """G(0) = alpha * E[d(pole, q)^2 | q uniform on the lower half sphere].

    Closed form through the half-range moments of sin powers:
    E[d^2] = pi^2 - 2 pi K_{m-1}/D_m + W_{m-1}/D_m.
    """
    n = family.m - 1
    d_m = _sin_power_half_integral(n)
    e_d2 = (
        math.pi ** 2
        - 2.0 * math.pi * _u_sin_half_integral(n) / d_m
        + _u2_sin_half_integral(n) / d_m
    )
    return family.alpha * e_d2


def taylor_coeff(family: SmearyFamily, r: int) -> float:
    """Taylor coefficient of delta^r in G(delta) - G(0) at delta = 0.

    r = 2: 1 - alpha (1 + gamma_m), which vanishes at alpha_crit.
    r = 4: (alpha / 24) (v_{m+1}/v_m) (m-1)/(m+2); equals c_m/24 at
    alpha_crit.  Odd orders vanish by symmetry and are not exposed.
    """
    m = family.m
    g = gamma_m(m)
    if r == 2:
        return 1.0 - family.alpha * (1.0 + g)
    if r == 4:
        return family.alpha * (2.0 * g / 24.0) * (m - 1) / (m + 2)
    raise ContractViolationError("only r in {2, 4} is supported")


def mean_set_radius(family: SmearyFamily, xtol: float = 1e-13) -> float:
    """Radius delta* of the circular minimizer set of a supercritical family.

    Finds the root of G' by bisection on (1e-8, pi - 1e-8) and checks that
    G(delta*) < G(0).

    Raises:
        RootBracketError: G' has no sign change on the bracket, which is
            what happens when beta = alpha - alpha_crit <= 0.
    """
    lo, hi = 1e-8, math.pi - 1e-8
    g_lo = population_frechet_grad(family, lo)
    g_hi = population_frechet_grad(family, hi)
    if not (g_lo < 0.0 < g_hi):
        raise RootBracketError(
            "G' has no sign change on (0, pi); the family looks subcritical "
            f"(beta = {family.beta:.6g})"
        )
    root = float(
        bisect(lambda d: population_frechet_grad(family, d), lo, hi, xtol=xtol)
    )
    if not population_frechet(family, root) < 0.0:
        raise RootBracketError(
            "stationary radius is not below the pole value; root rejected"
        )
    return root


def empirical_frechet(points, p) -> float:
    """Mean squared geodesic distance from p to a set of points.

    Args:
        points: (n, m+1) array of unit rows, or an iterable of SpherePoint.
        p: the evaluation point.
    """
    arr = _points_array(points)
    pc = _coords(p)
    if arr.shape[1] != pc.size:
        raise ContractViolationError("points and p live on different spheres")
    c = np.clip(arr @ pc, -1.0, 1.0)
    d = np.arccos(c)
    return float(np.mean(d * d))


def _points_array(points) -> np.ndarray:
    if isinstance(points, np.ndarray):
        arr = points
    else:
        rows = [_coords(q) for q in points]
        if not rows:
            raise ContractViolationError("need at least one point")
        arr = np.vstack(rows)
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 2:
        raise ContractViolationError(f"expected an (n, m+1) array, got {arr.shape}")
    return arr


def _ratio_acos_over_sqrt(c: float) -> float:
    # arccos(c) / sqrt(1 - c^2), smooth at c -> 1 with limit 1
    if c > 1.0 - 1e-9:
        return 1.0 + (1.0 - c) / 3.0
    return math.acos(c) / math.sqrt(1.0 - c * c)


def _dsinc_over_r(r: float) -> float:
    # (cos r - sinc r) / r^2, smooth at r -> 0 with limit -1/3
    if r < 1e-4:
        return -1.0 / 3.0 + r * r / 30.0
    sinc = math.sin(r) / r
    return (math.cos(r) - sinc) / (r * r)


def rho_gradient(x, z) -> ChartVector:
    """Chart gradient at z of z -> d(exp_pole(z), x)^2.

    At z = 0 this equals -2 log_at_north(x); its norm never exceeds 2 pi.

    Args:
        x: data point on S^m.
        z: chart vector with |z| < pi, not equal to the chart image of -x.

    Raises:
        CutLocusError: exp_pole(z) is (numerically) antipodal to x.
        DomainError: |z| >= pi.
    """
    xc = _coords(x)
    zc = _coords(z)
    if xc.size != zc.size + 1:
        raise ContractViolationError("x and z dimensions do not match")
    r = float(np.linalg.norm(zc))
    if r >= math.pi:
        raise DomainError(f"chart vector norm {r:.6f} >= pi")
    p_z = exp_at_north(zc).coords
    c = float(np.clip(np.dot(xc, p_z), -1.0, 1.0))
    if c <= -1.0 + CUT_LOCUS_EPS:
        raise CutLocusError("gradient undefined opposite the data point")
    x_sel = project_chart(xc)
    x2 = xc[1]
    sinc = math.sin(r) / r if r >= 1e-6 else 1.0 - r * r / 6.0
    grad_c = sinc * (x_sel - x2 * zc) + (float(np.dot(x_sel, zc)) * _dsinc_over_r(r)) * zc
    return ChartVector(-2.0 * _ratio_acos_over_sqrt(c) * grad_c)


@dataclass(frozen=True)
class FrechetCurve:
    """G - G(0) and G' tabulated over an ascending grid of delta values.

    Attributes:
        family: the evaluated mixture.
        deltas: the grid, ascending within [0, pi).
        values: G(delta) - G(0) per grid node.
        grads: G'(delta) per grid node.
        truncation_terms: series terms consumed per node (0 marks a
            closed-form evaluation).
        tol: relative series tolerance used.
    """

    family: SmearyFamily
    deltas: np.ndarray
    values: np.ndarray
    grads: np.ndarray
    truncation_terms: np.ndarray
    tol: float

    @classmethod
    def compute(
        cls,
        family: SmearyFamily,
        deltas,
        tol: float = 1e-12,
        max_terms: int = 10000,
    ) -> "FrechetCurve":
        d = np.asarray(deltas, dtype=np.float64)
        if d.ndim != 1 or d.size < 1:
            raise ContractViolationError("deltas must be a 1-D grid")
        if np.any(np.diff(d) <= 0.0):
            raise ContractViolationError("deltas must be strictly ascending")
        if d[0] < 0.0 or d[-1] >= math.pi:
            raise DomainError("deltas must lie within [0, pi)")
        values = np.empty_like(d)
        grads = np.empty_like(d)
        terms = np.zeros(d.size, dtype=np.int64)
        a = family.alpha
        for i, di in enumerate(d):
            if di == 0.0:
                values[i] = 0.0
                grads[i] = 0.0
                continue
            t_val, t_terms = _T_total(family.m, float(di), tol, max_terms)
            values[i] = (1.0 - a) * di * di - a * t_val
            b_val, _ = _B_of_sin(family.m, math.sin(float(di)), tol, max_terms)
            grads[i] = 2.0 * di * (1.0 - a) - a * b_val
            terms[i] = t_terms
        return cls(family, d, values, grads, terms, tol)
