"""The two-parameter family of pole-plus-hemisphere mixtures on S^m.

A family member P_{m, alpha} puts mass 1 - alpha on a point atom at the
pole mu and spreads mass alpha uniformly over the closed lower half sphere
L = {q in S^m : q_2 <= 0}.  The constant

    gamma_m = v_{m+1} / (2 v_m),

with v_m the total surface volume of S^m, controls the phase structure:
alpha_crit = 1/(1 + gamma_m) is the weight at which the quadratic term of
the Frechet function at the pole vanishes and the pole becomes a two-smeary
mean.  All Gamma-function ratios go through log-gamma differences so the
constants stay accurate up to m = 1000 and beyond.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import ContractViolationError, DomainError
from .geometry import pole_array, sample_lower_half

_LOG_PI = math.log(math.pi)


def log_sphere_volume(m: int) -> float:
    """log of the surface volume of the unit m-sphere."""
    if m < 0:
        raise ContractViolationError("m must be >= 0")
    return math.log(2.0) + 0.5 * (m + 1) * _LOG_PI - gammaln(0.5 * (m + 1))


def sphere_volume(m: int) -> float:
    """Surface volume v_m = 2 pi^((m+1)/2) / Gamma((m+1)/2) of S^m.

    v_1 = 2 pi, v_2 = 4 pi, v_3 = 2 pi^2.  Underflows to 0.0 for m around
    450 and beyond; ratios of volumes should use log_sphere_volume.
    """
    return math.exp(log_sphere_volume(m))


def gamma_m(m: int) -> float:
    """The volume ratio gamma_m = v_{m+1} / (2 v_m).

    Equals (sqrt(pi)/2) Gamma((m+1)/2) / Gamma((m+2)/2); gamma_2 = pi/4.
    Decreases like sqrt(pi/(2m)) as m grows.
    """
    if m < 1:
        raise ContractViolationError("m must be >= 1")
    return math.exp(
        0.5 * _LOG_PI - math.log(2.0) + gammaln(0.5 * (m + 1)) - gammaln(0.5 * (m + 2))
    )


def alpha_crit(m: int) -> float:
    """Critical hemisphere weight 1 / (1 + gamma_m).

    At alpha = alpha_crit(m) the pole is a two-smeary Frechet mean.
    Approximately 0.56, 0.72, 0.89 at m = 2, 10, 100.
    """
    if m < 2:
        raise ContractViolationError("m must be >= 2")
    return 1.0 / (1.0 + gamma_m(m))


def c_m(m: int) -> float:
    """Fourth-order coefficient 24 * (d^4/4!) of the critical Frechet function.

    c_m = (2 gamma_m / (1 + gamma_m)) * (m - 1) / (m + 2), i.e. the value of
    alpha * (v_{m+1}/v_m) * (m-1)/(m+2) at alpha = alpha_crit(m).
    c_2 is approximately 0.21995; sqrt(m) * c_m tends to sqrt(2 pi).
    """
    if m < 2:
        raise ContractViolationError("m must be >= 2")
    g = gamma_m(m)
    return (2.0 * g / (1.0 + g)) * (m - 1) / (m + 2)


@dataclass(frozen=True)
class SmearyFamily:
    """One member of the family: dimension m >= 2 and hemisphere weight alpha.

    Attributes:
        m: sphere dimension.
        alpha: hemisphere mass, strictly inside (0, 1).
    """

    m: int
    alpha: float

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 2:
            raise ContractViolationError("m must be an integer >= 2")
        object.__setattr__(self, "m", int(self.m))
        if not (0.0 < self.alpha < 1.0):
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")

    @classmethod
    def from_beta(cls, m: int, beta: float) -> "SmearyFamily":
        """Construct from the offset beta = alpha - alpha_crit(m)."""
        return cls(m, alpha_crit(m) + beta)

    @property
    def beta(self) -> float:
        return self.alpha - alpha_crit(self.m)

    @property
    def gamma(self) -> float:
        return gamma_m(self.m)

    @property
    def pole(self) -> np.ndarray:
        return pole_array(self.m)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw n points, one per row of an (n, m+1) array.

        Each point independently equals the pole exactly (bit-identical
        rows) with probability 1 - alpha, and otherwise is a uniform draw
        from the closed lower half sphere.
        """
        if n < 0:
            raise ContractViolationError("n must be non-negative")
        out = np.tile(pole_array(self.m), (n, 1))
        hemi = rng.random(n) >= (1.0 - self.alpha)
        k = int(np.count_nonzero(hemi))
        if k:
            out[hemi] = sample_lower_half(self.m, rng, size=k)
        return out
