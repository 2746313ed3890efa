"""Riemannian geometry of the unit m-sphere with a fixed reference pole.

Points live on S^m embedded in R^(m+1).  The reference pole is

    mu = (0, 1, 0, ..., 0)^T,

i.e. the second ambient coordinate axis.  The tangent space at mu is
identified with R^m by reading off the ambient coordinates
(1, 3, 4, ..., m+1), in that order: chart coordinate 1 is ambient
coordinate 1, and chart coordinate j is ambient coordinate j+1 for
j >= 2.  Ambient coordinate 2 (the mu axis) is dropped.

All distances are geodesic (great-circle) distances in radians.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ContractViolationError, CutLocusError, DomainError

# Inner products this close to -1 are treated as sitting on the cut locus.
CUT_LOCUS_EPS = 1e-14

_TANGENCY_TOL = 1e-10


def _unit_sinc(t: float) -> float:
    """sin(t)/t with the removable singularity filled in."""
    if abs(t) < 1e-6:
        return 1.0 - t * t / 6.0
    return math.sin(t) / t


class SpherePoint:
    """A point on S^m, renormalized to unit length on construction.

    Args:
        coords: array-like of length m+1 with m >= 1 and nonzero norm.
    """

    __slots__ = ("coords",)

    def __init__(self, coords):
        c = np.asarray(coords, dtype=np.float64)
        if c.ndim != 1 or c.size < 2:
            raise ContractViolationError(
                "a sphere point needs a 1-D coordinate array of length >= 2, "
                f"got shape {c.shape}"
            )
        norm = float(np.linalg.norm(c))
        if norm < 1e-12:
            raise ContractViolationError("cannot normalize a (near-)zero vector")
        self.coords = c / norm

    @property
    def m(self) -> int:
        """Dimension of the sphere the point lives on."""
        return self.coords.size - 1

    def __repr__(self) -> str:
        return f"SpherePoint({np.array2string(self.coords, precision=6)})"


class ChartVector:
    """A tangent vector at the pole in chart coordinates (an element of R^m)."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        c = np.asarray(coords, dtype=np.float64)
        if c.ndim != 1 or c.size < 1:
            raise ContractViolationError(
                f"a chart vector needs a 1-D array of length >= 1, got shape {c.shape}"
            )
        self.coords = c.copy()

    @property
    def m(self) -> int:
        return self.coords.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))

    def __repr__(self) -> str:
        return f"ChartVector({np.array2string(self.coords, precision=6)})"


def north_pole(m: int) -> SpherePoint:
    """The reference pole mu of S^m."""
    if m < 1:
        raise ContractViolationError("m must be >= 1")
    c = np.zeros(m + 1)
    c[1] = 1.0
    return SpherePoint(c)


def pole_array(m: int) -> np.ndarray:
    """Raw coordinate array of the pole; handy for vectorized code."""
    c = np.zeros(m + 1)
    c[1] = 1.0
    return c


def _coords(p) -> np.ndarray:
    if isinstance(p, (SpherePoint, ChartVector)):
        return p.coords
    return np.asarray(p, dtype=np.float64)


def _chart_selector(m: int) -> list:
    # ambient indices kept by the chart, 0-based: drop index 1 (the mu axis)
    return [0] + list(range(2, m + 1))


def embed_chart(x: np.ndarray) -> np.ndarray:
    """Place chart coordinates into the ambient tangent space at the pole."""
    m = x.shape[-1]
    v = np.zeros(x.shape[:-1] + (m + 1,))
    v[..., 0] = x[..., 0]
    v[..., 2:] = x[..., 1:]
    return v


def project_chart(v: np.ndarray) -> np.ndarray:
    """Read chart coordinates off an ambient vector (drops coordinate 2)."""
    return np.concatenate([v[..., :1], v[..., 2:]], axis=-1)


def geodesic_distance(p, q) -> float:
    """Great-circle distance arccos<p, q>, in [0, pi]."""
    a = _coords(p)
    b = _coords(q)
    if a.shape != b.shape:
        raise ContractViolationError("points live on different spheres")
    c = float(np.clip(np.dot(a, b), -1.0, 1.0))
    return math.acos(c)


def log_at_north(p) -> ChartVector:
    """Inverse exponential at the pole, in chart coordinates.

    Maps p to arccos<p, mu> times the unit chart direction of the component
    of p orthogonal to mu.  Undefined at the antipode -mu.

    Raises:
        CutLocusError: if p is (numerically) antipodal to the pole.
    """
    a = _coords(p)
    m = a.size - 1
    c = float(np.clip(a[1], -1.0, 1.0))
    if c <= -1.0 + CUT_LOCUS_EPS:
        raise CutLocusError("log map undefined at the antipode of the pole")
    w = project_chart(a)
    s = float(np.linalg.norm(w))
    if s < 1e-300:
        return ChartVector(np.zeros(m))
    return ChartVector(w * (math.acos(c) / s))


def exp_at_north(x) -> SpherePoint:
    """Exponential map at the pole from chart coordinates.

    The second ambient coordinate of the image is cos(|x|); the remaining
    coordinates are x * sinc(|x|) in chart order.

    Raises:
        DomainError: if |x| >= pi (outside the injectivity radius).
    """
    xv = _coords(x)
    r = float(np.linalg.norm(xv))
    if r >= math.pi:
        raise DomainError(f"chart vector norm {r:.6f} >= pi")
    q = np.empty(xv.size + 1)
    q[0] = xv[0] * _unit_sinc(r)
    q[1] = math.cos(r)
    q[2:] = xv[1:] * _unit_sinc(r)
    return SpherePoint(q)


def log_at(p, q) -> np.ndarray:
    """Inverse exponential at an arbitrary base point, as an ambient tangent.

    Returns v with <v, p> = 0, |v| = d(p, q) and exp_at(p, v) = q.

    Raises:
        CutLocusError: if q is (numerically) antipodal to p.
    """
    a = _coords(p)
    b = _coords(q)
    c = float(np.clip(np.dot(a, b), -1.0, 1.0))
    if c <= -1.0 + CUT_LOCUS_EPS:
        raise CutLocusError("log map undefined for an antipodal pair")
    w = b - c * a
    s = float(np.linalg.norm(w))
    if s < 1e-300:
        return np.zeros_like(a)
    return w * (math.acos(c) / s)


def exp_at(p, v) -> SpherePoint:
    """Exponential map at an arbitrary base point.

    Args:
        p: base point on S^m.
        v: ambient tangent vector at p (must satisfy <v, p> = 0 within 1e-10).

    Raises:
        ContractViolationError: if v is not tangent at p.
        DomainError: if |v| >= pi.
    """
    a = _coords(p)
    vv = _coords(v)
    if abs(float(np.dot(a, vv))) > _TANGENCY_TOL:
        raise ContractViolationError(
            "v is not tangent at p: <v, p> = %.3e" % float(np.dot(a, vv))
        )
    r = float(np.linalg.norm(vv))
    if r >= math.pi:
        raise DomainError(f"tangent norm {r:.6f} >= pi")
    return SpherePoint(math.cos(r) * a + _unit_sinc(r) * vv)


def sample_lower_half(m: int, rng: np.random.Generator, size: int | None = None):
    """Uniform draws from the closed lower half sphere {q in S^m : q_2 <= 0}.

    Draws a standard Gaussian in R^(m+1), normalizes it, and flips the sign
    of the second coordinate to non-positive.  Returns an (m+1,) array for
    size=None, else a (size, m+1) array with one point per row.
    """
    if m < 1:
        raise ContractViolationError("m must be >= 1")
    n = 1 if size is None else int(size)
    if n < 0:
        raise ContractViolationError("size must be non-negative")
    g = rng.standard_normal((n, m + 1))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    # A numerically zero Gaussian vector has probability ~0; renormalizing a
    # tiny vector is still well defined, so only guard exact zeros.
    norms[norms == 0.0] = 1.0
    g /= norms
    g[:, 1] = -np.abs(g[:, 1])
    if size is None:
        return g[0]
    return g
