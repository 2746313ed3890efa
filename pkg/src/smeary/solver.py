"""Intrinsic (Karcher) mean of points on S^m by fixed-point iteration.

The iteration is p <- exp_p(step * T(p)) with T(p) the mean of the log maps
of the data at p, which is Riemannian gradient descent on the empirical
Frechet function with base step 1/2 of a Newton-free step.  The empirical
Frechet value is tracked and any increase triggers step halving, so the
accepted value sequence is non-increasing up to double roundoff.

Smeary configurations make the basin of the minimizer extremely flat, so
the iteration is run to a small tangent-norm tolerance rather than a value
tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolationError
from .geometry import CUT_LOCUS_EPS, SpherePoint, _coords

# Below this tangent norm, per-step changes of the Frechet value sit at or
# below double roundoff; the descent comparison is skipped to avoid thrash.
_DESCENT_CHECK_FLOOR = 1e-5

# Relative roundoff slack for the descent comparison.
_DESCENT_SLACK = 1e-15


@dataclass(frozen=True)
class SolverOptions:
    """Tuning knobs of the fixed-point iteration.

    Attributes:
        step_tol: terminate once the update tangent norm drops below this.
        max_iter: hard iteration cap.
        step_size: base step multiplier in (0, 1].
        track_descent: record the accepted Frechet value per iteration.
    """

    step_tol: float = 1e-10
    max_iter: int = 10000
    step_size: float = 1.0
    track_descent: bool = False

    def __post_init__(self):
        if not self.step_tol > 0.0:
            raise ContractViolationError("step_tol must be positive")
        if self.max_iter < 1:
            raise ContractViolationError("max_iter must be >= 1")
        if not 0.0 < self.step_size <= 1.0:
            raise ContractViolationError("step_size must lie in (0, 1]")


@dataclass
class SolverResult:
    """Outcome of a mean computation.

    Attributes:
        mean: the final iterate.
        iterations: evaluation passes performed (accepted and rejected).
        final_step: tangent norm of the last update direction.
        converged: final_step < step_tol within the iteration cap.
        frechet_value: empirical Frechet value at the final iterate.
        degenerate_init: extrinsic mean was numerically zero and the first
            data point seeded the iteration instead.
        antipodal_skips: point-iteration events where a data point sat at
            the cut locus of the iterate and its log map was skipped.
        frechet_trace: accepted value sequence if track_descent was set.
    """

    mean: SpherePoint
    iterations: int
    final_step: float
    converged: bool
    frechet_value: float
    degenerate_init: bool = False
    antipodal_skips: int = 0
    frechet_trace: list = field(default_factory=list)


def _evaluate(X: np.ndarray, p: np.ndarray):
    """One fused pass: Frechet value, mean log tangent, skip count at p."""
    n = X.shape[0]
    c = X @ p
    np.clip(c, -1.0, 1.0, out=c)
    d = np.arccos(c)
    f_val = float(d @ d) / n
    s = np.sqrt(1.0 - c * c)
    near_cut = c <= (-1.0 + CUT_LOCUS_EPS)
    skips = int(np.count_nonzero(near_cut))
    safe = s > 1e-12
    factor = np.where(safe, d / np.where(safe, s, 1.0), 1.0)
    if skips:
        factor = np.where(near_cut, 0.0, factor)
    # T = mean_j factor_j (X_j - c_j p) assembled from two reductions
    t_amb = (factor @ X) / n - (float(factor @ c) / n) * p
    return f_val, t_amb, skips


def _step(p: np.ndarray, v: np.ndarray) -> np.ndarray:
    r = float(np.linalg.norm(v))
    if r < 1e-6:
        q = (1.0 - 0.5 * r * r) * p + (1.0 - r * r / 6.0) * v
    else:
        q = math.cos(r) * p + (math.sin(r) / r) * v
    return q / float(np.linalg.norm(q))


def karcher_mean(points, options: SolverOptions | None = None) -> SolverResult:
    """Intrinsic mean of points on a sphere.

    Args:
        points: (n, m+1) array with one unit row per point, or an iterable
            of SpherePoint.  Rows are defensively renormalized.
        options: SolverOptions; defaults are tuned for high accuracy.

    The iteration starts from the normalized extrinsic (chordal) mean; if
    that is numerically zero (perfectly balanced data) the first data point
    seeds the iteration and the result is flagged via degenerate_init.
    """
    opts = options or SolverOptions()
    X = _as_rows(points)
    n = X.shape[0]

    v = X.mean(axis=0)
    nv = float(np.linalg.norm(v))
    degenerate = nv < 1e-12
    p = X[0].copy() if degenerate else v / nv

    f_p, t_amb, skips_total = _evaluate(X, p)
    trace = [f_p] if opts.track_descent else []
    step = opts.step_size
    t_norm = float(np.linalg.norm(t_amb))
    iterations = 1
    converged = t_norm < opts.step_tol

    while not converged and iterations < opts.max_iter:
        q = _step(p, step * t_amb)
        f_q, t_q, skips = _evaluate(X, q)
        iterations += 1
        skips_total += skips
        reject = (
            t_norm > _DESCENT_CHECK_FLOOR
            and f_q > f_p + _DESCENT_SLACK * (1.0 + abs(f_p))
        )
        if reject:
            step *= 0.5
            if step < 1e-12 * opts.step_size:
                break
            continue
        p, f_p, t_amb = q, f_q, t_q
        t_norm = float(np.linalg.norm(t_amb))
        step = opts.step_size
        if opts.track_descent:
            trace.append(f_p)
        converged = t_norm < opts.step_tol

    return SolverResult(
        mean=SpherePoint(p),
        iterations=iterations,
        final_step=t_norm,
        converged=converged,
        frechet_value=f_p,
        degenerate_init=degenerate,
        antipodal_skips=skips_total,
        frechet_trace=trace,
    )


def _as_rows(points) -> np.ndarray:
    if isinstance(points, np.ndarray):
        X = np.array(points, dtype=np.float64)
    else:
        rows = [_coords(q) for q in points]
        if not rows:
            raise ContractViolationError("need at least one point")
        X = np.vstack(rows).astype(np.float64)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 2:
        raise ContractViolationError(f"expected an (n, m+1) array, got {X.shape}")
    norms = np.linalg.norm(X, axis=1)
    if np.any(norms < 1e-12):
        raise ContractViolationError("input contains a (near-)zero row")
    X /= norms[:, None]
    return X
