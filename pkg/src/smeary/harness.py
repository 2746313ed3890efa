"""Monte Carlo experiment harness.

Runs replicated intrinsic-mean experiments over a grid of concentration
offsets and sample sizes, estimates empirical convergence rates by log-log
regression, and checks the rescaled-cube limit law of the mean at the
critical mixture weight.

Randomness policy: every replication draws from its own generator, derived
by hashing (seed, namespace, indices) with SHA-256.  Results are therefore
byte-identical for a given seed regardless of how replications are split
across worker processes.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError, DegenerateDataError
from .family import SmearyFamily, alpha_crit, c_m
from .geometry import CUT_LOCUS_EPS
from .solver import SolverOptions, karcher_mean

__all__ = [
    "GridConfig",
    "SimulationRecord",
    "RateEstimate",
    "CubeCheck",
    "derived_rng",
    "default_beta_grid",
    "default_distortion",
    "log_spaced_sizes",
    "run_grid",
    "estimate_rate",
    "clt_cube_check",
    "sigma_theoretical",
    "chart_invariance_check",
]


def derived_rng(seed: int, *path) -> np.random.Generator:
    """Generator keyed by a seed and a label/index path.

    The path is joined into a text message and hashed; the first 128 bits
    of the digest seed the generator.  Streams for distinct paths are
    independent for all practical purposes and do not depend on process
    or thread scheduling.
    """
    msg = ":".join([str(int(seed))] + [str(p) for p in path]).encode("ascii")
    digest = hashlib.sha256(msg).digest()
    return np.random.default_rng(int.from_bytes(digest[:16], "little"))


def default_beta_grid() -> tuple:
    """Offsets from the critical weight used when none are specified."""
    return (-0.2, -0.1, -0.05, -0.02, 0.0, 0.02, 0.05, 0.1)


def log_spaced_sizes(nmin: int = 30, nmax: int = 100000, per_decade: int = 4) -> tuple:
    """Sample sizes nmin * 10^(i/per_decade), rounded, up to nmax."""
    if nmin < 1 or nmax < nmin or per_decade < 1:
        raise ContractViolationError("need 1 <= nmin <= nmax and per_decade >= 1")
    sizes = []
    i = 0
    while True:
        n = int(round(nmin * 10.0 ** (i / per_decade)))
        if n > nmax:
            break
        if not sizes or n > sizes[-1]:
            sizes.append(n)
        i += 1
    return tuple(sizes)


@dataclass(frozen=True)
class GridConfig:
    """Specification of a simulation grid.

    Attributes:
        m: sphere dimension.
        betas: offsets from the critical mixture weight, one grid row each.
        sample_sizes: ascending sample sizes.
        reps: replications per (beta, n) cell, at least 2.
        seed: master seed for stream derivation.
        solver: options passed to every mean computation.
    """

    m: int
    betas: tuple
    sample_sizes: tuple
    reps: int
    seed: int
    solver: SolverOptions = SolverOptions()

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m < 2:
            raise ContractViolationError("m must be an integer >= 2")
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        object.__setattr__(
            self, "sample_sizes", tuple(int(n) for n in self.sample_sizes)
        )
        if not self.betas:
            raise ContractViolationError("betas must be nonempty")
        ac = alpha_crit(self.m)
        for b in self.betas:
            if not 0.0 < ac + b < 1.0:
                raise ContractViolationError(
                    f"beta={b} puts the mixture weight outside (0, 1)"
                )
        sizes = self.sample_sizes
        if not sizes or any(n < 1 for n in sizes):
            raise ContractViolationError("sample sizes must be positive")
        if any(b >= a for a, b in zip(sizes[1:], sizes)):
            raise ContractViolationError("sample sizes must be strictly ascending")
        if self.reps < 2:
            raise ContractViolationError("reps must be >= 2")


@dataclass(frozen=True)
class SimulationRecord:
    """Aggregated outcome of one (beta, n) grid cell.

    V is the Monte Carlo mean of the squared intrinsic distance between the
    empirical mean and the pole; stderr_V is its standard error over the
    replications.
    """

    m: int
    beta: float
    alpha: float
    n: int
    reps: int
    V: float
    stderr_V: float
    mean_iterations: float
    nonconverged_count: int
    seed: int

    @property
    def flagged(self) -> bool:
        """More than 10 percent of replications hit the iteration cap."""
        return self.nonconverged_count > 0.1 * self.reps


def _run_chunk(task):
    """Worker: replications [lo, hi) of one grid cell."""
    fam, n, seed, bi, ni, lo, hi, opts = task
    count = hi - lo
    d2 = np.empty(count)
    iters = np.empty(count)
    conv = np.empty(count, dtype=bool)
    for r in range(lo, hi):
        rng = derived_rng(seed, "grid", bi, ni, r)
        X = fam.sample(n, rng)
        res = karcher_mean(X, opts)
        c = min(1.0, max(-1.0, float(res.mean.coords[1])))
        d2[r - lo] = float(np.arccos(c)) ** 2
        iters[r - lo] = res.iterations
        conv[r - lo] = res.converged
    return bi, ni, lo, d2, iters, conv


def run_grid(config: GridConfig, workers: int | None = None) -> list:
    """Run every (beta, n) cell of the grid and aggregate per cell.

    Args:
        config: grid specification.
        workers: process count; None or 1 runs inline.  The output is
            byte-identical for any worker count.

    Returns:
        One SimulationRecord per (beta, n), betas outer, sizes inner.
    """
    workers = 1 if workers is None else max(1, int(workers))
    cells = [
        (bi, ni)
        for bi in range(len(config.betas))
        for ni in range(len(config.sample_sizes))
    ]
    tasks = []
    for bi, ni in cells:
        fam = SmearyFamily(config.m, alpha_crit(config.m) + config.betas[bi])
        n = config.sample_sizes[ni]
        bounds = np.linspace(0, config.reps, min(workers, config.reps) + 1).astype(int)
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            if hi > lo:
                tasks.append(
                    (fam, n, config.seed, bi, ni, int(lo), int(hi), config.solver)
                )

    store = {
        cell: (
            np.empty(config.reps),
            np.empty(config.reps),
            np.empty(config.reps, dtype=bool),
        )
        for cell in cells
    }
    if workers == 1:
        chunk_results = map(_run_chunk, tasks)
    else:
        executor = ProcessPoolExecutor(max_workers=workers)
        chunk_results = executor.map(_run_chunk, tasks)
    for bi, ni, lo, d2, iters, conv in chunk_results:
        k = len(d2)
        store[(bi, ni)][0][lo : lo + k] = d2
        store[(bi, ni)][1][lo : lo + k] = iters
        store[(bi, ni)][2][lo : lo + k] = conv
    if workers > 1:
        executor.shutdown()

    records = []
    for bi, ni in cells:
        d2, iters, conv = store[(bi, ni)]
        records.append(
            SimulationRecord(
                m=config.m,
                beta=config.betas[bi],
                alpha=alpha_crit(config.m) + config.betas[bi],
                n=config.sample_sizes[ni],
                reps=config.reps,
                V=float(d2.mean()),
                stderr_V=float(d2.std(ddof=1) / np.sqrt(config.reps)),
                mean_iterations=float(iters.mean()),
                nonconverged_count=int(np.count_nonzero(~conv)),
                seed=config.seed,
            )
        )
    return records


@dataclass(frozen=True)
class RateEstimate:
    """Log-log regression of a decay quantity against n.

    implied_smeariness_order is the order k implied by slope = -1/(k + 1);
    the slope standard error is propagated from the per-cell Monte Carlo
    standard errors.
    """

    slope: float
    intercept: float
    residual_rms: float
    window: tuple
    implied_smeariness_order: float
    slope_stderr: float
    n_points: int


def estimate_rate(records, window: tuple | None = None) -> RateEstimate:
    """Fit log V = slope * log n + intercept over a sample-size window.

    Args:
        records: SimulationRecords from a single (m, beta) grid row.
        window: inclusive (n_low, n_high); default keeps the top 1.5
            decades below the largest n present.
    """
    records = list(records)
    if not records:
        raise ContractViolationError("no records to fit")
    keys = {(r.m, r.beta) for r in records}
    if len(keys) > 1:
        raise ContractViolationError(
            f"records mix several (m, beta) groups: {sorted(keys)}"
        )
    if window is None:
        hi = max(r.n for r in records)
        window = (round(hi / 10.0**1.5), float(hi))
    lo, hi = float(window[0]), float(window[1])
    sel = [r for r in records if lo * (1 - 1e-12) <= r.n <= hi * (1 + 1e-12)]
    sel.sort(key=lambda r: r.n)
    if len(sel) < 3:
        raise ContractViolationError(
            f"need at least 3 records inside the window, found {len(sel)}"
        )
    v = np.array([r.V for r in sel])
    if np.any(v <= 0.0):
        raise DegenerateDataError("V must be positive to fit a log-log slope")
    x = np.log(np.array([r.n for r in sel], dtype=float))
    y = np.log(v)
    xbar = x.mean()
    sxx = float(((x - xbar) ** 2).sum())
    if sxx == 0.0:
        raise ContractViolationError("window contains a single sample size")
    coef = (x - xbar) / sxx
    slope = float(coef @ y)
    intercept = float(y.mean() - slope * xbar)
    resid = y - (slope * x + intercept)
    sigma_logv = np.array([r.stderr_V / r.V for r in sel])
    slope_se = float(np.sqrt(np.sum(coef**2 * sigma_logv**2)))
    order = float("inf") if slope >= -1e-12 else -1.0 / slope - 1.0
    return RateEstimate(
        slope=slope,
        intercept=intercept,
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        window=(float(sel[0].n), float(sel[-1].n)),
        implied_smeariness_order=order,
        slope_stderr=slope_se,
        n_points=len(sel),
    )


def _chart_log_rows(Q: np.ndarray):
    """Chart log map at the pole, one row per point; flags cut-locus rows."""
    c = np.clip(Q[:, 1], -1.0, 1.0)
    d = np.arccos(c)
    W = np.concatenate([Q[:, :1], Q[:, 2:]], axis=1)
    s = np.linalg.norm(W, axis=1)
    cut = c <= (-1.0 + CUT_LOCUS_EPS)
    safe = s > 1e-300
    factor = np.where(safe, d / np.where(safe, s, 1.0), 0.0)
    return W * factor[:, None], cut


@dataclass(frozen=True)
class CubeCheck:
    """Summary of the rescaled-cube statistic w = sqrt(n) * z^3.

    z is the chart image of the empirical mean, the cube acts
    componentwise, and all moments are taken over the replications.
    diag_ratio is max over min of the covariance diagonal and
    max_offdiag_corr the largest absolute off-diagonal correlation.
    skewness_stderr is a leave-one-out jackknife standard error, which
    stays honest under the heavy tails of w.
    """

    m: int
    n: int
    reps: int
    seed: int
    w: np.ndarray
    mean: np.ndarray
    mean_stderr: np.ndarray
    cov: np.ndarray
    diag_ratio: float
    max_offdiag_corr: float
    skewness: np.ndarray
    skewness_stderr: np.ndarray
    excluded: int


def _jackknife_skewness_se(W: np.ndarray) -> np.ndarray:
    """Jackknife standard error of the componentwise skewness of rows."""
    k = W.shape[0]
    if k < 3:
        return np.full(W.shape[1], np.inf)
    n1 = k - 1
    mu = (W.sum(axis=0) - W) / n1
    e2 = ((W**2).sum(axis=0) - W**2) / n1
    e3 = ((W**3).sum(axis=0) - W**3) / n1
    m2 = e2 - mu**2
    m3 = e3 - 3.0 * mu * e2 + 2.0 * mu**3
    g = m3 / m2**1.5
    return np.sqrt(n1 / k * ((g - g.mean(axis=0)) ** 2).sum(axis=0))


def clt_cube_check(
    m: int,
    n: int,
    reps: int,
    seed: int,
    options: SolverOptions | None = None,
) -> CubeCheck:
    """Monte Carlo check of the cube-rescaled limit law at criticality.

    Draws reps samples of size n from the critical family on S^m, computes
    the intrinsic mean of each, maps it to the chart, and summarizes
    w = sqrt(n) * z^3.  Replications whose mean lands at the cut locus of
    the pole are excluded and counted.
    """
    if reps < 2:
        raise ContractViolationError("reps must be >= 2")
    if n < 1000:
        raise ContractViolationError("the cube check needs n >= 1000")
    fam = SmearyFamily.from_beta(m, 0.0)
    opts = options or SolverOptions()
    rows = []
    excluded = 0
    for r in range(reps):
        rng = derived_rng(seed, "clt", m, n, r)
        X = fam.sample(n, rng)
        res = karcher_mean(X, opts)
        z, cut = _chart_log_rows(res.mean.coords[None, :])
        if cut[0]:
            excluded += 1
            continue
        rows.append(np.sqrt(n) * z[0] ** 3)
    if len(rows) < 2:
        raise DegenerateDataError("all replications were excluded at the cut locus")
    W = np.vstack(rows)
    kept = W.shape[0]
    mean = W.mean(axis=0)
    mean_stderr = W.std(axis=0, ddof=1) / np.sqrt(kept)
    cov = np.cov(W, rowvar=False)
    cov = np.atleast_2d(cov)
    diag = np.diag(cov)
    corr = np.corrcoef(W, rowvar=False)
    off = np.abs(corr - np.diag(np.diag(corr)))
    centered = W - mean
    sd = W.std(axis=0, ddof=1)
    skew = (centered**3).mean(axis=0) / sd**3
    return CubeCheck(
        m=m,
        n=n,
        reps=reps,
        seed=seed,
        w=W,
        mean=mean,
        mean_stderr=mean_stderr,
        cov=cov,
        diag_ratio=float(diag.max() / diag.min()),
        max_offdiag_corr=float(off.max()),
        skewness=skew,
        skewness_stderr=_jackknife_skewness_se(W),
        excluded=excluded,
    )


_SIGMA_BATCH = 100000


def sigma_theoretical(m: int, mc_draws: int = 200000, seed: int = 0) -> np.ndarray:
    """Covariance of the limiting cube law, up to the cube-root transport.

    Returns (36 / c^2) Cov[grad rho(X, 0)] at the critical weight, where
    grad rho(x, z) = -2 log_0(x) is the chart gradient of the squared
    distance and c is the quartic curvature constant of the dimension.
    Estimated by plain Monte Carlo over the mixture (the atom contributes
    zero-gradient rows); the result depends only on (m, mc_draws, seed).
    """
    if mc_draws < 2:
        raise ContractViolationError("mc_draws must be >= 2")
    fam = SmearyFamily.from_beta(m, 0.0)
    rng = derived_rng(seed, "sigma", m)
    blocks = []
    left = mc_draws
    while left > 0:
        k = min(_SIGMA_BATCH, left)
        Q = fam.sample(k, rng)
        z, _ = _chart_log_rows(Q)
        blocks.append(-2.0 * z)
        left -= k
    G = np.vstack(blocks)
    return (36.0 / c_m(m) ** 2) * np.atleast_2d(np.cov(G, rowvar=False))


def _fixed_rotation(m: int) -> np.ndarray:
    rng = np.random.default_rng(20180214)
    A = rng.standard_normal((m, m))
    Q, R = np.linalg.qr(A)
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def default_distortion(m: int):
    """Built-in chart distortion: z -> R (z + z^3), componentwise cube.

    A smooth origin-preserving bijection whose differential at 0 is the
    rotation R, so it cannot change a decay exponent.
    """
    R = _fixed_rotation(m)
    def phi(z: np.ndarray) -> np.ndarray:
        return R @ (z + z**3)
    return phi


def _fit_rate(sizes, means, stderrs) -> RateEstimate:
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(means)
    xbar = x.mean()
    sxx = float(((x - xbar) ** 2).sum())
    coef = (x - xbar) / sxx
    slope = float(coef @ y)
    intercept = float(y.mean() - slope * xbar)
    resid = y - (slope * x + intercept)
    se = float(np.sqrt(np.sum(coef**2 * (stderrs / means) ** 2)))
    order = float("inf") if slope >= -1e-12 else -1.0 / slope - 1.0
    return RateEstimate(
        slope=slope,
        intercept=intercept,
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        window=(float(min(sizes)), float(max(sizes))),
        implied_smeariness_order=order,
        slope_stderr=se,
        n_points=len(sizes),
    )


def chart_invariance_check(
    m: int,
    sample_sizes,
    reps: int,
    seed: int,
    distortion=None,
    beta: float = 0.0,
    options: SolverOptions | None = None,
) -> tuple:
    """Compare empirical decay rates read off in two charts of the pole.

    For each sample size, solves reps intrinsic means, records the squared
    chart norm of each in the standard chart and after applying the
    distortion, and fits both log-log slopes.

    Args:
        distortion: map from a chart vector to a chart vector, smooth,
            origin-preserving, with invertible differential at 0.  None
            selects the built-in cubic-plus-rotation default.

    Returns:
        (RateEstimate for the plain chart, RateEstimate for the distorted
        chart).
    """
    sizes = tuple(int(n) for n in sample_sizes)
    if len(sizes) < 3:
        raise ContractViolationError("need at least 3 sample sizes")
    if reps < 2:
        raise ContractViolationError("reps must be >= 2")
    fam = SmearyFamily.from_beta(m, beta)
    opts = options or SolverOptions()
    phi = distortion if distortion is not None else default_distortion(m)
    mean_sq = np.empty(len(sizes))
    mean_sq_se = np.empty(len(sizes))
    mean_sq_d = np.empty(len(sizes))
    mean_sq_d_se = np.empty(len(sizes))
    for ni, n in enumerate(sizes):
        sq = np.empty(reps)
        sqd = np.empty(reps)
        for r in range(reps):
            rng = derived_rng(seed, "chart", m, ni, r)
            X = fam.sample(n, rng)
            res = karcher_mean(X, opts)
            z, _ = _chart_log_rows(res.mean.coords[None, :])
            z = z[0]
            zd = np.asarray(phi(z), dtype=np.float64)
            sq[r] = float(z @ z)
            sqd[r] = float(zd @ zd)
        mean_sq[ni] = sq.mean()
        mean_sq_se[ni] = sq.std(ddof=1) / np.sqrt(reps)
        mean_sq_d[ni] = sqd.mean()
        mean_sq_d_se[ni] = sqd.std(ddof=1) / np.sqrt(reps)
    return (
        _fit_rate(sizes, mean_sq, mean_sq_se),
        _fit_rate(sizes, mean_sq_d, mean_sq_d_se),
    )
