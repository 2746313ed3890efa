"""Tests of the intrinsic-mean solver."""

import math

import numpy as np
import pytest

from oracles import fibonacci_sphere, grid_min_frechet, uniform_sphere
from smeary import (
    ContractViolationError,
    SmearyFamily,
    SolverOptions,
    SpherePoint,
    derived_rng,
    empirical_frechet,
    geodesic_distance,
    karcher_mean,
    north_pole,
)

POLE2 = np.array([0.0, 1.0, 0.0])


def test_options_validation():
    with pytest.raises(ContractViolationError):
        SolverOptions(step_tol=0.0)
    with pytest.raises(ContractViolationError):
        SolverOptions(max_iter=0)
    with pytest.raises(ContractViolationError):
        SolverOptions(step_size=0.0)
    with pytest.raises(ContractViolationError):
        SolverOptions(step_size=1.5)


def test_identical_points():
    q = np.array([0.6, 0.8, 0.0])
    res = karcher_mean(np.tile(q, (7, 1)))
    assert res.converged
    assert res.iterations == 1
    assert np.allclose(res.mean.coords, q, atol=1e-15)
    assert res.frechet_value == 0.0
    assert res.frechet_trace == []


def test_two_symmetric_points_meet_in_the_middle():
    a = math.pi / 4
    X = np.array(
        [[math.sin(a), math.cos(a), 0.0], [-math.sin(a), math.cos(a), 0.0]]
    )
    res = karcher_mean(X)
    assert res.converged
    assert geodesic_distance(res.mean, SpherePoint(POLE2)) < 1e-10


def test_subcritical_sample_mean_is_near_the_pole():
    fam = SmearyFamily.from_beta(2, -0.3)
    X = fam.sample(10000, derived_rng(42, "solver"))
    res = karcher_mean(X)
    assert res.converged
    assert geodesic_distance(res.mean, north_pole(2)) < 0.05


def test_descent_is_monotone():
    fam = SmearyFamily.from_beta(2, 0.0)
    X = fam.sample(2000, derived_rng(9, "descent"))
    res = karcher_mean(X, SolverOptions(track_descent=True))
    trace = np.array(res.frechet_trace)
    assert trace.size >= 2
    slack = 1e-15 * (1.0 + np.abs(trace[:-1])) + 1e-16
    assert np.all(np.diff(trace) <= slack)
    assert res.frechet_value == trace[-1]


def test_converged_means_small_final_step():
    fam = SmearyFamily.from_beta(2, -0.1)
    X = fam.sample(500, derived_rng(1, "conv"))
    opts = SolverOptions(step_tol=1e-10)
    res = karcher_mean(X, opts)
    assert res.converged
    assert res.final_step < opts.step_tol


def test_iteration_cap_reported_as_nonconverged():
    fam = SmearyFamily.from_beta(2, 0.0)
    X = fam.sample(5000, derived_rng(2, "cap"))
    res = karcher_mean(X, SolverOptions(max_iter=3))
    assert not res.converged
    assert res.iterations == 3
    assert res.final_step >= 1e-10


def test_frechet_value_matches_empirical_evaluation():
    fam = SmearyFamily.from_beta(2, -0.05)
    X = fam.sample(300, derived_rng(3, "fval"))
    res = karcher_mean(X)
    assert res.frechet_value == pytest.approx(
        empirical_frechet(X, res.mean), rel=1e-12
    )


def test_rotation_equivariance():
    rng = derived_rng(4, "equivariance")
    fam = SmearyFamily.from_beta(2, 0.02)
    X = fam.sample(800, rng)
    A = rng.standard_normal((3, 3))
    Q, R = np.linalg.qr(A)
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0.0:
        Q[:, 0] = -Q[:, 0]
    res = karcher_mean(X)
    res_rot = karcher_mean(X @ Q.T)
    moved = SpherePoint(Q @ res.mean.coords)
    assert geodesic_distance(res_rot.mean, moved) < 1e-8


def test_never_beaten_by_a_lattice_search():
    # a 200k-node lattice can only find a value at least as large as the
    # true minimum, so the solver must come within 1e-5 of the lattice best
    lattice = fibonacci_sphere(200000)
    for i in range(10):
        rng = derived_rng(100, "oracle", i)
        P = uniform_sphere(2, 2 + (i % 4), rng)
        res = karcher_mean(P)
        grid_val, _ = grid_min_frechet(P, lattice)
        assert res.frechet_value <= grid_val + 1e-5


def test_balanced_pair_flags_degenerate_init():
    e = np.array([1.0, 0.0, 0.0])
    res = karcher_mean(np.vstack([e, -e]))
    assert res.degenerate_init
    assert res.antipodal_skips >= 1
    assert np.allclose(res.mean.coords, e)
    assert res.converged


def test_rows_are_renormalized():
    fam = SmearyFamily.from_beta(2, -0.2)
    X = fam.sample(50, derived_rng(6, "norm"))
    res_unit = karcher_mean(X)
    res_scaled = karcher_mean(3.0 * X)
    assert geodesic_distance(res_unit.mean, res_scaled.mean) < 1e-8


def test_input_validation():
    with pytest.raises(ContractViolationError):
        karcher_mean([])
    with pytest.raises(ContractViolationError):
        karcher_mean(np.zeros((2, 3)))
    with pytest.raises(ContractViolationError):
        karcher_mean(np.ones((3,)))
    with pytest.raises(ContractViolationError):
        karcher_mean(np.ones((2, 1)))


def test_accepts_sphere_point_iterable():
    pts = [SpherePoint([0.0, 1.0, 0.0]), SpherePoint([0.1, 0.99498743710662, 0.0])]
    res = karcher_mean(pts)
    assert res.converged
    assert res.mean.coords.shape == (3,)


def test_higher_dimension_smoke():
    fam = SmearyFamily.from_beta(10, -0.2)
    X = fam.sample(2000, derived_rng(8, "dim10"))
    res = karcher_mean(X)
    assert res.converged
    assert geodesic_distance(res.mean, north_pole(10)) < 0.2
