"""Chart, exponential map, and sampling primitives."""

import math

import numpy as np
import pytest
from scipy.stats import chi2

from smeary import (
    ChartVector,
    ContractViolationError,
    CutLocusError,
    DomainError,
    SpherePoint,
    embed_chart,
    exp_at,
    exp_at_north,
    geodesic_distance,
    log_at,
    log_at_north,
    north_pole,
    pole_array,
    project_chart,
    sample_lower_half,
)

DIMS = (1, 2, 3, 10, 100)


def chart_rng(tag):
    return np.random.default_rng(abs(hash(tag)) % 2**32)


class TestSpherePoint:
    def test_renormalizes(self):
        p = SpherePoint([3.0, 4.0, 0.0])
        assert np.allclose(p.coords, [0.6, 0.8, 0.0])
        assert p.m == 2

    def test_rejects_zero(self):
        with pytest.raises(ContractViolationError):
            SpherePoint([0.0, 0.0, 1e-15])

    def test_rejects_matrix(self):
        with pytest.raises(ContractViolationError):
            SpherePoint(np.eye(3))

    def test_rejects_scalar(self):
        with pytest.raises(ContractViolationError):
            SpherePoint([1.0])


def test_pole_structure():
    for m in DIMS:
        p = north_pole(m)
        arr = pole_array(m)
        assert isinstance(p, SpherePoint)
        assert arr.shape == (m + 1,)
        assert arr[1] == 1.0
        assert np.count_nonzero(arr) == 1
        assert np.array_equal(p.coords, arr)


def test_chart_embedding_roundtrip():
    for m in DIMS:
        rng = np.random.default_rng(m)
        x = rng.standard_normal(m)
        v = embed_chart(x)
        assert v.shape == (m + 1,)
        assert v[1] == 0.0
        assert np.array_equal(project_chart(v), x)


def test_chart_embedding_batched():
    rng = np.random.default_rng(5)
    X = rng.standard_normal((7, 4))
    V = embed_chart(X)
    assert V.shape == (7, 5)
    assert np.all(V[:, 1] == 0.0)
    assert np.array_equal(project_chart(V), X)


class TestGeodesicDistance:
    def test_identity_and_antipode(self):
        p = north_pole(2)
        q = SpherePoint(-p.coords)
        assert geodesic_distance(p, p) == 0.0
        assert geodesic_distance(p, q) == pytest.approx(math.pi, abs=1e-15)

    def test_symmetry(self):
        rng = chart_rng("sym")
        for _ in range(20):
            a = SpherePoint(rng.standard_normal(4))
            b = SpherePoint(rng.standard_normal(4))
            assert geodesic_distance(a, b) == geodesic_distance(b, a)

    def test_orthogonal(self):
        p = SpherePoint([1.0, 0.0, 0.0])
        q = SpherePoint([0.0, 0.0, 1.0])
        assert geodesic_distance(p, q) == pytest.approx(math.pi / 2, abs=1e-15)


class TestExpLogAtNorth:
    @pytest.mark.parametrize("m", DIMS)
    def test_chart_roundtrip(self, m):
        rng = np.random.default_rng(100 + m)
        for _ in range(10):
            x = rng.standard_normal(m)
            x *= rng.uniform(0.01, 3.1) / np.linalg.norm(x)
            q = exp_at_north(x)
            back = log_at_north(q)
            assert isinstance(back, ChartVector)
            np.testing.assert_allclose(back.coords, x, atol=1e-12)

    @pytest.mark.parametrize("m", DIMS)
    def test_point_roundtrip(self, m):
        rng = np.random.default_rng(200 + m)
        for _ in range(10):
            q = SpherePoint(rng.standard_normal(m + 1))
            again = exp_at_north(log_at_north(q).coords)
            np.testing.assert_allclose(again.coords, q.coords, atol=1e-12)

    def test_radial_isometry(self):
        rng = chart_rng("radial")
        pole = north_pole(3)
        for _ in range(25):
            q = SpherePoint(rng.standard_normal(4))
            assert log_at_north(q).norm == pytest.approx(
                geodesic_distance(pole, q), abs=1e-12
            )

    def test_zero_maps_to_pole(self):
        q = exp_at_north(np.zeros(4))
        assert np.array_equal(q.coords, pole_array(4))
        assert log_at_north(north_pole(4)).norm == 0.0

    def test_antipode_rejected(self):
        with pytest.raises(CutLocusError):
            log_at_north(SpherePoint([0.0, -1.0, 0.0]))

    def test_near_antipode_ok(self):
        q = SpherePoint([1e-6, -1.0, 0.0])
        assert log_at_north(q).norm == pytest.approx(math.pi, abs=1e-5)

    def test_radius_pi_rejected(self):
        with pytest.raises(DomainError):
            exp_at_north(np.array([math.pi, 0.0]))


class TestExpLogGeneral:
    def test_roundtrip(self):
        rng = chart_rng("general")
        for _ in range(20):
            p = SpherePoint(rng.standard_normal(5))
            q = SpherePoint(rng.standard_normal(5))
            if geodesic_distance(p, q) > math.pi - 1e-3:
                continue
            v = log_at(p, q)
            assert abs(float(v @ p.coords)) < 1e-12
            np.testing.assert_allclose(
                exp_at(p, v).coords, q.coords, atol=1e-12
            )

    def test_matches_north_specialization(self):
        rng = chart_rng("north-match")
        pole = north_pole(4)
        for _ in range(10):
            q = SpherePoint(rng.standard_normal(5))
            v = log_at(pole, q)
            assert np.linalg.norm(v) == pytest.approx(
                log_at_north(q).norm, abs=1e-12
            )

    def test_nontangent_rejected(self):
        p = north_pole(2)
        with pytest.raises(ContractViolationError):
            exp_at(p, np.array([0.0, 0.5, 0.0]))


class TestSampleLowerHalf:
    def test_shape_and_support(self):
        rng = np.random.default_rng(0)
        for m in (2, 10):
            X = sample_lower_half(m, rng, size=500)
            assert X.shape == (500, m + 1)
            np.testing.assert_allclose(
                np.linalg.norm(X, axis=1), 1.0, atol=1e-12
            )
            assert np.all(X[:, 1] <= 0.0)

    def test_single_draw(self):
        rng = np.random.default_rng(1)
        x = sample_lower_half(2, rng)
        assert x.shape == (3,)
        assert x[1] <= 0.0

    def test_axial_angle_uniform(self):
        """The azimuth of (x0, x2) must be uniform: 8-bin chi-square."""
        rng = np.random.default_rng(42)
        X = sample_lower_half(2, rng, size=20000)
        ang = np.arctan2(X[:, 2], X[:, 0])
        counts, _ = np.histogram(ang, bins=8, range=(-math.pi, math.pi))
        expected = len(X) / 8
        stat = float(((counts - expected) ** 2 / expected).sum())
        assert stat < chi2.ppf(1 - 1e-6, df=7)

    def test_height_law(self):
        """P(q_1 < t) on the half sphere is the normalized band area.

        For m = 2 the height coordinate is uniform on [-1, 0], a direct
        Archimedes check of the sampler.
        """
        rng = np.random.default_rng(43)
        X = sample_lower_half(2, rng, size=20000)
        h = X[:, 1]
        for t in (-0.8, -0.5, -0.2):
            # height is uniform on [-1, 0], so P(h < t) = 1 + t
            p = 1.0 + t
            frac = float(np.mean(h < t))
            se = math.sqrt(p * (1 - p) / len(h))
            assert abs(frac - p) < 5 * se
