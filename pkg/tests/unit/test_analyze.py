"""
Unit tests for graph statistics (src/ballmapper/analyze.py).

Tests cover: average degree and the boundary-aware degree profile, degree sweeps with fixed
clouds and samplers, plateau detection, trust bands, density thresholds and merge radii.
"""

import numpy as np
import pytest


@pytest.fixture
def line_graph(line_cloud, euclidean):
    from ballmapper.cover import greedy_epsilon_net
    from ballmapper.nerve import build_bm_graph

    return build_bm_graph(greedy_epsilon_net(line_cloud, euclidean, 0.5))


# ---------------------------------------------------------------------------
# Degrees
# ---------------------------------------------------------------------------


class TestAverageDegree:
    def test_path(self, line_graph):
        from ballmapper.analyze import average_degree

        assert average_degree(line_graph) == pytest.approx(4 / 3)

    def test_empty_graph(self, line_graph):
        from ballmapper.analyze import average_degree
        from ballmapper.exceptions import DataError
        from ballmapper.nerve import filter_low_density

        with pytest.raises(DataError):
            average_degree(filter_low_density(line_graph, 10))


class TestDegreeProfile:
    def test_interior_beats_corners(self, euclidean):
        """GIVEN a dense uniform sample of [0, 10]^2
        WHEN vertices are grouped by distance to the faces
        THEN the groups partition the vertices and interior vertices have more neighbors
        than corner vertices."""
        from ballmapper.analyze import degree_profile
        from ballmapper.cover import greedy_epsilon_net
        from ballmapper.datasets import sample_cube
        from ballmapper.nerve import build_bm_graph

        cloud = sample_cube(3000, 2, side=10.0, seed=0)
        graph = build_bm_graph(greedy_epsilon_net(cloud, euclidean, 0.5))
        profile = degree_profile(graph, cloud, side=10.0)

        total = profile.interior_count + profile.boundary_count + profile.corner_count
        assert total == graph.n_vertices
        assert profile.corner_count > 0
        assert profile.interior_mean > profile.corner_mean

    def test_margins_default_to_epsilon(self, line_graph, line_cloud):
        """GIVEN centers at 0, 1, 2 on a segment of side 2 at epsilon 0.5
        WHEN profiled with default margins
        THEN the middle center is interior (1 >= 2 * 0.5) and the ends are corners."""
        from ballmapper.analyze import degree_profile

        profile = degree_profile(line_graph, line_cloud, side=2.0)
        assert (profile.interior_count, profile.corner_count) == (1, 2)
        assert profile.boundary_count == 0
        assert profile.boundary_mean is None
        assert profile.interior_mean == 2.0
        assert profile.corner_mean == 1.0

    def test_needs_positive_side(self, line_graph, line_cloud):
        from ballmapper.analyze import degree_profile
        from ballmapper.exceptions import ConfigError

        with pytest.raises(ConfigError):
            degree_profile(line_graph, line_cloud, side=0.0)


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


class TestDimensionSweep:
    def test_fixed_cloud_repetitions_agree(self, line_cloud, euclidean):
        from ballmapper.analyze import dimension_sweep

        sweep = dimension_sweep(line_cloud, euclidean, [0.5, 1.0], repetitions=3)
        assert sweep.radii == (0.5, 1.0)
        assert sweep.repetitions == 3
        assert sweep.per_repetition == ((4 / 3, 2.0),) * 3
        assert sweep.mean_degree == pytest.approx((4 / 3, 2.0))
        assert sweep.interior_mean_degree is None

    def test_sampler_gets_offset_seeds(self, euclidean):
        """GIVEN a sampler and master seed 5
        WHEN three repetitions run
        THEN the sampler sees seeds 5, 6, 7."""
        from ballmapper.analyze import dimension_sweep
        from ballmapper.datasets import sample_cube

        seen = []

        def _sampler(seed):
            seen.append(seed)
            return sample_cube(200, 2, side=4.0, seed=seed)

        sweep = dimension_sweep(_sampler, euclidean, [0.5, 1.0], repetitions=3, seed=5)
        assert sorted(seen) == [5, 6, 7]
        assert len(sweep.per_repetition) == 3
        expected = np.mean(np.array(sweep.per_repetition), axis=0)
        assert sweep.mean_degree == pytest.approx(tuple(expected))

    def test_degree_grows_with_radius(self, euclidean):
        from ballmapper.analyze import dimension_sweep
        from ballmapper.datasets import sample_cube

        cloud = sample_cube(800, 2, side=5.0, seed=1)
        sweep = dimension_sweep(cloud, euclidean, [0.3, 0.6, 1.2, 2.4])
        assert list(sweep.mean_degree) == sorted(sweep.mean_degree)

    def test_interior_degrees_with_box(self, euclidean):
        from ballmapper.analyze import dimension_sweep
        from ballmapper.datasets import sample_cube

        cloud = sample_cube(1000, 2, side=10.0, seed=2)
        sweep = dimension_sweep(cloud, euclidean, [0.5, 0.8], box_side=10.0)
        assert len(sweep.interior_mean_degree) == 2
        assert all(np.isfinite(sweep.interior_mean_degree))

    def test_repetitions_must_be_positive(self, line_cloud, euclidean):
        from ballmapper.analyze import dimension_sweep
        from ballmapper.exceptions import ConfigError

        with pytest.raises(ConfigError):
            dimension_sweep(line_cloud, euclidean, [0.5], repetitions=0)


class TestPlateauDegree:
    def test_median_of_middle_third(self):
        from ballmapper.analyze import DegreeSweep, plateau_degree

        sweep = DegreeSweep(
            radii=(1, 2, 3, 4, 5, 6),
            mean_degree=(1.0, 2.0, 3.0, 4.0, 5.0, 6.0),
            per_repetition=((1.0, 2.0, 3.0, 4.0, 5.0, 6.0),),
            repetitions=1,
        )
        assert plateau_degree(sweep) == 3.5

    def test_needs_three_radii(self):
        from ballmapper.analyze import DegreeSweep, plateau_degree
        from ballmapper.exceptions import ConfigError

        sweep = DegreeSweep((1, 2), (1.0, 2.0), ((1.0, 2.0),), 1)
        with pytest.raises(ConfigError):
            plateau_degree(sweep)


# ---------------------------------------------------------------------------
# Trust band
# ---------------------------------------------------------------------------


class TestTrustBand:
    def test_band(self):
        from ballmapper.analyze import trust_band

        band = trust_band(0.5, 0.1)
        assert band.lower == 0.5
        assert band.upper == pytest.approx(1.7)
        assert band.contains(1.0)
        assert not band.contains(0.4)
        assert not band.contains(1.8)

    @pytest.mark.parametrize("epsilon, delta", [(0.0, 0.1), (-1.0, 0.1), (0.5, -0.1)])
    def test_invalid(self, epsilon, delta):
        from ballmapper.analyze import trust_band
        from ballmapper.exceptions import ConfigError

        with pytest.raises(ConfigError):
            trust_band(epsilon, delta)

    def test_hausdorff_band(self, line_cloud, euclidean):
        """GIVEN a sample and a copy shifted by 0.1
        WHEN the trust band is measured
        THEN delta is 0.1 and the band runs from epsilon to 3 epsilon + 0.2."""
        from ballmapper.analyze import hausdorff_trust_band
        from ballmapper.metric import PointCloud

        shifted = PointCloud.from_array(line_cloud.points + 0.1)
        band = hausdorff_trust_band(line_cloud, shifted, euclidean, 0.5)
        assert band.lower == 0.5
        assert band.upper == pytest.approx(1.7)


# ---------------------------------------------------------------------------
# Density threshold and merge radius
# ---------------------------------------------------------------------------


class TestSuggestDensityThreshold:
    @pytest.mark.parametrize("quantile, expected", [(0.0, 2), (0.25, 2), (1.0, 3)])
    def test_quantiles(self, line_graph, quantile, expected):
        from ballmapper.analyze import suggest_density_threshold

        assert suggest_density_threshold(line_graph, quantile) == expected

    def test_quantile_out_of_range(self, line_graph):
        from ballmapper.analyze import suggest_density_threshold
        from ballmapper.exceptions import ConfigError

        with pytest.raises(ConfigError, match="1.5"):
            suggest_density_threshold(line_graph, 1.5)


class TestMergeRadius:
    def test_two_clusters(self, two_clusters, euclidean):
        """GIVEN clusters whose closest cross point is 9.9 from the other center
        WHEN the merge radius is bisected
        THEN it lands within tolerance above 9.9."""
        from ballmapper.analyze import merge_radius

        labels = two_clusters.attribute("group").astype(int)
        radius = merge_radius(two_clusters, euclidean, [0, 3], labels, {0}, {1}, 0.5, 20.0)
        assert 9.9 <= radius <= 9.9 + 0.05 + 1e-9

    def test_already_touching(self, line_cloud, euclidean):
        from ballmapper.analyze import merge_radius

        labels = [0, 0, 0, 1, 1]
        radius = merge_radius(line_cloud, euclidean, [0, 2, 4], labels, {0}, {1}, 0.5, 2.0)
        assert radius == 0.5

    def test_still_apart(self, two_clusters, euclidean):
        from ballmapper.analyze import merge_radius
        from ballmapper.exceptions import DataError

        labels = two_clusters.attribute("group").astype(int)
        with pytest.raises(DataError, match="still apart"):
            merge_radius(two_clusters, euclidean, [0, 3], labels, {0}, {1}, 0.5, 5.0)

    def test_bad_bounds(self, line_cloud, euclidean):
        from ballmapper.analyze import merge_radius
        from ballmapper.exceptions import ConfigError

        with pytest.raises(ConfigError):
            merge_radius(line_cloud, euclidean, [0, 2, 4], [0] * 5, {0}, {1}, 2.0, 1.0)
