"""
Unit tests for center selection and cover vectors (src/ballmapper/cover.py).

Tests cover: greedy and max-min epsilon-nets, k-means centers, recovering a cover at a new
radius, externally supplied centers and parameter validation. Cover lists are checked
against a brute-force distance oracle.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays


def _brute_force_covers(cloud, metric, centers, epsilon):
    """Cover lists from the full distance block, centers in ascending index order."""
    from ballmapper.metric import pairwise_distances

    ordered = sorted(centers)
    block = pairwise_distances(cloud, metric, None, ordered)
    return tuple(
        tuple(c for j, c in enumerate(ordered) if block[x, j] <= epsilon) for x in range(cloud.n)
    )


clouds = arrays(
    np.float64,
    st.tuples(st.integers(min_value=1, max_value=40), st.integers(min_value=1, max_value=3)),
    elements=st.floats(min_value=-10, max_value=10, allow_nan=False, width=64),
)


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------


class TestNetParams:
    def test_unknown_algorithm(self):
        from ballmapper.cover import NetParams
        from ballmapper.exceptions import ConfigError

        with pytest.raises(ConfigError, match="unknown net algorithm"):
            NetParams(algorithm="random")

    @pytest.mark.parametrize("epsilon", [0.0, -1.0, float("inf"), float("nan")])
    def test_bad_epsilon(self, epsilon):
        from ballmapper.cover import NetParams
        from ballmapper.exceptions import ConfigError

        with pytest.raises(ConfigError, match="epsilon"):
            NetParams(epsilon=epsilon)

    def test_kmeans_needs_k_and_no_epsilon(self):
        from ballmapper.cover import NetParams
        from ballmapper.exceptions import ConfigError

        with pytest.raises(ConfigError, match="positive k"):
            NetParams(algorithm="kmeans")
        with pytest.raises(ConfigError, match="derives epsilon"):
            NetParams(algorithm="kmeans", k=3, epsilon=0.5)

    def test_fields_of_other_algorithms_rejected(self):
        from ballmapper.cover import NetParams
        from ballmapper.exceptions import ConfigError

        with pytest.raises(ConfigError, match="k only applies"):
            NetParams(algorithm="greedy", k=3)
        with pytest.raises(ConfigError, match="max_centers only applies"):
            NetParams(algorithm="greedy", max_centers=3)

    def test_at_epsilon(self):
        from ballmapper.cover import NetParams

        assert NetParams(epsilon=0.1).at_epsilon(0.7).epsilon == 0.7
        kmeans = NetParams(algorithm="kmeans", k=2)
        assert kmeans.at_epsilon(0.7) is kmeans

    def test_build_net_needs_epsilon(self, line_cloud, euclidean):
        from ballmapper.cover import NetParams, build_net
        from ballmapper.exceptions import ConfigError

        with pytest.raises(ConfigError, match="needs an epsilon"):
            build_net(line_cloud, euclidean, NetParams())


# ---------------------------------------------------------------------------
# Greedy net
# ---------------------------------------------------------------------------


class TestGreedyEpsilonNet:
    def test_line_at_half(self, line_cloud, euclidean):
        """GIVEN points 0, 0.5, 1, 1.5, 2 and epsilon 0.5
        WHEN the greedy net is built
        THEN centers are 0, 2, 4 and boundary points lie in both closed balls."""
        from ballmapper.cover import greedy_epsilon_net

        cover = greedy_epsilon_net(line_cloud, euclidean, 0.5)
        assert cover.centers == (0, 2, 4)
        assert cover.covers == ((0,), (0, 2), (2,), (2, 4), (4,))
        assert cover.cover_sizes().tolist() == [1, 2, 1, 2, 1]

    def test_large_epsilon_single_center(self, line_cloud, euclidean):
        from ballmapper.cover import greedy_epsilon_net

        cover = greedy_epsilon_net(line_cloud, euclidean, 5.0)
        assert cover.centers == (0,)
        assert all(c == (0,) for c in cover.covers)

    def test_tiny_epsilon_every_point_a_center(self, line_cloud, euclidean):
        from ballmapper.cover import greedy_epsilon_net

        cover = greedy_epsilon_net(line_cloud, euclidean, 0.1)
        assert cover.centers == (0, 1, 2, 3, 4)

    def test_duplicate_points_share_a_ball(self, euclidean):
        from ballmapper.cover import greedy_epsilon_net
        from ballmapper.metric import PointCloud

        cloud = PointCloud.from_array([[1.0, 1.0], [1.0, 1.0], [1.0, 1.0]])
        cover = greedy_epsilon_net(cloud, euclidean, 0.01)
        assert cover.centers == (0,)
        assert cover.covers == ((0,), (0,), (0,))

    def test_precomputed_metric(self):
        from ballmapper.cover import greedy_epsilon_net
        from ballmapper.metric import MetricSpec, PointCloud

        matrix = [[0.0, 1.0, 3.0], [1.0, 0.0, 2.0], [3.0, 2.0, 0.0]]
        cover = greedy_epsilon_net(PointCloud.ids_only(3), MetricSpec.precomputed(matrix), 1.0)
        assert cover.centers == (0, 2)
        assert cover.covers == ((0,), (0,), (2,))

    @settings(max_examples=50, deadline=None)
    @given(points=clouds, epsilon=st.floats(min_value=0.05, max_value=8.0))
    def test_covers_match_brute_force(self, points, epsilon):
        """GIVEN any cloud and radius
        WHEN the greedy net is built
        THEN every cover list equals the brute-force ball membership and centers are
        more than epsilon apart."""
        from ballmapper.cover import greedy_epsilon_net, is_separated
        from ballmapper.metric import MetricSpec, PointCloud

        cloud = PointCloud.from_array(points)
        metric = MetricSpec("euclidean")
        cover = greedy_epsilon_net(cloud, metric, epsilon)

        assert cover.covers == _brute_force_covers(cloud, metric, cover.centers, epsilon)
        assert all(len(c) >= 1 for c in cover.covers)
        assert is_separated(cloud, metric, cover)

    @pytest.mark.slow
    @settings(max_examples=500, deadline=None)
    @given(
        seed=st.integers(min_value=0, max_value=2**32 - 1),
        n_points=st.integers(min_value=1, max_value=300),
        dim=st.integers(min_value=1, max_value=5),
        epsilon=st.floats(min_value=0.1, max_value=12.0),
    )
    def test_nets_cover_and_separate_at_scale(self, seed, n_points, dim, epsilon):
        """GIVEN seeded clouds of up to 300 points in up to five dimensions
        WHEN greedy and max-min nets are built at a random radius
        THEN both cover every point within epsilon and keep centers more than epsilon apart."""
        from ballmapper.cover import greedy_epsilon_net, is_separated, maxmin_epsilon_net
        from ballmapper.metric import MetricSpec, PointCloud, nearest_center_distances

        metric = MetricSpec("euclidean")
        cloud = PointCloud.from_array(
            np.random.default_rng(seed).uniform(0, 10, size=(n_points, dim))
        )
        for build in (greedy_epsilon_net, maxmin_epsilon_net):
            cover = build(cloud, metric, epsilon)
            reach, _ = nearest_center_distances(cloud, metric, cover.centers)
            assert reach.max() <= epsilon
            assert is_separated(cloud, metric, cover)

    def test_same_input_same_net(self, euclidean):
        from ballmapper.cover import greedy_epsilon_net
        from ballmapper.metric import PointCloud

        cloud = PointCloud.from_array(np.random.default_rng(0).normal(size=(200, 2)))
        assert greedy_epsilon_net(cloud, euclidean, 0.4) == greedy_epsilon_net(
            cloud, euclidean, 0.4, workers=8
        )


# ---------------------------------------------------------------------------
# Max-min net
# ---------------------------------------------------------------------------


class TestMaxminEpsilonNet:
    def test_line_at_half(self, line_cloud, euclidean):
        """GIVEN the five-point line and epsilon 0.5
        WHEN the max-min net is built
        THEN it starts at 0, adds the far end, then the middle."""
        from ballmapper.cover import maxmin_epsilon_net

        cover = maxmin_epsilon_net(line_cloud, euclidean, 0.5)
        assert cover.centers == (0, 4, 2)
        assert cover.epsilon == 0.5
        assert cover.covers == ((0,), (0, 2), (2,), (2, 4), (4,))

    def test_truncated_net_raises_radius(self, line_cloud, euclidean, caplog):
        """GIVEN max_centers=2
        WHEN the max-min net stops early
        THEN the cover radius becomes the actual covering radius."""
        from ballmapper.cover import maxmin_epsilon_net

        with caplog.at_level("WARNING"):
            cover = maxmin_epsilon_net(line_cloud, euclidean, 0.5, max_centers=2)
        assert cover.centers == (0, 4)
        assert cover.epsilon == 1.0
        assert "truncated" in caplog.text

    @settings(max_examples=50, deadline=None)
    @given(points=clouds, epsilon=st.floats(min_value=0.05, max_value=8.0))
    def test_separated_and_total(self, points, epsilon):
        from ballmapper.cover import is_separated, maxmin_epsilon_net
        from ballmapper.metric import MetricSpec, PointCloud

        cloud = PointCloud.from_array(points)
        metric = MetricSpec("euclidean")
        cover = maxmin_epsilon_net(cloud, metric, epsilon)

        assert cover.centers[0] == 0
        assert cover.covers == _brute_force_covers(cloud, metric, cover.centers, epsilon)
        assert is_separated(cloud, metric, cover)

    @settings(max_examples=80, deadline=None)
    @given(
        seed=st.integers(min_value=0, max_value=10_000),
        radii=st.tuples(
            st.floats(min_value=0.1, max_value=6.0), st.floats(min_value=0.1, max_value=6.0)
        ),
    )
    def test_smaller_radius_never_fewer_centers(self, seed, radii):
        """GIVEN one cloud and two radii
        WHEN max-min nets are built at both
        THEN the smaller radius has at least as many centers, and the larger net is a
        prefix of it."""
        from ballmapper.cover import maxmin_epsilon_net
        from ballmapper.metric import MetricSpec, PointCloud

        small, large = sorted(radii)
        metric = MetricSpec("euclidean")
        cloud = PointCloud.from_array(np.random.default_rng(seed).uniform(0, 5, size=(120, 2)))
        fine = maxmin_epsilon_net(cloud, metric, small)
        coarse = maxmin_epsilon_net(cloud, metric, large)

        assert fine.n_centers >= coarse.n_centers
        assert fine.centers[: coarse.n_centers] == coarse.centers


# ---------------------------------------------------------------------------
# k-means centers
# ---------------------------------------------------------------------------


class TestKmeansCenters:
    def test_two_clusters(self, two_clusters, euclidean):
        """GIVEN two well-separated triples
        WHEN k-means with k=2 picks centers
        THEN one center lands in each cluster and epsilon reaches the farthest member."""
        from ballmapper.cover import kmeans_centers

        cover = kmeans_centers(two_clusters, euclidean, k=2, seed=0)
        assert sorted(cover.centers) == [0, 3]
        assert cover.epsilon == pytest.approx(0.1)
        assert all(len(c) == 1 for c in cover.covers)

    def test_deterministic_for_seed(self, euclidean):
        from ballmapper.cover import kmeans_centers
        from ballmapper.metric import PointCloud

        cloud = PointCloud.from_array(np.random.default_rng(2).normal(size=(150, 2)))
        assert kmeans_centers(cloud, euclidean, 6, seed=4) == kmeans_centers(
            cloud, euclidean, 6, seed=4
        )

    def test_k_equals_n_every_point_covers_itself(self, line_cloud, euclidean):
        from ballmapper.cover import kmeans_centers

        cover = kmeans_centers(line_cloud, euclidean, k=5, seed=0)
        assert sorted(cover.centers) == [0, 1, 2, 3, 4]
        assert cover.epsilon == 0.0
        assert cover.covers == ((0,), (1,), (2,), (3,), (4,))

    def test_single_center_nearest_the_centroid(self, line_cloud, euclidean):
        """GIVEN the five-point line with mean 1.0
        WHEN k-means runs with k=1
        THEN the only center is the point at 1.0 and epsilon reaches both ends."""
        from ballmapper.cover import kmeans_centers

        cover = kmeans_centers(line_cloud, euclidean, k=1, seed=3)
        assert cover.centers == (2,)
        assert cover.epsilon == 1.0
        assert all(c == (2,) for c in cover.covers)

    def test_k_out_of_range(self, line_cloud, euclidean):
        from ballmapper.cover import kmeans_centers
        from ballmapper.exceptions import ConfigError

        with pytest.raises(ConfigError, match="between 1 and 5"):
            kmeans_centers(line_cloud, euclidean, k=6)

    def test_needs_euclidean(self, line_cloud):
        from ballmapper.cover import kmeans_centers
        from ballmapper.exceptions import ConfigError
        from ballmapper.metric import MetricSpec

        with pytest.raises(ConfigError, match="euclidean"):
            kmeans_centers(line_cloud, MetricSpec("manhattan"), k=2)


# ---------------------------------------------------------------------------
# Fixed centers
# ---------------------------------------------------------------------------


class TestRecover:
    def test_larger_radius(self, line_cloud, euclidean):
        from ballmapper.cover import recover

        cover = recover(line_cloud, euclidean, [0, 2, 4], 1.0)
        assert cover.centers == (0, 2, 4)
        assert cover.covers == ((0, 2), (0, 2), (0, 2, 4), (2, 4), (2, 4))

    def test_center_order_kept(self, line_cloud, euclidean):
        from ballmapper.cover import recover

        cover = recover(line_cloud, euclidean, [4, 0, 2], 0.5)
        assert cover.centers == (4, 0, 2)
        assert cover.vertex_of == {4: 0, 0: 1, 2: 2}
        # Cover lists stay in ascending point-index order
        assert cover.cover_of(1) == (0, 2)

    def test_uncovered_point(self, line_cloud, euclidean):
        """GIVEN centers 0, 2, 4 and a radius below the gaps
        WHEN the cover is recomputed
        THEN the first uncovered point is reported with its distance."""
        from ballmapper.cover import recover
        from ballmapper.exceptions import UncoveredPointError

        with pytest.raises(UncoveredPointError) as excinfo:
            recover(line_cloud, euclidean, [0, 2, 4], 0.4)
        assert excinfo.value.point == 1
        assert excinfo.value.distance == 0.5

    @pytest.mark.parametrize(
        "centers, message", [([], "empty"), ([0, 9], "index 9"), ([1, 1], "duplicates")]
    )
    def test_bad_centers(self, line_cloud, euclidean, centers, message):
        from ballmapper.cover import recover
        from ballmapper.exceptions import DataError

        with pytest.raises(DataError, match=message):
            recover(line_cloud, euclidean, centers, 1.0)

    def test_incidence_matrix(self, line_cloud, euclidean):
        from ballmapper.cover import recover

        cover = recover(line_cloud, euclidean, [4, 0, 2], 0.5)
        dense = cover.incidence().toarray()
        assert dense.shape == (5, 3)
        # Column j is the ball of centers[j]
        assert dense[:, 0].tolist() == [0, 0, 0, 1, 1]
        assert dense[:, 1].tolist() == [1, 1, 0, 0, 0]


class TestCoverFromCenters:
    def test_smallest_covering_radius(self, line_cloud, euclidean):
        from ballmapper.cover import cover_from_centers

        cover = cover_from_centers(line_cloud, euclidean, [0, 4])
        assert cover.epsilon == 1.0
        assert cover.cover_of(2) == (0, 4)

    def test_close_centers_warn(self, line_cloud, euclidean, caplog):
        """GIVEN centers 0.0 and 0.5 on the line
        WHEN the covering radius becomes 1.5
        THEN the cover is still built and a warning says the centers are not separated."""
        from ballmapper.cover import cover_from_centers, is_separated

        with caplog.at_level("WARNING"):
            cover = cover_from_centers(line_cloud, euclidean, [0, 1])
        assert cover.epsilon == 1.5
        assert not is_separated(line_cloud, euclidean, cover)
        assert "not an epsilon-net" in caplog.text

    def test_separated_centers_do_not_warn(self, line_cloud, euclidean, caplog):
        from ballmapper.cover import cover_from_centers

        with caplog.at_level("WARNING"):
            cover_from_centers(line_cloud, euclidean, [0, 4])
        assert "not an epsilon-net" not in caplog.text


    def test_build_net_dispatch(self, line_cloud, euclidean):
        from ballmapper.cover import NetParams, build_net

        greedy = build_net(line_cloud, euclidean, NetParams(epsilon=0.5))
        maxmin = build_net(line_cloud, euclidean, NetParams(algorithm="maxmin", epsilon=0.5))
        assert greedy.centers == (0, 2, 4)
        assert maxmin.centers == (0, 4, 2)
