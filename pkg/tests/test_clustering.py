import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from drivestyle.clustering import (
    METHODS,
    ClusterModel,
    assign_style_labels,
    calinski_harabasz,
    davies_bouldin,
    fit_clusters,
    internal_validation,
    silhouette,
)
from drivestyle.errors import AmbiguousOrdering, DegenerateInput, InvalidParameters, SingleCluster


# ---- naive reference implementations -------------------------------------

def _dist(p, q):
    return math.sqrt(sum((a - b) ** 2 for a, b in zip(p, q)))


def naive_silhouette(X, labels):
    X = [list(map(float, r)) for r in X]
    labels = list(labels)
    clusters = sorted(set(labels))
    total = 0.0
    for i, p in enumerate(X):
        own = [j for j in range(len(X)) if labels[j] == labels[i] and j != i]
        if not own:
            continue
        a = sum(_dist(p, X[j]) for j in own) / len(own)
        b = min(sum(_dist(p, X[j]) for j in range(len(X)) if labels[j] == c)
                / sum(1 for j in range(len(X)) if labels[j] == c)
                for c in clusters if c != labels[i])
        total += (b - a) / max(a, b) if max(a, b) > 0 else 0.0
    return total / len(X)


def _centroid(pts):
    return [sum(c) / len(pts) for c in zip(*pts)]


def naive_ch(X, labels):
    X = [list(map(float, r)) for r in X]
    clusters = sorted(set(labels))
    mean = _centroid(X)
    between = within = 0.0
    for c in clusters:
        pts = [p for p, l in zip(X, labels) if l == c]
        cen = _centroid(pts)
        between += len(pts) * _dist(cen, mean) ** 2
        within += sum(_dist(p, cen) ** 2 for p in pts)
    n, k = len(X), len(clusters)
    return between * (n - k) / (within * (k - 1))


def naive_db(X, labels):
    X = [list(map(float, r)) for r in X]
    clusters = sorted(set(labels))
    cens, scat = [], []
    for c in clusters:
        pts = [p for p, l in zip(X, labels) if l == c]
        cen = _centroid(pts)
        cens.append(cen)
        scat.append(sum(_dist(p, cen) for p in pts) / len(pts))
    k = len(clusters)
    return sum(max((scat[i] + scat[j]) / _dist(cens[i], cens[j]) for j in range(k) if j != i)
               for i in range(k)) / k


def blobs(seed, sigma=0.1, per=40, dim=4):
    rng = np.random.default_rng(seed)
    centers = np.array([[0.0] * dim, [10.0] * dim, [0.0, 20.0] + [0.0] * (dim - 2)])
    X = np.vstack([rng.normal(c, sigma, (per, dim)) for c in centers])
    return X, np.repeat(np.arange(3), per)


def agreement_up_to_permutation(a, b, k=3):
    best = 0
    for perm in itertools.permutations(range(k)):
        best = max(best, np.mean(np.array(perm)[a] == b))
    return best


# ---- fitting --------------------------------------------------------------

class TestFitClusters:
    @pytest.mark.parametrize("method", METHODS)
    def test_separated_blobs(self, method):
        X, truth = blobs(0)
        _, labels = fit_clusters(X, method, k=3, seed=1)
        assert agreement_up_to_permutation(labels, truth) >= 0.99

    @pytest.mark.parametrize("method", METHODS)
    def test_reproducible(self, method):
        X, _ = blobs(5, sigma=2.0)
        a = fit_clusters(X, method, k=3, seed=9)
        b = fit_clusters(X, method, k=3, seed=9)
        np.testing.assert_array_equal(a[1], b[1])
        np.testing.assert_array_equal(a[0].centers, b[0].centers)

    @pytest.mark.parametrize("method", METHODS)
    def test_duplicate_groups(self, method):
        X = np.array([[1.0, 2.0]] * 3 + [[5.0, -1.0]] * 4)
        model, labels = fit_clusters(X, method, k=2, seed=0)
        got = sorted(map(tuple, np.round(model.centers, 9)))
        assert got == [(1.0, 2.0), (5.0, -1.0)]
        assert len(set(labels[:3])) == 1 and len(set(labels[3:])) == 1

    @pytest.mark.parametrize("method", METHODS)
    def test_identical_points_rejected(self, method):
        with pytest.raises(DegenerateInput):
            fit_clusters(np.ones((10, 4)), method, k=3)

    def test_bad_method(self):
        with pytest.raises(InvalidParameters):
            fit_clusters(np.eye(4), "dbscan", k=2)

    def test_k_too_large(self):
        with pytest.raises(InvalidParameters):
            fit_clusters(np.eye(4), "kmeans", k=5)

    @pytest.mark.parametrize("seed", range(5))
    def test_kmeans_trace_non_increasing(self, seed):
        X = np.random.default_rng(seed).normal(size=(150, 4))
        model, _ = fit_clusters(X, "kmeans", k=3, seed=seed)
        assert np.all(np.diff(model.trace) <= 1e-9)

    @pytest.mark.parametrize("seed", range(5))
    def test_gmm_loglik_non_decreasing(self, seed):
        X = np.random.default_rng(seed).normal(size=(150, 3))
        model, _ = fit_clusters(X, "gmm", k=3, seed=seed, max_iter=100)
        assert len(model.trace) > 2
        assert np.all(np.diff(model.trace) >= -1e-9)

    @pytest.mark.parametrize("seed", range(5))
    def test_fcm_objective_and_memberships(self, seed):
        X = np.random.default_rng(seed).normal(size=(120, 4))
        model, labels = fit_clusters(X, "fcm", k=3, seed=seed)
        U = model.params["memberships"]
        np.testing.assert_allclose(U.sum(1), 1.0, atol=1e-9)
        assert np.all(np.diff(model.trace) <= 1e-9)
        np.testing.assert_array_equal(labels, U.argmax(1))

    def test_unstandardized_centers(self):
        X, _ = blobs(2)
        model, labels = fit_clusters(X, "kmeans", k=3, standardize=False)
        assert model.mean is None
        for j in range(3):
            np.testing.assert_allclose(model.centers[j], X[labels == j].mean(0), atol=1e-9)

    def test_json_roundtrip(self):
        X, _ = blobs(3)
        model, _ = fit_clusters(X, "gmm", k=3)
        back = ClusterModel.from_dict(model.to_dict())
        np.testing.assert_array_equal(back.centers, model.centers)
        np.testing.assert_array_equal(back.std, model.std)
        assert back.trace == model.trace


# ---- naming ---------------------------------------------------------------

class TestAssignStyleLabels:
    def test_identity_ordering(self):
        m = ClusterModel("kmeans", 3, np.array([[1.0, 1, 1, 1], [2, 2, 2, 2], [3, 3, 3, 3]]))
        assert assign_style_labels(m) == {0: "Calm", 1: "Moderate", 2: "Aggressive"}

    def test_reference_ekf_centers(self):
        # k-means centres on EKF-filtered features, rows permuted; every
        # feature increases Calm -> Moderate -> Aggressive
        centers = np.array([
            [9.37, 7.88, 7.35, 96.27],
            [7.21, 4.27, 3.99, 35.06],
            [10.21, 13.29, 12.05, 204.35],
        ])
        m = ClusterModel("kmeans", 3, centers)
        assert assign_style_labels(m) == {1: "Calm", 0: "Moderate", 2: "Aggressive"}

    @given(perm=st.permutations(range(3)))
    def test_permutation_invariant(self, perm):
        centers = np.array([[0.5, 0.2, 0.1, 0.3], [5.0, 2.0, 2.5, 4.0], [9.0, 6.0, 5.0, 12.0]])
        m = ClusterModel("kmeans", 3, centers[list(perm)])
        names = assign_style_labels(m)
        assert [names[perm.index(j)] for j in range(3)] == ["Calm", "Moderate", "Aggressive"]

    def test_uses_stored_standardization(self):
        X, _ = blobs(4)
        model, labels = fit_clusters(X, "kmeans", k=3)
        names = assign_style_labels(model)
        score = {j: model.transform(model.centers[j:j + 1]).mean() for j in range(3)}
        order = sorted(score, key=score.get)
        assert [names[j] for j in order] == ["Calm", "Moderate", "Aggressive"]

    def test_tie_reported(self):
        m = ClusterModel("kmeans", 3, np.array([[0.0, 1.0], [1.0, 0.0], [5.0, 5.0]]))
        with pytest.raises(AmbiguousOrdering):
            assign_style_labels(m)

    def test_needs_three_clusters(self):
        m = ClusterModel("kmeans", 2, np.array([[0.0], [1.0]]))
        with pytest.raises(InvalidParameters):
            assign_style_labels(m)


# ---- validation metrics -----------------------------------------------------

class TestValidation:
    def test_two_tight_pairs(self):
        X = np.array([[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]])
        labels = [0, 0, 1, 1]
        # a = 1; b = (10 + sqrt(101)) / 2 for every point
        b = (10 + math.sqrt(101)) / 2
        assert silhouette(X, labels) == pytest.approx((b - 1) / b, abs=1e-6)
        assert silhouette(X, labels) == pytest.approx(naive_silhouette(X, labels), abs=1e-12)

    def test_singleton_scores_zero(self):
        X = np.array([[0.0], [0.1], [5.0]])
        labels = [0, 0, 1]
        # a = 0.1 for both paired points; b = 5.0 and 4.9; the singleton adds 0
        expected = ((5.0 - 0.1) / 5.0 + (4.9 - 0.1) / 4.9) / 3
        assert silhouette(X, labels) == pytest.approx(expected, abs=1e-12)

    def test_random_labels_near_zero(self):
        for seed in range(50):
            rng = np.random.default_rng(seed)
            X = rng.normal(size=(200, 2))
            labels = rng.integers(0, 3, 200)
            assert abs(silhouette(X, labels)) < 0.1

    @pytest.mark.parametrize("seed", range(8))
    def test_against_naive(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(10, 201))
        k = int(rng.integers(2, 6))
        X = rng.normal(size=(n, 4)) * rng.uniform(0.1, 10, 4)
        labels = np.r_[np.arange(k), rng.integers(0, k, n - k)]
        s, ch, db = internal_validation(X, labels)
        assert s == pytest.approx(naive_silhouette(X, labels), abs=1e-9)
        assert ch == pytest.approx(naive_ch(X, labels), rel=1e-9)
        assert db == pytest.approx(naive_db(X, labels), abs=1e-9)

    @settings(max_examples=200)
    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(3, 40), k=st.integers(2, 5))
    def test_silhouette_bounded(self, seed, n, k):
        rng = np.random.default_rng(seed)
        X = rng.normal(size=(n, 3)) * (rng.random() < 0.5 and 1e-6 or 1.0)
        labels = rng.integers(0, min(k, n), n)
        labels[:2] = [0, 1]
        assert -1.0 <= silhouette(X, labels) <= 1.0

    def test_chunking_irrelevant(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(90, 3))
        labels = rng.integers(0, 3, 90)
        assert silhouette(X, labels, chunk=7) == pytest.approx(silhouette(X, labels), abs=1e-14)

    def test_single_cluster(self):
        with pytest.raises(SingleCluster):
            internal_validation(np.eye(3), [1, 1, 1])

    def test_labels_need_not_be_contiguous(self):
        X = np.array([[0.0], [0.2], [9.0], [9.5]])
        assert calinski_harabasz(X, [7, 7, -2, -2]) == pytest.approx(calinski_harabasz(X, [0, 0, 1, 1]))
        assert davies_bouldin(X, ["b", "b", "a", "a"]) == pytest.approx(davies_bouldin(X, [0, 0, 1, 1]))
