import json
import logging

import numpy as np
import pytest

from vsmooth.clustering import affinity
from vsmooth.clustering import AffinityMethod
from vsmooth.clustering import AffinityParams
from vsmooth.clustering import ari
from vsmooth.clustering import ClusteringReport
from vsmooth.clustering import kmeans
from vsmooth.clustering import nmi
from vsmooth.clustering import normalized_laplacian
from vsmooth.clustering import restart_seeds
from vsmooth.clustering import row_normalize
from vsmooth.clustering import sc_baseline
from vsmooth.exceptions import ConfigError
from vsmooth.exceptions import DimensionError
from vsmooth.exceptions import GraphError
from vsmooth.ssc_model import h_value

FIXED = AffinityParams(AffinityMethod.FIXED, sigma=1.0)


def test_fixed_kernel_on_a_line():
    W = affinity(np.array([0.0, 1.0, 10.0]), FIXED)
    assert W[0, 1] == pytest.approx(np.exp(-1))
    assert W[0, 2] == pytest.approx(np.exp(-100))
    np.testing.assert_array_equal(np.diag(W), 0.0)


def test_fixed_kernel_duplicates():
    W = affinity(np.array([[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]]), FIXED)
    assert W[0, 1] == 1.0


def test_self_loops():
    params = AffinityParams(AffinityMethod.FIXED, self_loops=True)
    W = affinity(np.array([0.0, 1.0]), params)
    np.testing.assert_array_equal(np.diag(W), 1.0)


def test_local_scaling(rng):
    W = affinity(rng.standard_normal((30, 3)), AffinityParams(neighbor_index=5))
    np.testing.assert_array_equal(W, W.T)
    off = W[~np.eye(30, dtype=bool)]
    assert np.all(off > 0)
    assert np.all(off <= 1)


def test_local_scaling_formula():
    data = np.array([0.0, 1.0, 3.0])
    W = affinity(data, AffinityParams(neighbor_index=1))
    # nearest neighbor distances are 1, 1 and 2
    assert W[0, 2] == pytest.approx(np.exp(-9 / 2))
    assert W[1, 2] == pytest.approx(np.exp(-4 / 2))


def test_local_scaling_needs_neighbors():
    with pytest.raises(ConfigError) as exc_info:
        affinity(np.zeros((4, 2)) + np.arange(4)[:, None], AffinityParams())

    assert exc_info.value.key == "affinity.neighbor_index"


def test_local_scaling_duplicates():
    data = np.array([[0.0], [0.0], [0.0], [5.0]])

    with pytest.raises(GraphError) as exc_info:
        affinity(data, AffinityParams(neighbor_index=2))

    assert exc_info.value.index == 0
    assert "jitter" in exc_info.value.format_message()


@pytest.mark.parametrize(
    ("data", "error"),
    [(np.zeros((1, 2)), DimensionError), (np.array([0.0, np.nan]), GraphError)],
)
def test_affinity_bad_data(data, error):
    with pytest.raises(error):
        affinity(data, FIXED)


@pytest.mark.parametrize(
    ("kwargs", "key"),
    [
        ({"neighbor_index": 0}, "affinity.neighbor_index"),
        ({"sigma": 0.0}, "affinity.sigma"),
    ],
)
def test_affinity_params_invalid(kwargs, key):
    with pytest.raises(ConfigError) as exc_info:
        AffinityParams(**kwargs)

    assert exc_info.value.key == key


def test_affinity_describe():
    assert "neighbor index 7" in AffinityParams().describe()
    assert "sigma=0.5" in AffinityParams("fixed", sigma=0.5).describe()
    assert AffinityParams("fixed", sigma=0.5).to_info_dict() == {
        "method": "fixed",
        "self_loops": False,
        "sigma": 0.5,
    }


def test_laplacian_two_points():
    L = normalized_laplacian(np.array([[0.0, 1.0], [1.0, 0.0]]))
    np.testing.assert_allclose(L, [[1.0, -1.0], [-1.0, 1.0]])


def test_laplacian_components(rng):
    block = rng.uniform(0.1, 1.0, size=(4, 4))
    block = (block + block.T) / 2
    W = np.zeros((8, 8))
    W[:4, :4] = block
    W[4:, 4:] = block
    values = np.linalg.eigvalsh(normalized_laplacian(W))
    assert np.all(np.abs(values[:2]) <= 1e-10)
    assert values[2] > 1e-3


def test_laplacian_spectrum(rng):
    W = affinity(rng.standard_normal((25, 2)), AffinityParams())
    L = normalized_laplacian(W)
    assert np.linalg.norm(L - L.T) <= 1e-12
    values = np.linalg.eigvalsh(L)
    assert values[0] >= -1e-8
    assert values[-1] <= 2 + 1e-8


def test_laplacian_isolated_point():
    W = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])

    with pytest.raises(GraphError) as exc_info:
        normalized_laplacian(W)

    assert exc_info.value.index == 2
    assert exc_info.value.format_message().startswith("point 2:")


def test_laplacian_rejects_negative():
    with pytest.raises(GraphError):
        normalized_laplacian(np.array([[0.0, -1.0], [-1.0, 0.0]]))


def test_baseline_components(rng):
    block = rng.uniform(0.1, 1.0, size=(5, 5))
    W = np.zeros((10, 10))
    W[:5, :5] = (block + block.T) / 2
    W[5:, 5:] = (block + block.T) / 2
    L = normalized_laplacian(W)
    U = sc_baseline(L, 2)
    assert U.shape == (10, 2)
    assert h_value(L, U) <= 1e-10


def test_baseline_values(blob_laplacian):
    values = np.linalg.eigvalsh(blob_laplacian)
    U = sc_baseline(blob_laplacian, 4)
    np.testing.assert_allclose(U.T @ U, np.eye(4), atol=1e-12)
    assert h_value(blob_laplacian, U) == pytest.approx(values[:4].sum(), abs=1e-10)

    N = blob_laplacian.shape[0]
    full = sc_baseline(blob_laplacian, N)
    assert h_value(blob_laplacian, full) == pytest.approx(np.trace(blob_laplacian))


def test_baseline_rejects_k():
    with pytest.raises(ConfigError):
        sc_baseline(np.eye(3), 4)


def test_row_normalize(caplog):
    U = np.array([[3.0, 4.0], [0.6, 0.8], [0.0, 0.0]])

    with caplog.at_level(logging.WARNING):
        out, zero = row_normalize(U)

    np.testing.assert_allclose(out, [[0.6, 0.8], [0.6, 0.8], [0.0, 0.0]])
    np.testing.assert_array_equal(zero, [False, False, True])
    assert "1 zero rows" in caplog.text


def test_kmeans_separated_pairs():
    points = np.array([[0.0, 0.0], [0.0, 0.1], [10.0, 10.0], [10.1, 10.0]])
    result = kmeans(points, 2, restarts=10, seed=0)
    assert result.labels.shape == (10, 4)

    for row in result.labels:
        assert row[0] == row[1]
        assert row[2] == row[3]
        assert row[0] != row[2]


def test_kmeans_single_cluster(rng):
    result = kmeans(rng.standard_normal((6, 2)), 1, restarts=3, seed=0)
    np.testing.assert_array_equal(result.labels, 0)


def test_kmeans_every_point_alone():
    points = np.array([[0.0], [1.0], [3.0], [7.0]])
    result = kmeans(points, 4, restarts=3, seed=0)

    for row in result.labels:
        assert len(set(row)) == 4

    np.testing.assert_allclose(result.inertia, 0.0, atol=1e-12)


def test_kmeans_deterministic(blob_data):
    first = kmeans(blob_data.features, 3, restarts=8, seed=5)
    second = kmeans(blob_data.features, 3, restarts=8, seed=5, workers=3)
    np.testing.assert_array_equal(first.labels, second.labels)
    np.testing.assert_array_equal(first.best_labels, second.best_labels)


def test_kmeans_invalid(rng):
    points = rng.standard_normal((5, 2))

    with pytest.raises(ConfigError):
        kmeans(points, 2, restarts=0, seed=0)

    with pytest.raises(ConfigError):
        kmeans(points, 6, restarts=1, seed=0)


def test_restart_seeds():
    seeds = restart_seeds(0, 50)
    assert len(set(seeds)) == 50
    assert seeds == restart_seeds(0, 50)
    assert seeds[:10] == restart_seeds(0, 10)


@pytest.mark.parametrize(
    ("a", "b", "expect_nmi", "expect_ari"),
    [
        ([0, 1, 1, 2, 2, 2], [0, 1, 1, 2, 2, 2], 1.0, 1.0),
        ([0, 0, 1, 1], [1, 1, 0, 0], 1.0, 1.0),
        ([0, 0, 1, 1], [0, 1, 0, 1], 0.0, -0.5),
        ([3, 3, 3], [3, 3, 3], 1.0, 1.0),
    ],
)
def test_scores(a, b, expect_nmi, expect_ari):
    assert nmi(a, b) == pytest.approx(expect_nmi, abs=1e-12)
    assert ari(a, b) == pytest.approx(expect_ari, abs=1e-12)


def test_scores_invalid():
    with pytest.raises(DimensionError):
        nmi([0, 1], [0, 1, 1])

    with pytest.raises(DimensionError):
        ari([], [])


def make_report():
    labels = np.array([[0, 0, 1, 1], [0, 1, 0, 1]])
    return ClusteringReport.score(
        labels,
        [0, 0, 1, 1],
        dataset="toy",
        method="ssc_l1",
        k=2,
        hyperparameters={"lambda": 0.01},
        deviations=["affinity: test"],
        seeds={"kmeans": 0},
    )


def test_report_scores():
    report = make_report()
    assert report.nmi_mean == pytest.approx(0.5)
    assert report.nmi_std == pytest.approx(0.5)
    assert report.ari_mean == pytest.approx(0.25)
    assert report.ari_std == pytest.approx(0.75)


def test_report_info_round_trip():
    report = make_report()
    report.runtime = 1.5
    info = json.loads(json.dumps(report.to_info_dict(include_timing=True)))
    again = ClusteringReport.from_info_dict(info)
    assert again.to_info_dict(include_timing=True) == report.to_info_dict(
        include_timing=True
    )
    assert "runtime" not in report.to_info_dict()
