import numpy as np
import pytest
from click.testing import CliRunner

from vsmooth.clustering import affinity
from vsmooth.clustering import AffinityParams
from vsmooth.clustering import normalized_laplacian
from vsmooth.datasets import blobs


@pytest.fixture(scope="function")
def runner(request):
    return CliRunner()


@pytest.fixture()
def rng():
    return np.random.default_rng(20240521)


@pytest.fixture(scope="session")
def blob_data():
    """Three spherical clusters, 90 points in the plane, 10 standard
    deviations apart.
    """
    return blobs(n=90, centers=3, d=2, separation=10.0, seed=3)


@pytest.fixture(scope="session")
def blob_laplacian(blob_data):
    return normalized_laplacian(affinity(blob_data.features, AffinityParams()))
