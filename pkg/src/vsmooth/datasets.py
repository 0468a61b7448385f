"""Loading labelled point clouds for clustering experiments."""
import csv
import logging
import typing as t
from dataclasses import dataclass
from gettext import gettext as _

import numpy as np
from sklearn.datasets import load_iris
from sklearn.datasets import make_blobs

from .exceptions import DatasetError

logger = logging.getLogger(__name__)

#: Default seed of the row subsample.
SUBSAMPLE_SEED = 42

#: Where to get the datasets that are not bundled, and what a correct
#: download looks like.
FETCH_INSTRUCTIONS: t.Dict[str, t.Dict[str, t.Any]] = {
    "shuttle": {
        "source": "UCI Machine Learning Repository, Statlog (Shuttle)",
        "rows": 58000,
        "features": 9,
        "classes": 7,
        "k": 7,
        "subsample": 500,
        "prepare": (
            "Concatenate shuttle.trn and shuttle.tst, write a header row with"
            " f1..f9 and 'label', then pass --subsample 500."
        ),
    },
    "segmentation": {
        "source": "UCI Machine Learning Repository, Image Segmentation",
        "rows": 2310,
        "features": 19,
        "classes": 7,
        "k": 7,
        "subsample": None,
        "prepare": (
            "Concatenate segmentation.data and segmentation.test, move the"
            " class name into a column called 'label'."
        ),
    },
}


@dataclass
class Dataset:
    """Feature matrix, ground-truth labels and where they came from."""

    features: np.ndarray
    labels: np.ndarray
    provenance: str

    def __post_init__(self) -> None:
        self.features = np.asarray(self.features, dtype=float)
        self.labels = np.asarray(self.labels)

        if self.features.ndim != 2:
            raise DatasetError(self.provenance, _("features must be a 2-D array"))

        if len(self.labels) == 0:
            raise DatasetError(self.provenance, _("dataset is empty"))

        if len(self.labels) != self.features.shape[0]:
            raise DatasetError(
                self.provenance,
                _("{n} labels for {N} points").format(
                    n=len(self.labels), N=self.features.shape[0]
                ),
            )

        if not np.all(np.isfinite(self.features)):
            raise DatasetError(self.provenance, _("features must be finite"))

    @property
    def N(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return len(np.unique(self.labels))

    def subsample(self, size: int, seed: int = SUBSAMPLE_SEED) -> "Dataset":
        """Keep ``size`` rows drawn uniformly without replacement. Row
        order of the kept points is preserved.
        """
        if not 1 <= size <= self.N:
            raise DatasetError(
                self.provenance,
                _("cannot subsample {size} of {N} rows").format(size=size, N=self.N),
            )

        rng = np.random.default_rng(seed)
        keep = np.sort(rng.choice(self.N, size=size, replace=False))
        return Dataset(
            self.features[keep],
            self.labels[keep],
            f"{self.provenance}, {size} rows (seed {seed})",
        )


def load_csv(
    path: str,
    label_column: str,
    subsample: t.Optional[int] = None,
    seed: int = SUBSAMPLE_SEED,
) -> Dataset:
    """Read a CSV file with a header row, numeric feature columns and
    one label column. Labels may be any strings.

    :param subsample: number of rows to keep, ``None`` or ``0`` for all.
    :param seed: seed of the subsample draw.
    :raises DatasetError: naming the row and column of a bad cell.
    """
    try:
        with open(path, newline="", encoding="utf-8") as f:
            reader = csv.DictReader(f)
            columns = reader.fieldnames or []

            if label_column not in columns:
                raise DatasetError(
                    path,
                    _("label column not found, columns are {columns}").format(
                        columns=", ".join(columns) or _("(none)")
                    ),
                    column=label_column,
                )

            feature_columns = [c for c in columns if c != label_column]

            if not feature_columns:
                raise DatasetError(path, _("no feature columns"))

            rows: t.List[t.List[float]] = []
            labels: t.List[str] = []

            for row_number, row in enumerate(reader, start=1):
                values = []

                for column in feature_columns:
                    cell = row[column]

                    try:
                        values.append(float(cell))
                    except (TypeError, ValueError):
                        raise DatasetError(
                            path,
                            _("not a number: {cell!r}").format(cell=cell),
                            row=row_number,
                            column=column,
                        ) from None

                rows.append(values)
                labels.append(row[label_column])
    except OSError as e:
        raise DatasetError(path, e.strerror or str(e)) from e

    if not rows:
        raise DatasetError(path, _("no data rows"))

    features = np.array(rows)
    bad = np.argwhere(~np.isfinite(features))

    if bad.size:
        row_index, column_index = bad[0]
        raise DatasetError(
            path,
            _("non-finite value"),
            row=int(row_index) + 1,
            column=feature_columns[column_index],
        )

    # encode labels by order of first appearance
    _names, first, codes = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(np.argsort(first))
    dataset = Dataset(features, order[codes], path)
    logger.info(
        "loaded %s: %d rows, %d features, %d classes",
        path,
        dataset.N,
        dataset.d,
        dataset.n_classes,
    )

    if subsample:
        dataset = dataset.subsample(subsample, seed)

    return dataset


def load_builtin(name: str, seed: int = 0) -> Dataset:
    """Return a bundled dataset.

    ``iris``
        Fisher's iris data, 150 points in 4 dimensions, 3 classes.
    ``blobs``
        :func:`blobs` with its defaults, seeded by ``seed``.
    """
    if name == "iris":
        data = load_iris()
        return Dataset(data.data, data.target, "iris")

    if name == "blobs":
        return blobs(seed=seed)

    if name in FETCH_INSTRUCTIONS:
        info = FETCH_INSTRUCTIONS[name]
        raise DatasetError(
            name,
            _(
                "not bundled; download it from the {source} ({rows} rows,"
                " {features} features). {prepare}"
            ).format(**info),
        )

    raise DatasetError(name, _("unknown builtin dataset"))


def blobs(
    n: int = 90,
    centers: int = 3,
    d: int = 2,
    separation: float = 10.0,
    std: float = 1.0,
    seed: int = 0,
) -> Dataset:
    """Spherical Gaussian clusters with equal sizes.

    The centers sit on a regular simplex-like layout such that every
    pair is at least ``separation`` standard deviations apart.
    """
    if centers < 1 or n < centers:
        raise DatasetError("blobs", _("need at least one point per center"))

    if centers == 1:
        layout = np.zeros((1, d))
    elif centers <= d:
        layout = np.eye(centers, d)
    elif centers == d + 1:
        layout = _simplex(d)
    elif d == 1:
        layout = np.arange(centers, dtype=float)[:, None]
    else:
        angles = 2 * np.pi * np.arange(centers) / centers
        layout = np.zeros((centers, d))
        layout[:, 0] = np.cos(angles)
        layout[:, 1] = np.sin(angles)

    gaps = [
        np.linalg.norm(layout[i] - layout[j])
        for i in range(centers)
        for j in range(i + 1, centers)
    ]
    scale = separation * std / min(gaps) if gaps else 0.0
    features, labels = make_blobs(
        n_samples=n,
        centers=layout * scale,
        cluster_std=std,
        random_state=seed,
    )
    return Dataset(
        features,
        labels,
        f"blobs(n={n}, centers={centers}, d={d}, separation={separation:g} sd,"
        f" seed={seed})",
    )


def _simplex(d: int) -> np.ndarray:
    """``d + 1`` equidistant points in ``R^d``."""
    vertices = np.eye(d + 1)
    centered = vertices - vertices.mean(axis=0)
    # orthonormal basis of the hyperplane orthogonal to the all-ones vector
    basis = np.linalg.svd(centered)[2][:d]
    return centered @ basis.T
