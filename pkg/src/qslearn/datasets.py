"""Labelled datasets and the CSV format shared by the qsvm and vqc tools.

File format: a header row, feature columns first, then a label column named
``y`` holding -1 or +1. Blank lines and lines starting with ``#`` are skipped.
"""
from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DataError, DomainError, ShapeError

TOY_DATASET = "toy4.csv"


@dataclass(frozen=True, eq=False)
class TrainingSet:
    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...] = ()

    def __post_init__(self):
        X = np.array(self.features, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        y = np.array(self.labels, dtype=float).ravel()
        if X.shape[0] != y.shape[0]:
            raise ShapeError(f"{X.shape[0]} feature rows but {y.shape[0]} labels")
        if X.shape[0] < 2 or X.shape[1] < 1:
            raise DomainError("need N >= 2 examples and p >= 1 features")
        if not np.all(np.isin(y, (-1.0, 1.0))):
            raise DomainError("labels must be -1 or +1")
        seen: dict[bytes, float] = {}
        for row, label in zip(X, y):
            key = row.tobytes()
            if key in seen and seen[key] != label:
                warnings.warn(f"duplicate input {row.tolist()} with conflicting labels", stacklevel=3)
            seen[key] = label
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        if not self.feature_names:
            object.__setattr__(self, "feature_names", tuple(f"x{j}" for j in range(X.shape[1])))

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


def parse_csv(text: str) -> TrainingSet:
    rows = []
    header = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = next(csv.reader(io.StringIO(line)))
        fields = [f.strip() for f in fields]
        if header is None:
            if len(fields) < 2 or fields[-1] != "y":
                raise DataError("header must list feature columns followed by 'y'", lineno)
            header = fields
            continue
        if len(fields) != len(header):
            raise DataError(f"expected {len(header)} fields, got {len(fields)}", lineno)
        try:
            values = [float(f) for f in fields]
        except ValueError:
            raise DataError(f"non-numeric field in {line!r}", lineno) from None
        if values[-1] not in (-1.0, 1.0):
            raise DataError(f"label {fields[-1]!r} is not -1 or +1", lineno)
        rows.append(values)
    if header is None:
        raise DataError("missing header row")
    if len(rows) < 2:
        raise DataError("need at least two data rows")
    arr = np.array(rows)
    return TrainingSet(arr[:, :-1], arr[:, -1], tuple(header[:-1]))


def load_csv(path) -> TrainingSet:
    return parse_csv(Path(path).read_text())


def write_csv(path, data: TrainingSet) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(data.feature_names) + ["y"])
        for row, label in zip(data.features, data.labels):
            w.writerow([repr(float(v)) for v in row] + [int(label)])


def toy_dataset() -> TrainingSet:
    """The shipped 4-point, 2-feature linearly separable set."""
    text = resources.files("qslearn.data").joinpath(TOY_DATASET).read_text()
    return parse_csv(text)
