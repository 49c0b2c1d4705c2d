"""Labeled feature-vector datasets and the AEFV v1 text format.

AEFV v1 (UTF-8, LF):
    line 1:  aefv,1,<dim>,<sample_count>,<class_count>
    rows:    <label>,<f0>,...,<f{dim-1}>
Features are written as shortest round-trip decimals of float64 (Python repr),
so write -> read is lossless. The parser rejects BOMs and trailing blank
lines and tolerates CRLF on read.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import AefvParseError, ConfigError

FORMAT_NAME = "aefv"
FORMAT_VERSION = 1


@dataclass
class FeatureSet:
    dim: int
    labels: np.ndarray      # int64 (N,)
    features: np.ndarray    # float64 (N, dim)
    class_count: int

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self.features = np.asarray(self.features, dtype=np.float64)
        if self.features.ndim != 2 or self.features.shape[1] != self.dim:
            raise ConfigError(f"features must be (N, {self.dim}), got {self.features.shape}")
        if self.labels.shape != (self.features.shape[0],):
            raise ConfigError("labels/features length mismatch")
        if self.class_count < 1:
            raise ConfigError(f"class_count must be >= 1, got {self.class_count}")
        if len(self.labels) and (self.labels.min() < 0 or self.labels.max() >= self.class_count):
            raise ConfigError(f"labels must lie in 0..{self.class_count - 1}")
        if not np.all(np.isfinite(self.features)):
            raise ConfigError("non-finite feature values")

    def __len__(self) -> int:
        return self.labels.shape[0]

    @property
    def samples(self) -> list[tuple[int, np.ndarray]]:
        return [(int(self.labels[i]), self.features[i]) for i in range(len(self))]


@dataclass(frozen=True)
class SplitSpec:
    per_class_train: int
    per_class_test: int
    seed: int

    def __post_init__(self):
        if self.per_class_train < 1 or self.per_class_test < 1:
            raise ConfigError("split counts must be >= 1")


def write_aefv(dataset: FeatureSet, path) -> None:
    """Emit the canonical byte-deterministic text form."""
    lines = [f"{FORMAT_NAME},{FORMAT_VERSION},{dataset.dim},{len(dataset)},{dataset.class_count}"]
    for i in range(len(dataset)):
        row = ",".join(repr(float(v)) for v in dataset.features[i])
        lines.append(f"{dataset.labels[i]},{row}")
    Path(path).write_bytes(("\n".join(lines) + "\n").encode("utf-8"))


def read_aefv(path) -> FeatureSet:
    path = Path(path)
    text = path.read_bytes().decode("utf-8")
    if text.startswith("﻿"):
        raise AefvParseError(path, 1, "byte-order mark not allowed")
    raw_lines = text.split("\n")
    if raw_lines and raw_lines[-1] == "":
        raw_lines.pop()  # final newline, not a blank line
    lines = [ln[:-1] if ln.endswith("\r") else ln for ln in raw_lines]
    if not lines:
        raise AefvParseError(path, 1, "empty file")

    header = lines[0].split(",")
    if len(header) != 5 or header[0] != FORMAT_NAME:
        raise AefvParseError(path, 1, f"expected '{FORMAT_NAME},{FORMAT_VERSION},<dim>,<count>,<classes>' header")
    try:
        version, dim, count, class_count = (int(v) for v in header[1:])
    except ValueError:
        raise AefvParseError(path, 1, "non-integer header field") from None
    if version != FORMAT_VERSION:
        raise AefvParseError(path, 1, f"unsupported version {version}")
    if dim < 1 or count < 0 or class_count < 1:
        raise AefvParseError(path, 1, "header fields out of range")
    if len(lines) - 1 != count:
        raise AefvParseError(path, min(len(lines), count) + 1,
                             f"header promises {count} samples, file has {len(lines) - 1} rows")

    labels = np.empty(count, dtype=np.int64)
    features = np.empty((count, dim), dtype=np.float64)
    for r in range(count):
        line_no = r + 2
        line = lines[r + 1]
        if line == "":
            raise AefvParseError(path, line_no, "blank line")
        fields = line.split(",")
        if len(fields) != dim + 1:
            raise AefvParseError(path, line_no, f"expected {dim + 1} fields, got {len(fields)}")
        try:
            label = int(fields[0])
        except ValueError:
            raise AefvParseError(path, line_no, f"bad label {fields[0]!r}") from None
        if not 0 <= label < class_count:
            raise AefvParseError(path, line_no, f"label {label} out of range 0..{class_count - 1}")
        try:
            row = [float(v) for v in fields[1:]]
        except ValueError:
            raise AefvParseError(path, line_no, "non-numeric feature value") from None
        if not all(np.isfinite(row)):
            raise AefvParseError(path, line_no, "non-finite feature value")
        labels[r] = label
        features[r] = row
    return FeatureSet(dim, labels, features, class_count)


def gen_synthetic(dim: int, per_class: int, separation: float, seed: int) -> FeatureSet:
    """Two unit-covariance Gaussian blobs separated by 2*sep along coordinate 0:
    class 0 ~ N(+sep*e0 + sep*e1, I), class 1 ~ N(-sep*e0 + sep*e1, I).

    The shared +sep offset on coordinate 1 is load-bearing: without it the two
    classes are exact mirror images x -> -x, and amplitude-encoded states are
    blind to a global sign, so no downstream quantum model could beat chance.
    Normals come from numpy's seeded Generator (PCG64 stream, ziggurat
    transform); any correct Gaussian sampler matches in distribution.
    Class-0 samples are drawn first, then class 1.
    """
    if dim < 2:
        raise ConfigError(f"dim must be >= 2, got {dim}")
    if separation < 0:
        raise ConfigError(f"separation must be >= 0, got {separation}")
    if per_class < 1:
        raise ConfigError(f"per_class must be >= 1, got {per_class}")
    rng = np.random.default_rng(seed)
    feats = np.empty((2 * per_class, dim))
    feats[:per_class] = rng.standard_normal((per_class, dim))
    feats[:per_class, 0] += separation
    feats[per_class:] = rng.standard_normal((per_class, dim))
    feats[per_class:, 0] -= separation
    feats[:, 1] += separation
    labels = np.repeat([0, 1], per_class)
    return FeatureSet(dim, labels, feats, 2)


def split(dataset: FeatureSet, spec: SplitSpec) -> tuple[FeatureSet, FeatureSet]:
    """Seeded per-class shuffle; first per_class_train to train, next
    per_class_test to test. Disjoint and class-balanced by construction."""
    rng = np.random.default_rng(spec.seed)
    need = spec.per_class_train + spec.per_class_test
    train_idx: list[np.ndarray] = []
    test_idx: list[np.ndarray] = []
    for c in range(dataset.class_count):
        members = np.flatnonzero(dataset.labels == c)
        if members.shape[0] < need:
            raise ConfigError(
                f"class {c} has {members.shape[0]} samples, split needs {need}")
        members = members[rng.permutation(members.shape[0])]
        train_idx.append(members[:spec.per_class_train])
        test_idx.append(members[spec.per_class_train:need])
    tr = np.concatenate(train_idx)
    te = np.concatenate(test_idx)
    return (FeatureSet(dataset.dim, dataset.labels[tr], dataset.features[tr], dataset.class_count),
            FeatureSet(dataset.dim, dataset.labels[te], dataset.features[te], dataset.class_count))
