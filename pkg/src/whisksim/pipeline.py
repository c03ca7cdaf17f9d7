"""Time series to labeled frequency-domain feature vectors.

Pipeline order: cut non-overlapping one-second windows, standardize each
window to zero mean / unit standard deviation, take the full two-sided FFT
magnitude (same width as the window, 200 bins at the default rate), attach
the terrain label.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .beam import TimeSeries
from .errors import DegenerateWindowError, PhysicsError
from .terrain import TerrainClass

FEATURE_WIDTH = 200


@dataclass
class Spectrum:
    """Two-sided DFT magnitudes with their bin spacing."""

    magnitudes: np.ndarray
    bin_width_hz: float

    def __post_init__(self):
        self.magnitudes = np.asarray(self.magnitudes, dtype=float)
        if self.bin_width_hz <= 0.0:
            raise PhysicsError("bin_width_hz must be positive")


@dataclass
class FeatureVector:
    """One standardized, FFT-transformed window with its terrain label."""

    values: np.ndarray
    label: TerrainClass
    source_window: int

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (FEATURE_WIDTH,):
            raise PhysicsError(
                f"feature vector must have exactly {FEATURE_WIDTH} values")
        if not np.isfinite(self.values).all():
            raise PhysicsError("feature vector contains non-finite values")
        self.label = TerrainClass(self.label)


@dataclass
class Dataset:
    """Labeled feature vectors plus the seed of the split that produced it."""

    vectors: list = field(default_factory=list)
    split_seed: int = 0
    dropped: int = 0  # degenerate windows skipped during construction

    def __len__(self) -> int:
        return len(self.vectors)

    def features(self) -> np.ndarray:
        return np.stack([v.values for v in self.vectors])

    def labels(self) -> np.ndarray:
        return np.array([int(v.label) for v in self.vectors], dtype=int)


def window(series: TimeSeries, window_seconds: float) -> list[np.ndarray]:
    """Cut consecutive non-overlapping windows; the trailing remainder is dropped."""
    if window_seconds <= 0.0:
        raise PhysicsError("window_seconds must be positive")
    n = int(round(window_seconds * series.sample_rate_hz))
    if n < 1:
        raise PhysicsError("window shorter than one sample")
    count = len(series) // n
    if count == 0:
        raise PhysicsError(
            f"series of {len(series)} samples is shorter than one window ({n})")
    return [series.samples[i * n:(i + 1) * n].copy() for i in range(count)]


def standardize(values: np.ndarray, eps: float = 1e-12) -> np.ndarray:
    """Shift/scale to zero mean and unit (population) standard deviation."""
    values = np.asarray(values, dtype=float)
    std = float(values.std())
    if std <= eps:
        raise DegenerateWindowError(f"window std {std} below {eps}")
    return (values - values.mean()) / std


def fft_magnitude(values: np.ndarray, sample_rate_hz: float) -> Spectrum:
    """Full two-sided magnitude spectrum of a real window."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise PhysicsError("cannot transform an empty window")
    if sample_rate_hz <= 0.0:
        raise PhysicsError("sample_rate_hz must be positive")
    return Spectrum(np.abs(np.fft.fft(values)), sample_rate_hz / values.size)


def _folded_frequencies(n: int, bin_width_hz: float) -> np.ndarray:
    """Physical frequency of each two-sided bin (bin n-k mirrors bin k)."""
    k = np.arange(n)
    return np.minimum(k, n - k) * bin_width_hz


def dominant_frequency(spectrum: Spectrum) -> float:
    """Frequency of the largest non-DC bin; ties go to the lower frequency."""
    mags = spectrum.magnitudes
    n = mags.size
    if n < 3:
        raise PhysicsError("need at least 3 bins to pick a dominant frequency")
    freqs = _folded_frequencies(n, spectrum.bin_width_hz)
    best = mags[1:].max()
    return float(freqs[1:][mags[1:] == best].min())


def build_dataset(runs: list[tuple[TimeSeries, TerrainClass]],
                  window_seconds: float = 1.0) -> Dataset:
    """Segment, standardize, transform and label every run.

    Degenerate (constant) windows are skipped and counted in
    Dataset.dropped rather than failing the whole build.
    """
    if not runs:
        raise PhysicsError("no runs supplied")
    vectors = []
    dropped = 0
    for series, label in runs:
        for idx, win in enumerate(window(series, window_seconds)):
            try:
                flat = standardize(win)
            except DegenerateWindowError:
                dropped += 1
                continue
            spec = fft_magnitude(flat, series.sample_rate_hz)
            vectors.append(FeatureVector(spec.magnitudes, label, idx))
    if not vectors:
        raise PhysicsError("all windows were degenerate")
    return Dataset(vectors, dropped=dropped)


def split(dataset: Dataset, train_fraction: float, seed: int
          ) -> tuple[Dataset, Dataset]:
    """Seeded stratified split; per-class proportions held within one vector."""
    if not 0.0 < train_fraction < 1.0:
        raise PhysicsError("train_fraction must lie in (0, 1)")
    if not dataset.vectors:
        raise PhysicsError("cannot split an empty dataset")
    rng = np.random.default_rng(seed)
    by_label: dict[int, list[int]] = {}
    for i, vec in enumerate(dataset.vectors):
        by_label.setdefault(int(vec.label), []).append(i)
    train_idx: list[int] = []
    test_idx: list[int] = []
    for label in sorted(by_label):
        idx = np.array(by_label[label])
        if idx.size < 2:
            raise PhysicsError(
                f"class {label} has {idx.size} vector(s); need at least 2 to split")
        perm = rng.permutation(idx.size)
        n_train = int(round(idx.size * train_fraction))
        n_train = min(max(n_train, 1), idx.size - 1)
        train_idx.extend(idx[perm[:n_train]])
        test_idx.extend(idx[perm[n_train:]])
    train_idx.sort()
    test_idx.sort()
    train = Dataset([dataset.vectors[i] for i in train_idx], split_seed=seed)
    test = Dataset([dataset.vectors[i] for i in test_idx], split_seed=seed)
    return train, test


def write_dataset_csv(dataset: Dataset, path) -> None:
    """CSV with columns f000..f199, label, window_idx; lossless floats."""
    header = ",".join(f"f{i:03d}" for i in range(FEATURE_WIDTH))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + ",label,window_idx\n")
        for vec in dataset.vectors:
            row = ",".join(repr(float(v)) for v in vec.values)
            fh.write(f"{row},{int(vec.label)},{vec.source_window}\n")


def read_dataset_csv(path) -> Dataset:
    vectors = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        expected = [f"f{i:03d}" for i in range(FEATURE_WIDTH)] + ["label", "window_idx"]
        if header != expected:
            raise PhysicsError(f"unexpected dataset header in {path}")
        for line in fh:
            parts = line.strip().split(",")
            values = np.array([float(p) for p in parts[:FEATURE_WIDTH]])
            vectors.append(FeatureVector(
                values, TerrainClass(int(parts[FEATURE_WIDTH])),
                int(parts[FEATURE_WIDTH + 1])))
    if not vectors:
        raise PhysicsError(f"dataset file {path} contains no vectors")
    return Dataset(vectors)
