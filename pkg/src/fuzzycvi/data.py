"""Data plumbing: synthetic mixtures, CSV ingestion, normalization, images."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._validation import check_data, check_labels
from .exceptions import CsvParseError

WEIGHT_TOL = 1e-9

NORMALIZE_MODES = ("standardize", "minmax", "none")


# ---------------------------------------------------------------------------
# Synthetic mixtures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MixtureComponent:
    """One mixture component: a Gaussian or an axis-aligned uniform box."""

    weight: float
    label: int
    kind: str  # "gaussian" | "uniform_box"
    mean: np.ndarray | None = None
    cov: np.ndarray | None = None
    low: np.ndarray | None = None
    high: np.ndarray | None = None

    @property
    def n_features(self) -> int:
        if self.kind == "gaussian":
            return self.mean.shape[0]
        return self.low.shape[0]


@dataclass(frozen=True)
class MixtureSpec:
    """A seeded finite mixture: weighted components plus a total point count."""

    components: tuple[MixtureComponent, ...]
    total_points: int
    seed: int = 0

    @property
    def n_features(self) -> int:
        return self.components[0].n_features

    @property
    def n_labels(self) -> int:
        return len({comp.label for comp in self.components})


def _require(mapping, key, where):
    if key not in mapping:
        raise ValueError(f"{where}: missing field '{key}'")
    return mapping[key]


def component_from_dict(d, where: str = "component") -> MixtureComponent:
    weight = float(_require(d, "weight", where))
    label = int(_require(d, "label", where))
    dist = _require(d, "distribution", where)
    kind = str(_require(dist, "type", f"{where}.distribution")).lower()
    if weight < 0.0:
        raise ValueError(f"{where}: weight must be >= 0, got {weight}")
    if kind == "gaussian":
        mean = np.asarray(_require(dist, "mean", f"{where}.distribution"), dtype=float)
        cov = np.asarray(_require(dist, "cov", f"{where}.distribution"), dtype=float)
        if mean.ndim != 1:
            raise ValueError(f"{where}: mean must be a vector")
        if cov.shape != (mean.size, mean.size):
            raise ValueError(f"{where}: cov must be {mean.size}x{mean.size}, got {cov.shape}")
        return MixtureComponent(weight=weight, label=label, kind=kind, mean=mean, cov=cov)
    if kind == "uniform_box":
        low = np.asarray(_require(dist, "low", f"{where}.distribution"), dtype=float)
        high = np.asarray(_require(dist, "high", f"{where}.distribution"), dtype=float)
        if low.ndim != 1 or low.shape != high.shape:
            raise ValueError(f"{where}: low/high must be vectors of equal length")
        if np.any(low > high):
            raise ValueError(f"{where}: low must be <= high elementwise")
        return MixtureComponent(weight=weight, label=label, kind=kind, low=low, high=high)
    raise ValueError(f"{where}: unknown distribution type {kind!r}")


def mixture_spec_from_dict(d) -> MixtureSpec:
    raw = _require(d, "components", "mixture spec")
    if not raw:
        raise ValueError("mixture spec: components must be non-empty")
    components = tuple(component_from_dict(comp, f"component {i}") for i, comp in enumerate(raw))
    weights = np.array([comp.weight for comp in components])
    if abs(weights.sum() - 1.0) > WEIGHT_TOL:
        raise ValueError(f"mixture spec: weights sum to {weights.sum()!r}, expected 1")
    dims = {comp.n_features for comp in components}
    if len(dims) != 1:
        raise ValueError(f"mixture spec: components disagree on dimension: {sorted(dims)}")
    total = int(_require(d, "total_points", "mixture spec"))
    if total < 2:
        raise ValueError(f"mixture spec: total_points must be >= 2, got {total}")
    seed = int(d.get("seed", 0))
    return MixtureSpec(components=components, total_points=total, seed=seed)


def load_mixture_spec(path) -> MixtureSpec:
    with open(path, encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON: {exc}") from exc
    return mixture_spec_from_dict(payload)


def generate_mixture(spec: MixtureSpec, seed: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Draw (X, labels) from a mixture spec, reproducibly.

    Component counts come from one multinomial draw over the weights, then
    each component is sampled in listed order, so the same seed always
    yields the same arrays.  `seed` overrides the seed stored in the spec.
    """
    rng = np.random.default_rng(spec.seed if seed is None else seed)
    weights = np.array([comp.weight for comp in spec.components])
    counts = rng.multinomial(spec.total_points, weights / weights.sum())
    blocks = []
    labels = []
    for comp, k in zip(spec.components, counts):
        k = int(k)
        if comp.kind == "gaussian":
            if not np.allclose(comp.cov, comp.cov.T, atol=1e-12):
                raise ValueError(f"component with label {comp.label}: covariance is not symmetric")
            try:
                L = np.linalg.cholesky(comp.cov)
            except np.linalg.LinAlgError as exc:
                raise ValueError(
                    f"component with label {comp.label}: covariance is not positive-definite") from exc
            pts = comp.mean + rng.standard_normal((k, comp.mean.size)) @ L.T
        else:
            pts = rng.uniform(comp.low, comp.high, size=(k, comp.low.size))
        blocks.append(pts)
        labels.append(np.full(k, comp.label, dtype=int))
    X = np.concatenate(blocks, axis=0)
    y = np.concatenate(labels)
    return check_data(X), check_labels(y, n_samples=X.shape[0])


# ---------------------------------------------------------------------------
# CSV ingestion
# ---------------------------------------------------------------------------

def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def load_csv(path, label_column=None):
    """Read a numeric CSV into (X, labels).

    A header row is auto-detected: the first row counts as a header when
    any of its cells (outside an integer `label_column`) is non-numeric.
    `label_column` selects the label column by name (requires a header) or
    by 0-based index; its values are coded as integers in first-appearance
    order.  Returns (X, labels) with labels None when no column was chosen.
    Malformed numeric cells raise CsvParseError naming the row and column.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise CsvParseError(f"{path}: file holds no rows")

    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise CsvParseError(f"{path}: expected {width} columns, found {len(row)}", row=i + 1)

    first = [cell.strip() for cell in rows[0]]
    if isinstance(label_column, (int, np.integer)) and not isinstance(label_column, bool):
        label_idx = int(label_column)
        if not 0 <= label_idx < width:
            raise CsvParseError(f"{path}: label column index {label_idx} out of range for {width} columns")
        probe = [cell for j, cell in enumerate(first) if j != label_idx]
        has_header = any(not _is_number(cell) for cell in probe)
    elif isinstance(label_column, str):
        if label_column not in first:
            raise CsvParseError(f"{path}: no header column named {label_column!r} (header row: {first})")
        label_idx = first.index(label_column)
        has_header = True
    elif label_column is None:
        label_idx = None
        has_header = any(not _is_number(cell) for cell in first)
    else:
        raise ValueError(f"label_column must be a column name, an index or None, got {label_column!r}")

    body = rows[1:] if has_header else rows
    offset = 2 if has_header else 1
    if not body:
        raise CsvParseError(f"{path}: no data rows after the header")

    data = []
    raw_labels = []
    for i, row in enumerate(body):
        values = []
        for j, cell in enumerate(row):
            cell = cell.strip()
            if j == label_idx:
                raw_labels.append(cell)
                continue
            if not _is_number(cell):
                raise CsvParseError(f"{path}: cell {cell!r} is not numeric", row=i + offset, column=j + 1)
            values.append(float(cell))
        data.append(values)

    X = check_data(np.array(data, dtype=float), name=f"{path} payload")
    if label_idx is None:
        return X, None
    if all(_is_number(cell) and float(cell) == int(float(cell)) for cell in raw_labels):
        y = np.array([int(float(cell)) for cell in raw_labels], dtype=int)
    else:
        # non-numeric labels are coded by first appearance
        codes: dict[str, int] = {}
        y = np.array([codes.setdefault(cell, len(codes)) for cell in raw_labels], dtype=int)
    return X, y


def save_csv(path, X, labels=None, feature_names=None, label_name: str = "label") -> None:
    """Write (X, labels) as CSV with a header; floats round-trip exactly."""
    X = check_data(X, min_rows=1)
    if labels is not None:
        labels = check_labels(labels, n_samples=X.shape[0])
    if feature_names is None:
        feature_names = [f"f{j}" for j in range(X.shape[1])]
    if len(feature_names) != X.shape[1]:
        raise ValueError(f"got {len(feature_names)} feature names for {X.shape[1]} columns")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = list(feature_names) + ([label_name] if labels is not None else [])
        writer.writerow(header)
        for i in range(X.shape[0]):
            row = [repr(float(v)) for v in X[i]]
            if labels is not None:
                row.append(str(int(labels[i])))
            writer.writerow(row)


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------

def normalize_features(X, mode: str = "standardize") -> np.ndarray:
    """Columnwise rescaling: "standardize" (sample SD), "minmax" or "none".

    Constant columns map to 0 in both rescaling modes.
    """
    X = check_data(X)
    if mode not in NORMALIZE_MODES:
        raise ValueError(f"mode must be one of {NORMALIZE_MODES}, got {mode!r}")
    if mode == "none":
        return X.copy()
    if mode == "standardize":
        center = X.mean(axis=0)
        scale = X.std(axis=0, ddof=1)
    else:
        center = X.min(axis=0)
        scale = X.max(axis=0) - center
    scale = np.where(scale == 0.0, np.inf, scale)  # constant columns -> 0
    return (X - center) / scale


# ---------------------------------------------------------------------------
# Images
# ---------------------------------------------------------------------------

def read_ppm(path) -> np.ndarray:
    """Decode a binary P6 PPM into an (H, W, 3) float array in [0, 1]."""
    raw = Path(path).read_bytes()
    if not raw.startswith(b"P6"):
        raise ValueError(f"{path}: not a P6 PPM (bad magic)")

    pos = 2
    fields = []
    while len(fields) < 3:
        while pos < len(raw) and raw[pos:pos + 1].isspace():
            pos += 1
        if pos < len(raw) and raw[pos:pos + 1] == b"#":
            while pos < len(raw) and raw[pos] not in (0x0A, 0x0D):
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos:pos + 1].isspace():
            pos += 1
        token = raw[start:pos]
        if not token.isdigit():
            raise ValueError(f"{path}: malformed PPM header near byte {start}")
        fields.append(int(token))
    pos += 1  # single whitespace byte after maxval
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise ValueError(f"{path}: image dimensions must be positive, got {width}x{height}")
    if not 1 <= maxval <= 255:
        raise ValueError(f"{path}: only 8-bit PPMs supported, got maxval={maxval}")
    expected = width * height * 3
    pixels = raw[pos:pos + expected]
    if len(pixels) != expected:
        raise ValueError(f"{path}: truncated pixel data ({len(pixels)} of {expected} bytes)")
    arr = np.frombuffer(pixels, dtype=np.uint8).reshape(height, width, 3)
    return arr.astype(float) / maxval


def write_ppm(path, image) -> None:
    """Write an (H, W, 3) float array in [0, 1] as a binary P6 PPM."""
    image = np.asarray(image, dtype=float)
    if image.ndim != 3 or image.shape[2] != 3:
        raise ValueError(f"image must be (H, W, 3), got {image.shape}")
    data = np.clip(np.rint(image * 255.0), 0, 255).astype(np.uint8)
    header = f"P6\n{image.shape[1]} {image.shape[0]}\n255\n".encode("ascii")
    Path(path).write_bytes(header + data.tobytes())


def load_image(path) -> np.ndarray:
    """Read a PPM (built-in) or any Pillow-decodable image as (H, W, 3) in [0, 1]."""
    path = Path(path)
    if not path.exists():
        raise ValueError(f"{path}: no such file")
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic == b"P6":
        return read_ppm(path)
    try:
        from PIL import Image, UnidentifiedImageError
    except ImportError as exc:  # pragma: no cover - Pillow ships with the package
        raise ValueError(f"{path}: not a P6 PPM and Pillow is unavailable") from exc
    try:
        with Image.open(path) as img:
            rgb = np.asarray(img.convert("RGB"))
    except UnidentifiedImageError as exc:
        raise ValueError(f"{path}: not a decodable image") from exc
    return rgb.astype(float) / 255.0


def _box_resample_axis(a: np.ndarray, new_len: int, axis: int) -> np.ndarray:
    """Area-averaging resample along one axis (exact block means for
    integer ratios, overlap-weighted means otherwise)."""
    a = np.moveaxis(a, axis, 0)
    old_len = a.shape[0]
    if new_len != old_len and old_len % new_len == 0:
        k = old_len // new_len
        a = a.reshape((new_len, k) + a.shape[1:]).mean(axis=1)
    elif new_len != old_len:
        cs = np.concatenate([np.zeros((1,) + a.shape[1:]), np.cumsum(a, axis=0)], axis=0)
        bounds = np.arange(new_len + 1) * (old_len / new_len)
        idx = np.minimum(bounds.astype(int), old_len)
        frac = bounds - idx
        hi = np.minimum(idx + 1, old_len)
        shape = (-1,) + (1,) * (a.ndim - 1)
        frac = frac.reshape(shape)
        integral = cs[idx] * (1.0 - frac) + cs[hi] * frac
        a = (integral[1:] - integral[:-1]) / (old_len / new_len)
    return np.moveaxis(a, 0, axis)


def image_to_points(image, target_w: int = 120, target_h: int = 80) -> np.ndarray:
    """Turn an image into a pixel cloud of RGB rows in [0, 1].

    The image is box-filtered down to target_w x target_h first (no
    resampling when it already matches), then flattened row-major, one
    row per pixel: n = target_w * target_h.
    """
    if isinstance(image, (str, Path)):
        image = load_image(image)
    image = np.asarray(image, dtype=float)
    if image.ndim != 3 or image.shape[2] != 3:
        raise ValueError(f"image must be (H, W, 3), got shape {image.shape}")
    if image.shape[0] < 1 or image.shape[1] < 1:
        raise ValueError("image has no pixels")
    if not np.all(np.isfinite(image)) or image.min() < 0.0 or image.max() > 1.0:
        raise ValueError("image values must be finite and lie in [0, 1]")
    if not (isinstance(target_w, (int, np.integer)) and isinstance(target_h, (int, np.integer))):
        raise ValueError("target_w and target_h must be integers")
    if target_w < 1 or target_h < 1:
        raise ValueError(f"target size must be positive, got {target_w}x{target_h}")
    small = _box_resample_axis(image, int(target_h), 0)
    small = _box_resample_axis(small, int(target_w), 1)
    return np.clip(small, 0.0, 1.0).reshape(-1, 3)
