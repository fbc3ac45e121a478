"""Tests for dataset generation, CSV and image handling."""

import json

import numpy as np
import pytest

from fuzzycvi import (CsvParseError, generate_mixture, image_to_points,
                      load_csv, load_image, load_mixture_spec,
                      mixture_spec_from_dict, normalize_features, read_ppm,
                      save_csv, write_ppm)

TWO_BLOB_SPEC = {
    "total_points": 100,
    "seed": 5,
    "components": [
        {"weight": 0.5, "label": 0,
         "distribution": {"type": "gaussian", "mean": [0.0, 0.0],
                          "cov": [[1.0, 0.2], [0.2, 1.0]]}},
        {"weight": 0.5, "label": 1,
         "distribution": {"type": "uniform_box", "low": [4.0, 4.0],
                          "high": [6.0, 7.0]}},
    ],
}


def test_generate_mixture_deterministic_and_labeled():
    spec = mixture_spec_from_dict(TWO_BLOB_SPEC)
    X1, y1 = generate_mixture(spec)
    X2, y2 = generate_mixture(spec)
    assert np.array_equal(X1, X2)
    assert np.array_equal(y1, y2)
    assert X1.shape == (100, 2)
    assert set(y1) == {0, 1}
    # component counts follow one multinomial draw
    assert np.sum(y1 == 0) + np.sum(y1 == 1) == 100
    X3, _ = generate_mixture(spec, seed=99)
    assert not np.array_equal(X1, X3)


def test_uniform_component_respects_box():
    spec = mixture_spec_from_dict(TWO_BLOB_SPEC)
    X, y = generate_mixture(spec)
    box = X[y == 1]
    assert np.all(box >= [4.0, 4.0]) and np.all(box <= [6.0, 7.0])


def test_mixture_spec_validation():
    bad = dict(TWO_BLOB_SPEC, total_points=1)
    with pytest.raises(ValueError):
        mixture_spec_from_dict(bad)
    lopsided = json.loads(json.dumps(TWO_BLOB_SPEC))
    lopsided["components"][0]["weight"] = 0.9
    with pytest.raises(ValueError):
        mixture_spec_from_dict(lopsided)
    missing = json.loads(json.dumps(TWO_BLOB_SPEC))
    del missing["components"][0]["distribution"]
    with pytest.raises(ValueError, match="distribution"):
        mixture_spec_from_dict(missing)


def test_generate_rejects_bad_covariance():
    spec = mixture_spec_from_dict({
        "total_points": 10, "seed": 0,
        "components": [{"weight": 1.0, "label": 0,
                        "distribution": {"type": "gaussian", "mean": [0.0, 0.0],
                                         "cov": [[1.0, 2.0], [2.0, 1.0]]}}],
    })
    with pytest.raises(ValueError, match="positive-definite"):
        generate_mixture(spec)


def test_load_mixture_spec_from_file(tmp_path):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(TWO_BLOB_SPEC))
    spec = load_mixture_spec(path)
    assert spec.total_points == 100
    assert spec.n_labels == 2


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    X = rng.normal(size=(12, 3))
    y = rng.integers(0, 3, size=12)
    path = tmp_path / "data.csv"
    save_csv(path, X, y)
    X2, y2 = load_csv(path, label_column="label")
    assert np.allclose(X, X2, atol=0.0)  # repr round-trips floats exactly
    assert np.array_equal(y, y2)
    X3, y3 = load_csv(path)
    assert y3 is None
    assert X3.shape == (12, 4)  # label column read as a feature


def test_csv_label_column_by_index(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("1.0,a,2.0\n3.0,b,4.0\n5.0,a,6.0\n")
    X, y = load_csv(path, label_column=1)
    assert X.shape == (3, 2)
    # string labels are coded by first appearance
    assert y.tolist() == [0, 1, 0]


def test_csv_header_detection(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("alpha,beta\n1.0,2.0\n3.0,4.0\n")
    X, _ = load_csv(path)
    assert X.shape == (2, 2)
    with pytest.raises(CsvParseError):
        load_csv(path, label_column="gamma")


def test_csv_parse_errors_carry_position(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("1.0,2.0\n3.0,oops\n")
    with pytest.raises(CsvParseError) as err:
        load_csv(path)
    assert err.value.row == 2 and err.value.column == 2
    ragged = tmp_path / "ragged.csv"
    ragged.write_text("1.0,2.0\n3.0\n")
    with pytest.raises(CsvParseError):
        load_csv(ragged)


def test_normalize_modes():
    X = np.array([[0.0, 10.0], [1.0, 10.0], [2.0, 10.0], [3.0, 10.0]])
    Z = normalize_features(X, "standardize")
    assert np.allclose(Z[:, 0].mean(), 0.0, atol=1e-12)
    assert np.allclose(Z[:, 0].std(ddof=1), 1.0, atol=1e-12)
    # constant columns collapse to zero instead of dividing by zero
    assert np.all(Z[:, 1] == 0.0)
    M = normalize_features(X, "minmax")
    assert M[:, 0].min() == 0.0 and M[:, 0].max() == 1.0
    assert np.all(M[:, 1] == 0.0)
    assert np.array_equal(normalize_features(X, "none"), X)
    with pytest.raises(ValueError):
        normalize_features(X, "whiten")


def test_ppm_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    img = rng.uniform(size=(6, 5, 3))
    path = tmp_path / "img.ppm"
    write_ppm(path, img)
    back = read_ppm(path)
    assert back.shape == (6, 5, 3)
    # 8-bit quantization is the only loss
    assert np.allclose(back, img, atol=0.5 / 255.0 + 1e-9)


def test_ppm_reader_handles_comments(tmp_path):
    path = tmp_path / "img.ppm"
    body = bytes([255, 0, 0, 0, 255, 0])
    path.write_bytes(b"P6\n# a comment\n2 1\n# another\n255\n" + body)
    img = read_ppm(path)
    assert img.shape == (1, 2, 3)
    assert np.allclose(img[0, 0], [1.0, 0.0, 0.0])


def test_ppm_reader_rejects_truncation(tmp_path):
    path = tmp_path / "img.ppm"
    path.write_bytes(b"P6\n2 2\n255\n" + bytes(5))
    with pytest.raises(ValueError):
        read_ppm(path)


def test_load_image_png(tmp_path):
    from PIL import Image

    arr = np.zeros((4, 6, 3), dtype=np.uint8)
    arr[:, :3] = (255, 0, 0)
    arr[:, 3:] = (0, 0, 255)
    path = tmp_path / "img.png"
    Image.fromarray(arr).save(path)
    img = load_image(path)
    assert img.shape == (4, 6, 3)
    assert np.allclose(img[0, 0], [1.0, 0.0, 0.0])
    assert np.allclose(img[0, 5], [0.0, 0.0, 1.0])


def test_image_to_points_exact_block_average():
    # 4x6 -> 2x3 halves each axis, so every output pixel is a 2x2 mean
    img = np.arange(4 * 6 * 3, dtype=float).reshape(4, 6, 3) / (4 * 6 * 3)
    pts = image_to_points(img, target_w=3, target_h=2)
    assert pts.shape == (6, 3)
    manual = img.reshape(2, 2, 3, 2, 3).mean(axis=(1, 3)).reshape(-1, 3)
    assert np.allclose(pts, manual, rtol=4e-16, atol=0.0)


def test_image_to_points_constant_stays_constant():
    # the uniformity gate depends on flat regions surviving the resample
    img = np.full((160, 240, 3), 128.0 / 255.0)
    pts = image_to_points(img, target_w=120, target_h=80)
    assert np.all(pts == pts[0])


def test_image_to_points_fractional_ratio_preserves_mass():
    rng = np.random.default_rng(2)
    img = rng.uniform(size=(10, 9, 3))
    pts = image_to_points(img, target_w=4, target_h=7)
    assert pts.shape == (28, 3)
    # area averaging keeps the overall mean
    assert np.allclose(pts.mean(axis=0), img.reshape(-1, 3).mean(axis=0), atol=1e-12)
    assert pts.min() >= 0.0 and pts.max() <= 1.0


def test_image_to_points_from_path(tmp_path):
    img = np.full((8, 12, 3), 0.25)
    img[:, 6:] = 0.75
    path = tmp_path / "img.ppm"
    write_ppm(path, img)
    pts = image_to_points(path, target_w=6, target_h=4)
    assert pts.shape == (24, 3)
    values = np.unique(np.round(pts, 6))
    assert len(values) == 2


def test_image_to_points_validation():
    with pytest.raises(ValueError):
        image_to_points(np.zeros((4, 4)))  # missing channel axis
    with pytest.raises(ValueError):
        image_to_points(np.full((4, 4, 3), 2.0))  # out of range
    with pytest.raises(ValueError):
        image_to_points(np.zeros((4, 4, 3)), target_w=0)
