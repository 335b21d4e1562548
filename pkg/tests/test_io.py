import json

import numpy as np
import pytest

from rtq import __version__
from rtq.bogoliubov import random_symplectic_series
from rtq.io import (
    ResultTable,
    config_digest,
    format_cell,
    matrix_from_json,
    matrix_to_json,
    read_csv_table,
    series_from_dict,
    series_to_dict,
    transform_from_dict,
)


def test_matrix_roundtrip(rng):
    m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.array_equal(matrix_from_json(json.loads(json.dumps(matrix_to_json(m)))), m)


def test_matrix_accepts_plain_reals():
    assert np.array_equal(matrix_from_json([[1, 0], [0, [2, 3]]]), np.array([[1, 0], [0, 2 + 3j]]))


@pytest.mark.parametrize("bad", [[], [[1, 2]], [[1, [1, 2, 3]], [0, 1]], "x"])
def test_matrix_rejects_malformed(bad):
    with pytest.raises(ValueError):
        matrix_from_json(bad)


def test_series_roundtrip():
    series = random_symplectic_series(2, 3, h=1e-3, tau=0.4)
    again = series_from_dict(json.loads(json.dumps(series_to_dict(series))))
    for name in ("alpha0", "alpha1", "alpha2", "beta1", "beta2"):
        assert np.array_equal(getattr(again, name), getattr(series, name))
    assert again.h == series.h


def test_series_from_random_block():
    series = series_from_dict({"random": {"seed": 4, "n_modes": 2, "scale": 0.5}}, h=1e-2)
    assert np.array_equal(series.beta1, random_symplectic_series(4, 2, scale=0.5).beta1)
    assert series.h == 1e-2


def test_series_defaults():
    series = series_from_dict({"beta1": [[0, 1], [1, 0]]})
    assert np.array_equal(series.alpha0, np.eye(2))
    assert not series.alpha2.any()
    with pytest.raises(ValueError):
        series_from_dict({})


def test_transform_from_dict():
    t = transform_from_dict({"alpha": [[1.0]], "beta": [[0.0]]})
    assert t.n_modes == 1


@pytest.mark.parametrize("value", [0.1, 1 / 3, 2.0**-1074, 1e300, -123.456])
def test_float_cells_roundtrip(value):
    assert float(format_cell(value)) == value


@pytest.mark.parametrize("value, text", [(None, ""), (3, "3"), (np.int64(2), "2"), (True, "true"), ("gw", "gw")])
def test_non_float_cells(value, text):
    assert format_cell(value) == text


def test_digest_ignores_key_order():
    assert config_digest({"a": 1, "b": [1, 2]}) == config_digest({"b": [1, 2], "a": 1})
    assert config_digest({"a": 1}) != config_digest({"a": 2})


def test_table_csv_footer_and_parse():
    table = ResultTable(("x", "y"), [[1, 0.5], [2, None]], digest="abc")
    text = table.to_csv()
    assert text.endswith(f"# config_sha256=abc\n# rtq_version={__version__}\n")
    header, rows = read_csv_table(text)
    assert header == ["x", "y"]
    assert rows == [["1", "0.5"], ["2", ""]]
    assert table.column("y") == [0.5, None]
