import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lipdist import DiscretizationParams, FiniteMetricSpace, PointMap, interval_space, pulse_space
from lipdist.io import (
    FileFormatError,
    csv_text,
    dump_map,
    dump_space,
    fmt_float,
    json_text,
    load_map,
    load_space,
    map_from_dict,
    map_to_dict,
    space_from_dict,
    space_to_dict,
)


def round_trip(space):
    return space_from_dict(json.loads(json_text(space_to_dict(space))))


def test_space_file_layout():
    X = interval_space("11", DiscretizationParams(2, 2))
    d = space_to_dict(X)
    assert d["format_version"] == 1 and d["kind"] == "space" and d["name"] == "X_11"
    assert d["dist"] == [0.25, 0.375, 0.5, 0.75, 0.125, 0.25, 0.5, 0.125, 0.375, 0.25]
    assert d["provenance"]["u"] == "11"
    assert "coords" not in d


@given(st.lists(st.tuples(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3)), min_size=1, max_size=9, unique=True))
def test_round_trip_is_bit_exact(points):
    S = FiniteMetricSpace.from_coords("S", [f"p{i}" for i in range(len(points))], points)
    T = round_trip(S)
    assert T.dist.tobytes() == S.dist.tobytes()
    assert T.coords.tobytes() == S.coords.tobytes()
    assert T.labels == S.labels and T.name == S.name


def test_pulse_space_file_round_trip(tmp_path):
    Y = pulse_space("101", DiscretizationParams(3, 3, 0.5))
    dump_space(Y, tmp_path / "y.json")
    Z = load_space(tmp_path / "y.json")
    assert Z.dist.tobytes() == Y.dist.tobytes()
    assert Z.provenance == Y.provenance


def test_wrong_distance_count_rejected():
    d = space_to_dict(interval_space("1", DiscretizationParams(1, 2)))
    d["dist"].pop()
    with pytest.raises(FileFormatError):
        space_from_dict(d)


@pytest.mark.parametrize("mutate", [
    lambda d: d.update(format_version=2),
    lambda d: d.pop("labels"),
    lambda d: d.update(kind="map"),
])
def test_bad_headers_rejected(mutate):
    d = space_to_dict(interval_space("1", DiscretizationParams(1, 2)))
    mutate(d)
    with pytest.raises(FileFormatError):
        space_from_dict(d)


def test_invalid_json_file(tmp_path):
    (tmp_path / "bad.json").write_text("{nope")
    with pytest.raises(FileFormatError):
        load_space(tmp_path / "bad.json")


def test_map_round_trip_and_name_check(tmp_path):
    params = DiscretizationParams(2, 2)
    X, Y = interval_space("11", params), interval_space("22", params)
    f = PointMap(X, Y, (0, 2, 1, 3, 4))
    dump_map(f, tmp_path / "f.json")
    g = load_map(tmp_path / "f.json", X, Y)
    assert g.perm == f.perm
    assert map_to_dict(f)["source"] == "X_11"
    with pytest.raises(FileFormatError):
        map_from_dict(map_to_dict(f), Y, X)


def test_fmt_float():
    assert fmt_float(None) == ""
    assert fmt_float(True) == "true"
    assert fmt_float(np.int64(7)) == "7"
    assert fmt_float(float("inf")) == "inf"
    assert fmt_float(0.1) == "0.10000000000000001"
    assert float(fmt_float(np.pi)) == np.pi


def test_csv_text():
    text = csv_text(["a", "b"], [{"a": "x", "b": 0.5}, {"a": "y", "b": None}], caption="note")
    assert text == "# note\na,b\nx,0.5\ny,\n"


def test_json_text_rejects_nan():
    with pytest.raises(ValueError):
        json_text({"x": float("nan")})
