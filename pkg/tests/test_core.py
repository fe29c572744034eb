import numpy as np
import pytest

from rdepth.core import (
    DimensionMismatch,
    Direction,
    EmptyInput,
    MalformedInput,
    NonFiniteCoordinate,
    PointCloud,
    RDepthError,
    check_seed,
    format_number,
    parse_csv,
    round_floats,
    spawn_rngs,
    validate_cloud,
)


def test_validate_well_formed():
    c = validate_cloud([[1, 1], [1, -1]])
    assert (c.n, c.d) == (2, 2)


def test_validate_ragged():
    with pytest.raises(DimensionMismatch):
        validate_cloud([[1, 1], [1]])


def test_validate_empty():
    with pytest.raises(EmptyInput):
        validate_cloud([])


@pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
def test_validate_non_finite(bad):
    with pytest.raises(NonFiniteCoordinate):
        validate_cloud([[0.0, bad]])


def test_errors_are_value_errors():
    assert issubclass(EmptyInput, RDepthError) and issubclass(RDepthError, ValueError)


def test_cloud_is_read_only():
    raw = np.array([[0.0, 1.0], [2.0, 3.0]])
    c = PointCloud(raw)
    raw[0, 0] = 99.0
    assert c.points[0, 0] == 0.0
    with pytest.raises(ValueError):
        c.points[0, 0] = 5.0


def test_extended_leaves_original_alone():
    c = PointCloud([[0.0, 0.0]])
    e = c.extended([[1.0, 1.0], [2.0, 2.0]])
    assert c.n == 1 and e.n == 3


def test_duplicates_allowed():
    assert validate_cloud([[1, 2], [1, 2], [1, 2]]).n == 3


def test_direction_renormalized():
    u = Direction([3.0, 4.0])
    assert abs(np.linalg.norm(u.u) - 1.0) <= 1e-12
    assert np.allclose(u.u, [0.6, 0.8])


def test_direction_zero_rejected():
    with pytest.raises(RDepthError):
        Direction([0.0, 0.0])


def test_csv_header_detected():
    c = parse_csv("x,y\n1,2\n3,4\n")
    assert c.n == 2 and c.points[1, 1] == 4.0


def test_csv_without_header():
    assert parse_csv("1,2\n3,4\n").n == 2


def test_csv_malformed_names_line():
    with pytest.raises(MalformedInput, match="line 3"):
        parse_csv("1,2\n3,4\n5,x\n")


def test_csv_ragged():
    with pytest.raises(DimensionMismatch, match="line 2"):
        parse_csv("1,2\n3\n")


def test_csv_empty():
    with pytest.raises(EmptyInput):
        parse_csv("x,y\n")


def test_seed_range():
    assert check_seed(2**64 - 1) == 2**64 - 1
    with pytest.raises(RDepthError):
        check_seed(-1)
    with pytest.raises(RDepthError):
        check_seed(2**64)


def test_spawned_streams_reproducible_and_distinct():
    a = [r.random() for r in spawn_rngs(7, 3)]
    b = [r.random() for r in spawn_rngs(7, 3)]
    assert a == b and len(set(a)) == 3


def test_format_number_round_trips():
    x = 0.1 + 0.2
    assert float(format_number(x)) == x
    assert format_number(0.3) == "0.3"
    assert format_number(1 / 3, 3) == "0.333"
    assert format_number(5) == "5"


def test_round_floats_nested():
    assert round_floats({"a": [1 / 3, 2]}, 2) == {"a": [0.33, 2]}
    assert round_floats({"a": 1 / 3}, None) == {"a": 1 / 3}
