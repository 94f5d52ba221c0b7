import io
from fractions import Fraction

import pytest

from dotlab.errors import UsageError
from dotlab.geometry import Configuration, Mode, Point
from dotlab.pointfile import dumps_points, load_points, read_points, save_points


def test_exact_round_trip(tmp_path):
    config = Configuration(
        [Point(Fraction(3, 4), Fraction(-2)), Point(Fraction(5), Fraction(1, 7))]
    )
    path = tmp_path / "pts.txt"
    save_points(config, str(path))
    loaded = load_points(str(path))
    assert loaded.points == config.points
    assert loaded.mode is Mode.EXACT


def test_approx_round_trip_bit_exact(tmp_path):
    config = Configuration([Point(0.1, -2.5e-13), Point(1 / 3, 2.0)])
    path = tmp_path / "pts.txt"
    save_points(config, str(path))
    loaded = load_points(str(path))
    assert loaded.points == config.points  # repr round-trips doubles exactly


def test_save_load_save_idempotent(tmp_path):
    config = Configuration([Point(Fraction(1, 3), Fraction(0)), Point(Fraction(2), Fraction(5))])
    first = dumps_points(config)
    reloaded = read_points(io.StringIO(first))
    assert dumps_points(reloaded) == first


def test_header_required():
    with pytest.raises(UsageError, match="header"):
        read_points(io.StringIO("1 2\n"))


def test_empty_file_is_usage_error():
    with pytest.raises(UsageError, match="missing"):
        read_points(io.StringIO(""))


def test_comments_and_blanks_ignored():
    text = "\n# a comment\n#mode exact\n\n# another\n1/2 3\n"
    config = read_points(io.StringIO(text))
    assert config.points == (Point(Fraction(1, 2), Fraction(3)),)


def test_duplicate_header_rejected():
    with pytest.raises(UsageError, match="duplicate"):
        read_points(io.StringIO("#mode exact\n#mode approx\n"))


def test_malformed_header_rejected():
    with pytest.raises(UsageError, match="malformed"):
        read_points(io.StringIO("#mode sometimes\n1 2\n"))


def test_exact_accepts_decimal_and_fraction_tokens():
    config = read_points(io.StringIO("#mode exact\n0.75 3\n-2/5 1\n"))
    assert config.points[0].x == Fraction(3, 4)
    assert config.points[1].x == Fraction(-2, 5)


def test_approx_rejects_fraction_tokens():
    with pytest.raises(UsageError, match="bad approx"):
        read_points(io.StringIO("#mode approx\n3/4 1\n"))


def test_wrong_field_count_rejected():
    with pytest.raises(UsageError, match="expected 'x y'"):
        read_points(io.StringIO("#mode exact\n1 2 3\n"))


def test_point_before_header_rejected():
    with pytest.raises(UsageError, match="before"):
        read_points(io.StringIO("1 2\n#mode exact\n"))
