import math

import numpy as np
import pytest

from genvi.output import format_value, line_plot_svg, parse_csv, write_csv


AWKWARD_VALUES = [
    0.1,
    1.0 / 3.0,
    math.pi,
    1e6,
    1.2246467991473532e-16,
    -2.001200080000004,
    0.0,
]


class TestFormatValue:
    @pytest.mark.parametrize("v", AWKWARD_VALUES)
    def test_round_trips_doubles(self, v):
        assert float(format_value(v)) == v

    def test_random_doubles_round_trip(self):
        rng = np.random.default_rng(11)
        for v in rng.uniform(-1e8, 1e8, 200):
            assert float(format_value(float(v))) == v


class TestCsvRoundTrip:
    def test_write_then_parse(self, tmp_path):
        path = tmp_path / "out.csv"
        rows = [[0.1, 1e6], [math.pi, -0.5]]
        write_csv(str(path), ["h", "err"], rows, "eps=0.1 seed=2023")
        columns, comment, parsed = parse_csv(path.read_text())
        assert columns == ["h", "err"]
        assert comment == "eps=0.1 seed=2023"
        assert parsed == rows

    def test_lf_only_and_trailing_newline(self, tmp_path):
        path = tmp_path / "out.csv"
        write_csv(str(path), ["a"], [[1.0]], "c")
        raw = path.read_bytes()
        assert b"\r" not in raw
        assert raw.endswith(b"\n")
        assert raw.split(b"\n")[1] == b"# c"

    def test_row_width_checked(self, tmp_path):
        with pytest.raises(ValueError, match="width"):
            write_csv(str(tmp_path / "bad.csv"), ["a", "b"], [[1.0]], "c")

    def test_same_input_same_bytes(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        rows = [[0.3, 2.0012000800000038], [0.7, 1e-12]]
        write_csv(str(a), ["h", "e"], rows, "run")
        write_csv(str(b), ["h", "e"], rows, "run")
        assert a.read_bytes() == b.read_bytes()

    def test_parse_rejects_empty(self):
        with pytest.raises(ValueError, match="empty"):
            parse_csv("")

    def test_parse_without_comment_line(self):
        columns, comment, rows = parse_csv("x,y\n1,2\n")
        assert columns == ["x", "y"]
        assert comment == ""
        assert rows == [[1.0, 2.0]]


class TestSvg:
    X = [0.1, 0.2, 0.3, 0.4]
    SERIES = [[1e-9, 1e-6, 1e-3, 1.0], [0.5, 0.4, 0.3, 0.2]]

    def make(self, **kw):
        return line_plot_svg(self.X, self.SERIES, ["a", "b"], "t", "h", "err", **kw)

    def test_identical_inputs_identical_bytes(self):
        assert self.make(log_y=True) == self.make(log_y=True)

    def test_one_polyline_per_series(self):
        svg = self.make()
        assert svg.count("<polyline") == 2
        assert svg.startswith("<svg ")
        assert svg.rstrip().endswith("</svg>")

    def test_labels_present(self):
        svg = self.make()
        for text in ("a", "b", "t", "h", "err"):
            assert f">{text}</text>" in svg

    def test_log_floor_keeps_zero_drawable(self):
        svg = line_plot_svg([1.0, 2.0], [[0.0, 1.0]], ["s"], "t", "x", "y", log_y=True)
        assert "nan" not in svg
        assert "inf" not in svg

    def test_label_count_checked(self):
        with pytest.raises(ValueError, match="label"):
            line_plot_svg(self.X, self.SERIES, ["only-one"], "t", "x", "y")

    def test_length_mismatch_checked(self):
        with pytest.raises(ValueError, match="length"):
            line_plot_svg([1.0, 2.0], [[1.0]], ["s"], "t", "x", "y")

    def test_fixed_canvas(self):
        svg = self.make()
        assert 'width="720" height="440"' in svg
