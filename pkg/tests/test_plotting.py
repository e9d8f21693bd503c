import numpy as np
import pytest

from qrlnas.errors import ConfigurationError
from qrlnas.plotting import moving_average, plot_rewards, read_rewards_csv

HEADER = "episode,steps,total_reward,epsilon,ms\n"


def write_csv(path, rows):
    path.write_text(HEADER + "".join(rows))


class TestMovingAverage:
    def test_window_larger_than_data(self):
        np.testing.assert_allclose(moving_average([2.0, 4.0], 50), [2.0, 3.0])

    def test_trailing_window(self):
        out = moving_average([1.0, 2.0, 3.0, 4.0], 2)
        np.testing.assert_allclose(out, [1.0, 1.5, 2.5, 3.5])


class TestReadCsv:
    def test_reads_rows(self, tmp_path):
        p = tmp_path / "r.csv"
        write_csv(p, ["0,5,1.000000,0.9,0.0\n", "1,7,-1.000000,0.8,0.0\n"])
        episodes, rewards = read_rewards_csv(p)
        assert episodes == [0, 1]
        assert rewards == [1.0, -1.0]

    def test_empty_data_rejected(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text(HEADER)
        with pytest.raises(ConfigurationError):
            read_rewards_csv(p)

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(ConfigurationError):
            read_rewards_csv(tmp_path / "nope.csv")

    def test_wrong_header_rejected(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("a,b\n1,2\n")
        with pytest.raises(ConfigurationError):
            read_rewards_csv(p)


class TestPlot:
    def test_single_row_plots_point_marker(self, tmp_path):
        p = tmp_path / "one.csv"
        write_csv(p, ["0,5,2.000000,0.9,0.0\n"])
        out = tmp_path / "one.svg"
        plot_rewards([p], out)
        svg = out.read_text()
        assert "<circle" in svg
        assert "<svg" in svg and "</svg>" in svg

    def test_three_series_overlay(self, tmp_path):
        paths = []
        for name in ("alpha", "beta", "gamma"):
            p = tmp_path / f"{name}.csv"
            rows = [f"{i},3,{float(i * len(name)):.6f},0.5,0.0\n" for i in range(30)]
            write_csv(p, rows)
            paths.append(p)
        out = tmp_path / "overlay.svg"
        plot_rewards(paths, out)
        svg = out.read_text()
        # raw + smoothed polyline per series
        assert svg.count("<polyline") == 6
        for name in ("alpha", "beta", "gamma"):
            assert f">{name}</text>" in svg

    def test_smoothing_window_respected(self, tmp_path):
        p = tmp_path / "s.csv"
        rows = [f"{i},1,{float(i % 2):.6f},0.1,0.0\n" for i in range(100)]
        write_csv(p, rows)
        out = tmp_path / "s.svg"
        plot_rewards([p], out, smoothing=10)
        assert out.exists()
