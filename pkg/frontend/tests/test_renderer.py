"""Renderer tests.

The reference-line geometry is checked on the plot data layer itself:
a V = c/n series must sit exactly on the solid horizontal reference and
a V = c * n**(-1/3) series must run parallel to the dashed slope-2/3
reference.  The row-accounting tests confirm that every CSV row appears
in exactly one plotted series.
"""

import os

import matplotlib.pyplot as plt
import numpy as np
import pytest

from smeary_figures import PlotSpec, RenderInputError, build_figure, load_rows, render
from smeary_figures.cli import main

HEADER = "m,beta,alpha,n,reps,V,stderr_V,mean_iterations,nonconverged,seed"
FIXTURE = os.path.join(os.path.dirname(__file__), "data", "m2_grid.csv")


def write_csv(path, cells):
    """cells: iterable of (m, beta, n, V)."""
    lines = [HEADER]
    for m, beta, n, V in cells:
        lines.append(f"{m},{beta!r},0.5,{n},100,{V!r},{V / 10.0!r},12.0,0,1")
    path.write_text("\n".join(lines) + "\n")


def spec_for(tmp_path, csv_path, **kwargs):
    return PlotSpec(
        infile=str(csv_path), outfile=str(tmp_path / "fig.png"), **kwargs
    )


def lines_by_gid(fig):
    out = {}
    for ax in fig.axes:
        for line in ax.get_lines():
            gid = line.get_gid()
            if gid:
                out[gid] = line
    return out


def loglog_slope(line):
    x, y = line.get_xdata(), line.get_ydata()
    return np.polyfit(np.log(x), np.log(y), 1)[0]


def test_inverse_n_series_lies_on_solid_reference(tmp_path):
    csv_path = tmp_path / "sim.csv"
    sizes = (100, 1000, 10000, 100000)
    write_csv(csv_path, [(2, -0.5, n, 0.37 / n) for n in sizes])
    fig, report = build_figure(load_rows(str(csv_path)), spec_for(tmp_path, csv_path))
    try:
        lines = lines_by_gid(fig)
        series = lines["series:m=2:beta=-0.5"]
        solid = lines["ref:solid:m=2"]
        y = series.get_ydata()
        assert np.allclose(y, 0.37, rtol=1e-12)
        assert np.allclose(solid.get_ydata(), y[0], rtol=1e-12)
        assert abs(loglog_slope(series)) < 1e-12
    finally:
        plt.close(fig)


def test_cube_root_series_parallels_dashed_reference(tmp_path):
    csv_path = tmp_path / "sim.csv"
    sizes = (100, 1000, 10000, 100000)
    write_csv(csv_path, [(2, 0.0, n, float(n) ** (-1.0 / 3.0)) for n in sizes])
    fig, report = build_figure(load_rows(str(csv_path)), spec_for(tmp_path, csv_path))
    try:
        lines = lines_by_gid(fig)
        series_slope = loglog_slope(lines["series:m=2:beta=0"])
        dashed_slope = loglog_slope(lines["ref:dashed:m=2"])
        assert abs(series_slope - 2.0 / 3.0) < 1e-12
        assert abs(series_slope - dashed_slope) < 1e-12
    finally:
        plt.close(fig)


def test_every_row_lands_in_exactly_one_series(tmp_path):
    csv_path = tmp_path / "sim.csv"
    betas = (-0.5, 0.0, 0.1)
    sizes = (30, 100, 300, 1000)
    write_csv(
        csv_path,
        [(2, b, n, 1.0 / n + abs(b)) for b in betas for n in sizes],
    )
    rows = load_rows(str(csv_path))
    fig, report = build_figure(rows, spec_for(tmp_path, csv_path))
    try:
        assert report.rows_read == 12
        assert report.points_plotted == 12
        assert sum(report.series_points.values()) == report.rows_read
        assert set(report.series_points) == {(2, b) for b in betas}
        assert all(count == 4 for count in report.series_points.values())
        gids = set(lines_by_gid(fig))
        assert sum(1 for g in gids if g.startswith("series:")) == 3
        labels = [t.get_text() for t in fig.axes[0].get_legend().get_texts()]
        assert labels == [r"$\beta=-0.5$", r"$\beta=0$", r"$\beta=0.1$"]
    finally:
        plt.close(fig)


def test_one_panel_per_dimension(tmp_path):
    csv_path = tmp_path / "sim.csv"
    write_csv(
        csv_path,
        [(m, 0.0, n, 1.0 / n) for m in (2, 10, 100) for n in (100, 1000)],
    )
    fig, report = build_figure(load_rows(str(csv_path)), spec_for(tmp_path, csv_path))
    try:
        assert report.panels == (2, 10, 100)
        assert len(fig.axes) == 3
        gids = set(lines_by_gid(fig))
        assert {g for g in gids if g.startswith("ref:solid")} == {
            "ref:solid:m=2",
            "ref:solid:m=10",
            "ref:solid:m=100",
        }
    finally:
        plt.close(fig)


def test_dimension_filter(tmp_path):
    csv_path = tmp_path / "sim.csv"
    write_csv(
        csv_path,
        [(m, 0.0, n, 1.0 / n) for m in (2, 10) for n in (100, 1000, 10000)],
    )
    rows = load_rows(str(csv_path))
    fig, report = build_figure(rows, spec_for(tmp_path, csv_path, dims=(2,)))
    try:
        assert report.panels == (2,)
        assert report.rows_filtered_out == 3
        assert report.points_plotted == 3
    finally:
        plt.close(fig)
    with pytest.raises(RenderInputError, match="dimension filter"):
        build_figure(rows, spec_for(tmp_path, csv_path, dims=(7,)))


def test_reference_toggle(tmp_path):
    csv_path = tmp_path / "sim.csv"
    write_csv(csv_path, [(2, 0.0, n, 1.0 / n) for n in (100, 1000)])
    fig, _ = build_figure(
        load_rows(str(csv_path)), spec_for(tmp_path, csv_path, references=False)
    )
    try:
        assert not any(g.startswith("ref:") for g in lines_by_gid(fig))
    finally:
        plt.close(fig)


def test_axis_ranges_applied(tmp_path):
    csv_path = tmp_path / "sim.csv"
    write_csv(csv_path, [(2, 0.0, n, 1.0 / n) for n in (100, 1000)])
    fig, _ = build_figure(
        load_rows(str(csv_path)),
        spec_for(tmp_path, csv_path, x_range=(10.0, 1e6), y_range=(0.1, 10.0)),
    )
    try:
        assert fig.axes[0].get_xlim() == (10.0, 1e6)
        assert fig.axes[0].get_ylim() == (0.1, 10.0)
    finally:
        plt.close(fig)


def test_plot_data_layer_is_deterministic(tmp_path):
    rows = load_rows(FIXTURE)
    spec = spec_for(tmp_path, FIXTURE)
    fig_a, _ = build_figure(rows, spec)
    fig_b, _ = build_figure(rows, spec)
    try:
        lines_a, lines_b = lines_by_gid(fig_a), lines_by_gid(fig_b)
        assert set(lines_a) == set(lines_b)
        for gid, line in lines_a.items():
            assert np.array_equal(line.get_xydata(), lines_b[gid].get_xydata())
    finally:
        plt.close(fig_a)
        plt.close(fig_b)


def test_desk_scale_grid_renders_without_dropping_rows(tmp_path):
    rows = load_rows(FIXTURE)
    out = tmp_path / "fig2.png"
    report = render(PlotSpec(infile=FIXTURE, outfile=str(out)))
    assert out.exists() and out.stat().st_size > 0
    assert report.rows_read == len(rows)
    assert report.points_plotted == len(rows)
    assert report.panels == (2,)
    betas = sorted({r.beta for r in rows})
    sizes = {r.n for r in rows}
    assert set(report.series_points) == {(2, b) for b in betas}
    assert all(
        report.series_points[(2, b)] == len(sizes) for b in betas
    )


def test_cli_renders_fixture(tmp_path, capsys):
    out = tmp_path / "fig2.png"
    code = main(["--in", FIXTURE, "--out", str(out)])
    assert code == 0
    assert out.exists() and out.stat().st_size > 0
    note = capsys.readouterr().out
    assert "1 panel(s)" in note


def test_cli_vector_output(tmp_path, capsys):
    out = tmp_path / "fig2.svg"
    code = main(["--in", FIXTURE, "--out", str(out), "--dims", "2", "--no-refs"])
    assert code == 0
    assert out.exists() and b"<svg" in out.read_bytes()
    capsys.readouterr()


def test_cli_malformed_csv_exits_nonzero_with_line(tmp_path, capsys):
    path = tmp_path / "sim.csv"
    path.write_text(
        HEADER + "\n"
        "2,-0.5,0.06,1000,100,0.001,0.0001,12.5,0,7\n"
        "2,-0.5,0.06,bad,100,0.001,0.0001,12.5,0,7\n"
    )
    code = main(["--in", str(path), "--out", str(tmp_path / "fig.png")])
    assert code == 2
    assert ":3:" in capsys.readouterr().err


def test_cli_rejects_bad_options(tmp_path, capsys):
    assert main(["--in", FIXTURE, "--out", "f.png", "--dims", "abc"]) == 2
    assert main(["--in", FIXTURE, "--out", "f.png", "--xrange", "5"]) == 2
    assert main(["--in", FIXTURE, "--out", "f.png", "--yrange", "9:1"]) == 2
    assert main(["--in", FIXTURE]) == 2
    capsys.readouterr()
