import shutil
import subprocess

import numpy as np
import pytest

from figure_scripts.cli import main
from figure_scripts.render import render_diagnostics, render_panel_grid
from figure_scripts.tables import (MissingSnapshotError, read_diagnostics,
                                   read_snapshot, snapshot_filename)

FMT = "{:.17g}"


def write_snapshot(path, nx=4, ny=3, n_species=2, seed=0):
    rng = np.random.default_rng(seed)
    xs = (np.arange(nx) + 0.5) / nx
    ys = (np.arange(ny) + 0.5) / ny
    header = "x,y," + ",".join(f"u_{i+1}" for i in range(n_species)) + ",u_sum"
    lines = [header]
    for ix in range(nx):
        for iy in range(ny):
            u = rng.random(n_species) + 0.5
            cells = [FMT.format(xs[ix]), FMT.format(ys[iy])]
            cells += [FMT.format(v) for v in u]
            cells.append(FMT.format(u.sum()))
            lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_diagnostics(path, n_steps=5):
    header = ("step,time,mass_1,mass_2,entropy,diff_dissipation,"
              "nonlocal_dissipation,entropy_residual,min_density,"
              "max_velocity_inf")
    lines = [header]
    for k in range(n_steps):
        lines.append(",".join(
            [str(k), FMT.format(k * 1e-4), "1.0", "2.0",
             FMT.format(1.0 - 0.01 * k), "0.1", "0.2", "-1e-9", "0.5", "3.0"]))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_panel_set(directory, betas=(0.5, 1.5, 2.5), steps=(15, 50, 250)):
    seed = 0
    for beta in betas:
        for step in steps:
            write_snapshot(directory / snapshot_filename(beta, step),
                           seed=seed)
            seed += 1


class TestSnapshotTable:
    def test_parse_shape_and_columns(self, tmp_path):
        table = read_snapshot(write_snapshot(tmp_path / "s.csv"))
        assert (table.nx, table.ny) == (4, 3)
        assert table.n_species == 2
        assert table.x.size == 12
        np.testing.assert_allclose(table.species.sum(axis=0), table.u_sum)

    def test_field_reshape_is_row_major_in_x(self, tmp_path):
        table = read_snapshot(write_snapshot(tmp_path / "s.csv"))
        grid_x = table.field(table.x)
        # x is constant along each row of the reshaped field.
        assert np.all(grid_x == grid_x[:, :1])

    def test_round_trip_is_lossless(self, tmp_path):
        path = write_snapshot(tmp_path / "s.csv")
        table = read_snapshot(path)
        assert table.to_csv_text() == path.read_text()

    def test_missing_file(self, tmp_path):
        with pytest.raises(MissingSnapshotError):
            read_snapshot(tmp_path / "absent.csv")

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError, match="header"):
            read_snapshot(path)

    def test_inconsistent_sum(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x,y,u_1,u_sum\n0.5,0.5,1.0,2.0\n")
        with pytest.raises(ValueError, match="u_sum"):
            read_snapshot(path)


class TestDiagnosticsTable:
    def test_columns(self, tmp_path):
        table = read_diagnostics(write_diagnostics(tmp_path / "d.csv"))
        assert table.mass_columns == ["mass_1", "mass_2"]
        assert table["entropy"].size == 5

    def test_missing_column_named(self, tmp_path):
        table = read_diagnostics(write_diagnostics(tmp_path / "d.csv"))
        with pytest.raises(KeyError, match="no_such"):
            table["no_such"]

    def test_malformed_row_reports_index(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("step,time\n0,0.0\n1\n")
        with pytest.raises(ValueError, match="row 2"):
            read_diagnostics(path)

    def test_non_numeric_reports_index(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("step,time\n0,zero\n")
        with pytest.raises(ValueError, match="row 1"):
            read_diagnostics(path)


class TestRenderPanelGrid:
    def test_complete_set_produces_image(self, tmp_path):
        write_panel_set(tmp_path)
        out = render_panel_grid(tmp_path, tmp_path / "panels.png")
        assert out.exists()
        assert out.stat().st_size > 0
        assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_missing_file_is_named(self, tmp_path):
        write_panel_set(tmp_path)
        gone = snapshot_filename(1.5, 50)
        (tmp_path / gone).unlink()
        with pytest.raises(MissingSnapshotError, match=gone) as exc:
            render_panel_grid(tmp_path, tmp_path / "panels.png")
        assert exc.value.missing == [gone]


class TestRenderDiagnostics:
    def test_produces_image(self, tmp_path):
        diag = write_diagnostics(tmp_path / "d.csv")
        out = render_diagnostics(diag, tmp_path / "diag.png")
        assert out.exists() and out.stat().st_size > 0

    def test_missing_column(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("step,time,mass_1\n0,0.0,1.0\n")
        with pytest.raises(KeyError, match="entropy"):
            render_diagnostics(path, tmp_path / "diag.png")


class TestCli:
    def test_panels_subcommand(self, tmp_path):
        write_panel_set(tmp_path)
        out = tmp_path / "panels.png"
        assert main(["panels", str(tmp_path), str(out)]) == 0
        assert out.exists()

    def test_missing_snapshot_exits_1(self, tmp_path, capsys):
        write_panel_set(tmp_path)
        (tmp_path / snapshot_filename(2.5, 250)).unlink()
        assert main(["panels", str(tmp_path), str(tmp_path / "p.png")]) == 1
        assert snapshot_filename(2.5, 250) in capsys.readouterr().err

    def test_diag_subcommand(self, tmp_path):
        diag = write_diagnostics(tmp_path / "d.csv")
        out = tmp_path / "diag.png"
        assert main(["diag", str(diag), str(out)]) == 0
        assert out.exists()


@pytest.mark.skipif(shutil.which("btb") is None,
                    reason="simulator CLI not installed")
def test_end_to_end_figure_pipeline(tmp_path):
    """The simulator's figure-reproduction output feeds the panel grid."""
    snap_dir = tmp_path / "snapshots"
    proc = subprocess.run(["btb", "reproduce-figure", str(snap_dir)],
                          capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stderr
    snapshots = sorted(p.name for p in snap_dir.glob("snap_*.csv"))
    assert len(snapshots) == 9
    out = tmp_path / "figure.png"
    assert main(["panels", str(snap_dir), str(out)]) == 0
    assert out.exists() and out.stat().st_size > 0
