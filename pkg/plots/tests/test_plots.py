import math
from pathlib import Path

import pytest

from asl_plots.levelsets import filter_value_sufficient
from asl_plots.levelsets import main as levelsets_main
from asl_plots.metrics import SchemaError, load_metrics, split_out_stem
from asl_plots.plane import main as plane_main

HEADER = (
    "# schema=asl-metrics-v1\n"
    "# config_hash=deadbeef\n"
    "spec_id,template,delta_a,delta_v,i_az_sv,i_ag_sv,i_av_sz,h_a_sg,"
    "success_rate,off_support_steps,nll,excess,modeling_error,iterations,"
    "converged,seed,log_base\n"
)


def _row(spec_id, template, da, dv, iazsv, success):
    return (
        f"{spec_id},{template},{da},{dv},{iazsv},0.2,0.0,0.4,{success},"
        f"0,,,,,,0,nats\n"
    )


@pytest.fixture
def sample_csv(tmp_path):
    path = tmp_path / "metrics.csv"
    rows = [
        _row("full", "full", 0.0, 0.0, 0.23, 1.0),
        _row("signs", "signs", 0.0003, 0.99, 0.2287, 1.0),
        _row("value_only", "value_only", 0.2288, 0.0, 0.0, 0.28),
        _row("distances", "distances", 0.0819, 0.0, 0.1468, 0.40),
        _row("0001-dir_coarse(x)", "dir_coarse", 0.01, 0.19999, 0.21, 0.93),
        _row("0002-hashed_dist(y)", "hashed_dist", 0.05, 0.2, 0.12, 0.5),
        _row("0003-value_plus(z)", "value_plus", 0.20, 0.35, 0.02, 0.3),
    ]
    path.write_text(HEADER + "".join(rows))
    return path


def test_load_metrics_parses_and_validates(sample_csv):
    rows = load_metrics(sample_csv, ("delta_v", "delta_a", "success_rate"))
    assert len(rows) == 7
    assert rows[0]["delta_v"] == 0.0
    with pytest.raises(SchemaError) as err:
        load_metrics(sample_csv, ("delta_v", "not_a_column"))
    assert "not_a_column" in str(err.value)


def test_load_metrics_skips_incomplete_rows(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text(
        HEADER
        + _row("full", "full", 0.0, 0.0, 0.23, 1.0)
        + "bare,full,0.1,0.2,0.1,0.2,0.0,0.4,,0,,,,,,0,nats\n"
    )
    rows = load_metrics(path, ("delta_v", "delta_a", "success_rate"))
    assert [r["spec_id"] for r in rows] == ["full"]


def test_threshold_filter_is_strict(sample_csv):
    rows = load_metrics(sample_csv, ("delta_v", "delta_a", "i_az_sv", "success_rate"))
    kept = filter_value_sufficient(rows, 0.2)
    ids = {r["spec_id"] for r in kept}
    assert ids == {"full", "value_only", "distances", "0001-dir_coarse(x)"}
    assert all(r["delta_v"] < 0.2 for r in kept)
    # boundary row (delta_v == 0.2) is excluded; threshold 0 keeps exact zeros only
    assert {r["spec_id"] for r in filter_value_sufficient(rows, 0.0)} == set()
    tiny = filter_value_sufficient(rows, 1e-12)
    assert {r["spec_id"] for r in tiny} == {"full", "value_only", "distances"}


def test_plane_command(sample_csv, tmp_path, capsys):
    out = tmp_path / "fig" / "plane"
    rc = plane_main(["--csv", str(sample_csv), "--out", str(out)])
    assert rc == 0
    assert (out.with_suffix(".png")).exists()
    assert (out.with_suffix(".svg")).exists()
    assert "plotted 7 representations (4 annotated)" in capsys.readouterr().out


def test_levelsets_command(sample_csv, tmp_path, capsys):
    out = tmp_path / "fig" / "levels.png"
    rc = levelsets_main(["--csv", str(sample_csv), "--out", str(out), "--threshold", "0.2"])
    assert rc == 0
    stem = split_out_stem(out)
    assert stem.with_suffix(".png").exists() and stem.with_suffix(".svg").exists()
    printed = capsys.readouterr().out
    assert "plotted 4 of 7 representations" in printed
    assert "spearman(success, I(A;Z|S,V)) =" in printed
    rho = float(printed.rsplit("=", 1)[1])
    assert not math.isnan(rho)


def test_empty_csv_is_an_error(tmp_path, capsys):
    path = tmp_path / "empty.csv"
    path.write_text(HEADER)
    out = tmp_path / "fig"
    assert plane_main(["--csv", str(path), "--out", str(out)]) == 1
    assert not out.with_suffix(".png").exists()
    assert "no rows" in capsys.readouterr().err


def test_missing_column_is_an_error(tmp_path, capsys):
    path = tmp_path / "m.csv"
    path.write_text("spec_id,delta_a\nfull,0.0\n")
    assert plane_main(["--csv", str(path), "--out", str(tmp_path / "f")]) == 1
    assert "delta_v" in capsys.readouterr().err


REPO_RESULTS = Path(__file__).resolve().parents[2] / "results"


@pytest.mark.skipif(
    not (REPO_RESULTS / "library_metrics.csv").exists(),
    reason="shipped results not present",
)
def test_regenerates_figures_from_shipped_csvs(tmp_path, capsys):
    lib = str(REPO_RESULTS / "library_metrics.csv")
    base = str(REPO_RESULTS / "baselines.csv")
    assert plane_main(["--csv", base, lib, "--out", str(tmp_path / "plane")]) == 0
    assert levelsets_main(["--csv", base, lib, "--out", str(tmp_path / "levels")]) == 0
    assert plane_main(["--csv", base, "--out", str(tmp_path / "plane_base")]) == 0
    out = capsys.readouterr().out
    assert "plotted 2004 representations (4 annotated)" in out  # baselines + library
    assert "plotted 4 representations (4 annotated)" in out  # baselines only
    for stem in ("plane", "levels", "plane_base"):
        assert (tmp_path / f"{stem}.png").exists()
        assert (tmp_path / f"{stem}.svg").exists()
