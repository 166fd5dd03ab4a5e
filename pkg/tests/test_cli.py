"""The command-line interface: flags, config files, CSV bytes, exit codes."""

import csv
import math

import pytest

from segchain import cli
from segchain.validation import CheckResult


def run_main(argv):
    return cli.main(argv)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_stages_listing(capsys):
    assert run_main(["stages"]) == 0
    out = capsys.readouterr().out
    assert "p_cou" in out and "tcoh_s" in out
    assert "Nmux = 12" in out
    assert len(out.strip().splitlines()) == 5  # header + 3 stages + footnote


def test_single_frozen_row(tmp_path, capsys):
    out = tmp_path / "row.csv"
    code = run_main(["single", "--scheme", "seg-ed", "--stage", "2",
                     "--l0-km", "50", "--nr", "19", "--out", str(out)])
    assert code == 0
    rows = read_csv(out)
    assert len(rows) == 1
    row = rows[0]
    assert row["scheme"] == "seg-ed"
    assert row["stage"] == "2"
    assert row["L_km"] == "1000"
    assert float(row["K_hz"]) == pytest.approx(0.9088497283820656, rel=1e-11)
    assert float(row["R_bit_hz"]) == pytest.approx(24.44186869251493, rel=1e-11)
    assert float(row["C_K"]) == pytest.approx(655.3452974573202, rel=1e-11)
    assert float(row["plob_hz"]) == pytest.approx(0.1442695040961098, rel=1e-11)
    stdout = capsys.readouterr().out
    assert "K_hz" in stdout


def test_single_distance_resolves_nr(capsys):
    assert run_main(["single", "--scheme", "seg-prob", "--stage", "2",
                     "--l0-km", "50", "--distance-km", "500"]) == 0
    out = capsys.readouterr().out
    assert "       Nr  9" in out


def test_single_needs_exactly_one_of_nr_and_distance(capsys):
    with pytest.raises(SystemExit) as exc:
        run_main(["single", "--scheme", "seg-ed", "--stage", "2", "--l0-km", "50"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        run_main(["single", "--scheme", "seg-ed", "--stage", "2", "--l0-km", "50",
                  "--nr", "2", "--distance-km", "500"])
    assert exc.value.code == 1


def test_unknown_scheme_exits_one():
    with pytest.raises(SystemExit) as exc:
        run_main(["single", "--scheme", "seg-quantum", "--nr", "2"])
    assert exc.value.code == 1


def test_sweep_is_byte_deterministic(tmp_path):
    args = ["sweep", "--scheme", "seg-prob", "--stage", "2",
            "--l0-km", "50", "--nr", "1:4:1"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_main(args + ["--out", str(a)]) == 0
    assert run_main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = read_csv(a)
    assert [r["Nr"] for r in rows] == ["1", "2", "3", "4"]
    assert "plob_hz" not in rows[0]


def test_sweep_distance_axis_carries_the_benchmark(tmp_path):
    out = tmp_path / "d.csv"
    assert run_main(["sweep", "--scheme", "seg-ed", "--stage", "2", "--l0-km", "50",
                     "--distance-km", "500,1000", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert [r["L_km"] for r in rows] == ["500", "1000"]
    assert float(rows[1]["plob_hz"]) == pytest.approx(0.1442695040961098, rel=1e-11)


def test_sweep_grid_validation():
    base = ["sweep", "--scheme", "seg-ed", "--stage", "2"]
    for bad in (
        base + ["--l0-km", "50", "--nr", "2"],              # no grid anywhere
        base + ["--l0-km", "10:50:10", "--nr", "1:3:1"],    # two grids
        base + ["--l0-km", "50", "--nr", "5:1:-1"],         # negative step
        base + ["--l0-km", "50", "--nr", "abc"],            # unparseable
        base + ["--l0-km", "10:50:10"],                     # L0 axis without Nr
    ):
        with pytest.raises(SystemExit) as exc:
            run_main(bad)
        assert exc.value.code == 1


def test_config_file_noiseless_overrides(tmp_path, capsys):
    config = tmp_path / "quiet.cfg"
    config.write_text(
        "scheme = seg-ed\n"
        "stage = 2\n"
        "# perfect hardware\n"
        "f0 = 1\nbeta = 0\ndelta = 0\ntcoh_s = inf\n"
        "p_cou = 1\neta_d = 1\nalpha_db_km = 0\n"
        "nr = 3\n"
    )
    out = tmp_path / "quiet.csv"
    assert run_main(["single", "--config", str(config), "--out", str(out)]) == 0
    row = read_csv(out)[0]
    assert row["stage"] == "custom"
    assert float(row["p_end"]) == 1.0
    assert row["K_hz"] == row["R_bit_hz"]  # r_inf = 1 exactly
    assert float(row["r_inf"]) == 1.0


def test_config_file_rejects_unknown_keys(tmp_path):
    config = tmp_path / "bad.cfg"
    config.write_text("volume = 11\n")
    with pytest.raises(SystemExit) as exc:
        run_main(["single", "--config", str(config), "--nr", "2"])
    assert exc.value.code == 1


def test_missing_config_file_is_io_error(capsys):
    assert run_main(["single", "--config", "/nonexistent.cfg", "--nr", "2"]) == 3
    assert "cannot read config" in capsys.readouterr().err


def test_validate_maps_failures_to_exit_two(monkeypatch, capsys):
    from segchain import validation

    monkeypatch.setattr(validation, "run_validation",
                        lambda level="fast", seed=0: [CheckResult("stub", 0.0, 1.0)])
    assert run_main(["validate"]) == 0
    monkeypatch.setattr(validation, "run_validation",
                        lambda level="fast", seed=0: [CheckResult("stub", 2.0, 1.0)])
    assert run_main(["validate"]) == 2
    out = capsys.readouterr().out
    assert "CHECK stub FAIL" in out
    assert "0/1 checks passed" in out


class _SerialPool:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False

    def map(self, func, tasks, chunksize=1):
        return [func(t) for t in tasks]


def test_figure_grid_shape(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(cli, "ProcessPoolExecutor", _SerialPool)
    monkeypatch.setattr(cli, "_L0_GRID", [50.0])
    out_dir = tmp_path / "figs"
    assert run_main(["figure", "fig4b", "--out", str(out_dir)]) == 0
    path = out_dir / "fig4b.csv"
    assert path.exists()
    with open(path, newline="") as fh:
        header = fh.readline().strip().split(",")
    assert header == cli.COLUMNS + ["plob_hz"]
    rows = read_csv(path)
    assert len(rows) == 24  # 4 schemes x 3 stages x 2 distances x 1 hop length
    keys = [(r["scheme"], r["stage"], float(r["L0_km"]), float(r["L_km"]), int(r["Nr"]))
            for r in rows]
    assert keys == sorted(keys)
    assert f"wrote {path} (24 rows)" in capsys.readouterr().out


def test_dead_range_row_is_all_zeros():
    row = cli._range_row(("seg-ed", 1, 150.0, 12))
    assert row["Nr"] == 0
    assert row["L_km"] == 0.0
    assert row["K_hz"] == 0.0
    assert cli._fmt(row["C_K"]) == "inf"
