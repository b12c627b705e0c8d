import json

import pytest

from liqspec.cli import main
from liqspec.ingest import read_ticks, write_ticks
from liqspec.synth import RateProfile, generate, two_level_profile

from conftest import series_from_arrays


@pytest.fixture
def two_level_csv(tmp_path):
    path = tmp_path / "ticks.csv"
    with open(path, "w") as fh:
        write_ticks(generate(two_level_profile()), fh)
    return path


def _outputs(directory):
    return sorted(p.name for p in directory.iterdir()) if directory.exists() else []


def test_analyze_two_level(two_level_csv, tmp_path, capsys):
    out = tmp_path / "out"
    rc = main(["analyze", str(two_level_csv), "--d", "2", "--out-dir", str(out)])
    assert rc == 0
    lines = dict(line.split(" = ") for line in capsys.readouterr().out.strip().splitlines())
    assert float(lines["lambda_H"]) == pytest.approx(200.0, rel=1e-10)
    assert float(lines["lambda_L"]) == pytest.approx(10.0, rel=1e-10)
    assert float(lines["p_H"]) == pytest.approx(101.0, abs=1e-9)
    assert _outputs(out) == ["curves.csv", "histogram.csv", "report.json"]
    report = json.loads((out / "report.json").read_text())
    assert report["schema"] == 1
    assert report["retained"] == 2
    assert report["impact"]["degenerate"] is False
    curves = (out / "curves.csv").read_text().splitlines()
    assert curves[0] == "P,I,w_H,w_L" and len(curves) == 513
    hist = (out / "histogram.csv").read_text().splitlines()[1:]
    assert sum(int(line.split(",")[1]) for line in hist) == 20000 + 1000


def test_seventeen_digit_floats(two_level_csv, tmp_path):
    main(["analyze", str(two_level_csv), "--d", "3", "--out-dir", str(tmp_path)])
    row = (tmp_path / "curves.csv").read_text().splitlines()[1].split(",")
    assert any(len(x.replace("-", "").replace(".", "").lstrip("0")) == 17 for x in row)
    text = (tmp_path / "report.json").read_text()
    assert json.loads(text)["p_H"] == pytest.approx(101.0)


def test_outputs_are_byte_identical_across_runs(two_level_csv, tmp_path):
    for name in ("a", "b"):
        assert main(["analyze", str(two_level_csv), "--d", "4", "--out-dir", str(tmp_path / name)]) == 0
    for f in ("report.json", "curves.csv", "histogram.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_dumps(two_level_csv, tmp_path):
    gram, spec = tmp_path / "gram.csv", tmp_path / "spec.csv"
    rc = main(["analyze", str(two_level_csv), "--d", "3", "--out-dir", str(tmp_path),
               "--dump-gram", str(gram), "--dump-spectrum", str(spec)])
    assert rc == 0
    g = gram.read_text().splitlines()
    assert g[0].startswith("# d=3,basis=chebyshev")
    assert len(g) == 2 + 2 * 3
    s = spec.read_text().splitlines()
    assert s[0] == "i,lambda,c0,c1,c2" and len(s) == 1 + 2


def test_missing_file_exit_2(tmp_path):
    out = tmp_path / "out"
    assert main(["analyze", str(tmp_path / "nope.csv"), "--out-dir", str(out)]) == 2
    assert _outputs(out) == []


def test_parse_error_exit_2(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("34200000000000,1,5\n34200000000001,1,3\n")
    assert main(["analyze", str(path), "--out-dir", str(tmp_path / "o")]) == 2
    assert _outputs(tmp_path / "o") == []


def test_degenerate_time_exit_3(tmp_path):
    path = tmp_path / "flat.csv"
    path.write_text("34200000000000,1,5\n34200000000000,2,8\n")
    assert main(["analyze", str(path), "--d", "2", "--out-dir", str(tmp_path / "o")]) == 3
    assert _outputs(tmp_path / "o") == []


def test_non_convergence_exit_4(two_level_csv, tmp_path, monkeypatch):
    import liqspec.spectrum as spectrum_mod
    from liqspec.linalg import jacobi_eigh

    monkeypatch.setattr(spectrum_mod, "jacobi_eigh", lambda a: jacobi_eigh(a, max_sweeps=0))
    assert main(["analyze", str(two_level_csv), "--d", "3", "--out-dir", str(tmp_path / "o")]) == 4
    assert _outputs(tmp_path / "o") == []


def test_session_filter_and_full_day(tmp_path, capsys):
    open_ns = 34_200 * 10**9
    series = series_from_arrays(
        [open_ns - 10**9, open_ns, open_ns + 10**9, open_ns + 2 * 10**9],
        ["9.00", "10.00", "10.00", "11.00"],
        [100, 110, 150, 170],
    )
    path = tmp_path / "t.csv"
    with open(path, "w") as fh:
        write_ticks(series, fh)
    assert main(["histogram", str(path), "--out-dir", str(tmp_path)]) == 0
    assert "total_volume = 70" in capsys.readouterr().out
    assert main(["histogram", str(path), "--full-day", "--out-dir", str(tmp_path)]) == 0
    assert "total_volume = 170" in capsys.readouterr().out


def test_simulate_round_trip(tmp_path):
    profile = tmp_path / "profile.json"
    profile.write_text(json.dumps({
        "levels": [
            {"price": "101.00", "rate": 200, "dwell": 100, "spacing": 1, "size": 200},
            {"price": "99.00", "rate": 10, "dwell": 100, "spacing": 1, "size": 10},
        ]
    }))
    out = tmp_path / "sim.csv"
    assert main(["simulate", "--profile", str(profile), "--out", str(out)]) == 0
    expected = generate(RateProfile.from_json(profile.read_text()))
    assert read_ticks(out) == expected
    assert main(["analyze", str(out), "--d", "2", "--out-dir", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["lambda_H"] == pytest.approx(200.0, rel=1e-10)
    assert report["lambda_L"] == pytest.approx(10.0, rel=1e-10)


def test_simulate_empty_profile_exit_2(tmp_path):
    profile = tmp_path / "empty.json"
    profile.write_text(json.dumps({"levels": []}))
    out = tmp_path / "sim.csv"
    assert main(["simulate", "--profile", str(profile), "--out", str(out)]) == 2
    assert not out.exists()


def test_usage_errors_exit_2(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["analyze"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["analyze", "x.csv", "--bin-width", "abc"])
    assert info.value.code == 2
    assert main(["analyze", str(tmp_path / "x.csv"), "--d", "0"]) == 2
