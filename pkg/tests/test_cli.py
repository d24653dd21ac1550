import csv
import io
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bubblechaos import ChartSpec, LyapunovSettings, RegimeClass, Regime, State, cli
from bubblechaos.params import PhysicalParams, nondimensionalize
from bubblechaos.poincare import section
from bubblechaos.sweep import ChartCell, ChartGrid, evaluate_point
from bubblechaos import two_largest


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def parse(text):
    return list(csv.DictReader(io.StringIO(text)))


SHORT = ["--set", "transient_periods=50", "--set", "average_periods=100"]


def test_spectrum_csv(capsys):
    code, out, _ = run(["spectrum", "--d-over-r0", "6.75", "--p-ac", "1.7e6", "--ic",
                        "1,0,1,0"] + SHORT, capsys)
    assert code == 0
    rows = parse(out)
    assert len(rows) == 5
    assert sum(r["trivial"] == "1" for r in rows) == 1
    vals = [float(r["exponent"]) for r in rows]
    assert vals == sorted(vals, reverse=True)
    assert "\r" not in out


def test_spectrum_rejects_unknown_key(capsys):
    code, _, err = run(["spectrum", "--set", "speed=3"], capsys)
    assert code == 2
    rec = json.loads(err.strip().splitlines()[-1])
    assert rec["error"] == "ConfigError"


def test_config_file_and_exclusive_distance(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("d = 3e-5\nd_over_r0 = 10\n")
    code, _, err = run(["poincare", "--config", str(cfg)], capsys)
    assert code == 2 and "ConfigError" in err


def test_numeric_failure_exit(capsys):
    code, _, err = run(["poincare", "--set", "transient=5", "--set", "n=2",
                        "--set", "atol=1e-3", "--set", "max_steps=2"], capsys)
    assert code == 3
    assert json.loads(err.strip())["error"] == "StepLimit"


def test_poincare_and_simulate(tmp_path, capsys):
    out = tmp_path / "p.csv"
    code, _, _ = run(["poincare", "--p-ac", "0", "--ic", "1,0,1,0", "--set", "transient=2",
                      "--set", "n=4", "--out", str(out)], capsys)
    assert code == 0
    rows = parse(out.read_text())
    assert len(rows) == 4 and list(rows[0]) == ["r1", "u1", "r2", "u2"]
    code, text, _ = run(["simulate", "--set", "periods=1", "--set", "samples_per_period=5"],
                        capsys)
    assert code == 0 and len(parse(text)) == 6


def test_scan_rows_match_direct_calls(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    tree = tmp_path / "tree.csv"
    args = ["scan", "--p-ac", "1.7e6", "--ic", "1,0,1,0", "--set", "start=6.5",
            "--set", "stop=7", "--set", "steps=2", "--set", "seeding=fresh",
            "--set", "section_points=8", "--set", f"tree={tree}", "--out", str(out)] + SHORT
    assert run(args, capsys)[0] == 0
    rows = parse(out.read_text())
    assert len(rows) == 2
    settings = LyapunovSettings(transient_periods=50, average_periods=100)
    for row in rows:
        d = float(row["value"])
        dp = nondimensionalize(PhysicalParams().at(d, 1.7e6))
        pair = two_largest(dp, State(1, 0, 1, 0, 0), settings=settings)
        ser = section(dp, pair.final_state, n=8)
        assert float(row["l1"]) == pair.l1 and float(row["l2"]) == pair.l2
        mine = [float(t["r1"]) for t in parse(tree.read_text()) if float(t["value"]) == d]
        assert mine == list(ser.points[:, 0])


def test_chart_two_by_two_ppm(tmp_path, capsys):
    out = tmp_path / "chart.csv"
    args = ["chart", "--set", "d_start=6", "--set", "d_stop=7", "--set", "d_count=2",
            "--set", "p_start=1.0e6", "--set", "p_stop=1.1e6", "--set", "p_count=2",
            "--set", "section_points=8", "--out", str(out)] + SHORT
    assert run(args, capsys)[0] == 0
    data = (tmp_path / "chart.ppm").read_bytes()
    header = b"P6 2 2 255\n"
    assert data.startswith(header) and len(data) == len(header) + 12
    assert len(parse(out.read_text())) == 4


def test_workers_from_environment(monkeypatch):
    monkeypatch.setenv("BUBBLECHAOS_WORKERS", "3")
    cfg = cli.resolve(cli.build_parser().parse_args(["spectrum"]))
    assert cfg.workers == 3
    cfg = cli.resolve(cli.build_parser().parse_args(["spectrum", "--workers", "2"]))
    assert cfg.workers == 2


def _grid(kinds, status=None):
    kinds = np.asarray(kinds, dtype=object)
    n_p, n_d = kinds.shape
    cells = []
    for i_p in range(n_p):
        row = []
        for i_d in range(n_d):
            k = kinds[i_p, i_d]
            rc = RegimeClass(k, False, 1.0) if k is not None else None
            st_ = "collapsed" if k is None else "ok"
            row.append(ChartCell(i_p, i_d, float(i_d), float(i_p), st_, 0.0, 0.0, 0.0, 0.0, rc,
                                 None, 0.0, State(1, 0, 1, 0), None))
        cells.append(tuple(row))
    return ChartGrid(np.arange(n_d, dtype=float), np.arange(n_p, dtype=float), tuple(cells))


def _pixels(data, n_p, n_d):
    header = f"P6 {n_d} {n_p} 255\n".encode()
    return np.frombuffer(data[len(header):], dtype=np.uint8).reshape(n_p, n_d, 3)


def test_ppm_uniform_periodic():
    data = cli.ppm_bytes(_grid([[Regime.PERIODIC] * 4] * 3))
    assert np.all(_pixels(data, 3, 4) == [0, 0, 255])


def test_ppm_single_hyperchaotic_cell_position():
    kinds = [[Regime.PERIODIC] * 5 for _ in range(4)]
    kinds[3][1] = Regime.HYPERCHAOTIC  # highest p_ac row, second d column
    kinds[0][4] = None
    px = _pixels(cli.ppm_bytes(_grid(kinds)), 4, 5)
    red = np.argwhere(np.all(px == [220, 0, 0], axis=2))
    assert red.tolist() == [[0, 1]]
    assert px[3, 4].tolist() == [0, 0, 0]


def test_ppm_deterministic(tmp_path):
    g = _grid([[Regime.CHAOTIC, Regime.QUASIPERIODIC], [None, Regime.PERIODIC]])
    cli.render_ppm(g, tmp_path / "a.ppm")
    cli.render_ppm(g, tmp_path / "b.ppm")
    assert (tmp_path / "a.ppm").read_bytes() == (tmp_path / "b.ppm").read_bytes()


def test_render_ppm_io_error(tmp_path):
    with pytest.raises(cli.IoError):
        cli.render_ppm(_grid([[Regime.PERIODIC]]), tmp_path / "missing" / "x.ppm")


@given(st.lists(st.floats(allow_nan=False), min_size=1, max_size=20))
def test_csv_round_trip(values):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([cli.fmt(v) for v in values])
    back = [float(x) for x in next(csv.reader(io.StringIO(buf.getvalue())))]
    assert back == values


def test_csv_round_trip_of_results(tmp_path):
    res = evaluate_point(PhysicalParams().at(20, 1.2e6), State(1.05, 0, 0.95, 0),
                         settings=LyapunovSettings(transient_periods=20, average_periods=40),
                         section_points=4)
    out = tmp_path / "r.csv"
    cli.write_csv(["l1", "l2", "r1"], [(res.pair.l1, res.pair.l2, res.series.points[0, 0])],
                  str(out))
    row = parse(out.read_text())[0]
    assert float(row["l1"]) == res.pair.l1 and float(row["l2"]) == res.pair.l2
    assert float(row["r1"]) == res.series.points[0, 0]
