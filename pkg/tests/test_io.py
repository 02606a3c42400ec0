import numpy as np
import pytest

from pcm_threshold import DomainError, FormatError, SweepCurve, SweepPoint, build_perfect_pcm
from pcm_threshold.consistency import ConsistencyConfig
from pcm_threshold.io import (
    format_pcm,
    parse_pcm_file,
    parse_pcm_text,
    provenance_path,
    read_config_file,
    read_curve_csv,
    read_table_csv,
    write_curve_csv,
    write_table_csv,
)
from pcm_threshold.pipeline import ThresholdRow, ThresholdTable


def test_parse_pcm_examples():
    pcm = parse_pcm_text("1 0.5\n2 1\n")
    assert pcm.n == 2 and pcm.reciprocal
    with pytest.raises(FormatError):
        parse_pcm_text("1 2 3\n0.5 1\n")
    with pytest.raises(DomainError):
        parse_pcm_text("1 -2\n-0.5 1\n")
    with pytest.raises(FormatError):
        parse_pcm_text("1.1 2\n0.5 1\n")
    with pytest.raises(FormatError):
        parse_pcm_text("1 x\n0.5 1\n")


def test_parse_pcm_tolerates_near_unit_diagonal_and_reports_non_reciprocal():
    pcm = parse_pcm_text("1.0000000001 2\n0.4 1\n")
    assert pcm.entries[0, 0] == 1.0
    assert not pcm.reciprocal


def test_pcm_file_round_trip(tmp_path):
    pcm = build_perfect_pcm([1, 3**0.5, 3])
    path = tmp_path / "m.txt"
    path.write_text(format_pcm(pcm))
    assert parse_pcm_file(path) == pcm
    with pytest.raises(FormatError):
        parse_pcm_file(tmp_path / "missing.txt")


def test_curve_single_point(tmp_path):
    path = tmp_path / "c.csv"
    write_curve_csv(SweepCurve([SweepPoint(0.0, 0.0, 1.0)]), path)
    assert path.read_text() == "delta,delta_max_pct,i_min\n0.000000000,0.000000000,1.000000000\n"


def test_curve_round_trip(tmp_path, rng):
    pts = [SweepPoint(d, 40 * rng.random(), rng.random()) for d in np.linspace(0, 0.5, 7)]
    curve = SweepCurve(pts, {"algo": "exhaustive", "consistency": "identity/pair_extremes"})
    path = tmp_path / "c.csv"
    write_curve_csv(curve, path)
    back = read_curve_csv(path)
    assert back.provenance == curve.provenance
    for a, b in zip(curve.points, back.points):
        assert abs(a.delta - b.delta) <= 1e-9
        assert abs(a.delta_max_pct - b.delta_max_pct) <= 1e-9
        assert abs(a.i_min - b.i_min) <= 1e-9
    # rewriting what was read is byte-stable
    path2 = tmp_path / "c2.csv"
    write_curve_csv(back, path2)
    assert path2.read_text() == path.read_text()


def test_empty_curve_is_header_only(tmp_path):
    path = tmp_path / "e.csv"
    write_curve_csv(SweepCurve([]), path)
    assert path.read_text() == "delta,delta_max_pct,i_min\n"
    assert read_curve_csv(path).points == []


def test_bad_curve_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(FormatError):
        read_curve_csv(path)


def test_table_round_trip(tmp_path):
    table = ThresholdTable([ThresholdRow(10, 0.9), ThresholdRow(20, 0.8, True)], 0.95, ConsistencyConfig("square"))
    path = tmp_path / "t.csv"
    write_table_csv(table, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "delta_pct,threshold"
    assert lines[1] == "floor,0.950000000"
    back = read_table_csv(path)
    assert back.consistency == ConsistencyConfig("square")
    assert back.floor_threshold == 0.95
    assert [r.clamped for r in back.rows] == [False, True]
    assert provenance_path(path).name == "t.provenance.json"


def test_table_without_sidecar_defaults(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("delta_pct,threshold\nfloor,0.95\n10,0.94\n")
    t = read_table_csv(path)
    assert t.consistency == ConsistencyConfig() and t.rows[0].threshold == 0.94


def test_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# experiment\nweights = 1,2,4\ndelta_step = 0.05   # coarse\nhalf-matrix = false\n")
    assert read_config_file(path) == {"weights": "1,2,4", "delta-step": "0.05", "half-matrix": "false"}
    path.write_text("no equals sign\n")
    with pytest.raises(FormatError):
        read_config_file(path)
