from __future__ import annotations

import json

import pytest

from fewnomial.cli import main


def run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def test_analyze_no_oracle(capsys, ex18_path):
    rc, out, err = run(capsys, "analyze", str(ex18_path), "--no-oracle")
    assert rc == 0
    d = json.loads(out)
    assert d["certified_bound"] == 3 and d["m"] == 2
    assert "oracle" not in d


def test_analyze_with_oracle_to_file(capsys, tmp_path, ex18_path):
    out = tmp_path / "r.json"
    pgm = tmp_path / "s.pgm"
    rc, stdout, _ = run(capsys, "analyze", str(ex18_path), "--resolution", "256", "--out", str(out), "--pgm", str(pgm))
    assert rc == 0 and stdout == ""
    d = json.loads(out.read_text())
    assert d["oracle"]["point_count"] == 3
    assert pgm.read_bytes().startswith(b"P")


def test_analyze_deterministic(capsys, tmp_path, ex18_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert run(capsys, "analyze", str(ex18_path), "--no-oracle", "--out", str(p))[0] == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_malformed_instance(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 2, "columns": [[0, 0]]')
    rc, _, err = run(capsys, "analyze", str(bad))
    assert rc == 1 and err.startswith("error [parse]")


def test_missing_file(capsys, tmp_path):
    rc, _, err = run(capsys, "contour", str(tmp_path / "nope.json"))
    assert rc == 1 and err.startswith("error [io]")


def test_degenerate_instance_reports_stage(capsys, tmp_path):
    p = tmp_path / "deg.json"
    p.write_text(json.dumps({"n": 2, "exponents": [list(range(5)), list(range(5))], "signs": [1, -1, -1, 1, 1]}))
    rc, _, err = run(capsys, "analyze", str(p), "--no-oracle")
    assert rc == 1 and err.startswith("error [normalize]")


def test_bad_resolution(capsys, ex18_path):
    rc, _, err = run(capsys, "analyze", str(ex18_path), "--resolution", "8")
    assert rc == 1 and err.startswith("error [config]")


def test_contour_csv_and_svg(capsys, tmp_path, ex18_path):
    csv_path, svg = tmp_path / "c.csv", tmp_path / "c.svg"
    rc, _, _ = run(capsys, "contour", str(ex18_path), "--out", str(csv_path), "--svg", str(svg))
    assert rc == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "mu,y1,y2,dc1,dc2,segment_id"
    assert {ln.split(",")[5] for ln in lines[1:]} == {"0", "1", "2"}
    text = svg.read_text()
    assert text.count("<polyline") == 3
    again = tmp_path / "d.csv"
    run(capsys, "contour", str(ex18_path), "--out", str(again))
    assert again.read_bytes() == csv_path.read_bytes()


def test_contour_empty_domain(capsys, tmp_path):
    p = tmp_path / "pos.json"
    p.write_text(json.dumps({"n": 2, "exponents": [[0, 1, 0, 2, 1], [0, 0, 1, 1, 3]], "signs": [1] * 5}))
    rc, out, err = run(capsys, "contour", str(p))
    assert rc == 0 and "warning" in err
    assert len(out.splitlines()) == 1


def test_verify_vacuous(capsys):
    rc, out, _ = run(capsys, "verify", "--count", "0")
    assert rc == 0 and "all invariants pass" in out


def test_verify_reproducible(capsys):
    a = run(capsys, "verify", "--seed", "3", "--count", "2", "--nmax", "3")
    b = run(capsys, "verify", "--seed", "3", "--count", "2", "--nmax", "3")
    assert a[0] == 0 and a == b


def test_verify_rejects_negative_count(capsys):
    assert run(capsys, "verify", "--count", "-1")[0] == 1


def test_usage_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
