import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given, strategies as st

from opholder import cli
from opholder.bounds_verifier import ExperimentRecord, ROW_FIELDS, exponent_fit, scaled_sweep
from opholder import functions as fn
from opholder.report import emit_csv, emit_json, emit_svg, format_value, read_csv
from opholder.sampling import hermitian, hermitian_direction


def _rec(rows):
    return ExperimentRecord("x", "demo", {"dims": [2, 4]}, 7, rows)


def _row(i, d, v):
    return {"tag": "demo", "trial": i, "phase": "random", "dim": 3, "seed": 7,
            "delta": d, "numerator": v, "denominator": d, "ratio": v / d}


def test_empty_record_header_only(tmp_path):
    p = emit_csv(_rec([]), tmp_path / "e.csv", ROW_FIELDS)
    assert p.read_text() == ",".join(ROW_FIELDS) + "\n"


@given(st.lists(st.floats(1e-300, 1e300), min_size=1, max_size=20))
def test_csv_round_trip_exact(tmp_path_factory, values):
    rows = [_row(i, v, v) for i, v in enumerate(values)]
    p = emit_csv(rows, tmp_path_factory.mktemp("c") / "r.csv", ROW_FIELDS)
    back = read_csv(p)
    assert [r["numerator"] for r in back] == values
    assert [r["trial"] for r in back] == list(range(len(values)))


def test_seventeen_digits():
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(3) == "3"


def test_large_record_row_count(tmp_path):
    rows = [_row(i, 0.5, 0.25) for i in range(10_000)]
    assert len(read_csv(emit_csv(rows, tmp_path / "big.csv", ROW_FIELDS))) == 10_000


def test_json_handles_numpy(tmp_path):
    p = emit_json({"a": np.float64(1.5), "b": np.arange(3), "c": np.inf}, tmp_path / "s.json")
    assert json.loads(p.read_text()) == {"a": 1.5, "b": [0, 1, 2], "c": "inf"}


def test_svg_single_point(tmp_path):
    p = emit_svg(_rec([_row(0, 0.1, 0.2)]), "loglog-slope", tmp_path / "one.svg")
    root = ET.parse(p).getroot()
    ns = "{http://www.w3.org/2000/svg}"
    assert len(root.findall(f"{ns}circle")) == 1
    assert root.findall(f"{ns}line") == []


def test_svg_slope_matches_fit(tmp_path, rng):
    A, K = hermitian(rng, 5), hermitian_direction(rng, 5)
    rec = scaled_sweep(fn.abs_power(0.5), A, K, np.geomspace(1e-4, 1e-1, 9))
    p = emit_svg(rec, "loglog-slope", tmp_path / "s.svg")
    slope_el = [el for el in ET.parse(p).getroot().iter() if el.get("class") == "slope"][0]
    assert abs(float(slope_el.get("data-slope")) - exponent_fit(rec)["slope"]) <= 1e-9
    text = ET.tostring(ET.parse(p).getroot(), encoding="unicode")
    assert "tag=sweep" in text and "seed=0" in text


def test_svg_kinds_and_errors(tmp_path):
    rec = _rec([_row(i, 10.0 ** -i, 0.5 ** i) for i in range(1, 5)])
    ET.parse(emit_svg(rec, "ratio-vs-delta", tmp_path / "r.svg"))
    ET.parse(emit_svg([{"set": "{1 2}", "kappa": 1}], "kappa-table", tmp_path / "k.svg"))
    with pytest.raises(ValueError):
        emit_svg(_rec([]), "ratio-vs-delta", tmp_path / "x.svg")
    with pytest.raises(ValueError):
        emit_svg(rec, "pie", tmp_path / "x.svg")


def test_config_parsing(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# demo\nseed = 7\ntrials = 20\ndims = 1, 8\nalphas = 0.25,0.5\n")
    args = cli.build_parser().parse_args(["bks", "--config", str(cfg), "--out", str(tmp_path)])
    rc = cli.config_from_args(args)
    assert rc.seed == 7 and rc.get("dims") == (1, 8) and rc.get("trials") == 20


def test_unknown_key_named(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("seed = 1\ndimms = 3\n")
    assert cli.main(["bks", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "dimms" in capsys.readouterr().err


def test_seed_required(tmp_path):
    assert cli.main(["kappa", "--out", str(tmp_path)]) == 2


def test_bks_twice_identical(tmp_path):
    args = ["bks", "--seed", "7", "--set", "trials=200"]
    assert cli.main(args + ["--out", str(tmp_path / "a")]) == 0
    assert cli.main(args + ["--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a" / "bks.csv").read_bytes() == (tmp_path / "b" / "bks.csv").read_bytes()


def test_bks_violation_exit_code(tmp_path):
    rc = cli.main(["bks", "--seed", "0", "--set", "alphas=2.0,", "--set", "trials=300",
                   "--out", str(tmp_path)])
    assert rc == 3


def test_verify_gen_summary(tmp_path):
    assert cli.main(["verify-gen", "--seed", "1", "--set", "N=3", "--set", "trials=10",
                     "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "verify-gen.json").read_text())["summary"]
    assert summary["max_residual"] <= 1e-9
    assert summary["rows"] == len(read_csv(tmp_path / "verify-gen.csv"))


def test_report_indexes_outputs(tmp_path):
    cli.main(["kappa", "--seed", "0", "--set", "n_max=4", "--out", str(tmp_path)])
    assert cli.main(["report", "--seed", "0", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "report.csv")
    assert rows[0]["file"] == "kappa.csv" and rows[0]["rows"] == 15


def test_tag_mismatch(tmp_path):
    cfg = tmp_path / "t.cfg"
    cfg.write_text("tag = bks\nseed = 1\n")
    assert cli.main(["kappa", "--config", str(cfg), "--out", str(tmp_path)]) == 2
