import json

import pytest

from kbhom.cli import main
from kbhom.engine import HodgeDiamond, hodge_diamond, kb_homology
from kbhom.zoo import hodge_formal, parallelizable, save_model, torus, write_model


def write_json(path, obj):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return str(path)


@pytest.fixture
def torus1_file(tmp_path):
    p = tmp_path / "torus1.json"
    write_model(torus(1), p)
    return str(p)


@pytest.fixture
def torus1_table(tmp_path):
    return write_json(tmp_path / "t1.json",
                      {"n": 1, "dims": {"0": 1, "1": 2, "2": 1}})


@pytest.fixture
def surface_table(tmp_path):
    return write_json(tmp_path / "surface.json",
                      {"n": 2, "dims": {"0": 1, "1": 4, "2": 6, "3": 4, "4": 1}})


def run_json(capsys, argv):
    rc = main(argv + ["--json", "--no-timestamp"])
    out = capsys.readouterr().out
    return rc, json.loads(out)


def test_check_valid_model(torus1_file, capsys):
    assert main(["check", torus1_file]) == 0
    out = capsys.readouterr().out
    assert "result: PASS" in out


def test_check_bad_json(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{", encoding="utf-8")
    assert main(["check", str(p)]) == 1
    assert "parse error" in capsys.readouterr().err


def test_check_missing_file(tmp_path, capsys):
    assert main(["check", str(tmp_path / "nope.json")]) == 1


def test_check_corrupted_matrix_shape_exits_1(tmp_path, capsys):
    data = save_model(torus(1))
    data["delbar"] = [{"from": [0, 0], "matrix": [["1", "1"]]}]
    p = tmp_path / "shape.json"
    write_json(p, data)
    assert main(["check", str(p)]) == 1
    assert "parse error" in capsys.readouterr().err


def test_check_broken_anticommutation(tmp_path, capsys):
    data = save_model(torus(1))
    data["del"] = [{"from": [0, 0], "matrix": [["1"]]},
                   {"from": [0, 1], "matrix": [["1"]]}]
    data["delbar"] = [{"from": [0, 0], "matrix": [["1"]]},
                      {"from": [1, 0], "matrix": [["1"]]}]
    p = tmp_path / "anti.json"
    write_json(p, data)
    assert main(["check", str(p)]) == 2
    out = capsys.readouterr().out
    assert "FAIL  del∘delbar + delbar∘del  at bidegree (0, 0)" in out


def test_check_json_report(torus1_file, capsys):
    rc, report = run_json(capsys, ["check", torus1_file])
    assert rc == 0
    assert report["results"]["ok"] is True
    assert len(report["results"]["checks"]) == 5


def test_compute_torus(torus1_file, capsys):
    rc, report = run_json(capsys, ["compute", torus1_file, "--pages", "1"])
    assert rc == 0
    assert report["results"]["kb"] == {"n": 1, "dims": {"0": 1, "1": 2, "2": 1}}
    assert report["results"]["euler_characteristic"] == 0
    assert report["results"]["degeneration_page"] == 1


def test_compute_formal_p2(tmp_path, capsys):
    model = hodge_formal(HodgeDiamond(2, {(0, 0): 1, (1, 1): 1, (2, 2): 1}))
    p = tmp_path / "p2.json"
    write_model(model, p)
    rc, report = run_json(capsys, ["compute", str(p)])
    assert rc == 0
    assert report["results"]["kb"]["dims"] == {"0": 0, "1": 0, "2": 3, "3": 0, "4": 0}
    assert report["results"]["euler_characteristic"] == 3


def test_compute_parallelizable_matches_hodge_sums(tmp_path, capsys):
    model = parallelizable(3, {(1, 2, 3): 1})
    p = tmp_path / "nil3.json"
    write_model(model, p)
    rc, report = run_json(capsys, ["compute", str(p)])
    assert rc == 0
    diamond = hodge_diamond(model)
    for k in range(7):
        expected = sum(v for (pp, q), v in diamond.h.items() if pp - q == 3 - k)
        assert report["results"]["kb"]["dims"][str(k)] == expected


def test_compute_text_and_json_agree(torus1_file, capsys):
    assert main(["compute", torus1_file]) == 0
    text = capsys.readouterr().out
    rc, report = run_json(capsys, ["compute", torus1_file])
    for k, dim in report["results"]["kb"]["dims"].items():
        assert f"  {k}  {dim}" in text
    assert f"euler characteristic: {report['results']['euler_characteristic']}" in text


def test_compute_json_deterministic(torus1_file, capsys):
    main(["compute", torus1_file, "--json", "--no-timestamp"])
    first = capsys.readouterr().out
    main(["compute", torus1_file, "--json", "--no-timestamp"])
    second = capsys.readouterr().out
    assert first == second


def test_compute_timestamp_present_by_default(torus1_file, capsys):
    main(["compute", torus1_file, "--json"])
    report = json.loads(capsys.readouterr().out)
    assert "timestamp" in report


def test_stein_zero_bivector(tmp_path, capsys):
    pi = write_json(tmp_path / "pi0.json", [])
    rc, report = run_json(capsys, ["stein", pi, "--n", "1", "--weights", "0..2"])
    assert rc == 0
    hom = report["results"]["homology"]
    for w in ("0", "1", "2"):
        assert hom[w] == {"0": 1, "1": 1}


def test_stein_constant_bivector_weight_zero(tmp_path, capsys):
    pi = write_json(tmp_path / "pi.json",
                    [{"i": 1, "j": 2, "coeff": "1", "alpha": [0, 0]}])
    rc, report = run_json(capsys, ["stein", pi, "--n", "2", "--weights", "0"])
    assert rc == 0
    assert report["results"]["homology"]["0"] == {"0": 0, "1": 0, "2": 0}


def test_stein_mixed_degree_exits_2(tmp_path, capsys):
    pi = write_json(tmp_path / "bad.json",
                    [{"i": 1, "j": 2, "coeff": "1", "alpha": [0, 0]},
                     {"i": 1, "j": 2, "coeff": "1", "alpha": [1, 0]}])
    assert main(["stein", pi, "--n", "2", "--weights", "0"]) == 2
    assert "validation error" in capsys.readouterr().err


def test_stein_cap_exceeded_exits_3(tmp_path, capsys):
    pi = write_json(tmp_path / "pi.json",
                    [{"i": 1, "j": 2, "coeff": "1", "alpha": [0, 0]}])
    assert main(["stein", pi, "--n", "2", "--weights", "40"]) == 3
    assert "inconsistency" in capsys.readouterr().err


def test_kunneth_cli(torus1_table, capsys):
    rc, report = run_json(capsys, ["kunneth", torus1_table, torus1_table,
                                   "--assert-compact"])
    assert rc == 0
    assert report["results"]["kb"]["dims"] == {
        "0": 1, "1": 4, "2": 6, "3": 4, "4": 1}
    assert report["metadata"]["compact_factor_asserted"] is True


def test_kunneth_without_assert_flag_is_recorded(torus1_table, capsys):
    rc, report = run_json(capsys, ["kunneth", torus1_table, torus1_table])
    assert report["metadata"]["compact_factor_asserted"] is False


def test_leray_hirsch_cli(tmp_path, capsys):
    table = write_json(tmp_path / "hh.json", {"dims": {"0": 1}})
    rc, report = run_json(capsys, ["leray-hirsch", table,
                                   "--classes", "0,0;1,1"])
    assert rc == 0
    assert report["results"]["hh"]["dims"] == {"0": 2}


def test_flag_cli(capsys):
    rc, report = run_json(capsys, ["flag", "--n", "2", "--betti", "3"])
    assert rc == 0
    assert report["results"]["kb"]["dims"]["2"] == 3
    assert report["results"]["euler_characteristic"] == 3


def test_pbundle_cli(tmp_path, capsys):
    diamond = write_json(tmp_path / "pt.json", {"n": 0, "h": {"0,0": 1}})
    rc, report = run_json(capsys, ["pbundle", diamond, "-r", "3"])
    assert rc == 0
    assert report["results"]["hodge"] == {
        "n": 2, "h": {"0,0": 1, "1,1": 1, "2,2": 1}}


def test_blowup_cli(surface_table, tmp_path, capsys):
    y = write_json(tmp_path / "y.json", {"n": 0, "dims": {"0": 1}})
    e = write_json(tmp_path / "e.json", {"n": 1, "dims": {"1": 2}})
    rc, report = run_json(capsys, ["blowup", surface_table, y, e, "-r", "2",
                                   "--assert-star"])
    assert rc == 0
    assert report["results"]["kb"]["dims"] == {
        "0": 1, "1": 4, "2": 7, "3": 4, "4": 1}
    assert report["metadata"]["abelian_conormal_asserted"] is True


def test_blowup_inconsistent_exits_3(tmp_path, capsys):
    x = write_json(tmp_path / "x.json", {"n": 2, "dims": {}})
    y = write_json(tmp_path / "y.json", {"n": 0, "dims": {"0": 1}})
    e = write_json(tmp_path / "e.json", {"n": 1, "dims": {}})
    assert main(["blowup", x, y, e, "-r", "2"]) == 3
    assert "inconsistency" in capsys.readouterr().err


def test_blowup_point_cli(surface_table, capsys):
    rc, report = run_json(capsys, ["blowup-point", surface_table])
    assert rc == 0
    assert report["results"]["kb"]["dims"]["2"] == 7


def test_mv_check_consistent(torus1_table, capsys):
    rc, report = run_json(capsys, ["mv-check", torus1_table, torus1_table,
                                   torus1_table, torus1_table])
    assert rc == 0
    assert report["results"]["consistent"] is True


def test_mv_check_inconsistent_exits_3(tmp_path, capsys):
    zero = write_json(tmp_path / "zero.json", {"n": 0, "dims": {}})
    pt = write_json(tmp_path / "pt.json", {"n": 0, "dims": {"0": 1}})
    rc = main(["mv-check", zero, zero, zero, pt])
    out = capsys.readouterr().out
    assert rc == 3
    assert "verdict: inconsistent" in out


def test_table_with_unknown_field_exits_1(tmp_path, capsys):
    bad = write_json(tmp_path / "bad.json", {"n": 1, "dims": {}, "extra": 1})
    assert main(["blowup-point", bad]) == 1


def test_unknown_command_exits_1(capsys):
    assert main(["frobnicate"]) == 1


def test_round_trip_reports_identical(tmp_path, capsys):
    model = parallelizable(3, {(1, 2, 3): 1}, {(1, 2): 1})
    p1 = tmp_path / "m1.json"
    p2 = tmp_path / "m2.json"
    write_model(model, p1)
    from kbhom.zoo import read_model
    write_model(read_model(p1), p2)
    main(["compute", str(p1), "--json", "--no-timestamp"])
    first = capsys.readouterr().out
    main(["compute", str(p2), "--json", "--no-timestamp"])
    second = capsys.readouterr().out
    assert first.replace(str(p1), "X") == second.replace(str(p2), "X")
    assert kb_homology(model).dims == {
        int(k): v
        for k, v in json.loads(first)["results"]["kb"]["dims"].items() if v}
