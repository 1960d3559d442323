import csv
import json
from pathlib import Path

import pytest

from logsurf.cli import main
from logsurf.io import bundled_examples, bundled_text, dumps, load_pair, pair_from_dict, pair_to_dict

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("name", bundled_examples())
def test_classify_matches_golden(capsys, name):
    code, out, _ = run(capsys, "classify", "--json", name)
    assert code == 0
    assert out == (GOLDEN / f"{name}.json").read_text()


@pytest.mark.parametrize("name", bundled_examples())
def test_report_round_trip_is_byte_identical(capsys, name):
    _, out, _ = run(capsys, "classify", "--json", name)
    assert dumps(json.loads(out)) == out


@pytest.mark.parametrize("name", bundled_examples())
def test_pair_file_round_trip(name):
    p = pair_from_dict(json.loads(bundled_text(name)))
    text = dumps(pair_to_dict(p))
    assert pair_from_dict(json.loads(text)) == p
    assert dumps(pair_to_dict(pair_from_dict(json.loads(text)))) == text


def test_classify_text(capsys):
    code, out, _ = run(capsys, "classify", "p2-quartic")
    assert code == 0
    assert "edge KE metric for small cone angles: yes" in out
    assert "ample threshold: 3/4 (not attained); binding: H" in out


def test_boundary_minus2_report(capsys):
    _, out, _ = run(capsys, "classify", "--json", "boundary-minus2")
    r = json.loads(out)
    assert r["ke_edge_small_angles"] == "no"
    assert [c["label"] for c in r["obstructions"]["boundary_minus2"]] == ["E"]


def test_classify_from_file_and_batch(capsys, tmp_path):
    src = tmp_path / "pairs"
    src.mkdir()
    for n in ("p2-quartic", "boundary-minus2"):
        (src / f"{n}.json").write_text(bundled_text(n))
    out_dir = tmp_path / "reports"
    files = sorted(str(f) for f in src.iterdir())
    code, _, _ = run(capsys, "classify", "--json", "--batch", str(out_dir), "--jobs", "2", *files)
    assert code == 0
    for n in ("p2-quartic", "boundary-minus2"):
        assert (out_dir / f"{n}.json").read_text() == (GOLDEN / f"{n}.json").read_text()


def test_non_symmetric_gram_exit_2(capsys, tmp_path):
    d = json.loads(bundled_text("blowup-line"))
    d["gram"][0][1] = 1
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(d))
    code, _, err = run(capsys, "classify", str(f))
    assert code == 2
    assert ".gram" in err


def test_schema_errors_exit_2(capsys, tmp_path):
    f = tmp_path / "bad.json"
    f.write_text('{"rank": 1, "gram": [[1]], "K": [-3], "chi": 3}')
    code, _, err = run(capsys, "bmy", str(f))
    assert code == 2 and ".sigma" in err
    f.write_text("{not json")
    assert run(capsys, "bmy", str(f))[0] == 2
    assert run(capsys, "bmy", str(tmp_path / "missing.json"))[0] == 2


def test_catalog_inconsistency_exit_2(capsys, tmp_path):
    d = json.loads(bundled_text("interior-minus2"))
    d["curves"] = [c for c in d["curves"] if c.get("label") != "C"]
    f = tmp_path / "incomplete.json"
    f.write_text(json.dumps(d))
    code, _, err = run(capsys, "classify", str(f))
    assert code == 2 and "catalog inconsistency" in err


def test_threshold_command(capsys):
    code, out, _ = run(capsys, "threshold", "--json", "p2-quartic")
    r = json.loads(out)
    assert code == 0 and r["ample"]["value"] == "3/4" and r["nef"]["strict"] is True
    code, out, _ = run(capsys, "threshold", "--property", "nef", "p2-line")
    assert code == 0 and "nef threshold: none" in out


def test_bmy_command(capsys):
    for name, line in (("p2-quartic", "1 < 21"), ("p2-empty-boundary", "9 = 9"), ("boundary-minus2", "9 < 24")):
        code, out, _ = run(capsys, "bmy", name)
        assert code == 0 and line in out, out
    _, out, _ = run(capsys, "bmy", "--json", "p2-quartic")
    rows = json.loads(out)["identity_table"]
    assert [r["alpha"] for r in rows] == ["1/2", "3/4", "9/10", "1"]
    assert all(r["identity_holds"] for r in rows)


def test_edge_invariants_command(capsys):
    code, out, _ = run(capsys, "edge-invariants", "--json", "--alpha", "9/10", "p2-quartic")
    row = json.loads(out)["rows"][0]
    assert code == 0
    assert (row["chi_alpha"], row["sigma_alpha"], row["l_alpha_sq"]) == ("33/5", "-107/25", "9/25")


def test_reider_command(capsys):
    code, out, _ = run(capsys, "reider", "--json", "p2-quartic")
    r = json.loads(out)
    assert code == 0 and r["n"] == 8 and r["adjoint_square"] == "9" and r["base_point_free"] == "yes"
    assert run(capsys, "reider", "p2-line")[0] == 2


def test_reider_cap_exit_2(capsys):
    assert run(capsys, "reider", "--n-max", "7", "p2-quartic")[0] == 2


def test_fano_command(capsys):
    code, out, _ = run(capsys, "fano", "--alpha", "1/2", "p2-conic-fano")
    assert code == 0 and "ample: yes" in out


def test_cone_solve_command(capsys, tmp_path):
    code, out, _ = run(capsys, "cone-solve", "--json", "--alpha", "0.5", "--radius", "0.5", "--grid", "2000")
    r = json.loads(out)
    assert code == 0 and abs(r["cone_angle_estimate"] - 3.141592653589793) < 1e-4
    dump = tmp_path / "out.csv"
    code, _, _ = run(capsys, "cone-solve", "--alpha", "0.9", "--dump", str(dump))
    assert code == 0
    with open(dump) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["rho", "phi", "K"] and len(rows) == 2002


def test_cone_solve_usage_errors(capsys):
    for argv in (["--alpha", "1.0"], ["--alpha", "0"], ["--alpha", "0.5", "--grid", "10"]):
        with pytest.raises(SystemExit) as e:
            main(["cone-solve", *argv])
        assert e.value.code == 2
    capsys.readouterr()


def test_cone_solve_tolerance_exit_3(capsys):
    code, out, _ = run(capsys, "cone-solve", "--alpha", "0.5", "--grid", "100", "--tol", "1e-12")
    assert code == 3 and "residual above tolerance" in out


def test_lelong_command(capsys, tmp_path):
    dump = tmp_path / "nu.csv"
    code, out, _ = run(capsys, "lelong", "--json", "--alpha", "0.5", "--dump", str(dump))
    r = json.loads(out)
    assert code == 0 and abs(r["fitted_exponent"] - 1.0) < 0.02
    assert dump.read_text().splitlines()[0] == "r,nu"
    assert run(capsys, "lelong", "--alpha", "0.5", "--offset", "0.01")[0] == 2


def test_examples_command(capsys, tmp_path):
    code, out, _ = run(capsys, "examples")
    assert code == 0 and out.split() == bundled_examples()
    code, _, _ = run(capsys, "examples", "--export", str(tmp_path))
    assert code == 0
    for n in bundled_examples():
        assert load_pair(tmp_path / f"{n}.json") == load_pair(n)
    assert run(capsys, "examples", "nope")[0] == 2
