import json

import pytest

from goepel.cli import EXIT_CODES, main, parse_complex


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def as_complex(pair):
    return complex(*pair)


@pytest.mark.parametrize("text,want", [
    ("1+2i", 1 + 2j), ("-0.5i", -0.5j), ("i", 1j), ("-i", -1j), ("3", 3), ("0.1-1e-3i", 0.1 - 0.001j),
    ("2j", 2j),
])
def test_parse_complex(text, want):
    assert parse_complex(text) == want


def test_eval_odd_characteristic_at_origin(capsys):
    code, out, _ = run(capsys, "eval", "--char", "1,0,1,1", "--point", "0,0")
    assert code == 0
    rep = json.loads(out)
    assert abs(as_complex(rep["value"])) < 1e-12
    assert rep["abs_err"] < 1e-12


def test_eval_matches_library(capsys):
    from goepel.theta import Characteristic, theta, validate_riemann

    code, out, _ = run(capsys, "eval", "--char", "1/2,0,0,1", "--point", "0.1+0.02i,-0.05i")
    want = theta(Characteristic("1/2", 0, 0, 1), 0.1 + 0.02j, -0.05j, validate_riemann(1j, 1j, 0.5j), 1e-12).value
    assert code == 0 and abs(as_complex(json.loads(out)["value"]) - want) < 1e-14


def test_wrong_sign_offdiagonal_exits_domain(capsys):
    code, _, err = run(capsys, "eval", "--tau12=-0.5i")
    assert code == EXIT_CODES["NotInSiegelDomain"] == 2
    assert "tau12" in err


def test_malformed_point_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["eval", "--point", "x"])
    assert exc.value.code == 64


def test_unknown_command_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["nope"])
    assert exc.value.code == 64


def test_frame_has_sixteen_entries(capsys):
    code, out, _ = run(capsys, "frame", "--point", "0.1,0.2")
    assert code == 0 and len(json.loads(out)["frame"]) == 16


def test_coeffs_at_canonical_reports_degeneracy(capsys):
    code, out, _ = run(capsys, "coeffs")
    rep = json.loads(out)
    assert code == 0
    assert abs(as_complex(rep["kummer"]["E"]) - 1) < 1e-12
    assert "DegenerateModuli" in json.dumps(rep)


def test_invert_regression(capsys):
    code, out, _ = run(capsys, "invert", "--U1", "0.05", "--U2", "0.03")
    rep = json.loads(out)
    assert code == 0
    assert abs(as_complex(rep["p22"]) - (0.9781583222973025 + 0.012972374920474794j)) < 1e-10
    assert abs(as_complex(rep["p12"]) - (0.024564445178133512 + 0.0016510419134338969j)) < 1e-10
    assert rep["residual"]["dU1"] < 1e-6 and rep["residual"]["dU2"] < 1e-6


def test_invert_at_origin_reports_branch_point(capsys):
    code, out, _ = run(capsys, "invert", "--U1", "0", "--U2", "0")
    rep = json.loads(out)
    assert code == 0
    assert rep["residual"]["error"] == "NearBranchPoint"


def test_residual_at_origin_exits_irregular(capsys):
    code, _, err = run(capsys, "residual", "--U1", "0", "--U2", "0")
    assert code == EXIT_CODES["NearBranchPoint"] == 3
    assert "branch point" in err


def test_invert_at_canonical_tau_is_degenerate(capsys):
    code, _, _ = run(capsys, "invert", "--tau11", "i", "--tau22", "i", "--tau12", "0.5i")
    assert code == EXIT_CODES["DegenerateModuli"]


def test_verify_passes(capsys):
    code, out, _ = run(capsys, "verify", "--samples", "5")
    rep = json.loads(out)
    assert code == 0
    assert rep["summary"]["failed"] == 0 and rep["summary"]["total"] == len(rep["records"])
    assert set(rep["records"][0]) == {"id", "eq", "residual", "tol", "pass", "flags", "sample"}


def test_verify_impossible_tolerance_fails(capsys):
    code, out, _ = run(capsys, "verify", "--samples", "2", "--tol-alg", "1e-30")
    assert code == 1 and json.loads(out)["summary"]["failed"] > 0


def test_verify_rejects_bad_step():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--h", "-1"])
    assert exc.value.code == 64


def test_verify_deterministic_across_workers(capsys):
    _, a, _ = run(capsys, "verify", "--samples", "6", "--seed", "3", "--workers", "1")
    _, b, _ = run(capsys, "verify", "--samples", "6", "--seed", "3", "--workers", "3")
    assert a == b


def test_out_file(tmp_path, capsys):
    path = tmp_path / "frame.json"
    code, out, _ = run(capsys, "frame", "--point", "0,0", "--out", str(path))
    assert code == 0 and out == ""
    assert "frame" in json.loads(path.read_text())
