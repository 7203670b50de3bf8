import io
import json
import os

import pytest

from unwindlab import hopf as hp
from unwindlab.cli import cache_dir, run_command
from unwindlab.gapfile import GapError, load_gap, parse_gap, print_gap

DATA = os.path.join(os.path.dirname(__file__), os.pardir, "data")


def data(name):
    return os.path.join(DATA, name)


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_command(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


# ------------------------------------------------------------ witt


def test_witt_add_frozen():
    assert run("witt", "add", "--p", "2", "--len", "2", "1,0", "1,0") == (0, "0,1\n", "")


def test_witt_mul_and_teich():
    assert run("witt", "mul", "--p", "2", "--len", "2", "0,1", "0,1")[1] == "0,0\n"
    assert run("witt", "teich", "--p", "3", "--len", "2", "2")[1] == "2,0\n"


def test_witt_over_another_base():
    code, out, _ = run("witt", "add", "--p", "3", "--len", "2", "--base", "Zmod 9", "1,0", "8,0")
    assert code == 0 and out == "0,0\n"


def test_witt_polys_p3():
    code, out, _ = run("witt", "polys", "--p", "3", "--len", "2")
    assert code == 0
    assert "S1 = -x0^2*y0 - x0*y0^2 + x1 + y1" in out


@pytest.mark.parametrize("argv", [("witt", "add", "--p", "2", "--len", "2", "1,0"),
                                  ("witt", "add", "--p", "2", "1,0", "1,0"),
                                  ("witt", "add", "--p", "2", "--len", "2", "1,a", "1,0"),
                                  ("witt", "spin", "--p", "2", "--len", "2"),
                                  ("frobnicate", "x")])
def test_usage_errors_exit_2(argv):
    code, out, err = run(*argv)
    assert code == 2 and out == "" and err.startswith("unwindlab:")


# ------------------------------------------------------------ documents


W2F_BY_HAND = """\
# W_2[F] at p = 2, typed by hand
base Fp 2
bound 4
gen t0 deg 1
gen t1 deg 2
rel t0^2
rel t1^2
comul t0 = t0 (x) 1 + 1 (x) t0
comul t1 = t1 (x) 1 + 1 (x) t1 + t0 (x) t0
point t0
"""


def test_hand_written_w2f_document():
    h = parse_gap(W2F_BY_HAND)
    assert hp.check_hopf(h).ok
    assert print_gap(h) == print_gap(hp.build_wk_f(2, 2))


def test_data_file_matches_builder():
    assert print_gap(load_gap(data("w2f_p2.gap"))) == print_gap(hp.build_wk_f(2, 2))


@pytest.mark.parametrize("name", sorted(os.listdir(DATA)))
def test_round_trip_is_idempotent(name):
    obj = load_gap(data(name))
    once = print_gap(obj)
    assert print_gap(parse_gap(once)) == once


def test_empty_document():
    with pytest.raises(GapError, match="no base declaration"):
        parse_gap("")


def test_inhomogeneous_relation_is_named(tmp_path):
    f = tmp_path / "bad.gap"
    f.write_text("base Fp 2\nbound 4\ngen x deg 1\ngen y deg 2\nrel y^2\nrel x^2 + x\n")
    code, _, err = run("hopf", "show", str(f))
    assert code == 2
    assert "line 6" in err and "relation 2 'x^2 + x' is not homogeneous" in err


def test_unknown_keyword_position():
    with pytest.raises(GapError) as exc:
        parse_gap("base Fp 2\n  degree 4\n")
    assert exc.value.line == 2 and exc.value.col == 3


def test_comultiplication_needs_tensors():
    with pytest.raises(GapError, match=r"'\(x\)'"):
        parse_gap("base Fp 2\nbound 2\ngen x deg 1\ncomul x = x\npoint x\n")


def test_missing_file_exit_2():
    code, _, err = run("hopf", "dual", "missing.gap")
    assert code == 2 and "missing.gap" in err


# ------------------------------------------------------------ hopf and friends


def test_hopf_check_and_dual():
    assert run("hopf", "check", data("w2f_p2.gap"))[1] == "PASS hopf axioms of w2f_p2\n"
    code, out, _ = run("hopf", "dual-iso", data("cart_x.gap"), data("cart_y.gap"))
    assert code == 0 and out == "PASS dual isomorphic\n"
    assert run("hopf", "iso", data("w2f_p2.gap"), data("alpha4.gap"))[0] == 1


def test_hopf_build_matches_data_file():
    code, out, _ = run("hopf", "build", "wkf", "--p", "2", "--len", "2")
    assert code == 0 and out == print_gap(hp.build_wk_f(2, 2))


def test_mathematical_failure_exit_1():
    code, out, _ = run("deform", "space", data("unstable_p2.gap"))
    assert code == 1
    assert out.splitlines()[0] == "unstable_p2: cocycles 1, coboundaries 0, quotient 1 (bound 2, fixed-point)"


def test_unwind_on_a_perfect_base():
    code, out, _ = run("unwind", "gr0", data("u_w2f.gap"), data("perfect_line.gap"), "--ideal", "x_r4^4")
    assert code == 0 and out.startswith("PASS")


def test_pd_filtration_output():
    code, out, _ = run("pd", "filtration", data("line.gap"), "--ideal", "x", "--level", "1", "--bound", "3")
    assert code == 0
    assert out == "Fil^0: deg 0: 1, deg 1: 1, deg 2: 1\nFil^1: deg 1: 1, deg 2: 1\n"


def test_tilt_and_dr():
    assert run("tilt", "finite", "--base", "Zmod 8") == (0, "2 elements, prime field\n", "")
    assert run("tilt", "verify", "--p", "2", "--scale", "2", "--bound", "8")[0] == 0
    assert run("dr", "nw2", "--p", "2", "--bound", "4")[0] == 0


# ------------------------------------------------------------ output


def test_output_is_deterministic():
    argv = ("hopf", "dual", data("cart_x.gap"))
    assert run(*argv) == run(*argv)


def test_json_schema():
    code, out, _ = run("witt", "add", "--p", "2", "--len", "2", "--json", "1,0", "1,0")
    rows = json.loads(out)
    assert code == 0 and rows == [{"criterion": "witt add", "status": "pass", "value": "0,1"}]
    code, out, _ = run("hopf", "full", data("unstable_p2.gap"), "--json")
    (row,) = json.loads(out)
    assert code == 1 and row["status"] == "fail" and set(row) == {"criterion", "status", "witness"}


def test_verify_suite():
    code, out, err = run("verify", "witt", "--timings")
    assert code == 0 and out.splitlines() == ["PASS 1 Witt identities", "PASS 2 additive order of W_n(F_p)"]
    assert err.count(" s\n") == 2


def test_verify_unknown_suite():
    assert run("verify", "everything")[0] == 2


# ------------------------------------------------------------ cache directory


def test_cache_dir_precedence(monkeypatch, tmp_path):
    monkeypatch.setenv("UNWINDLAB_CACHE", str(tmp_path / "env"))
    monkeypatch.setenv("XDG_CACHE_HOME", str(tmp_path / "xdg"))
    assert cache_dir(str(tmp_path / "flag")) == str(tmp_path / "flag")
    assert cache_dir(None) == str(tmp_path / "env")
    monkeypatch.delenv("UNWINDLAB_CACHE")
    assert cache_dir(None) == os.path.join(str(tmp_path / "xdg"), "unwindlab")
    monkeypatch.delenv("XDG_CACHE_HOME")
    assert cache_dir(None) == os.path.join(os.path.expanduser("~"), ".cache", "unwindlab")


def test_cache_dir_flag_is_used(tmp_path):
    d = tmp_path / "c"
    code, _, _ = run("witt", "polys", "--p", "5", "--len", "2", "--cache-dir", str(d))
    assert code == 0 and (d / "witt_p5_n2_S.txt").exists()
