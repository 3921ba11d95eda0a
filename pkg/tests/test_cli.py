import pytest
from click.testing import CliRunner

from ltphi.cli import HEADER, main


@pytest.fixture()
def run():
    runner = CliRunner()

    def _run(*args):
        return runner.invoke(main, list(args), catch_exceptions=False)

    return _run


def body(result):
    lines = result.stdout.splitlines()
    assert lines[0] == HEADER
    return lines[1:]


def test_group_law_multiplicative(run):
    r = run("group-law", "--f", "multiplicative", "--N", "4")
    assert r.exit_code == 0 and body(r) == ["X + Y + X*Y + O(deg 4)"]


def test_group_law_standard_degree_two(run):
    r = run("group-law", "--N", "2")
    assert r.exit_code == 0 and body(r) == ["X + Y + O(deg 2)"]


@pytest.mark.parametrize("f", ["3,x", "", "1,,2"])
def test_malformed_f_exits_2(run, f):
    assert run("group-law", "--f", f).exit_code == 2


def test_non_lubin_tate_exits_2(run):
    assert run("group-law", "--f", "1,0,1").exit_code == 2


def test_bad_prime_exits_2(run):
    assert run("group-law", "--p", "4").exit_code == 2


def test_config_file_and_flag_precedence(run, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nf = multiplicative\nN=6\n")
    r = run("group-law", "--config", str(cfg))
    assert body(r) == ["X + Y + X*Y + O(deg 6)"]
    r = run("group-law", "--config", str(cfg), "--N", "3")
    assert body(r) == ["X + Y + X*Y + O(deg 3)"]
    cfg.write_text("bogus=1\n")
    assert run("group-law", "--config", str(cfg)).exit_code == 2


def test_lt_mul(run):
    r = run("lt-mul", "--a", "1", "--N", "5")
    assert body(r) == ["a=1", "X + O(X^5)"]


def test_torsion(run):
    r = run("torsion", "--p", "2", "--n", "2")
    assert r.exit_code == 0
    assert "eisenstein=true" in body(r) and "torsion_points=4" in body(r)


@pytest.mark.parametrize("p", [3, 5])
def test_norm_check(run, p):
    good = run("norm-check", "--p", str(p), "--eis", f"{p},0", "--M", "6")
    bad = run("norm-check", "--p", str(p), "--eis", f"{-p},0", "--M", "6")
    assert body(good)[-1] == "criterion=true"
    assert body(bad)[-1] == "criterion=false"


def test_gamma_act(run):
    r = run("gamma-act", "--f", "multiplicative", "--x", "0,1", "--N", "6")
    assert body(r)[0].endswith("(default generators)")
    assert body(r)[2] == "gamma_4(x)=u + u^3 + u^4 + O(u^6)"
    assert body(r)[3] == "phi-gamma-commute=true"


def test_v_solve_constant_and_lift(run):
    r = run("v-solve", "--matrix", "2")
    assert r.exit_code == 0 and "dimension=1" in body(r) and "check=true" in body(r)
    r = run("v-solve", "--matrix", "1,0;1,1", "--lift", "--M", "3")
    assert r.exit_code == 0 and "check=true" in body(r)


def test_v_lift_past_level_cap_exits_3(run):
    r = run("v-solve", "--matrix", "1,0;1,1", "--lift", "--M", "4")
    assert r.exit_code == 3 and "digit 3" in r.stderr


def test_v_solve_singular_exits_3(run):
    assert run("v-solve", "--matrix", "0").exit_code == 3


def test_d_descend_norm_not_one_exits_2(run):
    # [0,1] in F_9 has norm 2 from F_81 to F_9
    assert run("d-descend", "--r", "2", "--matrix", "[0,1]", "--n", "2").exit_code == 2


def test_d_descend_round_trip(run):
    r = run("d-descend", "--matrix", "2", "--n", "2")
    assert r.exit_code == 0 and body(r)[-1] == "round-trip=true"


def test_projlim(run):
    r = run("projlim", "--seed", "3")
    assert r.exit_code == 0 and "round-trip=true" in body(r)
    r = run("projlim", "--seed", "3", "--fault", "2", "--direction", "varpi")
    assert r.exit_code == 0 and body(r)[-1].startswith("rejected: no limit at digit 2")


def _spec(tmp_path, text):
    path = tmp_path / "module.txt"
    path.write_text(text)
    return str(path)


def test_compare_identity(run, tmp_path):
    r = run("compare", _spec(tmp_path, "rank 1 over E side pi\n1\n"))
    assert r.exit_code == 0 and body(r)[-1] == "verdict: isomorphic"


def test_compare_teichmuller(run, tmp_path):
    r = run("compare", "--r", "2", _spec(tmp_path, "rank 1 over E side pi\nteich([0,1])\n"))
    assert r.exit_code == 0 and body(r)[-1] == "verdict: isomorphic"


def test_compare_char0(run, tmp_path):
    r = run("compare", "--M", "3", _spec(tmp_path, "rank 1 over A side pi\n4\n"))
    assert r.exit_code == 0 and body(r)[-1] == "verdict: isomorphic"


def test_compare_singular_exits_3(run, tmp_path):
    r = run("compare", _spec(tmp_path, "rank 2 over E side pi\n1;0\n0;0\n"))
    assert r.exit_code == 3 and "not étale" in r.stderr


def test_compare_series_entry_exits_3(run, tmp_path):
    r = run("compare", _spec(tmp_path, "rank 1 over E side pi\n1 + u + O(u^4)\n"))
    assert r.exit_code == 3 and "unsupported mode" in r.stderr


@pytest.mark.parametrize("text", ["rank one over E side pi\n1\n", "rank 2 over E side pi\n1;0\n", "rank 1 over E side pi\n[a]\n"])
def test_compare_parse_errors_exit_2(run, tmp_path, text):
    assert run("compare", _spec(tmp_path, text)).exit_code == 2


def test_verify_group_law(run):
    r = run("verify", "--suite", "group-law")
    assert r.exit_code == 0
    lines = body(r)
    assert all(line.endswith("pass") for line in lines[1:])


def test_verify_vd_charp_includes_dimension_law(run):
    r = run("verify", "--suite", "vd-charp", "--p", "3")
    assert r.exit_code == 0
    assert any(line.startswith("vd-charp.dimension-law-exhaustive cases=") for line in body(r))


def test_verify_unknown_suite(run):
    assert run("verify", "--suite", "bogus").exit_code == 2


def test_verify_deterministic(run):
    a = run("verify", "--suite", "two-tower", "--seed", "5").stdout
    b = run("verify", "--suite", "two-tower", "--seed", "5").stdout
    assert a == b
