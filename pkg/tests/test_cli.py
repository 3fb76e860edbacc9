"""End-to-end command tests driving main() with temp files."""

import re

import pytest

from dlkit.cli import main
from dlkit.enumeration import cd_values
from dlkit.textio import parse_instance

SAT_PAIR = "var x y\ncon x - y in (0,1)\n"
UNSAT_PAIR = "var x y\ncon x - y = 1\ncon y - x = 1\n"
TERNARY = "var x y z\ncon x - y = 0 | y - z = 0 | z - x = 0\n"


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


# --------------------------------------------------------------------------
# solve


def test_solve_enumerate_sat_model(tmp_path, capsys):
    path = write(tmp_path, "a.dl", SAT_PAIR)
    rc, out, _ = run(capsys, "solve", "--algo", "enumerate", path)
    assert rc == 10
    lines = out.splitlines()
    assert lines[0] == "SAT"
    from fractions import Fraction

    grid = set(cd_values(2, 0))
    values = [Fraction(line.split(" = ")[1]) for line in lines[1:]]
    assert len(values) == 2 and all(v in grid for v in values)


def test_solve_dnc_unsat(tmp_path, capsys):
    path = write(tmp_path, "a.dl", UNSAT_PAIR)
    rc, out, _ = run(capsys, "solve", "--algo", "dnc", path)
    assert rc == 20
    assert out == "UNSAT\n"


def test_solve_status_output_and_other_algos(tmp_path, capsys):
    path = write(tmp_path, "a.dl", SAT_PAIR)
    for extra in (
        ["--algo", "enumerate", "--output", "status"],
        ["--algo", "oracle"],
        ["--algo", "treewidth", "--output", "status"],
        ["--algo", "bounded", "--width", "1", "--output", "status"],
    ):
        rc, out, _ = run(capsys, "solve", *extra, path)
        assert rc == 10
        assert out == "SAT\n"


def test_solve_fragment_errors(tmp_path, capsys):
    path = write(tmp_path, "t.dl", TERNARY)
    rc, _, err = run(capsys, "solve", "--algo", "dnc", path)
    assert rc == 2 and "binary" in err
    rc, _, err = run(capsys, "solve", "--algo", "bounded", path)
    assert rc == 2 and "--width" in err


def test_solve_parse_error_position(tmp_path, capsys):
    path = write(tmp_path, "bad.dl", "var x y\ncon x - y in [1,0]\n")
    rc, _, err = run(capsys, "solve", path)
    assert rc == 1
    assert "line 2" in err and "col" in err


def test_solve_missing_file(capsys):
    rc, _, err = run(capsys, "solve", "/nonexistent/q.dl")
    assert rc == 1 and "cannot read" in err


def test_solve_formula(tmp_path, capsys):
    sat = write(tmp_path, "f.dlf", "(or (atom x - y in [0,0]) (atom x - y in [2,2]))\n")
    rc, out, _ = run(capsys, "solve", "--formula", sat)
    assert rc == 10 and out.startswith("SAT\n")
    rc, out, _ = run(capsys, "solve", "--formula", "--algo", "oracle", sat)
    assert rc == 10 and out == "SAT\n"
    unsat = write(tmp_path, "g.dlf", "(and (atom x - y in [1,1]) (atom y - x in [1,1]))\n")
    rc, out, _ = run(capsys, "solve", "--formula", unsat)
    assert rc == 20 and out == "UNSAT\n"
    rc, _, err = run(capsys, "solve", "--formula", "--algo", "dnc", sat)
    assert rc == 2 and "does not apply" in err


# --------------------------------------------------------------------------
# cert


def test_cert_lists_and_decides(tmp_path, capsys):
    path = write(tmp_path, "a.dl", SAT_PAIR)
    rc, out, _ = run(capsys, "cert", path)
    assert rc == 10
    lines = out.splitlines()
    assert lines[0] == "SAT" and len(lines) > 1
    assert all("in" in line for line in lines[1:])
    path = write(tmp_path, "u.dl", UNSAT_PAIR)
    rc, out, _ = run(capsys, "cert", path)
    assert rc == 20 and out == "UNSAT\n"


def test_cert_cap(tmp_path, capsys):
    body = "\n".join("con x - y in [0,0] | x - y in [1,1]" for _ in range(21))
    path = write(tmp_path, "big.dl", "var x y\n" + body + "\n")
    rc, _, err = run(capsys, "cert", "--cap-oracle", "1000000", path)
    assert rc == 2 and "oracle blow-up" in err


# --------------------------------------------------------------------------
# gen


def test_gen_subset_sum_round_trip(tmp_path, capsys):
    rc, out, _ = run(capsys, "gen", "subset-sum", "1,2", "3")
    assert rc == 0
    assert out.splitlines()[0] == "# label: SAT source=subset-sum"
    path = write(tmp_path, "ss.dl", out)
    rc, solved, _ = run(capsys, "solve", "--algo", "treewidth", path)
    assert rc == 10
    rc, out, _ = run(capsys, "gen", "subset-sum", "2,4", "3")
    assert rc == 0
    assert out.splitlines()[0] == "# label: UNSAT source=subset-sum"


def test_gen_grids(tmp_path, capsys):
    rc, out, _ = run(capsys, "gen", "is-d40", "2", "1,1-2,1", "1,2-2,2")
    assert rc == 0
    head, rest = out.split("\n", 1)
    assert head == "# label: SAT source=grid-is-d40"
    inst = parse_instance(rest)
    assert inst.var_count == 4
    rc, out, _ = run(
        capsys, "gen", "is-d40", "2", "1,1-2,1", "1,2-2,2", "1,1-2,2", "1,2-2,1"
    )
    assert out.splitlines()[0] == "# label: UNSAT source=grid-is-d40"
    rc, out, _ = run(capsys, "gen", "is-d2", "2", "1,1-2,2")
    assert out.splitlines()[0] == "# label: SAT source=grid-is-d2"
    rc, out, _ = run(capsys, "gen", "is-d31", "2", "1,1-2,2", "--closed-edges")
    assert rc == 0
    assert out.splitlines()[0] == "# label: SAT source=grid-is-d31"
    parse_instance(out)


def test_gen_edge_syntax_errors(capsys):
    rc, _, err = run(capsys, "gen", "is-d40", "2", "1,1+2,1")
    assert rc == 2 and "edge" in err
    rc, _, err = run(capsys, "gen", "is-d40", "2", "1,1-9,9")
    assert rc == 2
    rc, _, err = run(capsys, "gen", "subset-sum", "1,x", "3")
    assert rc == 2 and "integer" in err


def test_gen_dcsp(tmp_path, capsys):
    rc, out, _ = run(capsys, "gen", "dcsp-d2k", "2", "2", "0,1!=1,2")
    assert rc == 0
    assert out.splitlines()[0] == "# label: SAT source=dcsp"
    path = write(tmp_path, "d.dl", out)
    rc, _, _ = run(capsys, "solve", "--algo", "oracle", path)
    assert rc == 10
    # all of variable 0's values banned: instance has an unprintable constraint
    rc, _, err = run(capsys, "gen", "dcsp-d2k", "1", "1", "0!=1")
    assert rc == 2 and "no text form" in err


def test_gen_mcc(tmp_path, capsys):
    rc, out, _ = run(capsys, "gen", "mcc-d21", "1/2", "1-2")
    assert rc == 0
    head, rest = out.split("\n", 1)
    assert head == "# label: SAT source=multicolored-clique"
    inst = parse_instance(rest)
    assert inst.var_count > 100
    rc, out, _ = run(capsys, "gen", "mcc-d21", "1,2/3/4", "1-3", "2-4", "3-4")
    assert rc == 0
    assert out.splitlines()[0] == "# label: UNSAT source=multicolored-clique"
    # with no edges at all an E set is empty, so the board needs an
    # unprintable always-false constraint
    rc, _, err = run(capsys, "gen", "mcc-d21", "1/2")
    assert rc == 2 and "no text form" in err


def test_gen_random_deterministic(capsys):
    rc, first, _ = run(capsys, "gen", "random", "3", "1", "4", "2", "--seed", "7")
    assert rc == 0
    assert re.match(r"# label: (SAT|UNSAT) source=random\n", first)
    rc, second, _ = run(capsys, "gen", "random", "3", "1", "4", "2", "--seed", "7")
    assert first == second
    rc, third, _ = run(capsys, "gen", "random", "3", "1", "4", "2", "--seed", "8")
    assert third != first


# --------------------------------------------------------------------------
# sidon / check / bench


def test_sidon(capsys):
    rc, out, _ = run(capsys, "sidon", "4")
    assert rc == 0 and out == "0 11 24 34\n"


def test_check(tmp_path, capsys):
    inst = write(
        tmp_path, "i.dl", "var x y\ncon x - y = 0\ncon x - y in [-1,1]\ncon x - y in [2,3]\n"
    )
    good = write(tmp_path, "good.model", "SAT\nx = 0\ny = 0\n")
    rc, out, _ = run(capsys, "check", inst, good)
    assert rc == 0 and out == "violated: 2\n"
    ok = write(tmp_path, "i2.dl", "var x y\ncon x - y = 0\n")
    rc, out, _ = run(capsys, "check", ok, good)
    assert rc == 0 and out == "ok\n"
    partial = write(tmp_path, "part.model", "x = 0\n")
    rc, _, err = run(capsys, "check", ok, partial)
    assert rc == 1 and "unbound variable 'y'" in err
    unsat_model = write(tmp_path, "u.model", "UNSAT\n")
    rc, _, err = run(capsys, "check", ok, unsat_model)
    assert rc == 1 and "no assignment" in err


def test_bench_csv(tmp_path, capsys):
    a = write(tmp_path, "a.dl", SAT_PAIR)
    b = write(tmp_path, "b.dl", UNSAT_PAIR)
    t = write(tmp_path, "t.dl", TERNARY)
    rc, out, _ = run(
        capsys, "bench", a, b, t, "--algo", "enumerate", "--algo", "dnc", "--algo", "oracle"
    )
    assert rc == 0
    lines = out.splitlines()
    assert lines[0] == "instance,algorithm,status,agrees_with_oracle,millis"
    assert len(lines) == 10
    for line in lines[1:]:
        path, algo, status, agrees, millis = line.split(",")
        assert algo in ("enumerate", "dnc", "oracle")
        assert status in ("SAT", "UNSAT", "skipped")
        assert agrees in ("yes", "na")
        assert millis.isdigit()
    # the ternary instance is outside the dnc fragment
    assert any(line.startswith(f"{t},dnc,skipped") for line in lines[1:])


def test_bench_deterministic_modulo_millis(tmp_path, capsys):
    a = write(tmp_path, "a.dl", SAT_PAIR)
    rc, first, _ = run(capsys, "bench", a, "--algo", "enumerate")
    rc, second, _ = run(capsys, "bench", a, "--algo", "enumerate")
    strip = lambda text: [line.rsplit(",", 1)[0] for line in text.splitlines()]
    assert strip(first) == strip(second)


def test_usage_exit_codes(capsys):
    with pytest.raises(SystemExit) as e:
        main(["solve", "--algo", "nonsense", "x"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main([])
    assert e.value.code == 2
