import json
import subprocess
import sys
from pathlib import Path

import pytest

from jetvessiot.cli import parse, analyze, build, main, InputError, Report, AnalysisConfig
from jetvessiot.system import ImplicitSystem, ReducedCNF

SYSTEMS = Path(__file__).resolve().parent.parent / "systems"

WAVE = """\
name wave
indep x t
dep u v w
eq u_x = w
eq u_t = v
eq v_t = w_x
eq w_t = v_x
"""


def run(args, capsys):
    code = main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


# ---------------------------------------------------------------- parse

def test_parse_wave():
    sf = parse(WAVE)
    assert sf.indep == ["x", "t"] and sf.dep == ["u", "v", "w"]
    assert len(sf.eqs) == 4
    assert isinstance(build(sf), ReducedCNF)


def test_parse_implicit():
    sf = parse("indep x\ndep u\norder 1\nimpl u_x^2 + u^2 + x^2 - 1\n")
    assert isinstance(build(sf), ImplicitSystem)


def test_comments_and_blank_lines():
    sf = parse("# header\n\n" + WAVE.replace("eq u_x = w", "eq u_x = w   # first"))
    assert sf.eqs[0][3] == "w"


@pytest.mark.parametrize("text,line,col,needle", [
    ("indep x t\ndep u\neq u_t = q\n", 3, 10, "q"),
    ("indep x t\ndep u\neq u_t = u_xz\n", 3, 12, "suffix"),
    ("indep x t\ndep u\neq u_t = u_xx\n", 3, 10, "order"),
    ("indep x t\ndep u\nfoo bar\neq u_t = u\n", 3, 1, "foo"),
    ("indep x t\ndep u\norder zero\neq u_t = u\n", 3, 7, "order"),
    ("indep x t\ndep u\neq u_t u\n", 3, 4, "expected"),
])
def test_positioned_diagnostics(text, line, col, needle):
    with pytest.raises(InputError) as ei:
        build(parse(text))
    d = ei.value.diagnostics[0]
    assert (d.line, d.col) == (line, col)
    assert needle in d.message


def test_mixed_forms_rejected():
    with pytest.raises(InputError):
        parse("indep x\ndep u\neq u_x = u\nimpl u_x - u\n")


def test_class_violation_is_input_error():
    with pytest.raises(InputError) as ei:
        analyze(parse("indep x t\ndep u\neq u_x = u_t\n"))
    d = ei.value.diagnostics[0]
    assert (d.line, d.col) == (3, 4)


# ---------------------------------------------------------------- exit codes

@pytest.mark.parametrize("name,code", [
    ("wave_r1_1", 0), ("wave_r1", 1), ("five_var", 0), ("ode_circle", 0),
    ("uxx_uyy", 1), ("uxy", 1),
])
def test_exit_codes(name, code, capsys):
    c, out, _ = run([SYSTEMS / (name + ".sys")], capsys)
    assert c == code
    rep = json.loads(out)
    assert rep["exit_code"] == code


def test_garbage_input_exits_2(tmp_path, capsys):
    p = tmp_path / "bad.sys"
    p.write_text("this is not a system\n")
    c, out, err = run([p], capsys)
    assert c == 2 and out == ""
    assert "bad.sys:1:1:" in err


def test_missing_file_exits_2(tmp_path, capsys):
    c, _, err = run([tmp_path / "nope.sys"], capsys)
    assert c == 2 and "error" in err


def test_no_contract_five_var(capsys):
    c, out, _ = run([SYSTEMS / "five_var.sys", "--no-contract"], capsys)
    assert c == 1
    con = json.loads(out)["sections"]["connection"]
    last = con["steps"][-1]
    assert not last["passes"]
    assert last["parameter_relations"][0]["labels"] == ["(u, {x,y})"]
    assert con["symbol_steps_pass"] is False


def test_step_flag_stops_early(capsys):
    c, out, _ = run([SYSTEMS / "five_var.sys", "--step", "3"], capsys)
    steps = json.loads(out)["sections"]["connection"]["steps"]
    assert [s["j"] for s in steps] == [2, 3]


def test_wave_r1_names_residual(capsys):
    _, out, _ = run([SYSTEMS / "wave_r1.sys"], capsys)
    steps = json.loads(out)["sections"]["connection"]["steps"]
    assert steps[0]["residuals"] == ["-w_t + v_x"]


def test_wave_family_two_parameters(capsys):
    _, out, _ = run([SYSTEMS / "wave_r1_1.sys"], capsys)
    con = json.loads(out)["sections"]["connection"]
    assert con["free_parameters"] == ["zeta1[v_x]", "zeta1[w_x]"]
    assert con["at_point"]["integral"]


def test_text_output(capsys):
    c, out, _ = run([SYSTEMS / "wave_r1.sys", "--text"], capsys)
    assert c == 1
    assert "residual -w_t + v_x" in out
    assert out.rstrip().endswith("exit code 1")


def test_report_sections():
    rep = analyze(parse(WAVE))
    assert set(rep.sections) == {"system", "symbol", "involution", "vessiot", "connection"}


# ---------------------------------------------------------------- round trip and determinism

@pytest.mark.parametrize("name", ["wave_r1_1", "wave_r1", "uxx_uyy", "ode_circle"])
def test_json_round_trip(name):
    rep = analyze(parse((SYSTEMS / (name + ".sys")).read_text()))
    back = Report.from_json(rep.to_json())
    assert back == rep
    assert back.to_json() == rep.to_json()


@pytest.mark.parametrize("seed", [0, 5])
def test_deterministic_subprocess(seed):
    cmd = [sys.executable, "-m", "jetvessiot", str(SYSTEMS / "uxx_uyy.sys"), "--seed", str(seed)]
    a = subprocess.run(cmd, capture_output=True)
    b = subprocess.run(cmd, capture_output=True)
    assert a.returncode == b.returncode == 1
    assert a.stdout == b.stdout and a.stdout


def test_stdin_input(monkeypatch, capsys):
    import io
    monkeypatch.setattr(sys, "stdin", io.StringIO(WAVE))
    c, out, _ = run(["-"], capsys)
    assert c == 0 and json.loads(out)["sections"]["system"]["name"] == "wave"


def test_config_defaults():
    cfg = AnalysisConfig()
    assert cfg.contract and cfg.step is None and cfg.seed == 0
