import pathlib
import subprocess
import sys

import pytest

from mfk.cli import DSLError, Options, format_session, main, parse, run

DEMOS = pathlib.Path(__file__).resolve().parent.parent / "demos"

XY = """\
ring R = vars x y
poly f in R = x*y
fact F over R pot f = dplus [[x]] dminus [[y]]
cmd sp F
"""


def blocks(src, **kw):
    return run(parse(src), Options(**kw))


def test_minimal_session():
    s = parse(XY)
    assert len(s.commands) == 1
    assert set(s.bindings) == {"R", "f", "F"}


def test_specialisation_payload():
    out = blocks(XY)[0].splitlines()
    assert out[0] == "> cmd sp F"
    assert out[1] == "status: pass"
    assert out[2] == "sp = fact over Q(i)[X,Y] pot X*Y dplus [[X]] dminus [[Y]]"


@pytest.mark.parametrize("src,line,col,needle", [
    (XY + "fact F over R pot f = dplus [[y]] dminus [[x]]\n", 5, 6, "duplicate name"),
    ("ring R = vars x y\ncmd sp G\n", 2, 8, "undefined"),
    (XY + "cmd validate\n", 5, 5, "arguments"),
    ("ring R = vars x y\npoly f in R = x +* y\n", 2, None, ""),
    ("ring R = vars x y\nfact F over R pot x*y = dplus [[x, y]] dminus [[y]]\n", 2, None, ""),
    ("ring R = bogus\n", 1, None, ""),
    ("frobnicate\n", 1, 1, ""),
])
def test_parse_errors_have_locations(src, line, col, needle):
    with pytest.raises(DSLError) as err:
        parse(src)
    assert err.value.line == line
    if col is not None:
        assert err.value.column == col
    assert needle in err.value.message
    assert str(err.value).startswith(f"line {line}, column ")


def test_comments_and_blank_lines():
    s = parse("# header\n\n" + XY.replace("cmd sp F", "cmd sp F   # trailing"))
    assert len(s.commands) == 1


@pytest.mark.parametrize("demo", sorted(p.name for p in DEMOS.glob("*.mfk")))
def test_format_round_trip(demo):
    text = format_session(parse((DEMOS / demo).read_text()))
    assert format_session(parse(text)) == text


def test_unusual_spacing_normalises():
    messy = "ring   R =  vars x   y\npoly f in R = x * y\nfact F over R pot f = dplus [[ x ]]   dminus [[y]]\ncmd  sp F\n"
    assert format_session(parse(messy)) == format_session(parse(XY))


def test_reports_are_deterministic():
    src = (DEMOS / "specialisation.mfk").read_text()
    assert blocks(src) == blocks(src)
    assert run(parse(src), Options(), source=src, parallel=True) == blocks(src)


def test_lagrangian_payload():
    src = "ring P = vars\nfact O over P = unit\ncutout M over P = extra x | pot 0 | section x, 0 | weights -2\ncmd lagrangian M O\n"
    assert blocks(src)[0].splitlines()[1:] == ["status: pass", "kclass = 1 * w^(0)"]


def test_clifford_square_command():
    out = blocks("cmd clifford-square n=1\n")[0]
    assert out.splitlines()[1] == "status: pass"


def test_statuses():
    src = """\
ring R = vars x y
ring A = vars x | weights 1
fact F over R pot x*y = dplus [[x]] dminus [[y]]
fact B over R pot x*y = dplus [[x]] dminus [[x]]
fact O over A = unit
cmd validate B
cmd cohomology O
cmd sp F
"""
    out = [b.splitlines()[1] for b in blocks(src, budget=1)]
    assert out == ["status: fail", "status: unsupported", "status: unknown"]


def test_random_validate_uses_seed():
    a = blocks("cmd random-validate count=5\n", seed=3)[0]
    assert "seed = 3" in a and "status: pass" in a


def test_main_exit_codes(tmp_path, capsys):
    good = tmp_path / "good.mfk"
    good.write_text(XY)
    assert main(["run", str(good)]) == 0
    bad = tmp_path / "bad.mfk"
    bad.write_text(XY.replace("dminus [[y]]", "dminus [[x]]").replace("cmd sp F", "cmd validate F"))
    assert main(["run", str(bad)]) == 1
    broken = tmp_path / "broken.mfk"
    broken.write_text("cmd sp G\n")
    assert main(["run", str(broken)]) == 2
    assert "line 1" in capsys.readouterr().err
    assert main(["format", str(good)]) == 0
    assert capsys.readouterr().out == format_session(parse(XY))


def test_demos_run_cleanly():
    for demo in ("specialisation.mfk", "periodicity.mfk"):
        proc = subprocess.run([sys.executable, "-m", "mfk.cli", "run", str(DEMOS / demo)],
                              capture_output=True, text=True, timeout=600)
        assert proc.returncode == 0, proc.stdout + proc.stderr
        assert "status: fail" not in proc.stdout


def test_selftest_subcommand():
    proc = subprocess.run([sys.executable, "-m", "mfk.cli", "selftest"], capture_output=True, text=True, timeout=600)
    lines = proc.stdout.splitlines()
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert len(lines) == 13 and all(line.startswith("PASS") for line in lines)
