import json
import subprocess
import sys

import pytest

from phasestar.cli import main
from phasestar.parsefmt import GRAMMAR_VERSION


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out.strip(), out.err


@pytest.mark.parametrize("argv,expected", [
    (("star", "q", "p", "--product", "moyal"), "q*p + (1/2)*i*hbar"),
    (("star", "p", "p", "--product", "damped", "--gamma", "g", "--mass", "m"), "p^2 - i*hbar*gamma*m"),
    (("quantize", "--ordering", "weyl", "2", "1"), "Q^2*P - i*hbar*Q"),
    (("bracket", "q", "p^2/(2*m)+m*omega^2*q^2/2", "--product", "moyal"), "p/m"),
    (("limit", "--op", "moyal-bracket"), "lq*rp - lp*rq"),
    (("star", "q", "p", "--product", "standard"), "q*p + i*hbar"),
    (("star", "p", "p", "--product", "damped", "--gamma", "1/2", "--mass", "2"), "p^2 - i*hbar"),
    (("quantize", "--ordering", "standard", "1", "2"), "Q*P^2"),
    (("star", "q", "p", "--product", "local:q*dp^2"), "q*p + (1/2)*i*hbar"),
])
def test_examples(capsys, argv, expected):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and out == expected


def test_bracket_with_bound_mass(capsys):
    code, out, _ = run(capsys, "bracket", "q", "p^2/(2*m)+m*omega^2*q^2/2", "--mass", "2")
    assert out == "(1/2)*p"


def test_limits(capsys):
    assert run(capsys, "limit", "--op", "star")[1] == "1"
    code, out, _ = run(capsys, "limit", "--product", "damped-eta", "--order", "4")
    assert code == 0 and out.startswith("lq*rp - lp*rq")


def test_json_pins_grammar(capsys):
    code, out, _ = run(capsys, "star", "q", "p", "--format", "json")
    data = json.loads(out)
    assert data["grammar"] == GRAMMAR_VERSION and data["result"] == "q*p + (1/2)*i*hbar"


def test_plane_wave(capsys):
    code, out, _ = run(capsys, "star", "1,2", "3,4", "--symbol", "plane-wave")
    assert code == 0 and out == "exp(i/hbar)*exp(i*(4*q + 6*p)/hbar)"


def test_parse_error_exit_code(capsys):
    code, _, err = run(capsys, "star", "q*", "p")
    assert code == 2 and "^" in err and "parse error" in err


@pytest.mark.parametrize("argv", [
    ("star", "q", "p", "--product", "nope"),
    ("star", "q", "p", "--product", "local:arctan(q)*dp"),
    ("augment",),
    ("verify", "nope"),
    ("quantize", "--ordering", "weyl", "--", "-1", "2"),
    ("star", "q", "p", "--order", "-1"),
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_augment_exact(capsys):
    code, out, _ = run(capsys, "augment", "beta*dp")
    assert code == 0 and out.splitlines() == ["A(theta)(q) = 0", "A(theta)(p) = 0"]


def test_augment_damped_preset(capsys):
    code, out, _ = run(capsys, "augment", "--preset", "damped", "--samples", "300")
    assert code == 0 and out.count("pass") == 2
    code, out, _ = run(capsys, "augment", "--preset", "damped", "--route", "ansatz", "--format", "json")
    assert code == 0 and json.loads(out)["status"] == "pass"


def test_augment_numeric_failure_exit_code(capsys):
    code, out, _ = run(capsys, "augment", "gamma*arctan(q/p)*dq", "--gamma", "0.1", "--mass", "1",
                       "--omega", "1", "--samples", "50")
    assert code == 1 and "fail" in out


def test_augment_numeric_needs_values(capsys):
    assert run(capsys, "augment", "gamma*arctan(q/p)*dq")[0] == 2


def test_verify_exit_codes(capsys):
    code, out, _ = run(capsys, "verify", "heisenberg-weyl")
    assert code == 0 and "PASS c13-heisenberg-weyl" in out
    code, out, _ = run(capsys, "verify", "damped", "--format", "json")
    data = json.loads(out)
    assert code == 1 and data["status"] == "fail"
    ids = {c["check-id"]: c["status"] for c in data["checks"]}
    assert ids["c05-damped-pathology"] == "fail"
    assert ids["c05-damped-pathology-opposite-sign"] == "pass"
    assert {"suite", "check-id", "identity", "status", "runtime-ms"} <= set(data["checks"][0])


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "phasestar", "star", "q", "p"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "q*p + (1/2)*i*hbar"
