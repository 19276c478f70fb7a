import json
import subprocess
import sys
from importlib.resources import files


from qkds.cli import main

FIXTURE = str(files("qkds").joinpath("data/running_example.qk"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_solve_running_example(capsys):
    code, out, _ = run(capsys, "solve", FIXTURE, "--verify", "--oracle", "both")
    assert code == 0
    assert out.splitlines() == ["q1: UNSAT", "q2: SAT", "q3: SAT", "q4: SAT", "q5: SAT"]


def test_solve_model_output(capsys):
    code, out, _ = run(capsys, "solve", FIXTURE, "--model")
    lines = out.splitlines()
    assert lines[1] == "q2: SAT"
    model = json.loads(lines[2])
    assert model["designated"] == 0
    assert any(model["edges"].values())
    assert model["x"]


def test_solve_json_is_one_document(capsys):
    code, out, _ = run(capsys, "solve", FIXTURE, "--json", "--model", "--seed", "3")
    doc = json.loads(out)
    assert [r["verdict"] for r in doc["results"]] == ["UNSAT", "SAT", "SAT", "SAT", "SAT"]
    assert "model" in doc["results"][1] and "model" not in doc["results"][0]


def test_solve_negate(tmp_path, capsys):
    path = write(tmp_path, "p.qk", "atoms: a b\nassert: [a] A\nquery: [a,b] A\nquery: [b] A\n")
    code, out, _ = run(capsys, "solve", path, "--negate")
    assert out.splitlines() == ["q1: UNSAT", "q2: SAT"]


def test_solve_without_queries(tmp_path, capsys):
    path = write(tmp_path, "p.qk", "atoms: a\nassert: [a] A & <a> ~A\n")
    assert run(capsys, "solve", path)[1] == "sigma: UNSAT\n"


def test_parse_errors_exit_2(tmp_path, capsys):
    path = write(tmp_path, "p.qk", "atoms: a\nassert: [x] A\n")
    code, out, err = run(capsys, "solve", path)
    assert code == 2 and out == "" and "line 2" in err
    assert run(capsys, "solve", str(tmp_path / "missing.qk"))[0] == 2
    path = write(tmp_path, "q.qk", "assert: A\n")
    assert run(capsys, "expand", path)[0] == 2


def test_expand(tmp_path, capsys):
    path = write(tmp_path, "p.qk", "atoms: a b\nquery: forall x <= {a,b} ([x] A)\nquery: [a] A\n")
    code, out, _ = run(capsys, "expand", path)
    assert out.splitlines() == [
        "q1: ((([a] (A)) & ([b] (A))) & ([a,b] (A)))",
        "q2: [a] (A)",
    ]
    code, out, _ = run(capsys, "expand", FIXTURE, "--size-only")
    assert "q1: 255 instances, size 764" in out.splitlines()


def test_check(tmp_path, capsys):
    code, out, _ = run(capsys, "solve", FIXTURE, "--model")
    model = write(tmp_path, "m.json", out.splitlines()[2])
    assert run(capsys, "check", model, FIXTURE, "q2")[1] == "true\n"
    assert run(capsys, "check", model, FIXTURE, "q2", "--assertions")[1] == "true\n"
    assert run(capsys, "check", model, FIXTURE, "q1", "--assertions")[1] == "false\n"
    assert run(capsys, "check", model, FIXTURE, "nope")[0] == 1

    single = write(tmp_path, "w.json", '{"worlds": [0], "designated": 0}')
    problem = write(tmp_path, "t.qk", "atoms: a\nquery box: [a] false\nquery dia: <a> true\n")
    assert run(capsys, "check", single, problem, "box")[1] == "true\n"
    assert run(capsys, "check", single, problem, "dia")[1] == "false\n"


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest", "--count", "40")
    assert code == 0
    assert all(line.startswith("PASS") for line in out.splitlines())


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qkds.cli", "solve", FIXTURE], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0 and proc.stdout.startswith("q1: UNSAT")


def test_verification_failure_exit_3(monkeypatch, capsys):
    import qkds.cli as cli
    from qkds.errors import InternalVerificationFailure

    def broken(*args, **kwargs):
        raise InternalVerificationFailure("forced")

    monkeypatch.setattr(cli, "solve", broken)
    code, _, err = run(capsys, "solve", FIXTURE)
    assert code == 3 and "forced" in err
