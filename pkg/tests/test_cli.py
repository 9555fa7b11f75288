import csv
import json

from l0path.cli import main


def run_cli(*argv):
    return main(list(argv))


def test_gen_solve_path_round_trip(tmp_path, capsys):
    inst = tmp_path / "t.json"
    sol = tmp_path / "sol.json"
    assert run_cli("gen", "tridiag", "--n", "50", "--seed", "1", "-o", str(inst)) == 0
    assert run_cli("solve-path", str(inst), "-o", str(sol)) == 0
    out = capsys.readouterr().out
    assert "objective" in out
    doc = json.loads(sol.read_text())
    assert set(doc) == {"objective", "objective_with_offset", "z", "x"}
    assert len(doc["x"]) == 50
    assert all(v in (0, 1) for v in doc["z"])


def test_gen_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        run_cli("gen", "lattice2d", "--rows", "3", "--cols", "4", "--seed", "9", "-o", str(path))
    assert a.read_bytes() == b.read_bytes()


def test_solve_decomp_outputs(tmp_path, capsys):
    inst = tmp_path / "lat.json"
    sol = tmp_path / "sol.json"
    log = tmp_path / "log.csv"
    run_cli("gen", "lattice2d", "--rows", "3", "--cols", "3", "--seed", "2", "-o", str(inst))
    code = run_cli(
        "solve-decomp", str(inst), "--steps", "harmonic", "--eps", "0.01",
        "--max-iter", "200", "--log", str(log), "-o", str(sol),
    )
    assert code == 0
    assert "gap" in capsys.readouterr().out
    doc = json.loads(sol.read_text())
    assert doc["lower"] <= doc["upper"] + 1e-9
    assert doc["objective"] == doc["upper"]
    with open(log, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["k", "lower", "upper", "gap", "step", "elapsed_ms"]
    assert len(rows) == doc["iters"] + 1


def test_solve_decomp_repeat_identical_modulo_timing(tmp_path):
    inst = tmp_path / "lat.json"
    run_cli("gen", "lattice2d", "--rows", "3", "--cols", "3", "--seed", "4", "-o", str(inst))
    sols, logs = [], []
    for tag in ("x", "y"):
        sol = tmp_path / f"sol_{tag}.json"
        log = tmp_path / f"log_{tag}.csv"
        run_cli("solve-decomp", str(inst), "--max-iter", "40", "--log", str(log), "-o", str(sol))
        sols.append(sol.read_bytes())
        with open(log, newline="") as fh:
            logs.append([row[:-1] for row in csv.reader(fh)])  # drop elapsed_ms
    assert sols[0] == sols[1]
    assert logs[0] == logs[1]


def test_path_instance_same_answer_both_solvers(tmp_path):
    inst = tmp_path / "t.json"
    run_cli("gen", "signal1d", "--n", "30", "--seed", "5", "-o", str(inst))
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run_cli("solve-path", str(inst), "-o", str(a))
    run_cli("solve-decomp", str(inst), "-o", str(b))
    pa = json.loads(a.read_text())
    pb = json.loads(b.read_text())
    assert abs(pa["objective"] - pb["objective"]) <= 1e-9
    assert pb["gap"] == 0.0


def test_decompose_json(tmp_path):
    inst = tmp_path / "lat.json"
    out = tmp_path / "ord.json"
    run_cli("gen", "lattice2d", "--rows", "3", "--cols", "3", "--seed", "3", "-o", str(inst))
    assert run_cli("decompose", str(inst), "-o", str(out)) == 0
    doc = json.loads(out.read_text())
    assert sorted(doc["pi"]) == list(range(1, 10))
    assert doc["weight_retained"] <= doc["weight_total"]
    edges = {tuple(e) for e in doc["retained"]} | {tuple(e) for e in doc["relaxed"]}
    assert len(edges) == len(doc["retained"]) + len(doc["relaxed"])
    assert all(1 <= i < j <= 9 for i, j in edges)


def test_oracle_command(tmp_path, capsys):
    inst = tmp_path / "t.json"
    out = tmp_path / "o.json"
    run_cli("gen", "tridiag", "--n", "8", "--seed", "6", "-o", str(inst))
    assert run_cli("oracle", str(inst), "-o", str(out)) == 0
    doc = json.loads(out.read_text())
    assert doc["supports_enumerated"] == 256
    sol = tmp_path / "s.json"
    run_cli("solve-path", str(inst), "-o", str(sol))
    assert abs(doc["objective"] - json.loads(sol.read_text())["objective"]) <= 1e-8


def test_bench_csv(tmp_path):
    out = tmp_path / "bench.csv"
    assert run_cli("bench", "--sizes", "64,128", "--reps", "2", "-o", str(out)) == 0
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["family", "n", "reps", "median_ms"]
    assert [r[1] for r in rows[1:]] == ["64", "128"]


def test_exit_codes(tmp_path, capsys):
    assert run_cli("solve-path", str(tmp_path / "nope.json")) == 2

    bad = tmp_path / "bad.json"
    bad.write_text("{broken")
    assert run_cli("solve-path", str(bad)) == 2

    # indefinite tridiagonal: input parses but the solve must fail
    indef = tmp_path / "indef.json"
    indef.write_text(json.dumps({
        "n": 2, "a": [0.0, 0.0], "c": [1.0, 1.0],
        "Q": [[1, 1, 1.0], [1, 2, 2.0], [2, 2, 1.0]],
    }))
    assert run_cli("solve-path", str(indef)) == 3

    assert run_cli("gen", "tridiag", "--n", "5") == 2  # missing -o
    capsys.readouterr()
