from bvddmc.bench import COLUMNS, MODES, matrix, run_one
from bvddmc.cli import main
from bvddmc.riscu.benchmarks import sample


def test_columns():
    assert COLUMNS == ("sample", "mode", "array", "runtime_s", "events", "solver_calls", "peak_nodes")


def test_row():
    r = run_one("division-by-zero", "ROABVDD-p8", 8)
    assert (r.events, r.solver_calls) == (1, 0) and r.peak_nodes > 0
    fields = r.tsv().split("\t")
    assert len(fields) == len(COLUMNS) and fields[:3] == ["division-by-zero", "ROABVDD-p8", "8"]


def test_matrix_order():
    rows = list(matrix([sample("exit-zero")],
                       ["ROABVDD-p8", "CFLOBVDD-p8"], [4, 8]))
    assert [(r.mode, r.array) for r in rows] == [("ROABVDD-p8", 4), ("ROABVDD-p8", 8),
                                                 ("CFLOBVDD-p8", 4), ("CFLOBVDD-p8", 8)]
    assert all(r.events == 0 for r in rows)


def test_cli_bench(tmp_path, capsys):
    out = tmp_path / "b.tsv"
    assert main(["bench", "--samples", "division-by-zero", "--modes", "CFLOBVDD-p8",
                 "--arrays", "8", "-o", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].split("\t") == list(COLUMNS)
    assert len(lines) == 2


def test_cli_bench_bad_mode():
    assert main(["bench", "--modes", "nope"]) == 2
    assert set(MODES) == {"p0", "p1", "ROABVDD-p8", "CFLOBVDD-p8"}
