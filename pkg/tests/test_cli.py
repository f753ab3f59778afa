"""End-to-end tests of the command-line interface."""

import csv
import json

import numpy as np
import pytest

from hsvp.cli.bench import CSV_COLUMNS
from hsvp.cli.io import read_hierarchy, read_probs, write_probs
from hsvp.cli.main import EXIT_DISAGREEMENT, EXIT_INPUT_ERROR, EXIT_OK, EXIT_TOO_LARGE, main
from hsvp.cli.runner import BatchRunner
from hsvp.core.generate import generate_instances
from hsvp.core.prob import ProblemInstance
from hsvp.models import Budgets
from hsvp.solvers.registry import solver_registry
from hsvp.solvers.rts import RtsSolver
from tests.conftest import EXAMPLE_HIERARCHY_TSV, EXAMPLE_PROBS

PROBS_HEADER = "instance_id,y_true,p_0,p_1,p_2,p_3\n"


@pytest.fixture
def example_files(tmp_path):
    hierarchy = tmp_path / "hierarchy.tsv"
    hierarchy.write_text(EXAMPLE_HIERARCHY_TSV)
    probs = tmp_path / "probs.csv"
    probs.write_text(PROBS_HEADER + "a,0," + ",".join(map(str, EXAMPLE_PROBS)) + "\n")
    return hierarchy, probs


def _records(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def _gen(out_dir, classes, *extra):
    return main(["gen", "--classes", str(classes), "--out-dir", str(out_dir), *extra])


class TestGen:
    """Test synthetic dataset generation."""

    def test_deterministic(self, tmp_path):
        assert _gen(tmp_path / "a", 4, "--seed", "3", "--instances", "5") == EXIT_OK
        assert _gen(tmp_path / "b", 4, "--seed", "3", "--instances", "5") == EXIT_OK
        for name in ("hierarchy.tsv", "probs.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
        assert len((tmp_path / "a" / "hierarchy.tsv").read_text().splitlines()) == 7
        assert len((tmp_path / "a" / "probs.csv").read_text().splitlines()) == 6

    def test_two_classes(self, tmp_path):
        assert _gen(tmp_path, 2) == EXIT_OK
        assert len((tmp_path / "hierarchy.tsv").read_text().splitlines()) == 3

    def test_single_class_is_rejected(self, tmp_path):
        assert _gen(tmp_path, 1) == EXIT_INPUT_ERROR


class TestSolve:
    """Test batch solving."""

    def test_rts_example(self, example_files, capsys):
        hierarchy, probs = example_files
        code = main(
            ["solve", "--hierarchy", str(hierarchy), "--probs", str(probs)]
            + ["--r", "2", "--k", "2", "--no-timing"]
        )
        assert code == EXIT_OK
        (record,) = _records(capsys.readouterr().out)
        assert record == {
            "instance_id": "a",
            "solver": "rts",
            "r": 2,
            "k": 2,
            "set": [0, 2],
            "mass": 0.8,
            "n": 5,
            "time_us": 0,
        }

    def test_mvm_root(self, example_files, tmp_path):
        hierarchy, probs = example_files
        out = tmp_path / "out.jsonl"
        code = main(
            ["solve", "--hierarchy", str(hierarchy), "--probs", str(probs)]
            + ["--solver", "mvm", "--r", "1", "--k", "4", "--out", str(out)]
        )
        assert code == EXIT_OK
        (record,) = _records(out.read_text())
        assert record["set"] == [0, 1, 2, 3]
        assert record["mass"] == pytest.approx(1.0)

    def test_budget_grid(self, example_files, capsys):
        hierarchy, probs = example_files
        main(["solve", "--hierarchy", str(hierarchy), "--probs", str(probs), "--r", "1,2", "--k", "1,2"])
        records = _records(capsys.readouterr().out)
        assert [(rec["r"], rec["k"]) for rec in records] == [(1, 1), (1, 2), (2, 1), (2, 2)]

    def test_conditionals_file(self, example_files, tmp_path, capsys):
        hierarchy, _ = example_files
        conds = tmp_path / "conds.tsv"
        conds.write_text("".join(f"{p}\t{c}\t0.5\n" for c, p in [(2, 1), (3, 1), (4, 2), (5, 2), (6, 3), (7, 3)]))
        code = main(
            ["solve", "--hierarchy", str(hierarchy), "--conds", str(conds), "--r", "1", "--k", "2"]
        )
        assert code == EXIT_OK
        (record,) = _records(capsys.readouterr().out)
        assert record["instance_id"] == "0"
        assert record["set"] == [0, 1]
        assert record["mass"] == 0.5
        assert record["n"] == 2

    def test_malformed_row(self, example_files, tmp_path):
        hierarchy, _ = example_files
        probs = tmp_path / "bad.csv"
        probs.write_text(PROBS_HEADER + "a,0,0.5,0.5\n")
        assert main(["solve", "--hierarchy", str(hierarchy), "--probs", str(probs)]) == EXIT_INPUT_ERROR

    def test_header_only(self, example_files, tmp_path):
        hierarchy, _ = example_files
        probs = tmp_path / "empty.csv"
        probs.write_text(PROBS_HEADER)
        assert main(["solve", "--hierarchy", str(hierarchy), "--probs", str(probs)]) == EXIT_INPUT_ERROR

    def test_zero_workers_is_rejected(self, example_files):
        hierarchy, probs = example_files
        code = main(
            ["solve", "--hierarchy", str(hierarchy), "--probs", str(probs), "--workers", "0"]
        )
        assert code == EXIT_INPUT_ERROR

    def test_missing_distribution(self, example_files):
        hierarchy, _ = example_files
        assert main(["solve", "--hierarchy", str(hierarchy)]) == EXIT_INPUT_ERROR

    def test_invalid_hierarchy(self, example_files, tmp_path):
        _, probs = example_files
        hierarchy = tmp_path / "cycle.tsv"
        hierarchy.write_text("1\t0\n2\t3\n3\t2\n")
        assert main(["solve", "--hierarchy", str(hierarchy), "--probs", str(probs)]) == EXIT_INPUT_ERROR

    def test_guard_trip(self, tmp_path):
        assert _gen(tmp_path, 1000, "--shape", "balanced", "--instances", "1") == EXIT_OK
        code = main(
            ["solve", "--hierarchy", str(tmp_path / "hierarchy.tsv")]
            + ["--probs", str(tmp_path / "probs.csv"), "--solver", "mvm", "--r", "3", "--k", "10"]
        )
        assert code == EXIT_TOO_LARGE

    def test_metrics_file(self, example_files, tmp_path):
        hierarchy, probs = example_files
        metrics = tmp_path / "metrics.prom"
        main(
            ["solve", "--hierarchy", str(hierarchy), "--probs", str(probs)]
            + ["--metrics-out", str(metrics)]
        )
        assert "hsvp_solves_total" in metrics.read_text()

    @pytest.mark.parametrize(
        "argv",
        [
            ["solve"],
            ["solve", "--hierarchy", "h.tsv", "--r", "one"],
            ["solve", "--hierarchy", "h.tsv", "--solver", "simplex"],
            [],
        ],
    )
    def test_usage_errors(self, argv):
        with pytest.raises(SystemExit):
            main(argv)


class _HalfMassSolver(RtsSolver):
    """Reports half of the true mass."""

    name = "half"

    def _solve_impl(self, instance, budgets):
        prediction = super()._solve_impl(instance, budgets)
        return prediction.model_copy(update={"mass": prediction.mass / 2, "solver": self.name})


class TestCheck:
    """Test cross-checking solver masses."""

    def test_solvers_agree(self, example_files, tmp_path):
        hierarchy, _ = example_files
        probs = tmp_path / "dirichlet.csv"
        write_probs(probs, generate_instances(4, 50, seed=5), 4)
        code = main(
            ["check", "--hierarchy", str(hierarchy), "--probs", str(probs)]
            + ["--r", "1,2", "--k", "1,2,4"]
        )
        assert code == EXIT_OK

    def test_generated_dataset(self, tmp_path):
        assert _gen(tmp_path, 9, "--instances", "30", "--seed", "5", "--branching", "2.5") == EXIT_OK
        code = main(
            ["check", "--hierarchy", str(tmp_path / "hierarchy.tsv"), "--workers", "3"]
            + ["--probs", str(tmp_path / "probs.csv"), "--r", "1,2,3", "--k", "1,3,5"]
        )
        assert code == EXIT_OK

    def test_large_tree_with_tractable_solvers(self, tmp_path):
        assert _gen(tmp_path, 4096, "--shape", "balanced", "--instances", "2") == EXIT_OK
        code = main(
            ["check", "--hierarchy", str(tmp_path / "hierarchy.tsv")]
            + ["--probs", str(tmp_path / "probs.csv"), "--solver-set", "rts,kcg"]
        )
        assert code == EXIT_OK

    def test_disagreement(self, example_files, capsys):
        hierarchy, probs = example_files
        solver_registry.register("half", _HalfMassSolver)
        try:
            code = main(
                ["check", "--hierarchy", str(hierarchy), "--probs", str(probs)]
                + ["--solver-set", "rts,half", "--r", "2", "--k", "2"]
            )
        finally:
            solver_registry.unregister("half")
        assert code == EXIT_DISAGREEMENT
        (record,) = _records(capsys.readouterr().out)
        assert record["instance_id"] == "a"
        assert record["masses"]["rts"] == pytest.approx(0.8)
        assert record["masses"]["half"] == pytest.approx(0.4)
        assert record["sets"]["rts"] == [0, 2]

    def test_guarded_solvers_are_skipped(self, tmp_path):
        config = tmp_path / "hsvp.yaml"
        config.write_text("solver:\n  mvm_max_cells: 640\n")
        assert _gen(tmp_path, 64, "--shape", "balanced", "--instances", "5") == EXIT_OK
        code = main(
            ["check", "--config", str(config), "--hierarchy", str(tmp_path / "hierarchy.tsv")]
            + ["--probs", str(tmp_path / "probs.csv"), "--r", "1,2", "--k", "1,3"]
        )
        assert code == EXIT_OK

    def test_single_solver(self, example_files):
        hierarchy, probs = example_files
        code = main(
            ["check", "--hierarchy", str(hierarchy), "--probs", str(probs), "--solver-set", "rts"]
        )
        assert code == EXIT_OK

    def test_unknown_solver(self, example_files):
        hierarchy, probs = example_files
        code = main(
            ["check", "--hierarchy", str(hierarchy), "--probs", str(probs), "--solver-set", "rts,nope"]
        )
        assert code == EXIT_INPUT_ERROR

    def test_invalid_config(self, example_files, tmp_path):
        hierarchy, probs = example_files
        config = tmp_path / "bad.yaml"
        config.write_text("solver:\n  enum_guard: 0\n")
        code = main(
            ["check", "--config", str(config), "--hierarchy", str(hierarchy), "--probs", str(probs)]
        )
        assert code == EXIT_INPUT_ERROR


class TestBench:
    """Test the benchmark grid."""

    def _bench(self, out, *extra):
        return main(
            ["bench", "--classes", "6", "--instances", "20", "--seed", "1"]
            + ["--r", "1,2", "--k", "1,3", "--no-timing", "--out", str(out), *extra]
        )

    def test_deterministic_csv(self, tmp_path):
        assert self._bench(tmp_path / "a.csv") == EXIT_OK
        assert self._bench(tmp_path / "b.csv") == EXIT_OK
        a = (tmp_path / "a.csv").read_text()
        assert a == (tmp_path / "b.csv").read_text()

        lines = a.splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        # three solvers by four budget pairs
        assert len(lines) == 13
        assert all(line.endswith(",ok") for line in lines[1:])

    def test_table_on_stderr(self, tmp_path, capsys):
        self._bench(tmp_path / "a.csv", "--solvers", "rts")
        err = capsys.readouterr().err
        assert "t_us" in err
        assert "|Y|" in err

    def test_guard_cells_are_marked(self, tmp_path):
        config = tmp_path / "hsvp.yaml"
        config.write_text("solver:\n  mvm_max_cells: 12\n")
        out = tmp_path / "a.csv"
        assert self._bench(out, "--config", str(config), "--solvers", "mvm,rts") == EXIT_OK
        lines = out.read_text().splitlines()
        assert any(line.startswith("mvm,") and line.endswith("skipped (guard)") for line in lines)
        assert all(line.endswith(",ok") for line in lines if line.startswith("rts,"))

    def test_recall_is_top_k_coverage_when_r_covers_k(self, tmp_path):
        assert _gen(tmp_path, 6, "--instances", "40", "--seed", "2") == EXIT_OK
        hierarchy, probs = tmp_path / "hierarchy.tsv", tmp_path / "probs.csv"
        out = tmp_path / "bench.csv"
        code = main(
            ["bench", "--hierarchy", str(hierarchy), "--probs", str(probs)]
            + ["--solvers", "mvm,kcg,rts", "--r", "1,2,3", "--k", "1,2,3"]
            + ["--no-timing", "--out", str(out)]
        )
        assert code == EXIT_OK

        instances = read_probs(probs, read_hierarchy(hierarchy))
        ranked = [np.argsort(-inst.flat.probs) for inst in instances]
        with out.open(newline="") as f:
            rows = [row for row in csv.DictReader(f) if int(row["r"]) >= int(row["k"])]
        assert len(rows) == 18
        assert {row["solver"] for row in rows} == {"mvm", "kcg", "rts"}
        for row in rows:
            k = int(row["k"])
            hits = [inst.y_true in order[:k] for inst, order in zip(instances, ranked)]
            assert float(row["recall"]) == pytest.approx(np.mean(hits), abs=1e-9), row

    def test_needs_data(self):
        assert main(["bench"]) == EXIT_INPUT_ERROR


class _CountingSolver(RtsSolver):
    """Counts solves."""

    name = "counting"

    def __init__(self, hierarchy, config=None):
        super().__init__(hierarchy, config)
        self.solved = []

    def _solve_impl(self, instance, budgets):
        self.solved.append(instance.instance_id)
        return super()._solve_impl(instance, budgets)


class TestBatchRunner:
    """Test warm-up and ordered batch solving."""

    def test_warm_up_times_the_last_round(self, example_tree, example_probs):
        solver = _CountingSolver(example_tree)
        instance = ProblemInstance("0", flat=example_probs)
        elapsed_us = BatchRunner(solver).warm_up(instance, Budgets(r=2, k=2), rounds=3)
        assert len(solver.solved) == 3
        assert elapsed_us > 0.0

    def test_no_warm_up(self, example_tree, example_probs):
        solver = _CountingSolver(example_tree)
        instance = ProblemInstance("0", flat=example_probs)
        assert BatchRunner(solver).warm_up(instance, Budgets(r=2, k=2), rounds=0) == 0.0
        assert len(solver.solved) == 0

    def test_results_keep_input_order(self, example_tree):
        instances = generate_instances(4, 12, seed=3)
        solver = _CountingSolver(example_tree)
        threaded = BatchRunner(solver, workers=3).run(instances, Budgets(r=1, k=2))
        inline = BatchRunner(solver).run(instances, Budgets(r=1, k=2))
        assert [p.classes for p in threaded] == [p.classes for p in inline]
        assert len(solver.solved) == 24
