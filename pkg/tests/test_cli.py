"""Tests for the dsmbcr command line."""

import csv
import io
import os
import subprocess
import sys
from pathlib import Path

import pytest

from dsmbcr.cli import EXIT_COMPUTATION, EXIT_OK, EXIT_VALIDATION, execute, main
from dsmbcr.formula import load_bba

SRC = Path(__file__).resolve().parents[1] / "src"


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))


# ═══════════════════════════════════════════════════════════════════════
# 1. enumerate
# ═══════════════════════════════════════════════════════════════════════


class TestEnumerate:
    def test_free_partition(self, capsys):
        code, out, _ = run(capsys, "enumerate", "--frame", "A,B,C", "--truth", "B|C", "--format", "csv")
        assert code == EXIT_OK
        table = rows(out)
        assert len(table) == 18
        parts = [row["part"] for row in table]
        assert (parts.count("d1"), parts.count("d2"), parts.count("d3")) == (13, 1, 4)
        cardinals = {row["element"]: int(row["cardinal"]) for row in table}
        assert cardinals["B | C"] == 6

    def test_shafer_text(self, capsys):
        code, out, _ = run(capsys, "enumerate", "--frame", "A,B,C", "--model", "shafer")
        assert code == EXIT_OK
        assert "7 nonempty elements" in out

    def test_from_file_with_truth(self, capsys, fixtures_dir):
        code, out, _ = run(capsys, "enumerate", str(fixtures_dir / "example1_free.bba"), "--truth", "B | C")
        assert code == EXIT_OK
        assert "|d1|=13 |d2|=1 |d3|=4" in out

    def test_hybrid_flags(self, capsys):
        code, out, _ = run(
            capsys, "enumerate", "--frame", "A,B,C", "--model", "hybrid", "--empty", "A & B", "--format", "csv"
        )
        assert code == EXIT_OK
        assert "A & B" not in [row["element"] for row in rows(out)]

    def test_needs_frame(self, capsys):
        code, _, err = run(capsys, "enumerate")
        assert code == EXIT_VALIDATION
        assert err.startswith("error:")

    def test_too_many_atoms(self, capsys):
        code, _, _ = run(capsys, "enumerate", "--frame", "A,B,C,D,E,F,G")
        assert code == EXIT_COMPUTATION


# ═══════════════════════════════════════════════════════════════════════
# 2. condition
# ═══════════════════════════════════════════════════════════════════════


class TestCondition:
    def test_shafer_prior(self, capsys, fixtures_dir):
        code, out, _ = run(
            capsys, "condition", str(fixtures_dir / "example2_shafer.bba"), "--rule", "BCR1", "--truth", "B|C"
        )
        assert code == EXIT_OK
        assert load_bba(out).as_dict() == pytest.approx({"B": 0.25, "C": 0.5, "B | C": 0.25})

    @pytest.mark.parametrize("rule", ["BCR3", "bcr20", "BCR31", "SCR"])
    def test_bayesian_prior(self, capsys, fixtures_dir, rule):
        code, out, _ = run(
            capsys, "condition", str(fixtures_dir / "example3_bayesian.bba"),
            "--rule", rule, "--truth", "C|D", "--format", "csv",
        )
        assert code == EXIT_OK
        assert rows(out) == [{"element": "C", "mass": "0.400000"}, {"element": "D", "mass": "0.600000"}]

    def test_free_prior_largest_subset(self, capsys, fixtures_dir):
        code, out, _ = run(
            capsys, "condition", str(fixtures_dir / "example1_free.bba"), "--rule", "BCR12", "--truth", "B|C"
        )
        assert code == EXIT_OK
        assert len(load_bba(out)) == 7

    def test_scr_needs_shafer(self, capsys, fixtures_dir):
        code, _, err = run(
            capsys, "condition", str(fixtures_dir / "example1_free.bba"), "--rule", "SCR", "--truth", "B|C"
        )
        assert code == EXIT_VALIDATION
        assert "Shafer" in err

    def test_empty_truth(self, capsys, fixtures_dir):
        code, _, _ = run(capsys, "condition", str(fixtures_dir / "example2_shafer.bba"), "--rule", "BCR1", "--truth", "A & B")
        assert code == EXIT_VALIDATION

    def test_unknown_rule(self, capsys, fixtures_dir):
        code, _, err = run(capsys, "condition", str(fixtures_dir / "example2_shafer.bba"), "--rule", "BCR40", "--truth", "B")
        assert code == EXIT_VALIDATION
        assert "BCR40" in err

    def test_syntax_error(self, capsys, fixtures_dir):
        code, _, err = run(capsys, "condition", str(fixtures_dir / "example2_shafer.bba"), "--rule", "BCR1", "--truth", "B |")
        assert code == EXIT_VALIDATION
        assert "byte 3" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, "condition", str(tmp_path / "nope.bba"), "--rule", "BCR1", "--truth", "A")
        assert code == EXIT_VALIDATION

    def test_scr_undefined(self, capsys, tmp_path):
        path = tmp_path / "ab.bba"
        path.write_text("frame: A, B, C\nmodel: shafer\nA : 1\n")
        code, _, _ = run(capsys, "condition", str(path), "--rule", "SCR", "--truth", "B | C")
        assert code == EXIT_COMPUTATION

    def test_missing_argument_is_validation_error(self, capsys, fixtures_dir):
        code, _, err = run(capsys, "condition", str(fixtures_dir / "example2_shafer.bba"), "--truth", "B")
        assert code == EXIT_VALIDATION
        assert "--rule" in err


# ═══════════════════════════════════════════════════════════════════════
# 3. fuse
# ═══════════════════════════════════════════════════════════════════════


class TestFuse:
    def test_pcr5(self, capsys, fixtures_dir):
        code, out, _ = run(
            capsys, "fuse", str(fixtures_dir / "commute1_m1.bba"), str(fixtures_dir / "commute1_m2.bba"),
            "--rule", "pcr5", "--format", "csv",
        )
        assert code == EXIT_OK
        assert [row["mass"] for row in rows(out)] == ["0.090476", "0.561732", "0.347792"]

    def test_dempster_reports_conflict(self, capsys, fixtures_dir):
        code, out, _ = run(
            capsys, "fuse", str(fixtures_dir / "commute2_m1.bba"), str(fixtures_dir / "commute2_m2.bba"),
            "--rule", "dempster",
        )
        assert code == EXIT_OK
        assert "# conflict: 0.41" in out
        assert load_bba(out).as_dict() == pytest.approx(
            {"A": 10 / 59, "B": 22 / 59, "C": 19 / 59, "A | B": 2 / 59, "B | C": 6 / 59}
        )

    def test_dsmc_marks_unnormalized_output(self, capsys, fixtures_dir):
        pair = [str(fixtures_dir / "commute2_m1.bba"), str(fixtures_dir / "commute2_m2.bba")]
        code, out, _ = run(capsys, "fuse", *pair, "--rule", "dsmc")
        assert code == EXIT_OK
        assert "# conflict: 0.41" in out
        assert "# unnormalized" in out

        code, out, _ = run(capsys, "fuse", *pair, "--rule", "dsmc", "--normalize")
        assert code == EXIT_OK
        assert "# conflict: 0.41" in out
        assert "# unnormalized" not in out
        assert load_bba(out).as_dict() == pytest.approx(
            {"A": 10 / 59, "B": 22 / 59, "C": 19 / 59, "A | B": 2 / 59, "B | C": 6 / 59}
        )

    def test_vacuous_is_identity(self, capsys, fixtures_dir, tmp_path):
        vacuous = tmp_path / "vacuous.bba"
        vacuous.write_text("frame: A, B, C\nmodel: shafer\nA | B | C : 1\n")
        code, out, _ = run(capsys, "fuse", str(fixtures_dir / "example2_shafer.bba"), str(vacuous), "--rule", "dempster")
        assert code == EXIT_OK
        assert load_bba(out).as_dict() == pytest.approx(
            load_bba((fixtures_dir / "example2_shafer.bba").read_text()).as_dict()
        )

    def test_total_conflict(self, capsys, tmp_path):
        a, b = tmp_path / "a.bba", tmp_path / "b.bba"
        a.write_text("frame: A, B\nmodel: shafer\nA : 1\n")
        b.write_text("frame: A, B\nmodel: shafer\nB : 1\n")
        code, _, err = run(capsys, "fuse", str(a), str(b), "--rule", "dempster")
        assert code == EXIT_COMPUTATION
        assert "conflict" in err

    def test_model_mismatch(self, capsys, fixtures_dir):
        code, _, _ = run(
            capsys, "fuse", str(fixtures_dir / "example1_free.bba"), str(fixtures_dir / "example2_shafer.bba"),
            "--rule", "dsmc",
        )
        assert code == EXIT_VALIDATION


# ═══════════════════════════════════════════════════════════════════════
# 4. compare-commute
# ═══════════════════════════════════════════════════════════════════════


class TestCompareCommute:
    def commute(self, capsys, fixtures_dir, pair, truth, fusion, bcr, fmt="text"):
        return run(
            capsys, "compare-commute",
            str(fixtures_dir / f"{pair}_m1.bba"), str(fixtures_dir / f"{pair}_m2.bba"),
            "--truth", truth, "--fusion", fusion, "--bcr", bcr, "--format", fmt,
        )

    def test_pcr5_orders_differ(self, capsys, fixtures_dir):
        code, out, _ = self.commute(capsys, fixtures_dir, "commute1", "A|B", "pcr5", "BCR1", "csv")
        assert code == EXIT_OK
        assert rows(out)[0] == {"element": "A", "m_FC": "0.138723", "m_CF": "0.129198"}

    def test_dempster_orders_agree(self, capsys, fixtures_dir):
        code, out, _ = self.commute(capsys, fixtures_dir, "commute1", "A|B", "dempster", "BCR12")
        assert code == EXIT_OK
        assert "# L1 distance: 0.000000" in out
        assert "1/13" in out

    def test_dempster_non_bayesian_orders_differ(self, capsys, fixtures_dir):
        code, out, _ = self.commute(capsys, fixtures_dir, "commute2", "B|C", "dempster", "BCR12")
        assert code == EXIT_OK
        assert "1348/2773" in out
        assert "5/11" in out  # 125/275
        assert "# L1 distance: 0.000000" not in out

    def test_scr(self, capsys, fixtures_dir):
        code, out, _ = self.commute(capsys, fixtures_dir, "commute2", "B|C", "dempster", "SCR", "csv")
        assert code == EXIT_OK
        assert [(r["m_FC"], r["m_CF"]) for r in rows(out)] == [
            ("0.489796", "0.489796"),
            ("0.387755", "0.387755"),
            ("0.122449", "0.122449"),
        ]


# ═══════════════════════════════════════════════════════════════════════
# 5. rules, belief, determinism
# ═══════════════════════════════════════════════════════════════════════


class TestMisc:
    def test_rules_csv(self, capsys):
        code, out, _ = run(capsys, "rules", "--format", "csv")
        assert code == EXIT_OK
        table = rows(out)
        assert len(table) == 31
        assert table[14] == {"rule": "BCR15", "d2": "p", "d3": "p", "selector": "average"}

    def test_belief(self, capsys, fixtures_dir):
        code, out, _ = run(capsys, "belief", str(fixtures_dir / "example2_shafer.bba"), "--truth", "B|C", "--format", "csv")
        assert code == EXIT_OK
        table = {row["element"]: row for row in rows(out)}
        assert table["B | C"]["bel"] == "0.400000"
        assert table["B | C"]["pl_given"] == "1.000000"
        assert table["B"]["bel_given"] == "0.250000"

    def test_deterministic(self, fixtures_dir):
        argv = ["condition", str(fixtures_dir / "example1_free.bba"), "--rule", "BCR6", "--truth", "B|C"]
        assert execute(argv).report == execute(argv).report

    def test_help(self, capsys):
        assert main(["--help"]) == EXIT_OK
        assert "compare-commute" in capsys.readouterr().out

    def test_module_entry_point(self, fixtures_dir):
        env = {**os.environ, "PYTHONPATH": str(SRC)}
        cp = subprocess.run(
            [sys.executable, "-m", "dsmbcr", "condition", str(fixtures_dir / "example2_shafer.bba"),
             "--rule", "BCR7", "--truth", "B | C", "--format", "csv"],
            capture_output=True, text=True, env=env,
        )
        assert cp.returncode == 0, cp.stderr
        assert cp.stdout.splitlines() == ["element,mass", "B,0.325000", "C,0.450000", "B | C,0.225000"]
