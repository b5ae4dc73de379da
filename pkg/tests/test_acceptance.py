"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import pytest
from click.testing import CliRunner

from fhtsvd import checks
from fhtsvd.cli import main

from conftest import ACCEPTANCE_LINES


def _report(result):
    line = result.line()
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert result.passed, f"{line}\n{result.details}"


def test_criterion_01_slope():
    _report(checks.check_slope())


def test_criterion_02_gap():
    _report(checks.check_gap())


def test_criterion_03_root_brackets():
    _report(checks.check_root_brackets())


def test_criterion_04_period_matrix():
    _report(checks.check_periods())


def test_criterion_05_theta_identities():
    _report(checks.check_theta())


def test_criterion_06_jump_relations():
    _report(checks.check_jumps())


def test_criterion_07_operator_theory():
    _report(checks.check_operator())


def test_criterion_08_eigenfunction_asymptotics():
    _report(checks.check_eigenfunctions())


def test_criterion_09_genus_degeneration():
    _report(checks.check_degeneration())


def test_criterion_10_determinism(tmp_path):
    res = CliRunner().invoke(main, ["selftest", "--out", str(tmp_path)])
    lines = res.output.strip().splitlines()
    passed = res.exit_code == 0 and len(lines) == 7 and all(l.startswith("[PASS]") for l in lines)
    detail = "" if passed else f" (exit {res.exit_code}: {[l for l in lines if not l.startswith('[PASS]')]})"
    line = f"[{'PASS' if passed else 'FAIL'}] criterion 10: selftest suites and byte-identical reruns{detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert passed, res.output
