"""Acceptance criteria 1-13.  Each test prints one PASS/FAIL line, repeated in the run summary."""

import pytest

from conftest import ACCEPTANCE_LINES
from mfk.acceptance import CRITERIA, DEFAULT_SEED, run_one


@pytest.fixture(scope="module")
def report_lines():
    return ACCEPTANCE_LINES


def _check(n, report_lines):
    res = run_one(CRITERIA[n - 1], DEFAULT_SEED)
    line = res.line()
    print(line)
    report_lines.append(line)
    assert res.number == n
    assert res.ok, line


def test_criterion_01_factorisation_axioms(report_lines):
    _check(1, report_lines)


def test_criterion_02_sp_worked_example(report_lines):
    _check(2, report_lines)


def test_criterion_03_sp_chart_miss(report_lines):
    _check(3, report_lines)


def test_criterion_04_sp_functor_laws(report_lines):
    _check(4, report_lines)


def test_criterion_05_closure_identities(report_lines):
    _check(5, report_lines)


def test_criterion_06_clifford_square(report_lines):
    _check(6, report_lines)


def test_criterion_07_graded_dimensions(report_lines):
    _check(7, report_lines)


def test_criterion_08_knoerrer_comparison(report_lines):
    _check(8, report_lines)


def test_criterion_09_virtual_structure_sheaf(report_lines):
    _check(9, report_lines)


def test_criterion_10_normal_form_independence(report_lines):
    _check(10, report_lines)


def test_criterion_11_localisation(report_lines):
    _check(11, report_lines)


def test_criterion_12_smooth_cover(report_lines):
    _check(12, report_lines)


def test_criterion_13_groebner_engine(report_lines):
    _check(13, report_lines)
