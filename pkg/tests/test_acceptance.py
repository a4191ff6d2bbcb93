"""One test per acceptance criterion; each prints a single PASS/FAIL line.

These run the full-size experiments (J = 100, dt = 1e-4) and take several
minutes in total.  Deselect them with ``-m "not slow"``.
"""

import pytest

from conftest import ACCEPTANCE_LINES
from heistriod import verify

pytestmark = pytest.mark.slow


def _report(result):
    line = result.line()
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert result.passed, line


def test_criterion_01_steiner_fixed_point():
    _report(verify.check_steiner_fixed_point())


def test_criterion_02_exp2_terminal_length():
    _report(verify.check_exp2_terminal())


def test_criterion_03_exp4_terminal_length():
    _report(verify.check_exp4_terminal())


def test_criterion_04_singularity_times():
    _report(verify.check_singularity_times())


def test_criterion_05_unconditional_stability():
    _report(verify.check_unconditional_stability(n=1000))


def test_criterion_06_geodesic_oracle():
    _report(verify.check_geodesic_oracle(n=1000))


def test_criterion_07_single_curve_convergence():
    _report(verify.check_single_curve_convergence())


def test_criterion_08_stationarity_diagnostics():
    _report(verify.check_stationarity())


def test_criterion_09_constraint_drift_convergence():
    _report(verify.check_drift_convergence())


def test_criterion_10_determinism():
    _report(verify.check_determinism())
