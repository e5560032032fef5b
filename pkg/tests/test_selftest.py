"""Tests for selftest.py -- the acceptance checks; the full-battery ones are marked slow."""

import pytest

from petzrenyi.engine import PetzRenyiEngine
from petzrenyi.selftest import CheckResult, SelfTest


@pytest.fixture(scope="module")
def battery():
    return SelfTest(PetzRenyiEngine(tol=1e-8), subspaces=2)


class TestChecks:
    @pytest.mark.parametrize(
        "name",
        [
            "endpoint_zero_measure",
            "monotone_bound_measure",
            "strip_bound",
            "log_moment_concavity",
            "endpoint_zero_subspace",
            "modular_identities",
            "kms_condition",
            "gram_positivity",
        ],
    )
    def test_passes(self, battery, name):
        result = getattr(battery, name)()
        assert result.check == name
        assert result.passed, result

    @pytest.mark.slow
    @pytest.mark.parametrize(
        "name",
        ["chiral_alpha_limit", "chiral_first_correction", "beta_limits", "wedge_alpha_limit"],
    )
    def test_full_battery_passes(self, battery, name):
        result = getattr(battery, name)()
        assert result.passed, result

    def test_commutator_relations(self, battery):
        assert battery.commutator_relations().passed

    def test_quick_battery_is_subset(self, battery):
        quick = [name for name, _ in battery.checks(quick=True)]
        full = [name for name, _ in battery.checks()]
        assert full[: len(quick)] == quick
        assert "wedge_alpha_limit" in full and "wedge_alpha_limit" not in quick


class TestCheckResult:
    def test_row(self):
        assert CheckResult("x", 1e-9, 1e-8, True).row() == ("x", 1e-9, 1e-8, True)
