import pytest

from kerrkit.services import lattice
from kerrkit.services.verification import OracleBudgetExceeded, VerificationSuite, run_verification
from kerrkit.utils.errors import DomainError, TruncationOverflowError


def _by_check(suite, name):
    return [r for r in suite.results if r.check == name]


def test_unknown_tier_and_fault():
    with pytest.raises(DomainError):
        VerificationSuite(tier="medium")
    with pytest.raises(DomainError):
        VerificationSuite(fault="flip-sign")


def test_decomposition_passes_with_proof_exponent():
    suite = VerificationSuite("quick")
    suite.check_decomposition()
    assert all(r.passed for r in suite.results)
    control = _by_check(suite, "decomposition_negative_control")[0]
    assert control.residual > 1e-6


def test_zeta0_fault_is_detected():
    suite = VerificationSuite("quick", fault="zeta0-lemma")
    suite.check_decomposition()
    failed = [r for r in _by_check(suite, "gaussian_decomposition") if not r.passed]
    assert failed
    assert all(r.params["zeta0"] == "statement" for r in failed)
    assert suite.report()["passed"] is False
    assert "gaussian_decomposition" in suite.report()["failed_checks"]


def test_smo_against_reference_qp():
    suite = VerificationSuite("quick", seed=3)
    suite.check_svm()
    assert {r.check for r in suite.results} == {"smo_vs_qp_objective", "smo_vs_qp_predictions", "qp_duality_gap"}
    assert all(r.passed for r in suite.results)


def test_lattice_checks():
    suite = VerificationSuite("quick")
    suite.check_lattice()
    checks = {r.check for r in suite.results}
    assert {"lattice_closed_form", "lattice_unitarity", "lattice_ode", "lattice_revival"} <= checks
    assert all(r.passed for r in suite.results)


def test_geometry_checks():
    suite = VerificationSuite("quick")
    suite.check_geometry()
    assert all(r.passed for r in suite.results), [r.check for r in suite.results if not r.passed]
    noted = [r for r in _by_check(suite, "ricci_scalar") if r.note]
    assert noted


def test_report_shape():
    suite = VerificationSuite("quick")
    suite.check_svm()
    report = suite.report()
    assert report["tier"] == "quick"
    assert report["fault"] is None
    assert report["passed"] is True
    assert report["checks"][0]["check"] == "smo_vs_qp_objective"


@pytest.mark.slow
def test_quick_tier_passes():
    report = run_verification("quick", seed=0)
    assert report["passed"], report["failed_checks"]


def test_lattice_domain_error_fails_the_check(monkeypatch):
    def broken(config):
        raise DomainError("coupling table out of range", parameter="j")

    monkeypatch.setattr(lattice, "coupling_matrix", broken)
    suite = VerificationSuite("quick")
    suite.check_lattice()
    guarded = _by_check(suite, "lattice")
    assert guarded
    assert not any(r.passed for r in guarded)
    assert guarded[0].note.startswith("DOMAIN_ERROR")
    assert suite.report()["passed"] is False
    assert "lattice" in suite.report()["failed_checks"]


def test_only_oracle_budget_overflow_is_a_skip():
    suite = VerificationSuite("quick")

    def over_budget():
        raise OracleBudgetExceeded("oracle basis 900 above budget 400", required_dim=900, cap=400)

    def leaked():
        raise TruncationOverflowError("field leaked past the last guide", required_dim=81, cap=80)

    suite._guarded("oracle", {}, over_budget)
    suite._guarded("leakage", {}, leaked)
    skipped, failed = suite.results
    assert skipped.passed is True
    assert skipped.note.startswith("skipped:")
    assert failed.passed is False
    assert failed.note.startswith("TRUNCATION_OVERFLOW")
