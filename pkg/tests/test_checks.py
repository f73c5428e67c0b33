"""按种子运行的检查及其报告"""

import pytest

from equicat.checks import CHECKS, default_size, run_check
from equicat.error_handler import SizeCap, UnknownCheck, ValidationError


def test_registry_names():
    assert set(CHECKS) == {"gthom", "indgrot", "twisted", "modelhpb", "susp-coherence",
                           "conf-specialization", "exsharp", "nerve-hom", "quillenB-base"}
    assert all(default_size(name) >= 1 for name in CHECKS)


def test_exsharp_passes():
    report = run_check("exsharp", seed=0, size=1)
    assert report.verdict == "PASS"
    assert report.exit_code == 0
    assert report.witness["nu_G"] == -1
    assert report.witness["nu_e"] == 1
    assert report.counterexample is None


@pytest.mark.parametrize("check_id", ["gthom", "nerve-hom", "quillenB-base", "modelhpb",
                                      "susp-coherence", "conf-specialization"])
def test_small_runs_pass(check_id):
    report = run_check(check_id, seed=7, size=3, max_workers=1)
    assert report.counterexample is None
    assert report.verdict == "PASS"
    assert report.passed == 3


def test_reports_are_reproducible():
    first = run_check("nerve-hom", seed=11, size=4, max_workers=1).to_json()
    second = run_check("nerve-hom", seed=11, size=4, max_workers=2).to_json()
    assert first == second
    assert "elapsed" not in first


def test_timing_is_opt_in():
    data = run_check("exsharp", size=1).to_json(include_timing=True)
    assert data["elapsed"] >= 0
    assert data["verdict"] == "PASS"


def test_unknown_check():
    with pytest.raises(UnknownCheck):
        run_check("nosuch")


def test_size_must_be_positive():
    with pytest.raises(ValidationError):
        run_check("exsharp", size=0)


def test_size_cap(isolated_config):
    isolated_config.override('caps.check_size', 2)
    with pytest.raises(SizeCap):
        run_check("exsharp", size=3)
