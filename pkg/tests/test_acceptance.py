"""验收：按给定规模运行全部随机检查，要求零失败"""

import pytest

from equicat.checks import run_check
from equicat.instances import SMALL_GROUPS

ACCEPTANCE_SIZES = [
    ("exsharp", 1),
    ("susp-coherence", 500 * len(SMALL_GROUPS)),
    ("conf-specialization", 1000),
    ("gthom", 200),
    ("indgrot", 100),
    ("modelhpb", 100),
    ("twisted", 50),
    ("nerve-hom", 50),
    ("quillenB-base", 20),
]


@pytest.mark.parametrize("check_id, size", ACCEPTANCE_SIZES)
def test_check_passes_at_acceptance_size(check_id, size):
    report = run_check(check_id, seed=1, size=size)
    assert report.counterexample is None, report.counterexample
    assert report.passed == size
    assert report.exit_code == 0