"""One PASS/FAIL line per acceptance criterion (run with -s to see them inline)."""
import pytest

from uqm.acceptance import CRITERIA, SUITES, run_suite

SEED = 42


@pytest.mark.parametrize("criterion", sorted(CRITERIA))
def test_criterion(criterion, capsys):
    checks = CRITERIA[criterion](SEED)
    failed = [c for c in checks if not c.passed]
    status = "PASS" if not failed else "FAIL"
    with capsys.disabled():
        print(f"\n{status} criterion {criterion}: {len(checks) - len(failed)}/{len(checks)} checks")
        for c in checks:
            print("  " + c.line())
    assert not failed, "; ".join(c.line() for c in failed)


def test_suites_cover_all_criteria():
    assert set(SUITES["all"]) == set(CRITERIA)
    covered = {c for name, cs in SUITES.items() if name != "all" for c in cs}
    assert covered == set(CRITERIA)
    with pytest.raises(KeyError):
        run_suite("unknown-suite")
