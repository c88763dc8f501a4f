import pytest

from equitrack.verify import SUITES, Check, run_suite


def test_check_line():
    assert Check("x", 1e-12, 1e-10).line().startswith("[PASS] x")
    assert not Check("x", 1.0, 1e-10).passed
    assert not Check("x", float("nan"), 1e-10).passed


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_passes(name):
    checks = run_suite(name, seed=11)
    assert checks
    failed = [c.line() for c in checks if not c.passed]
    assert not failed, failed


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("bogus")
