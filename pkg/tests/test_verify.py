import pytest

from phasestar.config import RunConfig
from phasestar.verify import SUITES, check_damped_pathology, run_suite


def test_config_validation():
    assert RunConfig().as_dict()["order"] == 10
    for bad in (dict(order=-1), dict(tol=0), dict(samples=0), dict(format="xml")):
        with pytest.raises(ValueError):
            RunConfig(**bad)


@pytest.mark.parametrize("suite", ["husimi", "orderings", "heisenberg-weyl", "coarse-grain", "damped-local", "no-go"])
def test_passing_suites(suite):
    results = run_suite(suite)
    assert results and all(r.passed for r in results), [r.detail for r in results]


def test_damped_suite_reports_sign():
    cfg = RunConfig()
    assert not check_damped_pathology(cfg, samples=5).passed
    assert check_damped_pathology(cfg, samples=5, sign=-1).passed


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope")
    assert "moyal-core" in SUITES
