import pytest

from lorenzlab.attractor.levels import LevelStructure, build_levels
from lorenzlab.maps.restricted import RestrictedMap, restrict_rescale
from lorenzlab.maps.standard import StandardFamilyMap
from lorenzlab.renorm.tuner import TuningResult, tune_parameters

TUNED_RANGE = (0.962, 0.965)


def pytest_addoption(parser: pytest.Parser) -> None:
    parser.addoption("--runslow", action="store_true", default=False, help="Run acceptance-scale checks.")


def pytest_collection_modifyitems(config: pytest.Config, items: list[pytest.Item]) -> None:
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def tuned() -> TuningResult:
    return tune_parameters(
        0.5,
        2.0,
        [(2, 2), (2, 2)],
        budget=2000,
        tolerance=1e-8,
        u_range=TUNED_RANGE,
        v_range=TUNED_RANGE,
    )


@pytest.fixture(scope="session")
def tuned_map(tuned: TuningResult) -> StandardFamilyMap:
    return tuned.map


@pytest.fixture(scope="session")
def levels(tuned: TuningResult) -> LevelStructure:
    return build_levels(tuned.map, tuned.cascade)


@pytest.fixture(scope="session")
def restricted(tuned_map: StandardFamilyMap) -> RestrictedMap:
    return restrict_rescale(tuned_map, 0.02)
