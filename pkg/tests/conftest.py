import pytest

from flowerauction import (CostKind, MarketConfig, TimeCostSpec, solve_profile,
                           threshold_s_tilde)


@pytest.fixture(scope="session")
def example_cfg():
    # two bidders, uniform values, c(t) = 1 - 0.5 t
    return MarketConfig(n=2, cost=TimeCostSpec(CostKind.LINEAR, 0.5))


@pytest.fixture(scope="session")
def example_s_tilde(example_cfg):
    return threshold_s_tilde(example_cfg)


@pytest.fixture(scope="session")
def example_profile(example_cfg, example_s_tilde):
    return solve_profile(example_cfg, 0.462, s_tilde=example_s_tilde)
