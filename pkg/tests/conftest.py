import pytest

from mollab.kernels import KernelConfig, default_G
from mollab.lfunctions import AfeEvaluator, default_evaluator


@pytest.fixture(scope="session")
def evaluator() -> AfeEvaluator:
    """Default-configuration evaluator; builds the kernel tables once."""
    return default_evaluator()


@pytest.fixture(scope="session")
def evaluator_k3() -> AfeEvaluator:
    cfg = KernelConfig(g=default_G(3), pole_kill_count=3)
    return AfeEvaluator(cfg)
