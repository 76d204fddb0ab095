import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from tailsum import ModelSpec

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def standard_spec():
    """d=2 standard log-normal model factory, keyed by correlation."""
    cache = {}

    def build(rho: float) -> ModelSpec:
        if rho not in cache:
            cache[rho] = ModelSpec.standard(2, rho)
        return cache[rho]

    return build
