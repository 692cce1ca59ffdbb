import os

import hypothesis
import pytest

os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")

from jacobisums.sieve import build_sieve  # noqa: E402

hypothesis.settings.register_profile("ci", max_examples=200, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=25, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))


@pytest.fixture(scope="session")
def table_1e4():
    return build_sieve(10**4)


@pytest.fixture(scope="session")
def table_1e6():
    return build_sieve(10**6)


@pytest.fixture(scope="session")
def table_1e7():
    return build_sieve(10**7)
