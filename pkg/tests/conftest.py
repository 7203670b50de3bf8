import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session", autouse=True)
def witt_cache(tmp_path_factory):
    from unwindlab import witt

    d = str(tmp_path_factory.mktemp("witt-cache"))
    os.environ["UNWINDLAB_CACHE"] = d
    witt.set_cache_dir(d)
    yield d
