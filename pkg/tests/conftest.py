import os

import pytest
from hypothesis import HealthCheck, settings

from firstkit.protocol import Federation

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DATA = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture
def data_dir():
    return DATA


def make_federation(n=3, **kw):
    kw.setdefault("security_k", 16)
    kw.setdefault("difficulty_T", 64)
    kw.setdefault("threshold", 50)
    return Federation(n, **kw)


@pytest.fixture
def fed3():
    f = make_federation(3, seed=11)
    yield f
    f.close()


@pytest.fixture
def fed5():
    f = make_federation(5, seed=12)
    yield f
    f.close()
