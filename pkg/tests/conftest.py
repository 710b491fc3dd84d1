import os

import pytest
from hypothesis import settings, strategies as st

from theta6.eisenstein import EisensteinInt

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def elts(lim=10 ** 6, nonzero=True):
    s = st.builds(EisensteinInt, st.integers(-lim, lim), st.integers(-lim, lim))
    return s.filter(lambda x: not x.is_zero()) if nonzero else s


def coprime6(lim=10 ** 4):
    return elts(lim).filter(lambda x: x.norm() % 2 and x.norm() % 3)


@pytest.fixture(scope="session")
def tmat_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("tmat")
