import numpy as np
import pytest

from nestalg.nests import make_nest


@pytest.fixture
def n_all():
    return make_nest({"basis": "N", "cuts": "all"})


@pytest.fixture
def z_all():
    return make_nest({"basis": "Z", "cuts": "all"})


@pytest.fixture
def n_trivial():
    return make_nest({"basis": "N", "cuts": []})


@pytest.fixture
def n_explicit():
    return make_nest({"basis": "N", "cuts": [3, 7]})


@pytest.fixture
def rng():
    return np.random.default_rng(0)
