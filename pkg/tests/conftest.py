import pytest

from equideg.model_io import bundled_model


@pytest.fixture(scope="session")
def model():
    return bundled_model()


@pytest.fixture(scope="session")
def ctx(model):
    return model.ctx


@pytest.fixture(scope="session")
def prob(model):
    return model.problem
