import pytest

from churnnet import data, model, synthetic


@pytest.fixture(scope="session")
def small_records():
    """A few hundred generated customers, enough to train quick models on."""
    return synthetic.generate(n=400, seed=1)


@pytest.fixture(scope="session")
def small_csv(small_records, tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "small.csv"
    data.write_csv(small_records, path)
    return path


@pytest.fixture(scope="session")
def quick_config():
    """Deliberately small search so model-level tests stay fast."""
    return model.TrainingConfig(max_epochs=40, patience=10, hidden_range=(3, 4), seed=0)


@pytest.fixture(scope="session")
def quick_model(small_records, quick_config):
    return model.train(small_records, quick_config)
