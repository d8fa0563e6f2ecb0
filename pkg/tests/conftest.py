import pytest

from horse.index import build, open_index
from horse.ingest import GeneratorSpec, generate_synthetic
from horse.priors import fit

from helpers import car_ground_corpus


@pytest.fixture(scope="session")
def synthetic_corpus():
    """100 templated scenes, one injected violation, seed 7."""
    return generate_synthetic(GeneratorSpec(n_scenes=100, seed=7, anomaly_rate=0.01))


@pytest.fixture(scope="session")
def synthetic_handle(synthetic_corpus, tmp_path_factory):
    graphs = synthetic_corpus.graphs
    dir = tmp_path_factory.mktemp("idx-synth")
    return build(graphs, fit(graphs), str(dir))


@pytest.fixture(scope="session")
def car_ground():
    """(graphs, violating_image_id): 99 of 100 car-ground scenes canonical."""
    return car_ground_corpus()


@pytest.fixture(scope="session")
def car_ground_priors(car_ground):
    graphs, _ = car_ground
    return fit(graphs)
