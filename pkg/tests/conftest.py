import pytest

from epipulse.ontology import default_ontology_path, load_ontology


@pytest.fixture(scope="session")
def default_spec():
    return load_ontology(default_ontology_path())
