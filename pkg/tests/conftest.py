import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from packseq.catalog import default_catalog, default_container
from packseq.markov import START, MarkovChain


@pytest.fixture(scope="session")
def catalog24():
    return default_catalog()


@pytest.fixture(scope="session")
def container24():
    return default_container()


@pytest.fixture
def abc_chain():
    """Three objects: branch at A, reconverging pair B/C."""
    return MarkovChain(
        {
            START: [("A", 1.0)],
            "A": [("B", 0.6), ("C", 0.4)],
            "B": [("C", 1.0)],
            "C": [("A", 0.5), ("B", 0.5)],
        }
    )


@pytest.fixture
def linear5_chain():
    return MarkovChain(
        {
            START: [("A", 1.0)],
            "A": [("B", 1.0)],
            "B": [("C", 1.0)],
            "C": [("D", 1.0)],
            "D": [("E", 1.0)],
        }
    )
