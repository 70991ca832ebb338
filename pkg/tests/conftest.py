from __future__ import annotations

from pathlib import Path

import pytest

from astdkit.corpus import load, load_file
from astdkit.engine import Engine

HERE = Path(__file__).parent
FIXTURES = HERE / "fixtures"
GOLDEN = HERE / "golden"


@pytest.fixture(scope="session")
def docs():
    return {
        name: load(name)
        for name in (
            "trains_L1", "trains_L2", "trains_L3", "trains_L4",
            "trains_L1_mut_jump", "trains_L2_mut_mal", "trains_L4_mut_nocommtb",
        )
    }


@pytest.fixture(scope="session")
def engines(docs):
    return {name: Engine(doc) for name, doc in docs.items()}


@pytest.fixture(scope="session")
def ltss(engines):
    return {name: engine.explore() for name, engine in engines.items()}


@pytest.fixture(scope="session")
def fixture_docs():
    return {
        p.stem: load_file(p) for p in sorted(FIXTURES.glob("*.astd"))
    }
