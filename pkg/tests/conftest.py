import pytest

from src.axioms.registry import AdjectiveRegistry
from src.core.config import EngineConfig
from src.grammar.lexicon import Lexicon
from src.pipeline.decide import Pipeline


@pytest.fixture(scope="session")
def lexicon():
    return Lexicon.load()


@pytest.fixture(scope="session")
def registry():
    return AdjectiveRegistry.load()


@pytest.fixture(scope="session")
def engine_config():
    return EngineConfig(
        parallel_directions=False,
        eval_workers=1,
        prover_time_limit=60.0,
        prover_max_clauses=50_000,
    )


@pytest.fixture(scope="session")
def pipeline(lexicon, registry, engine_config):
    return Pipeline(lexicon, registry, engine_config)
