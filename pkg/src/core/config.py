import logging
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

logger = logging.getLogger(__name__)

# Normalization
DEFAULT_STEP_BUDGET: int = 10_000

# Prover budgets
DEFAULT_PROVER_TIME_LIMIT_S: float = 20.0
DEFAULT_PROVER_MAX_CLAUSES: int = 200_000
DEFAULT_PROVER_MAX_LITERALS: int = 6

# Parsing
DEFAULT_PARSE_BEAM: int = 8

# Finite-model oracle bounds
ORACLE_MAX_ENTITIES: int = 4
ORACLE_MAX_DEGREE_POINTS: int = 6
ORACLE_DELTA_VALUE: str = "1/4"

LOG_MESSAGE_MAX_CHARS: int = 2_000

REPO_ROOT: Path = Path(__file__).resolve().parents[2]


class AppConfig:
    VERSION: str = "0.3.0"
    PROGRAM_NAME: str = "jcomp"
    DATA_DIR: Path = REPO_ROOT / "data"
    DEFAULT_LEXICON: Path = DATA_DIR / "lexicon.tsv"
    DEFAULT_ADJECTIVES: Path = DATA_DIR / "adjectives.tsv"
    DEFAULT_DATASET: Path = DATA_DIR / "comparatives_fragment.jsonl"
    DEFAULT_GOLDEN: Path = DATA_DIR / "golden_formulas.tsv"
    DEFAULT_SETTINGS_FILE: Path = DATA_DIR / "engine.cfg"
    LABELS: tuple[str, ...] = ("yes", "no", "unknown")
    ERROR_LABEL: str = "error"


@dataclass
class EngineConfig:
    prover_time_limit: float = DEFAULT_PROVER_TIME_LIMIT_S
    prover_max_clauses: int = DEFAULT_PROVER_MAX_CLAUSES
    prover_max_literals: int = DEFAULT_PROVER_MAX_LITERALS
    parallel_directions: bool = True
    eval_workers: int = 4
    parse_beam: int = DEFAULT_PARSE_BEAM
    parse_fallback: int = 0
    hypothesis_presupposition: str = "goal"
    prover_backend: str = "builtin"
    external_prover_command: str = ""
    external_prover_success: str = "Theorem"
    external_prover_timeout: float = DEFAULT_PROVER_TIME_LIMIT_S
    oracle_entities: int = 3
    oracle_degrees: int = 4
    output_dir: str = "reports"

    @classmethod
    def from_settings(cls, values: dict[str, Any]) -> "EngineConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(values) - known)
        if unknown:
            logger.warning("Ignoring unknown configuration keys: %s", ", ".join(unknown))
        return cls(**{key: value for key, value in values.items() if key in known})
