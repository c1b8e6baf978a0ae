import logging
from dataclasses import asdict
from pathlib import Path
from typing import Any

from src.core.config import AppConfig, EngineConfig
from src.core.system import ConfigError
from src.core.utils import atomic_write_text

logger = logging.getLogger(__name__)

DEFAULT_SETTINGS: dict[str, Any] = asdict(EngineConfig())

CHOICES: dict[str, tuple[str, ...]] = {
    "hypothesis_presupposition": ("goal", "premise"),
    "prover_backend": ("builtin", "external"),
}

_TRUE_WORDS = {"1", "true", "yes", "on"}
_FALSE_WORDS = {"0", "false", "no", "off"}


def _coerce(key: str, raw: str) -> Any:
    default = DEFAULT_SETTINGS[key]
    text = raw.strip()
    if isinstance(default, bool):
        lowered = text.lower()
        if lowered in _TRUE_WORDS:
            return True
        if lowered in _FALSE_WORDS:
            return False
        raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
    if isinstance(default, int):
        try:
            return int(text)
        except ValueError as exc:
            raise ConfigError(f"{key}: expected an integer, got {raw!r}") from exc
    if isinstance(default, float):
        try:
            return float(text)
        except ValueError as exc:
            raise ConfigError(f"{key}: expected a number, got {raw!r}") from exc
    if key in CHOICES and text not in CHOICES[key]:
        raise ConfigError(f"{key}: expected one of {', '.join(CHOICES[key])}, got {raw!r}")
    return text


def parse_settings_text(text: str) -> dict[str, Any]:
    """Parses `key=value` lines; blank lines and `#` comments are skipped."""
    values: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, raw = stripped.split("=", 1)
        key = key.strip()
        if key not in DEFAULT_SETTINGS:
            logger.warning("Unknown setting '%s' on line %d ignored", key, lineno)
            continue
        values[key] = _coerce(key, raw)
    return values


class SettingsManager:
    """Manages loading and saving of engine settings."""

    def __init__(self, filepath: Path | None = None, event_bus=None, strict: bool = False):
        self.filepath = Path(filepath) if filepath else AppConfig.DEFAULT_SETTINGS_FILE
        self.event_bus = event_bus
        self.strict = strict
        self._settings: dict[str, Any] = {}
        self.load()

    def load(self) -> None:
        try:
            if self.filepath.exists():
                self._settings = parse_settings_text(self.filepath.read_text(encoding="utf-8"))
            else:
                self._settings = DEFAULT_SETTINGS.copy()
        except ConfigError:
            if self.strict:
                raise
            logger.exception("Failed to load settings from %s, using defaults", self.filepath)
            self._settings = DEFAULT_SETTINGS.copy()
        except OSError:
            logger.exception("Failed to read settings file %s", self.filepath)
            self._settings = DEFAULT_SETTINGS.copy()

        for key, value in DEFAULT_SETTINGS.items():
            self._settings.setdefault(key, value)

    def save(self) -> None:
        lines = [f"{key}={self._format(value)}" for key, value in sorted(self._settings.items())]
        atomic_write_text(self.filepath, "\n".join(lines) + "\n")

    @staticmethod
    def _format(value: Any) -> str:
        if isinstance(value, bool):
            return "true" if value else "false"
        return str(value)

    def get(self, key: str, default=None):
        return self._settings.get(key, default)

    def set(self, key: str, value) -> None:
        if key not in DEFAULT_SETTINGS:
            raise ConfigError(f"unknown setting {key!r}")
        self._settings[key] = _coerce(key, self._format(value))
        if self.event_bus:
            self.event_bus.publish("settings_updated", {"key": key, "value": self._settings[key]})

    def get_all(self) -> dict:
        return self._settings.copy()

    def engine_config(self) -> EngineConfig:
        return EngineConfig.from_settings(self._settings)
