import json

import pytest

from src.core.config import AppConfig, EngineConfig
from src.core.data import GoldenFormulaManager, read_tsv
from src.core.settings import DEFAULT_SETTINGS, SettingsManager, parse_settings_text
from src.core.system import ConfigError, EventBus
from src.core.utils import PerfTracker, atomic_write_json, atomic_write_text


def test_default_settings_file_matches_built_in_defaults():
    settings = SettingsManager(AppConfig.DEFAULT_SETTINGS_FILE, strict=True)
    assert settings.get_all() == DEFAULT_SETTINGS
    assert settings.engine_config() == EngineConfig()


def test_parse_settings_text_coerces_types():
    values = parse_settings_text("# comment\n\nprover_time_limit = 2.5\nparallel_directions=off\nparse_beam=3\n")
    assert values == {"prover_time_limit": 2.5, "parallel_directions": False, "parse_beam": 3}


def test_unknown_settings_are_ignored():
    assert parse_settings_text("colour=blue\n") == {}


@pytest.mark.parametrize("text", [
    "parse_beam=many",
    "parallel_directions=maybe",
    "prover_backend=vampire",
    "prover_time_limit=soon",
    "no equals sign",
])
def test_invalid_settings(text):
    with pytest.raises(ConfigError):
        parse_settings_text(text)


def test_strict_manager_raises_and_lenient_one_falls_back(tmp_path):
    path = tmp_path / "engine.cfg"
    path.write_text("parse_beam=many\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        SettingsManager(path, strict=True)
    assert SettingsManager(path).get_all() == DEFAULT_SETTINGS


def test_missing_settings_file_gives_defaults(tmp_path):
    assert SettingsManager(tmp_path / "absent.cfg").engine_config() == EngineConfig()


def test_set_publishes_and_save_round_trips(tmp_path):
    bus = EventBus()
    seen = []
    bus.subscribe("settings_updated", seen.append)
    path = tmp_path / "engine.cfg"
    settings = SettingsManager(path, bus)
    settings.set("eval_workers", 2)
    settings.set("hypothesis_presupposition", "premise")
    assert seen[0] == {"key": "eval_workers", "value": 2}
    settings.save()
    reloaded = SettingsManager(path, strict=True).engine_config()
    assert reloaded.eval_workers == 2
    assert reloaded.hypothesis_presupposition == "premise"
    with pytest.raises(ConfigError):
        settings.set("colour", "blue")
    with pytest.raises(ConfigError):
        settings.set("prover_backend", "vampire")


def test_engine_config_ignores_unknown_keys():
    assert EngineConfig.from_settings({"parse_beam": 2, "colour": "blue"}).parse_beam == 2


def test_event_bus_isolates_failing_subscribers():
    bus = EventBus()
    received = []

    def broken(_):
        raise RuntimeError("boom")

    bus.subscribe("problem_decided", broken)
    bus.subscribe("problem_decided", received.append)
    bus.publish("problem_decided", "jsem-569")
    bus.publish("other_event", "ignored")
    assert received == ["jsem-569"]


def test_atomic_writes(tmp_path):
    target = tmp_path / "nested" / "out.json"
    atomic_write_json(target, {"label": "yes"})
    assert json.loads(target.read_text(encoding="utf-8")) == {"label": "yes"}
    atomic_write_text(target, "replaced")
    assert target.read_text(encoding="utf-8") == "replaced"
    assert not list(tmp_path.glob("nested/*.tmp"))


def test_perf_tracker_records_steps():
    perf = PerfTracker("test")
    assert perf.step("one") >= 0.0
    assert set(perf.steps) == {"one"}
    assert perf.total >= perf.steps["one"]


def test_read_tsv_skips_comments_and_blanks(tmp_path):
    path = tmp_path / "rows.tsv"
    path.write_text("# header\n\na\tb\n  # indented comment\nc\td\n", encoding="utf-8")
    assert list(read_tsv(path)) == [(3, ["a", "b"]), (5, ["c", "d"])]


def test_golden_manager_skips_short_rows(tmp_path):
    path = tmp_path / "golden.tsv"
    path.write_text("ok\tTaro-wa omoi.\t(heavy taro theta_heavy)\nbroken\tonly two\n", encoding="utf-8")
    golden = GoldenFormulaManager(path)
    assert golden.ids() == ["ok"]
    assert golden.text("ok") == "(heavy taro theta_heavy)"


def test_sources_separate_blocks_with_at_most_two_blank_lines():
    root = AppConfig.DATA_DIR.parent
    for path in sorted([root / "run.py", *root.glob("src/**/*.py"), *root.glob("tests/*.py")]):
        text = path.read_text(encoding="utf-8")
        assert "\n\n\n\n" not in text, path.relative_to(root)
