import json
import logging

import pytest

from kerrkit.config import Settings, activate_settings, get_settings, load_settings
from kerrkit.utils.errors import ConfigurationError
from kerrkit.utils.logging import LogContext, StructuredFormatter, log_with_context


def test_defaults():
    settings = Settings(_env_file=None)
    assert settings.seed == 0
    assert settings.workers == 1
    assert settings.n_jobs == 1
    assert Settings(workers=0, _env_file=None).n_jobs == -1


def test_precedence_flag_over_file_over_env(tmp_path, monkeypatch):
    monkeypatch.setenv("KERRKIT_SEED", "5")
    monkeypatch.setenv("KERRKIT_CV_FOLDS", "3")
    config = tmp_path / "settings.json"
    config.write_text(json.dumps({"seed": 11, "workers": 2}))

    settings = load_settings(config, seed=42, workers=None)
    assert settings.seed == 42
    assert settings.workers == 2
    assert settings.cv_folds == 3


def test_config_file_errors(tmp_path):
    with pytest.raises(ConfigurationError):
        load_settings(tmp_path / "missing.json")

    bad = tmp_path / "bad.json"
    bad.write_text("{seed: 1}")
    with pytest.raises(ConfigurationError):
        load_settings(bad)

    listed = tmp_path / "list.json"
    listed.write_text("[1]")
    with pytest.raises(ConfigurationError):
        load_settings(listed)


def test_invalid_value_names_key():
    with pytest.raises(ConfigurationError) as exc:
        load_settings(seed="many")
    assert exc.value.config_key == "seed"


def test_activation(settings):
    assert get_settings() is settings
    other = Settings(seed=9, _env_file=None)
    activate_settings(other)
    assert get_settings().seed == 9


def _record(message="hello", **extra):
    record = logging.LogRecord("kerrkit.test", logging.INFO, __file__, 1, message, None, None)
    for key, value in extra.items():
        setattr(record, key, value)
    return record


def test_structured_formatter_emits_json():
    entry = json.loads(StructuredFormatter().format(_record(n=3, context={"family": "RBF"})))
    assert entry["message"] == "hello"
    assert entry["level"] == "INFO"
    assert entry["n"] == 3
    assert entry["family"] == "RBF"


def test_log_context_stamps_records(caplog):
    logger = logging.getLogger("kerrkit.test")
    with caplog.at_level(logging.INFO, logger="kerrkit.test"):
        with LogContext(command="gram", run_id="abc"):
            logger.info("inside")
        logger.info("outside")
    inside, outside = caplog.records
    assert inside._log_ctx == {"command": "gram", "run_id": "abc"}
    assert not getattr(outside, "_log_ctx", {})


def test_log_with_context(caplog):
    logger = logging.getLogger("kerrkit.test")
    with caplog.at_level(logging.WARNING, logger="kerrkit.test"):
        log_with_context(logger, "warning", "cell skipped", spec="RBF(sigma=1)")
    assert caplog.records[0].context == {"spec": "RBF(sigma=1)"}
