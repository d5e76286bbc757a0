import pytest

import pmvforge
from pmvforge.core.config import default_num_workers


def test_default_num_workers(monkeypatch):
    assert default_num_workers() == pmvforge.config.NUM_WORKERS
    monkeypatch.setattr(pmvforge.config, "NUM_WORKERS", 2)
    assert default_num_workers() == 2
    monkeypatch.setenv("PMV_FORGE_THREADS", "4")
    assert default_num_workers() == 4


@pytest.mark.parametrize("value", ["0", "-1", "two"])
def test_default_num_workers_error(monkeypatch, value):
    monkeypatch.setenv("PMV_FORGE_THREADS", value)
    error_msg = f"PMV_FORGE_THREADS has to be a positive integer, not '{value}'."
    with pytest.raises(ValueError, match=error_msg):
        default_num_workers()


def test_defaults():
    assert pmvforge.config.SUCCESS_FLOOR == 25
    assert pmvforge.config.CONFIDENCE == 0.95
    assert 0 < pmvforge.config.KNIFE_BAND < 1
    assert set(pmvforge.config.ORACLE_CAPS) == {"n", "m", "b"}
