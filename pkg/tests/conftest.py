from fractions import Fraction
import itertools

import pytest

import pmvforge


pytest.HALF = (Fraction(1, 2), Fraction(1, 2))
pytest.LEFT = (Fraction(4, 5), Fraction(1, 5))
pytest.RIGHT = (Fraction(2, 5), Fraction(3, 5))


def histograms(n: int, q: int) -> list[tuple[int, ...]]:
    r"""All histograms of n votes over q rankings."""
    result = []
    for combination in itertools.combinations_with_replacement(range(q), n):
        counts = [0] * q
        for i in combination:
            counts[i] += 1
        result.append(tuple(counts))
    return result


pytest.histograms = histograms


@pytest.fixture(scope="function")
def toy():
    return pmvforge.toy_setting()


@pytest.fixture(scope="function")
def toy_family():
    return pmvforge.toy_family()


@pytest.fixture(scope="function", autouse=True)
def default_config(monkeypatch):
    r"""Restore configuration and thread settings after every test."""
    monkeypatch.delenv("PMV_FORGE_THREADS", raising=False)
    for key in [
        "NODE_LIMIT",
        "BIG_M",
        "KNIFE_BAND",
        "PATTERN_LIMIT",
        "ORACLE_CAPS",
        "SUCCESS_FLOOR",
        "CONFIDENCE",
        "PSI_BUDGET_CONSTANT",
        "MULTI_BUDGET_FRACTION",
        "NUM_WORKERS",
    ]:
        monkeypatch.setattr(pmvforge.config, key, getattr(pmvforge.config, key))
    yield
