from fractions import Fraction

import numpy as np
import pytest

from pmvforge.core.elections import uniform_distribution
from pmvforge.core.settings import toy_setting


@pytest.fixture(autouse=True)
def docstring_examples(doctest_namespace, tmpdir, monkeypatch):  # pragma: no cover
    r"""Provide the toy setting in doctests."""
    doctest_namespace["Fraction"] = Fraction
    doctest_namespace["toy"] = toy_setting()
    doctest_namespace["uniform"] = uniform_distribution(2)
    monkeypatch.chdir(tmpdir)
    monkeypatch.delenv("PMV_FORGE_THREADS", raising=False)
    # NumPy >= 2 prints scalars as np.float64(...); keep plain doctest output
    with np.printoptions(legacy="1.25"):
        yield
