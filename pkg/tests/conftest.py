from __future__ import annotations

import pytest

from support import load_corpus


@pytest.fixture(scope="session")
def nat_sig():
    return load_corpus("nat")


@pytest.fixture(scope="session")
def list_sig():
    return load_corpus("list")


@pytest.fixture(scope="session")
def vec_sig():
    return load_corpus("vec")


@pytest.fixture(scope="session")
def fin_sig():
    return load_corpus("fin")


@pytest.fixture(scope="session")
def norm_sig():
    return load_corpus("normalize")
