import pytest

from fop import corpus


@pytest.fixture(scope="session")
def corpus_ops():
    """Parsed corpus operators keyed by id."""
    return {cid: corpus.get(cid).operator for cid in corpus.list_ids()}


@pytest.fixture(scope="session")
def ploc(corpus_ops):
    return corpus_ops["ploc"]


@pytest.fixture(scope="session")
def no2(corpus_ops):
    return corpus_ops["no2"]


_MONODROMY_CACHE = {}


@pytest.fixture(scope="session")
def monodromy_of():
    """Memoized full monodromy data, keyed by (corpus id or tag, prec)."""
    from fop.monodromy import monodromy_matrices

    def get(tag, op, prec=128):
        key = (tag, prec)
        if key not in _MONODROMY_CACHE:
            _MONODROMY_CACHE[key] = monodromy_matrices(op, prec)
        return _MONODROMY_CACHE[key]

    return get
