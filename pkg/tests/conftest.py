import pytest

from morphoton.corpus import parse_unimorph
from morphoton.experiments import CORPORA, corpus_path, load_context
from morphoton.phonology import load_inventory


@pytest.fixture(scope="session")
def inventory():
    return load_inventory()


@pytest.fixture(scope="session")
def contexts():
    return {lang: load_context(lang) for lang in CORPORA}


@pytest.fixture(scope="session")
def corpora():
    """Parsed bundled corpora keyed by language code."""
    out = {}
    for lang, (_, pos) in CORPORA.items():
        forms, warnings = parse_unimorph(corpus_path(lang), pos=pos)
        assert not warnings
        out[lang] = forms
    return out
