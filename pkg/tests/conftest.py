import pytest

from charonette.lexicon import bundled_lexicon_path, load_lexicon_path


@pytest.fixture(scope="session")
def lex():
    return load_lexicon_path(bundled_lexicon_path())
