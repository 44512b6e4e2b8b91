import sys
from pathlib import Path

import pytest

from brics import load_builtin
from brics.source import SourceText

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).parent / "data"

CORPUS_FILES = sorted(DATA.glob("*.c")) + sorted(DATA.glob("*.java")) \
    + sorted(DATA.glob("*.toy"))

GRAMMAR_BY_SUFFIX = {".c": "c", ".h": "c", ".java": "java", ".toy": "toy"}


@pytest.fixture(scope="session")
def c_grammar():
    return load_builtin("c")


@pytest.fixture(scope="session")
def java_grammar():
    return load_builtin("java")


@pytest.fixture(scope="session")
def toy_grammar():
    return load_builtin("toy")


@pytest.fixture(scope="session")
def sample_source():
    return SourceText.from_text((DATA / "sample.c").read_text())


def corpus_cases():
    """(path, grammar name) for every corpus file."""
    return [(path, GRAMMAR_BY_SUFFIX[path.suffix]) for path in CORPUS_FILES]
