import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from izroupoid.algebra import builtin_algebra, check_identity, direct_product  # noqa: E402
from izroupoid.catalog import builtin_catalog  # noqa: E402
from izroupoid.search import SearchConfig, enumerate_models  # noqa: E402

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def catalog():
    return builtin_catalog()


@pytest.fixture(scope="session")
def corpus_by_size():
    """Every I-zroupoid of size 1..4 up to isomorphism."""
    return {n: enumerate_models(SearchConfig(n)).algebras for n in range(1, 5)}


@pytest.fixture(scope="session")
def corpus(corpus_by_size):
    return [A for n in sorted(corpus_by_size) for A in corpus_by_size[n]]


@pytest.fixture(scope="session")
def i20_corpus(corpus, catalog):
    return [A for A in corpus if check_identity(A, catalog["I20"]).holds]


@pytest.fixture(scope="session")
def five():
    return {name: builtin_algebra(name) for name in ("2z", "2s", "2b", "3k", "4d")}


@pytest.fixture(scope="session")
def b2xb2(five):
    return direct_product(five["2b"], five["2b"])


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    lines = getattr(acceptance, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda l: int(l[6:8])):
            terminalreporter.write_line(line)
