import sys
from pathlib import Path

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from realmilnor.analysis import load_germ
from realmilnor.polyring import Polynomial, parse_polynomial

sys.path.insert(0, str(Path(__file__).parent))

CORPUS = Path(__file__).resolve().parents[1] / "src" / "realmilnor" / "corpus"

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def P(text, variables="xy"):
    return parse_polynomial(text, list(variables))


def polys(nvars=2, max_terms=4, max_exp=3, coeff=5):
    """Small random polynomials with integer coefficients."""
    term = st.tuples(
        st.tuples(*[st.integers(0, max_exp)] * nvars),
        st.integers(-coeff, coeff),
    )
    return st.lists(term, max_size=max_terms).map(lambda ts: Polynomial(nvars, ts))


@pytest.fixture(scope="session")
def corpus_dir():
    return CORPUS


@pytest.fixture(scope="session")
def corpus_germs():
    return {p.stem: load_germ(p) for p in sorted(CORPUS.glob("*.json"))}


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s[1:s.index("]")])):
            terminalreporter.write_line(line)
