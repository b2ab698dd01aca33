import hypothesis.strategies as st
from hypothesis import settings

from polarpunct.patterns import Pattern

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def patterns(draw, n_min=1, n_max=6):
    n = draw(st.integers(n_min, n_max))
    bits = draw(st.integers(0, (1 << (1 << n)) - 1))
    return Pattern(n, bits)


def all_patterns(n):
    return [Pattern(n, b) for b in range(1 << (1 << n))]


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
