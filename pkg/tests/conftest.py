import math

from hypothesis import settings, strategies as st

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


def upper_points(lo=1e-3, hi=1e3, spread=50.0):
    return st.builds(
        complex,
        st.floats(-spread, spread, allow_nan=False),
        st.floats(lo, hi, allow_nan=False),
    )


@st.composite
def spectral_params(draw, M=None, eta_lo=1e-6, eta_hi=1.0):
    M = M if M is not None else draw(st.integers(2, 6))
    b = 2 * math.sqrt(M)
    e = draw(st.floats(-1.5 * b, 1.5 * b, allow_nan=False))
    eta = draw(st.floats(eta_lo, eta_hi, allow_nan=False))
    return M, complex(e, eta)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
