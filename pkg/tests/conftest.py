"""Shared hypothesis strategies and frozen reference values.

Reference values were computed with 40-digit mpmath from surd arithmetic,
the central-binomial series, the AGM form of the complete elliptic
integral and direct double quadrature of the 2-D Green's function.
"""

import math

from hypothesis import strategies as st

# 1-D walk p=0.7, alpha=0.8: discriminant 0.4624 = 0.68**2
XI1 = 3.5
XI2 = 2.0 / 3.0
C_1D = 25.0 / 17.0

# 1-D symmetric walk p=alpha=0.5: sum_k C(2k,k) (1/16)^k = 2/sqrt(3)
X0_SYM = 1.154700538379251529

# 2-D walk alpha=0.2: X_0 = 1/AGM(1, 0.6) = (2/pi) K(k=0.8)
X0_2D = 1.270249200121322790
X10_2D = 0.337811500151653488

# two-level alpha=0.2
MU2 = 0.267949192431122706
MU4 = 0.171572875253809902
B_TL = 0.721687836487032206
D_TL = 0.441941738241592203
F0 = 1.163629574728624408
G0 = 0.279746098245440003
F1 = 0.269200887698841020


def agm(a: float, b: float) -> float:
    for _ in range(60):
        if a == b:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return a


probs = st.floats(min_value=1e-3, max_value=1 - 1e-3)
alphas_1d = st.floats(min_value=1e-3, max_value=0.999)
alphas_tl = st.floats(min_value=1e-3, max_value=1 / 3 - 1e-3)


@st.composite
def nd_models(draw, dims=(2, 3)):
    from geoabsorb import make_walk_nd

    n = draw(st.sampled_from(dims))
    frac = draw(st.floats(min_value=0.05, max_value=0.95))
    return make_walk_nd(n, frac / (2 * n))


# ---------------------------------------------------------------------------
# acceptance reporting: one line per criterion in the terminal summary

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
