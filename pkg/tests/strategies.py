import numpy as np
from hypothesis import strategies as st

from melnikov_lab.perturbation import PerturbationSpec

coef = st.floats(-2, 2, allow_nan=False, allow_infinity=False)


@st.composite
def specs(draw, m=None, holomorphic=None, max_m=3):
    m = draw(st.integers(0, max_m)) if m is None else m
    holomorphic = draw(st.booleans()) if holomorphic is None else holomorphic
    seed = draw(st.integers(0, 2**32 - 1))
    return PerturbationSpec.random(m, np.random.default_rng(seed), holomorphic=holomorphic)


radii = st.floats(0.01, 0.99)
