import numpy as np
import pytest
from hypothesis import strategies as st

import chaingap as cg


@st.composite
def stochastic_matrices(draw, min_size=2, max_size=6):
    """Strictly positive row-stochastic matrices (irreducible, aperiodic)."""
    n = draw(st.integers(min_size, max_size))
    rows = draw(
        st.lists(
            st.lists(
                st.floats(0.05, 1.0, allow_nan=False, allow_infinity=False),
                min_size=n,
                max_size=n,
            ),
            min_size=n,
            max_size=n,
        )
    )
    m = np.array(rows)
    return m / m.sum(axis=1, keepdims=True)


@pytest.fixture(scope="session")
def flip():
    return cg.build_chain([[0.0, 1.0], [1.0, 0.0]])


@pytest.fixture(scope="session")
def uniform5():
    return cg.build_chain(np.full((5, 5), 0.2))


@pytest.fixture(scope="session")
def shift4():
    return cg.circulant_chain(4, [(1, 1.0)])


@pytest.fixture(scope="session")
def battery():
    return cg.reference_battery()
