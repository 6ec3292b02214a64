import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for oracles.py

from quicksort_tails import limitmgf as lm


@pytest.fixture(scope="session")
def psi_table():
    return lm.fixpoint_psi(t_max=12.0, grid_size=256, tol=1e-9, max_iter=60)


@pytest.fixture(scope="session")
def psi_table_fine():
    return lm.fixpoint_psi(t_max=12.0, grid_size=512, tol=1e-9, max_iter=60)
