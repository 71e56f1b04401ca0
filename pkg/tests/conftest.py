import numpy as np
import pytest

import relaxfeas as rf
from relaxfeas.model import LinearSystem


def random_bounded_system(rng, n_max=6, box=3.0, extra_max=3, m_max=2):
    """Random integer system with entries in [-3, 3] plus a bounding box.

    The box keeps the feasible set bounded (so the vertex-enumeration
    oracle is exact) and every generated row nonzero.
    """
    n = int(rng.integers(2, n_max + 1))
    m = int(rng.integers(0, m_max + 1))
    while True:
        A = rng.integers(-3, 4, size=(m, n)).astype(float)
        if m == 0:
            break
        if all(A[i].any() for i in range(m)) and np.linalg.matrix_rank(A) == m:
            break
    b = rng.integers(-3, 4, size=m).astype(float)
    k = int(rng.integers(1, extra_max + 1))
    rows = []
    while len(rows) < k:
        row = rng.integers(-3, 4, size=n).astype(float)
        if row.any():
            rows.append(row)
    C = np.vstack([np.array(rows), np.eye(n), -np.eye(n)])
    d = np.concatenate([rng.integers(-3, 4, size=k).astype(float),
                        np.full(2 * n, box)])
    return LinearSystem(A=A, b=b, C=C, d=d)


def unit_box_system(A, b):
    """Ax = b together with explicit 0 <= x <= 1 rows."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[1]
    C = np.vstack([np.eye(n), -np.eye(n)])
    d = np.concatenate([np.ones(n), np.zeros(n)])
    return LinearSystem(A=A, b=np.asarray(b, dtype=float), C=C, d=d)


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # trigger JIT compilation once so timed tests measure the algorithms
    sys = LinearSystem(A=[[1.0, 1.0]], b=[2.0], C=[[-1.0, 0.0], [0.0, -1.0]],
                       d=[0.0, 0.0])
    rf.dnc(sys, [0.0, 0.0], 4.0, rf.DnCParams(eps=1.0))
    rf.relax_solve(sys, [0.0, 0.0], rf.RelaxConfig(max_iters=10))
    rf.elementary_procedure(sys, [0.0, 0.0], 0.25, 1.0)
