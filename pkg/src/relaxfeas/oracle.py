"""Brute-force reference decisions for small instances.

Everything here is test-side ground truth and deliberately shares no code
with the solver path: feasibility by enumerating basic points (square
subsystems of the stacked rows), exact rational arithmetic for integer
data, exhaustive 0-1 enumeration, and the vertex-averaging construction of
strictly positive witnesses for standard-form systems.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import OracleLimitExceeded

TAU_ORACLE = 1e-9
MAX_SUBSETS = 2_000_000


@dataclass(frozen=True)
class OracleVerdict:
    feasible: bool
    witness: np.ndarray = None
    vertices: tuple = None
    strictly_feasible: bool = None
    integer_feasible: bool = None


def _is_integral(*arrays):
    for arr in arrays:
        if arr.size and np.max(np.abs(arr - np.rint(arr))) > 0:
            return False
        if arr.size and np.max(np.abs(arr)) > 2 ** 40:
            return False
    return True


def _solve_square_exact(M, v):
    """Solve an integer square system exactly; None when singular.

    Fraction-free (Bareiss) forward elimination over python ints; fractions
    only enter the final triangular back-substitution.
    """
    k = len(v)
    rows = [[int(round(M[i, j])) for j in range(k)] + [int(round(v[i]))]
            for i in range(k)]
    prev = 1
    for col in range(k):
        piv = next((r for r in range(col, k) if rows[r][col] != 0), None)
        if piv is None:
            return None
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
        pval = rows[col][col]
        for r in range(col + 1, k):
            rcol = rows[r][col]
            row_r = rows[r]
            row_c = rows[col]
            for c in range(col + 1, k + 1):
                row_r[c] = (row_r[c] * pval - rcol * row_c[c]) // prev
            row_r[col] = 0
        prev = pval
    x = [Fraction(0)] * k
    for i in range(k - 1, -1, -1):
        s = Fraction(rows[i][k])
        for j in range(i + 1, k):
            s -= rows[i][j] * x[j]
        x[i] = s / rows[i][i]
    return np.array([float(val) for val in x])


def _solve_square_float(M, v):
    try:
        x = np.linalg.solve(M, v)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(x)):
        return None
    # reject badly conditioned solves; they are not trustworthy vertices
    if np.max(np.abs(M @ x - v)) > 1e-6 * (1.0 + np.max(np.abs(v))):
        return None
    return x


def _passes(sys, x, tol=TAU_ORACLE):
    scale = 1.0 + max(
        float(np.max(np.abs(sys.b))) if sys.m else 0.0,
        float(np.max(np.abs(sys.d))) if sys.l else 0.0,
        float(np.max(np.abs(x))),
    )
    if sys.m and np.max(np.abs(sys.eq_residuals(x))) > tol * scale:
        return False
    if sys.l and np.min(sys.ineq_slack(x)) < -tol * scale:
        return False
    return True


def _grid_search(sys, levels=4, pts=7):
    """Coarse-to-fine box search; only catches full-dimensional regions."""
    hi = 1.0
    if sys.m:
        hi = max(hi, float(np.max(np.abs(sys.b))))
    if sys.l:
        hi = max(hi, float(np.max(np.abs(sys.d))))
    n = sys.n
    center = np.zeros(n)
    radius = 2.0 * hi * max(1, n)
    best = None
    for _ in range(levels):
        axes = [np.linspace(center[i] - radius, center[i] + radius, pts) for i in range(n)]
        best_viol = np.inf
        best_pt = None
        for combo in itertools.product(*axes):
            x = np.array(combo)
            viol = 0.0
            if sys.m:
                viol += float(np.sum(np.abs(sys.eq_residuals(x))))
            if sys.l:
                viol += float(np.sum(np.maximum(-sys.ineq_slack(x), 0.0)))
            if viol < best_viol:
                best_viol = viol
                best_pt = x
        center = best_pt
        radius /= pts / 2.0
        if _passes(sys, best_pt):
            best = best_pt
            break
    return best


def oracle_feasible(sys, limit=14, grid_fallback=True, exact=None):
    """Decide feasibility by enumerating square row subsystems.

    Every choice of n rows from the stacked [A; C] yields a candidate basic
    point; the system is declared feasible iff some candidate satisfies all
    constraints, with a coarse grid search as a fallback for regions that
    have no basic point (fewer than n rows, degenerate data).  Integer data
    is solved in exact rational arithmetic unless ``exact=False``.
    """
    n = sys.n
    if n > limit:
        raise OracleLimitExceeded(f"n={n} above oracle limit {limit}")
    G = np.vstack([sys.A, sys.C]) if sys.m + sys.l else np.zeros((0, n))
    g = np.concatenate([sys.b, sys.d])
    rows = G.shape[0]
    if exact is None:
        exact = _is_integral(sys.A, sys.b, sys.C, sys.d)
    n_subsets = _ncr(rows, n)
    if n_subsets > MAX_SUBSETS:
        raise OracleLimitExceeded(f"{n_subsets} row subsets above cap {MAX_SUBSETS}")

    points = []
    for subset in itertools.combinations(range(rows), n):
        M = G[list(subset)]
        v = g[list(subset)]
        if exact:
            x = _solve_square_exact(M, v)
        else:
            x = _solve_square_float(M, v)
        if x is None:
            continue
        if _passes(sys, x):
            points.append(x)

    vertices = _dedupe(points)
    if vertices:
        return OracleVerdict(feasible=True, witness=vertices[0],
                             vertices=tuple(vertices))
    if grid_fallback:
        pt = _grid_search(sys)
        if pt is not None:
            return OracleVerdict(feasible=True, witness=pt, vertices=())
    return OracleVerdict(feasible=False, vertices=())


def _ncr(n, r):
    if r < 0 or r > n:
        return 0
    out = 1
    for i in range(r):
        out = out * (n - i) // (i + 1)
    return out


def _dedupe(points, tol=1e-9):
    uniq = []
    for p in sorted(points, key=lambda q: tuple(q)):
        if not any(np.max(np.abs(p - q)) <= tol * (1.0 + np.max(np.abs(q))) for q in uniq):
            uniq.append(p)
    return uniq


def oracle_integer01(sys, limit=20):
    """Exhaustive exact check for 0-1 solutions.

    Requires the box 0 <= x <= 1 to be part of the inequality rows, so
    enumerating {0,1}^n covers all integer solutions.  All comparisons are
    in exact integer arithmetic.
    """
    n = sys.n
    if n > limit:
        raise OracleLimitExceeded(f"n={n} above binary oracle limit {limit}")
    if not _has_unit_box(sys):
        raise ValueError("oracle_integer01 requires explicit 0 <= x <= 1 rows")
    if not _is_integral(sys.A, sys.b, sys.C, sys.d):
        raise ValueError("oracle_integer01 requires integer data")
    A = np.rint(sys.A).astype(np.int64)
    b = np.rint(sys.b).astype(np.int64)
    C = np.rint(sys.C).astype(np.int64)
    d = np.rint(sys.d).astype(np.int64)
    for bits in itertools.product((0, 1), repeat=n):
        x = np.array(bits, dtype=np.int64)
        if sys.m and not np.array_equal(A @ x, b):
            continue
        if sys.l and np.any(C @ x > d):
            continue
        return True
    return False


def _has_unit_box(sys):
    if sys.l < 2 * sys.n:
        return False
    have_up = np.zeros(sys.n, dtype=bool)
    have_low = np.zeros(sys.n, dtype=bool)
    for k in range(sys.l):
        row = sys.C[k]
        nz = np.nonzero(row)[0]
        if len(nz) != 1:
            continue
        i = nz[0]
        if row[i] == 1.0 and sys.d[k] == 1.0:
            have_up[i] = True
        elif row[i] == -1.0 and sys.d[k] == 0.0:
            have_low[i] = True
    return bool(np.all(have_up) and np.all(have_low))


def oracle_strict(sys_standard, limit=14):
    """Strictly positive witness for Ax = b, -x <= 0 by vertex averaging.

    For each coordinate, takes a vertex maximizing it; the average of these
    n vertices is returned when strictly positive (for bounded feasible
    regions with a strictly feasible point this always succeeds, and the
    minimum coordinate is at least 1/(n * max subdeterminant)).
    """
    verdict = oracle_feasible(sys_standard, limit=limit)
    if not verdict.feasible or not verdict.vertices:
        return None
    n = sys_standard.n
    chosen = []
    for i in range(n):
        best = max(verdict.vertices, key=lambda v: (v[i], tuple(v)))
        if best[i] <= TAU_ORACLE:
            return None
        chosen.append(best)
    witness = np.mean(np.array(chosen), axis=0)
    if np.min(witness) <= 0:
        return None
    return witness


def sample_feasible(sys, count, seed=0):
    """Random convex combinations of the oracle vertices (test helper)."""
    verdict = oracle_feasible(sys)
    if not verdict.feasible:
        return []
    verts = np.array(verdict.vertices) if verdict.vertices else verdict.witness[None, :]
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        w = rng.dirichlet(np.ones(verts.shape[0]))
        out.append(w @ verts)
    return out


def max_subdeterminant(A, cap=200_000):
    """Exact maximum |det| over all square submatrices of integer A."""
    A = np.asarray(A, dtype=float)
    if not _is_integral(A):
        raise ValueError("max_subdeterminant requires integer entries")
    M = np.rint(A).astype(object)
    m, n = M.shape
    total = sum(_ncr(m, k) * _ncr(n, k) for k in range(1, min(m, n) + 1))
    if total > cap:
        raise OracleLimitExceeded(f"{total} submatrices above cap {cap}")
    best = 0
    for k in range(1, min(m, n) + 1):
        for rows in itertools.combinations(range(m), k):
            sub_rows = M[list(rows)]
            for cols in itertools.combinations(range(n), k):
                det = _int_det(sub_rows[:, list(cols)])
                best = max(best, abs(det))
    return int(best)


def _int_det(M):
    """Bareiss fraction-free determinant for small integer matrices."""
    M = [[int(v) for v in row] for row in M]
    k = len(M)
    sign = 1
    prev = 1
    for col in range(k - 1):
        if M[col][col] == 0:
            swap = next((r for r in range(col + 1, k) if M[r][col] != 0), None)
            if swap is None:
                return 0
            M[col], M[swap] = M[swap], M[col]
            sign = -sign
        for r in range(col + 1, k):
            for c in range(col + 1, k):
                M[r][c] = (M[r][c] * M[col][col] - M[r][col] * M[col][c]) // prev
            M[r][col] = 0
        prev = M[col][col]
    return sign * M[k - 1][k - 1]
