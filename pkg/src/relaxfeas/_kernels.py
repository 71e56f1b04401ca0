"""Hot numeric kernels, JIT-compiled with numba when available.

Backend selection happens once at import time:

* ``RELAXFEAS_BACKEND=numpy`` forces the pure-numpy fallback (the very same
  functions, just not compiled),
* ``RELAXFEAS_BACKEND=numba`` requires numba and fails loudly if missing,
* unset / ``auto`` uses numba when importable.

Every kernel is written in numba-compatible numpy style so the two paths
share one source.  The undecorated originals are kept around with a ``_py``
suffix so tests can compare compiled and interpreted results in-process.
``benchmarks/kernel_bench.py`` times both backends against each other.
"""

import os

import numpy as np

_choice = os.environ.get("RELAXFEAS_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "numba", "numpy"):
    raise ValueError(f"RELAXFEAS_BACKEND must be auto|numba|numpy, got {_choice!r}")

NUMBA_ENABLED = False
if _choice in ("auto", "numba"):
    try:
        from numba import njit as _njit

        NUMBA_ENABLED = True
    except ImportError:
        if _choice == "numba":
            raise ImportError("RELAXFEAS_BACKEND=numba but numba is not installed")

if NUMBA_ENABLED:
    def _jit(func):
        return _njit(cache=True)(func)
else:
    def _jit(func):
        return func


def backend():
    """Name of the active kernel backend: 'numba' or 'numpy'."""
    return "numba" if NUMBA_ENABLED else "numpy"


# ---------------------------------------------------------------------------
# deterministic RNG (xorshift64*), identical on both backends

_U12 = np.uint64(12)
_U25 = np.uint64(25)
_U27 = np.uint64(27)
_U11 = np.uint64(11)
_XS_MULT = np.uint64(2685821657736338717)
_INV_2_53 = 1.0 / 9007199254740992.0


def _xs_next_py(state):
    state ^= state >> _U12
    state ^= state << _U25
    state ^= state >> _U27
    return state * _XS_MULT


def seed_to_state(seed):
    """Map a nonnegative integer seed to a nonzero xorshift state."""
    state = np.uint64(seed) ^ np.uint64(0x9E3779B97F4A7C15)
    if state == np.uint64(0):
        state = np.uint64(0x106689D45497FDB5)
    return state


# ---------------------------------------------------------------------------
# linear algebra helpers

def _chol_solve_py(L, v):
    # solve (L L^T) x = v with L lower triangular
    m = v.shape[0]
    y = np.zeros(m)
    for i in range(m):
        s = v[i]
        for j in range(i):
            s -= L[i, j] * y[j]
        y[i] = s / L[i, i]
    x = np.zeros(m)
    for i in range(m - 1, -1, -1):
        s = y[i]
        for j in range(i + 1, m):
            s -= L[j, i] * x[j]
        x[i] = s / L[i, i]
    return x


def _affine_project_py(A, At, b, L, z):
    """Project z onto {x: Ax = b}; returns (p, u) with p = z - A^T u.

    One step of iterative refinement keeps the equality residual near
    machine precision for moderately conditioned A A^T.
    """
    m = A.shape[0]
    if m == 0:
        return z.copy(), np.zeros(0)
    v = np.dot(A, z) - b
    u = _chol_solve(L, v)
    p = z - np.dot(At, u)
    du = _chol_solve(L, np.dot(A, p) - b)
    p = p - np.dot(At, du)
    u = u + du
    return p, u


# ---------------------------------------------------------------------------
# elementary procedure core

def _ep_core_py(A, At, b, L, C, d, cnorms, z, r):
    """One base-case call.

    Returns (branch, p, u, k0): branch 1 means p is an approximate solution,
    branch 2 a separator along the projection direction (multipliers u on the
    equality rows), branch 3 the first inequality row k0 at distance >= r.
    """
    p, u = _affine_project(A, At, b, L, z)
    diff = z - p
    resid = np.sqrt(np.dot(diff, diff))
    if resid >= r:
        return 2, p, u, -1
    l = C.shape[0]
    for k in range(l):
        dist = (np.dot(C[k], z) - d[k]) / cnorms[k]
        if dist >= r:
            return 3, p, u, k
    return 1, p, u, -1


# ---------------------------------------------------------------------------
# separator combination core

def _combine_core_py(h1, d1, h2, d2, z, r, tau_opp):
    """Convex combination of two separators reaching distance >= r at z.

    Normally returns the distance-maximizing alpha (endpoints vs the one
    interior stationary point).  When that combination is degenerate --
    nearly opposite normals put the maximizer next to the pole where
    h(alpha) ~ 0, and the tiny normals would cascade up the recursion --
    the best-conditioned alpha still reaching distance r is used instead
    (candidates include the boundary roots where the distance equals r).

    Returns (code, alpha, dist, gamma): 0 combined, 1 opposite normals
    (gamma = |h1|/|h2|), 2 nothing reaches the target distance.
    """
    n1 = np.sqrt(np.dot(h1, h1))
    n2 = np.sqrt(np.dot(h2, h2))
    s = 0.0
    for i in range(h1.shape[0]):
        t = h1[i] / n1 + h2[i] / n2
        s += t * t
    if np.sqrt(s) <= tau_opp:
        return 1, 0.0, 0.0, n1 / n2

    u1 = np.dot(h1, z) - d1
    u2 = np.dot(h2, z) - d2
    a = u1 - u2
    c = u2
    hd = h1 - h2
    qa = np.dot(hd, hd)
    qb = np.dot(h2, hd)
    qc = np.dot(h2, h2)

    cand = np.empty(3)
    cand[0] = 1.0
    cand[1] = 0.0
    ncand = 2
    # stationary point of alpha -> (a alpha + c)/sqrt(q(alpha))
    denom = a * qb - c * qa
    if np.abs(denom) > 0.0:
        astar = (c * qb - a * qc) / denom
        if 0.0 < astar < 1.0:
            cand[ncand] = astar
            ncand += 1

    n = h1.shape[0]
    hvec = np.empty(n)
    best_f = -np.inf
    best_alpha = 1.0
    best_q = 0.0
    chosen = -1.0
    chosen_q = -1.0
    chosen_f = 0.0
    # distance and norm are evaluated on the explicit combined vector; the
    # quadratic-form coefficients above cancel catastrophically when the
    # normals are nearly opposite
    for i in range(ncand):
        al = cand[i]
        for j in range(n):
            hvec[j] = al * h1[j] + (1.0 - al) * h2[j]
        qv = np.dot(hvec, hvec)
        if qv <= 0.0:
            continue
        hn = np.sqrt(qv)
        f = (al * u1 + (1.0 - al) * u2) / hn
        if f > best_f:
            best_f = f
            best_alpha = al
            best_q = qv
        if f >= r - 1e-8 * (1.0 + hn) and qv > chosen_q:
            chosen = al
            chosen_q = qv
            chosen_f = f
    if chosen_q <= 0.0:
        return 2, best_alpha, best_f, 0.0
    scale = max(n1, n2)
    if (best_f >= r - 1e-8 * (1.0 + np.sqrt(best_q))
            and best_q >= 1e-6 * scale * scale):
        return 0, best_alpha, best_f, 0.0
    # degenerate maximizer: walk toward the better-conditioned endpoint,
    # keeping the largest |h(alpha)| that still reaches the target distance
    big = 1.0 if n1 >= n2 else 0.0
    big_q = max(n1, n2) ** 2
    if big_q > chosen_q and big != chosen:
        lo = chosen
        hi = big
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            for j in range(n):
                hvec[j] = mid * h1[j] + (1.0 - mid) * h2[j]
            qv = np.dot(hvec, hvec)
            if qv <= 0.0:
                hi = mid
                continue
            hn = np.sqrt(qv)
            f = (mid * u1 + (1.0 - mid) * u2) / hn
            if f >= r - 1e-8 * (1.0 + hn):
                lo = mid
                if qv > chosen_q:
                    chosen = mid
                    chosen_q = qv
                    chosen_f = f
            else:
                hi = mid
    return 0, chosen, chosen_f, 0.0


# ---------------------------------------------------------------------------
# divide-and-conquer core (explicit-stack recursion)

def _dnc_core_py(A, At, b, L, C, d, cnorms, cmax, z_init, r_init, eps,
                 theta, tau_opp, budget):
    """Run the full ball-shrinking recursion.

    Returns (kind, x, h1, delta1, mults1, h2, delta2, mults2, gamma,
    ep_calls, nodes) where kind is 0 solution, 1 separator, 2 failure
    (opposite normals), 3 budget exhausted, 4 combination failed.
    Multiplier vectors are laid out as the m equality rows followed by the
    l inequality rows of the system the recursion ran on.
    """
    m = A.shape[0]
    l = C.shape[0]
    n = z_init.shape[0]
    nm = m + l

    if cmax > 0.0:
        base_r = eps / (2.0 * cmax)
    else:
        base_r = np.inf
    if not np.isfinite(base_r) or r_init <= base_r:
        maxd = 1
    else:
        maxd = int(np.ceil((np.log(r_init) - np.log(base_r)) / np.log(1.0 + theta))) + 2

    Z = np.zeros((maxd + 1, n))
    R = np.zeros(maxd + 1)
    PH = np.zeros(maxd + 1, np.int64)
    H1 = np.zeros((maxd + 1, n))
    D1 = np.zeros(maxd + 1)
    M1 = np.zeros((maxd + 1, nm))

    x_out = np.zeros(n)
    h1_out = np.zeros(n)
    m1_out = np.zeros(nm)
    h2_out = np.zeros(n)
    m2_out = np.zeros(nm)
    d1_out = 0.0
    d2_out = 0.0
    gamma = 0.0
    ep_calls = 0
    nodes = 0
    kind = -1

    ret_h = np.zeros(n)
    ret_d = 0.0
    ret_m = np.zeros(nm)

    top = 0
    Z[0, :] = z_init
    R[0] = r_init
    fresh = True

    while True:
        if fresh:
            nodes += 1
            if R[top] <= base_r:
                if ep_calls >= budget:
                    kind = 3
                    break
                ep_calls += 1
                branch, p, u, k0 = _ep_core(A, At, b, L, C, d, cnorms, Z[top], R[top])
                if branch == 1:
                    kind = 0
                    x_out[:] = p
                    break
                if branch == 2:
                    ret_h[:] = Z[top] - p
                    ret_d = np.dot(ret_h, p)
                    ret_m[:] = 0.0
                    ret_m[:m] = u
                else:
                    ret_h[:] = C[k0]
                    ret_d = d[k0]
                    ret_m[:] = 0.0
                    ret_m[m + k0] = 1.0
                top -= 1
                fresh = False
                if top < 0:
                    kind = 1
                    break
                continue
            PH[top] = 0
            Z[top + 1, :] = Z[top]
            R[top + 1] = R[top] / (1.0 + theta)
            top += 1
            continue

        # a child delivered a separator (ret_h, ret_d, ret_m) to frame `top`
        if PH[top] == 0:
            H1[top, :] = ret_h
            D1[top] = ret_d
            M1[top, :] = ret_m
            hz = np.dot(ret_h, Z[top])
            hh = np.dot(ret_h, ret_h)
            PH[top] = 1
            Z[top + 1, :] = Z[top] - ((hz - ret_d) / hh) * ret_h
            R[top + 1] = R[top] / (1.0 + theta)
            top += 1
            fresh = True
            continue

        code, alpha, dist, gam = _combine_core(
            H1[top], D1[top], ret_h, ret_d, Z[top], R[top], tau_opp)
        if code == 1:
            kind = 2
            h1_out[:] = H1[top]
            d1_out = D1[top]
            m1_out[:] = M1[top]
            h2_out[:] = ret_h
            d2_out = ret_d
            m2_out[:] = ret_m
            gamma = gam
            break
        if code == 2:
            kind = 4
            h1_out[:] = H1[top]
            d1_out = D1[top]
            m1_out[:] = M1[top]
            h2_out[:] = ret_h
            d2_out = ret_d
            m2_out[:] = ret_m
            gamma = dist  # best achieved distance, for diagnostics
            break
        newh = alpha * H1[top] + (1.0 - alpha) * ret_h
        newd = alpha * D1[top] + (1.0 - alpha) * ret_d
        newm = alpha * M1[top] + (1.0 - alpha) * ret_m
        ret_h[:] = newh
        ret_d = newd
        ret_m[:] = newm
        top -= 1
        if top < 0:
            kind = 1
            break
        continue

    if kind == 1:
        h1_out[:] = ret_h
        d1_out = ret_d
        m1_out[:] = ret_m
    return (kind, x_out, h1_out, d1_out, m1_out, h2_out, d2_out, m2_out,
            gamma, ep_calls, nodes)


# ---------------------------------------------------------------------------
# classical relaxation core

def _relax_core_py(G, rhs, norms, neq, z, lam, eps, max_steps, start_step,
                   random_sel, rng, trace):
    """Iterate z toward the most (or a random) violated hyperplane.

    Rows 0..neq-1 of G are equalities (violation measured by absolute
    normalized residual), the rest inequalities.  z is updated in place.
    trace, when nonempty, records the iterate after global step k in row k.
    Returns (steps_done, status, rng); status 0 means all violations < eps.
    """
    rows = G.shape[0]
    steps = 0
    status = 1
    viol = np.empty(rows)
    while steps < max_steps:
        resid = np.dot(G, z) - rhs
        viol[:] = resid / norms
        viol[:neq] = np.abs(viol[:neq])
        sel = int(np.argmax(viol))
        if viol[sel] < eps:
            status = 0
            break
        if random_sel:
            nviol = 0
            for i in range(rows):
                if viol[i] >= eps:
                    nviol += 1
            # inline xorshift64* step; a cross-boundary helper would box the
            # unsigned state as a signed python int under the jitted backend
            rng ^= rng >> _U12
            rng ^= rng << _U25
            rng ^= rng >> _U27
            rng = rng * _XS_MULT
            u = np.float64(rng >> _U11) * _INV_2_53
            pick = int(u * nviol)
            if pick >= nviol:
                pick = nviol - 1
            seen = 0
            for i in range(rows):
                if viol[i] >= eps:
                    if seen == pick:
                        sel = i
                        break
                    seen += 1
        coef = -lam * resid[sel] / (norms[sel] * norms[sel])
        z += coef * G[sel]
        gstep = start_step + steps
        if gstep < trace.shape[0]:
            trace[gstep, :] = z
        steps += 1
    return steps, status, rng


_xs_next = _jit(_xs_next_py)
_chol_solve = _jit(_chol_solve_py)
_affine_project = _jit(_affine_project_py)
_ep_core = _jit(_ep_core_py)
_combine_core = _jit(_combine_core_py)
_dnc_core = _jit(_dnc_core_py)
_relax_core = _jit(_relax_core_py)
