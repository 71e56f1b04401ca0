"""Feasibility drivers built on the ball-shrinking recursion.

* ``lfs`` decides standard-form systems promised to be infeasible or
  strictly feasible, searching the strengthened homogenized cone from the
  origin with radius 2 n Delta sqrt(r^2 + 1).
* ``lfs_bounded`` / ``lfs_tu`` fold box constraints 0 <= x <= lam into
  standard form first (totally unimodular matrices have Delta = 1).
* ``lfg`` handles general integer systems by perturbing the right-hand
  side by half of nu = 2**(-2T) and rounding the strict solution back via
  a tight-set projection.
* ``chubanov_relaxation`` repeatedly moves one hinted implied-equality row
  into the equality block; it either finds a real solution or decides that
  no 0-1 (integer) solution exists.
* ``dnc_solve`` runs a single recursion on the eps-shifted system, the way
  the benchmark protocol uses the recursion as a standalone solver.
"""

import enum
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .dnc import BudgetExceeded, DnCParams, Failure, dnc, default_node_budget
from .ep import ApproxSolution, Separator
from .errors import (PreconditionViolated, RadiusOverflow, RoundingFailed,
                     VerificationFailed)
from .inference import interpret
from .linalg import as_matrix, as_vector
from .model import (LinearSystem, homogenize, reduce_equalities,
                    standardize_bounded, strengthen)

LFG_BUDGET_FALLBACK = 2_000_000
RADIUS_LOG2_LIMIT = 300.0


class Decision(str, enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    NO_INTEGER_SOLUTIONS = "no_integer_solutions"
    BUDGET_EXCEEDED = "budget_exceeded"


@dataclass
class SolveReport:
    """What a driver decided plus how much work it did."""

    decision: Decision
    x: np.ndarray = None
    recursions: int = 0
    ep_calls: int = 0
    iterations: int = 0
    elapsed: float = 0.0
    trace: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def feasible(self):
        return self.decision == Decision.FEASIBLE


@dataclass(frozen=True)
class LFSInput:
    """Standard form Ax = b, -x <= 0 plus the promised containment data.

    ``r`` must satisfy P subset B(0, r); ``delta_a`` is (an upper bound on)
    the maximum subdeterminant of A.
    """

    A: np.ndarray
    b: np.ndarray
    r: float
    delta_a: float

    def __post_init__(self):
        object.__setattr__(self, "A", as_matrix(self.A))
        object.__setattr__(self, "b", as_vector(self.b))
        if self.r <= 0:
            raise ValueError("containment radius r must be positive")
        if self.delta_a < 1:
            raise ValueError("delta_a must be >= 1")


def _verify(sys, x, context):
    eq_tol = 1e-8 * (1.0 + (float(np.max(np.abs(sys.b))) if sys.m else 0.0))
    ineq_tol = 1e-8 * (1.0 + (float(np.max(np.abs(sys.d))) if sys.l else 0.0))
    if not sys.satisfies(x, eq_tol=eq_tol, ineq_tol=ineq_tol):
        raise VerificationFailed(f"{context}: returned point fails re-verification")


def _standard_system(A, b):
    n = A.shape[1]
    return LinearSystem(A=A, b=b, C=-np.eye(n), d=np.zeros(n))


def lfs(inp, params=None, extra_meta=None):
    """Decide a standard-form system promised infeasible-or-strictly-feasible.

    Searches the strengthened homogenized cone (equalities [A | -b],
    inequalities -x <= -1, -t <= -2) from the origin with radius
    2 n delta_a sqrt(r^2 + 1).  An approximate solution rescales to a
    feasible point; both other outcomes certify infeasibility under the
    strictness promise.
    """
    t0 = time.perf_counter()
    n = inp.A.shape[1]
    std = _standard_system(inp.A, inp.b)
    target = strengthen(homogenize(std), 1.0)
    r_hat = 2.0 * n * inp.delta_a * math.sqrt(inp.r ** 2 + 1.0)
    if params is None:
        params = DnCParams(eps=1.0)
    out = dnc(target, np.zeros(n + 1), r_hat, params)
    report = SolveReport(decision=Decision.BUDGET_EXCEEDED,
                         meta={"r_hat": r_hat, **(extra_meta or {})})
    report.recursions = out.counters.nodes
    report.ep_calls = out.counters.ep_calls
    if isinstance(out, ApproxSolution):
        x = out.x[:n] / out.x[n]
        _verify(std, x, "lfs")
        report.decision = Decision.FEASIBLE
        report.x = x
        report.trace.append({"outcome": "solution"})
    elif isinstance(out, (Separator, Failure)):
        report.decision = Decision.INFEASIBLE
        report.trace.append({"outcome": type(out).__name__.lower()})
    else:
        report.trace.append({"outcome": "budget"})
    report.elapsed = time.perf_counter() - t0
    return report


def lfs_bounded(A, b, lam, delta_a, params=None):
    """Decide Ax = b, 0 <= x <= lam 1 under the strictness promise.

    Folds the box into standard form with slack variables (the maximum
    subdeterminant is unchanged), sets r = lam sqrt(2n), runs lfs, and maps
    the x-part of a solution back.
    """
    A = as_matrix(A)
    b = as_vector(b)
    n = A.shape[1]
    std = standardize_bounded(A, b, lam)
    r = float(lam) * math.sqrt(2.0 * n)
    rep = lfs(LFSInput(A=std.A, b=std.b, r=r, delta_a=delta_a), params=params,
              extra_meta={"lam": float(lam)})
    if rep.decision == Decision.FEASIBLE:
        x = rep.x[:n]
        bounded = LinearSystem(A=A, b=b,
                               C=np.vstack([np.eye(n), -np.eye(n)]),
                               d=np.concatenate([np.full(n, float(lam)), np.zeros(n)]))
        _verify(bounded, x, "lfs_bounded")
        rep.x = x
    return rep


def lfs_tu(A, b, lam=1.0, params=None):
    """lfs_bounded for caller-asserted totally unimodular A (Delta = 1)."""
    return lfs_bounded(A, b, lam, delta_a=1.0, params=params)


def _int_bits(v):
    return 1 + int(math.ceil(math.log2(abs(int(v)) + 1)))


def bit_length_of(sys):
    """Total encoding length of the system data (integer entries)."""
    total = 0
    for arr in (sys.A, sys.b, sys.C, sys.d):
        for v in np.asarray(arr).ravel():
            total += _int_bits(v)
    return total


def facet_complexity(sys):
    """Max encoding length of a single row (coefficients plus rhs, plus 1),
    floored at n + 1."""
    n = sys.n
    best = n + 1
    for M, rhs in ((sys.A, sys.b), (sys.C, sys.d)):
        for i in range(M.shape[0]):
            bits = 1 + sum(_int_bits(v) for v in M[i]) + _int_bits(rhs[i])
            best = max(best, bits)
    return best


def max_subdeterminant_bound(A):
    """Hadamard-style bound n**(n/2) * |a_max|**n on square subdeterminants."""
    A = as_matrix(A)
    n = A.shape[1]
    amax = float(np.max(np.abs(A))) if A.size else 1.0
    log_val = 0.5 * n * math.log(max(n, 1)) + n * math.log(max(amax, 1.0))
    if log_val > 700.0:
        return math.inf
    return max(1.0, math.exp(log_val))


def schrijver_radius_log2(n, phi):
    """log2 of the containment radius 2**(5 n^2 phi) * sqrt(n)."""
    return 5.0 * n * n * phi + 0.5 * math.log2(max(n, 1))


def _is_integer_data(sys):
    for arr in (sys.A, sys.b, sys.C, sys.d):
        if arr.size and np.max(np.abs(arr - np.rint(arr))) > 0:
            return False
    return True


def round_strict_solution(sys, x0, nu):
    """Project a strictly nu-feasible point onto its tight rows.

    Rows with slack at most max(nu, tolerance) are pinned to equality
    together with Ax = b; the least-change solution of that linear system
    must satisfy the original system, else RoundingFailed is raised.
    Returns x0 unchanged when it already satisfies Cx <= d.
    """
    x0 = as_vector(x0)
    tol = max(float(nu), 1e-9 * (1.0 + (float(np.max(np.abs(sys.d))) if sys.l else 0.0)))
    slack = sys.ineq_slack(x0)
    if sys.l == 0 or np.min(slack) >= 0.0:
        return x0
    if np.min(slack) < -tol:
        raise PreconditionViolated("x0 is not strictly nu-feasible")
    tight = np.nonzero(slack <= tol)[0]
    M = np.vstack([sys.A, sys.C[tight]]) if sys.m else sys.C[tight]
    rhs = np.concatenate([sys.b, sys.d[tight]])
    delta, *_ = np.linalg.lstsq(M, rhs - M @ x0, rcond=None)
    x = x0 + delta
    eq_tol = 1e-8 * (1.0 + (float(np.max(np.abs(sys.b))) if sys.m else 0.0))
    ineq_tol = 1e-8 * (1.0 + (float(np.max(np.abs(sys.d))) if sys.l else 0.0))
    if not sys.satisfies(x, eq_tol=eq_tol, ineq_tol=ineq_tol):
        raise RoundingFailed("tight-set projection violates the system")
    return x


def lfg(sys, radius_override=None, nu_override=None, params=None):
    """Decide a general integer system Ax = b, Cx <= d.

    Perturbs the inequalities by nu/2 with nu = 2**(-2T) (T the bit length
    of the data), searches the strengthened homogenized cone from the
    origin with the facet-complexity containment radius (or an override),
    and rounds a strict solution back with round_strict_solution.  Raises
    RadiusOverflow when the default radius exceeds 2**300 and no override
    is supplied.

    In float64 the perturbation nu underflows for all but the tiniest
    systems, so feasible regions with an empty interior sit at containment
    radii of order 2**(2T): with a smaller radius_override such instances
    come back infeasible.  Callers promising a radius promise it covers a
    solution whenever one exists.
    """
    t0 = time.perf_counter()
    if not _is_integer_data(sys):
        raise ValueError("lfg requires integer data")
    T = bit_length_of(sys)
    if nu_override is not None:
        nu = float(nu_override)
    else:
        nu = 2.0 ** (-2 * T) if 2 * T <= 1074 else 0.0
    pert = LinearSystem(A=sys.A, b=sys.b, C=sys.C, d=sys.d + nu / 2.0)
    target = strengthen(homogenize(pert), 1.0)
    if radius_override is not None:
        r_hat = float(radius_override)
        log2_r = math.log2(r_hat)
    else:
        phi = facet_complexity(target)
        log2_r = schrijver_radius_log2(target.n, phi)
        if log2_r > RADIUS_LOG2_LIMIT:
            raise RadiusOverflow(
                f"log2(radius) = {log2_r:.1f} above {RADIUS_LOG2_LIMIT:g}; "
                "pass radius_override")
        r_hat = 2.0 ** log2_r
    if params is None:
        budget = min(default_node_budget(r_hat, target.c_max, 1.0), LFG_BUDGET_FALLBACK)
        params = DnCParams(eps=1.0, node_budget=budget)
    n = sys.n
    out = dnc(target, np.zeros(n + 1), r_hat, params)
    report = SolveReport(decision=Decision.BUDGET_EXCEEDED,
                         meta={"nu": nu, "T": T, "log2_radius": log2_r})
    report.recursions = out.counters.nodes
    report.ep_calls = out.counters.ep_calls
    if isinstance(out, ApproxSolution):
        x0 = out.x[:n] / out.x[n]
        x = round_strict_solution(sys, x0, nu)
        rounded = not np.array_equal(x, x0)
        _verify(sys, x, "lfg")
        report.decision = Decision.FEASIBLE
        report.x = x
        report.trace.append({"outcome": "solution", "rounded": rounded})
        if rounded:
            report.meta["rounded"] = True
    elif isinstance(out, (Separator, Failure)):
        report.decision = Decision.INFEASIBLE
        report.trace.append({"outcome": type(out).__name__.lower()})
    else:
        report.trace.append({"outcome": "budget"})
    report.elapsed = time.perf_counter() - t0
    return report


def chubanov_relaxation(sys, r_star, params=None, time_limit=None):
    """Iterative implied-equality driver.

    ``r_star`` must bound the norm of every solution of sys (sqrt(n+1)
    works for systems bounded by the 0-1 box).  Each round searches the
    strengthened homogenized system at radius 2 l (r*+1); non-solution
    outcomes move the hinted inequality row into the equality block (rows
    whose move would make the equalities inconsistent are skipped).  Ends
    with a real solution, the decision that no integer solution exists, or
    a budget/timeout report.  At most l rounds run.
    """
    t0 = time.perf_counter()
    report = SolveReport(decision=Decision.BUDGET_EXCEEDED)
    current = sys
    total_nodes = 0
    total_eps = 0
    rounds = 0
    while True:
        if time_limit is not None and time.perf_counter() - t0 > time_limit:
            report.trace.append({"event": "timeout"})
            break
        A_r, b_r, consistent = reduce_equalities(current.A, current.b)
        if not consistent:
            report.decision = Decision.NO_INTEGER_SOLUTIONS
            report.trace.append({"event": "equalities_inconsistent"})
            break
        if A_r.shape[0] == sys.n:
            x_bar = np.linalg.solve(A_r, b_r)
            report.trace.append({"event": "equalities_determined"})
            if _sound_feasible(sys, x_bar):
                report.decision = Decision.FEASIBLE
                report.x = x_bar
            else:
                report.decision = Decision.NO_INTEGER_SOLUTIONS
            break
        if current.l == 0:
            x_bar, *_ = np.linalg.lstsq(A_r, b_r, rcond=None)
            report.trace.append({"event": "inequalities_exhausted"})
            if _sound_feasible(sys, x_bar):
                report.decision = Decision.FEASIBLE
                report.x = x_bar
            else:
                report.decision = Decision.NO_INTEGER_SOLUTIONS
            break
        work = LinearSystem(A=A_r, b=b_r, C=current.C, d=current.d)
        target = strengthen(homogenize(work), 1.0)
        r_used = 2.0 * work.l * (r_star + 1.0)
        round_params = params if params is not None else DnCParams(eps=1.0)
        out = dnc(target, np.zeros(sys.n + 1), r_used, round_params)
        total_nodes += out.counters.nodes
        total_eps += out.counters.ep_calls
        rounds += 1
        if isinstance(out, ApproxSolution):
            x = out.x[:sys.n] / out.x[sys.n]
            _verify(work, x, "chubanov_relaxation (round system)")
            _verify(sys, x, "chubanov_relaxation")
            report.decision = Decision.FEASIBLE
            report.x = x
            report.trace.append({"event": "solution", "round": rounds})
            break
        if isinstance(out, BudgetExceeded):
            report.trace.append({"event": "round_budget", "round": rounds})
            break
        conclusion = interpret(work, out, r_used, r_star)
        order = list(conclusion.candidates)
        if conclusion.index_hint is not None and conclusion.index_hint not in order:
            order.insert(0, conclusion.index_hint)
        if not order:
            # uninformative certificate; try every row in index order
            order = list(range(work.l))
        moved = None
        for k in order:
            trial = work.move_ineq_to_eq(k)
            _, _, ok = reduce_equalities(trial.A, trial.b)
            if ok:
                moved = k
                current = trial
                break
        report.trace.append({
            "event": "separator" if isinstance(out, Separator) else "failure",
            "round": rounds,
            "hint": conclusion.index_hint,
            "moved": moved,
        })
        if moved is None:
            report.decision = Decision.NO_INTEGER_SOLUTIONS
            report.trace.append({"event": "hint_rejected", "round": rounds})
            break
    report.recursions = total_nodes
    report.ep_calls = total_eps
    report.iterations = rounds
    report.elapsed = time.perf_counter() - t0
    return report


def _sound_feasible(sys, x):
    eq_tol = 1e-8 * (1.0 + (float(np.max(np.abs(sys.b))) if sys.m else 0.0))
    ineq_tol = 1e-8 * (1.0 + (float(np.max(np.abs(sys.d))) if sys.l else 0.0))
    return sys.satisfies(x, eq_tol=eq_tol, ineq_tol=ineq_tol)


def dnc_solve(sys, r=None, eps=1e-6, params=None):
    """One recursion on the eps-shifted system, as a standalone solver.

    The inequalities are tightened to Cx <= d - eps first, so an
    eps-approximate solution of the shifted system is an exact solution of
    sys.  A separator or failure means the shifted system has no solution
    inside B(0, r) (reported as infeasible, as the benchmark protocol does;
    exact for r valid and systems with an eps-deep interior).
    """
    t0 = time.perf_counter()
    if r is None:
        raise ValueError("dnc_solve needs a containment radius r")
    shifted = LinearSystem(A=sys.A, b=sys.b, C=sys.C, d=sys.d - eps)
    if params is None:
        params = DnCParams(eps=eps)
    A_r, b_r, consistent = reduce_equalities(sys.A, sys.b)
    report = SolveReport(decision=Decision.BUDGET_EXCEEDED, meta={"eps": eps})
    if not consistent:
        report.decision = Decision.INFEASIBLE
        report.trace.append({"outcome": "equalities_inconsistent"})
        report.elapsed = time.perf_counter() - t0
        return report
    work = LinearSystem(A=A_r, b=b_r, C=shifted.C, d=shifted.d)
    out = dnc(work, np.zeros(sys.n), float(r), params)
    report.recursions = out.counters.nodes
    report.ep_calls = out.counters.ep_calls
    if isinstance(out, ApproxSolution):
        _verify(sys, out.x, "dnc_solve")
        report.decision = Decision.FEASIBLE
        report.x = out.x
        report.trace.append({"outcome": "solution"})
    elif isinstance(out, (Separator, Failure)):
        report.decision = Decision.INFEASIBLE
        report.trace.append({"outcome": type(out).__name__.lower()})
    else:
        report.trace.append({"outcome": "budget"})
    report.elapsed = time.perf_counter() - t0
    return report
