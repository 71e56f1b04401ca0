"""Reading the recursion's outcome on a strengthened homogenized system.

Run the search on "Ax - bt = 0, Cx - dt <= -1, -t <= -2" from the origin
with a radius of at least 2 l (r* + 1), where r* bounds the norm of every
solution of the plain system.  Then:

* an approximate solution (x, t) rescales to an exact solution x/t,
* the opposite-normals failure means the strengthened system is infeasible,
  hence some inequality row holds with equality over the whole feasible set,
* a separator at that radius means some row is forced into the thin strip
  d_l - 1/2 <= c_l x <= d_l, so every integer solution satisfies it exactly.

Which row is only hinted at (largest certificate multiplier); callers must
verify before acting on it.
"""

from dataclasses import dataclass

import numpy as np

from .dnc import BudgetExceeded, Failure
from .ep import ApproxSolution, Separator
from .errors import BadRadius, VerificationFailed
from .model import homogenize, strengthen
from .oracle import oracle_feasible

HINT_TOL = 1e-12


@dataclass(frozen=True)
class ExactSolution:
    x: np.ndarray


@dataclass(frozen=True)
class Infeasible:
    reason: str = ""


@dataclass(frozen=True)
class ImpliedEqualityExists:
    """Some inequality row holds with equality for every feasible point."""

    index_hint: int = None
    candidates: tuple = ()


@dataclass(frozen=True)
class IntegerImpliedEqualityExists:
    """Some inequality row holds with equality for every integer solution."""

    index_hint: int = None
    candidates: tuple = ()


Conclusion = (ExactSolution, Infeasible, ImpliedEqualityExists,
              IntegerImpliedEqualityExists)


def _hint_from_mass(mass):
    mass = np.asarray(mass, dtype=float)
    if mass.size == 0 or np.max(mass) <= HINT_TOL:
        return None, ()
    hint = int(np.argmax(mass))
    half = np.max(mass) / 2.0
    candidates = tuple(int(i) for i in np.nonzero(mass > half)[0])
    return hint, candidates


def required_radius(sys, r_star):
    """Smallest radius the thin-strip reading needs: 2 l (r* + 1)."""
    return 2.0 * sys.l * (r_star + 1.0)


def interpret(sys_original, outcome, r_used, r_star):
    """Map a recursion outcome on the strengthened homogenized system back.

    ``sys_original`` is the plain system the strengthened run was built
    from; ``r_star`` must bound the norm of all its solutions.  Raises
    BadRadius when r_used is below 2 l (r_star + 1).
    """
    needed = required_radius(sys_original, r_star)
    if r_used < needed - 1e-8 * (1.0 + needed):
        raise BadRadius(f"r_used={r_used:g} below 2 l (r*+1) = {needed:g}")
    if isinstance(outcome, ApproxSolution):
        xt = np.asarray(outcome.x, dtype=float)
        t = xt[-1]
        x = xt[:-1] / t
        eq_tol = 1e-8 * (1.0 + (np.max(np.abs(sys_original.b)) if sys_original.m else 0.0))
        ineq_tol = 1e-8 * (1.0 + (np.max(np.abs(sys_original.d)) if sys_original.l else 0.0))
        if not sys_original.satisfies(x, eq_tol=eq_tol, ineq_tol=ineq_tol):
            raise VerificationFailed("rescaled solution fails the plain system")
        return ExactSolution(x=x)
    if isinstance(outcome, Failure):
        mass = np.zeros(sys_original.l)
        for hp in (outcome.h1, outcome.h2):
            if hp.cert is not None and hp.cert.ineq_mults.size == sys_original.l:
                mass += np.abs(hp.cert.ineq_mults)
        hint, candidates = _hint_from_mass(mass)
        return ImpliedEqualityExists(index_hint=hint, candidates=candidates)
    if isinstance(outcome, Separator):
        cert = outcome.hyperplane.cert
        mass = np.zeros(sys_original.l)
        if cert is not None and cert.ineq_mults.size == sys_original.l:
            mass = np.abs(cert.ineq_mults)
        hint, candidates = _hint_from_mass(mass)
        return IntegerImpliedEqualityExists(index_hint=hint, candidates=candidates)
    if isinstance(outcome, BudgetExceeded):
        raise ValueError("a budget-exhausted outcome carries no conclusion")
    raise TypeError(f"unknown outcome {type(outcome).__name__}")


@dataclass(frozen=True)
class StrengthenedFeasible:
    witness: np.ndarray


@dataclass(frozen=True)
class StrengthenedInfeasible:
    pass


def check_equality_forcing(sys, limit=14):
    """Oracle decision for "Ax - bt = 0, Cx - dt <= -1, -t <= -2".

    Test-side: when feasible, the witness is built the way the
    equality-forcing argument does it -- average per-row slack points,
    take eta = min(1/2, slacks) and rescale by 1/eta.
    """
    target = strengthen(homogenize(sys), 1.0)
    verdict = oracle_feasible(target, limit=limit)
    if not verdict.feasible:
        return StrengthenedInfeasible()
    xt = np.asarray(verdict.witness, dtype=float)
    interior = xt[:-1] / xt[-1]

    plain = oracle_feasible(sys, limit=limit)
    xbar = None
    if plain.feasible and plain.vertices and sys.l:
        # per-row slack witnesses: the vertex minimizing each row value
        verts = np.array(plain.vertices)
        points = [verts[int(np.argmin(verts @ sys.C[k]))] for k in range(sys.l)]
        cand = np.mean(points, axis=0)
        if np.min(sys.ineq_slack(cand)) > 0:
            xbar = cand
    if xbar is None:
        xbar = interior
    slacks = sys.ineq_slack(xbar)
    eta = min(0.5, float(np.min(slacks))) if slacks.size else 0.5
    witness = np.concatenate([xbar / eta, [1.0 / eta]])
    if not target.satisfies(witness, eq_tol=1e-7, ineq_tol=1e-7):
        raise VerificationFailed("constructed witness fails the strengthened system")
    return StrengthenedFeasible(witness=witness)
