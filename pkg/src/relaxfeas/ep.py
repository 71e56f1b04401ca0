"""Base case of the ball search: one projection, one scan of the rows.

Given a center z and a radius r small enough relative to the inequality
row norms (r <= eps / (2 max_k |c_k|)), a single call either certifies an
eps-approximate solution or produces a separating hyperplane for the open
ball B(z, r), built from the projection direction or from a single far
violated row.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import PreconditionViolated
from .linalg import as_vector, build_projector
from .model import Certificate, Hyperplane


@dataclass(frozen=True)
class ApproxSolution:
    """A point satisfying the equalities and all inequalities up to eps."""

    x: np.ndarray
    counters: object = None


@dataclass(frozen=True)
class Separator:
    """A certified hyperplane separating the query ball from the feasible set."""

    hyperplane: Hyperplane
    counters: object = None


def ep_threshold(sys, eps):
    """Largest radius the elementary procedure accepts for this system."""
    c_max = sys.c_max
    if c_max <= 0.0:
        return np.inf
    return eps / (2.0 * c_max)


def make_certificate(sys, full_mults):
    """Split an (m + l)-vector of row multipliers into a Certificate."""
    m = sys.m
    eq = full_mults[:m]
    ineq = full_mults[m:]
    if sys.homog_row is None:
        return Certificate(eq_mults=eq, ineq_mults=ineq)
    hr = sys.homog_row
    rest = np.concatenate([ineq[:hr], ineq[hr + 1:]])
    return Certificate(eq_mults=eq, ineq_mults=rest, extra_mult=float(ineq[hr]))


def elementary_procedure(sys, z, r, eps, projector=None):
    """Single base-case call on (z, r, eps).

    Branch order: if the projection onto {Ax = b} lands within r of z and
    every inequality row is violated by less than r (normalized), the
    projection itself is an eps-approximate solution.  Otherwise the
    projection direction (if it moved at least r) or the first row violated
    by at least r yields a separator; ties go to the lowest row index.
    """
    z = as_vector(z)
    if r <= 0 or eps <= 0:
        raise PreconditionViolated("need r > 0 and eps > 0")
    limit = ep_threshold(sys, eps)
    if r > limit:
        raise PreconditionViolated(
            f"r={r:g} exceeds eps/(2 max row norm)={limit:g}")
    if projector is None:
        projector = build_projector(sys.A, sys.b)
    cnorms = np.linalg.norm(sys.C, axis=1) if sys.l else np.zeros(0)
    branch, p, u, k0 = _kernels._ep_core(
        projector.A, projector.At, projector.b, projector.L,
        sys.C, sys.d, cnorms, z, float(r))
    if branch == 1:
        return ApproxSolution(x=p)
    full = np.zeros(sys.m + sys.l)
    if branch == 2:
        h = z - p
        delta = float(h @ p)
        full[:sys.m] = u
    else:
        h = sys.C[k0].copy()
        delta = float(sys.d[k0])
        full[sys.m + k0] = 1.0
    cert = make_certificate(sys, full)
    return Separator(hyperplane=Hyperplane(h=h, delta=delta, cert=cert))
