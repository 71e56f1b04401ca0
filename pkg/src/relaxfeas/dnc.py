"""Divide-and-conquer ball search.

The radius shrinks by 1/(1+theta) per level until the base case applies;
separators from the two child balls (the second centered at the projection
of z onto the first separator) are convexly combined back into a separator
for the parent ball.  Opposite child normals are the failure outcome, which
certifies infeasibility of the system searched.  The recursion runs inside
a flat kernel (see _kernels) with the leaf budget enforced there.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .ep import ApproxSolution, Separator, make_certificate
from .errors import CombinationFailed
from .linalg import TAU_OPP_DEFAULT, as_vector, build_projector
from .model import Hyperplane, combine_certificates

LOG2_75 = math.log2(7.0 / 5.0)
BUDGET_CAP = 2 ** 62


@dataclass(frozen=True)
class DnCCounters:
    ep_calls: int
    nodes: int


@dataclass(frozen=True)
class Failure:
    """Two child separators with (numerically) opposite normals h1 = -gamma h2."""

    h1: Hyperplane
    h2: Hyperplane
    gamma: float
    counters: DnCCounters = None


@dataclass(frozen=True)
class BudgetExceeded:
    counters: DnCCounters


@dataclass(frozen=True)
class Combined:
    hyperplane: Hyperplane


@dataclass(frozen=True)
class Opposite:
    gamma: float


@dataclass(frozen=True)
class DnCParams:
    """Knobs for the recursion.

    theta defaults to 2/5 so the leaf count matches the operation-count
    exponent 1/log2(7/5).  node_budget of None means 10 K leaf calls,
    where K = (r c_max / eps) ** (1/log2(7/5)).
    """

    theta: float = 0.4
    eps: float = 1.0
    node_budget: int = None
    tau_opp: float = TAU_OPP_DEFAULT

    def depth(self, r, c_max):
        """Smallest D with r/(1+theta)^D at or below the base-case radius."""
        if c_max <= 0.0:
            return 0
        base = self.eps / (2.0 * c_max)
        if r <= base:
            return 0
        return int(math.ceil((math.log(r) - math.log(base)) / math.log(1.0 + self.theta)))


def growth_rate(r, c_max, eps):
    """K = (r c_max / eps) ** (1/log2(7/5)); leaf-count scale of the search."""
    base = r * c_max / eps
    if base <= 1.0:
        return 1.0
    logk = math.log(base) * (1.0 / LOG2_75)
    if logk > 700.0:
        return math.inf
    return math.exp(logk)


def default_node_budget(r, c_max, eps):
    k = growth_rate(r, c_max, eps)
    if not math.isfinite(k):
        return BUDGET_CAP
    return min(int(math.ceil(10.0 * k)), BUDGET_CAP)


@dataclass(frozen=True)
class ComplexityEstimate:
    """Operation-count estimate for one recursion, with unit constants."""

    K: float
    mu: float
    rho: float
    N: int
    predicted_ops: float


def complexity_estimate(sys, z, r, eps):
    """Predicted arithmetic work for a recursion started at (z, r, eps)."""
    z = as_vector(z)
    m, n = sys.m, sys.n
    c_max = sys.c_max
    K = growth_rate(r, c_max, eps)
    mu = 2.0 * eps / (28.0 * n * c_max * c_max) if c_max > 0 else math.inf
    rho = float(np.max(np.abs(z))) if z.size else 0.0
    N = int(np.count_nonzero(sys.C))
    poly = m ** 3 + m * m * n + n * n * m
    if not math.isfinite(K):
        return ComplexityEstimate(K=K, mu=mu, rho=rho, N=N, predicted_ops=math.inf)
    if math.isfinite(mu):
        arg = (rho + math.log(max(K, 1.0)) * (r + n * mu)) / mu
        log_term = math.log(max(arg, math.e))
    else:
        log_term = 1.0
    predicted = poly + K * (n * log_term + n * n + N)
    return ComplexityEstimate(K=K, mu=mu, rho=rho, N=N, predicted_ops=predicted)


def combine_separators(hp1, hp2, z, r, tau_opp=TAU_OPP_DEFAULT):
    """Convex combination of two certified separators at center z.

    Maximizes the normalized distance over alpha in [0, 1] (one interior
    stationary point plus endpoints).  Returns Combined when the best
    combination separates B(z, r), Opposite when the normals are opposite
    within tau_opp, and raises CombinationFailed otherwise.
    """
    z = as_vector(z)
    code, alpha, dist, gamma = _kernels._combine_core(
        hp1.h, hp1.delta, hp2.h, hp2.delta, z, float(r), float(tau_opp))
    if code == 1:
        return Opposite(gamma=float(gamma))
    if code == 2:
        raise CombinationFailed(
            f"best combination distance {dist:g} below target {r:g}",
            h1=hp1.h, h2=hp2.h, best_alpha=float(alpha), best_distance=float(dist))
    h = alpha * hp1.h + (1.0 - alpha) * hp2.h
    delta = alpha * hp1.delta + (1.0 - alpha) * hp2.delta
    cert = None
    if hp1.cert is not None and hp2.cert is not None:
        cert = combine_certificates(hp1.cert, hp2.cert, alpha)
    return Combined(hyperplane=Hyperplane(h=h, delta=delta, cert=cert))


def dnc(sys, z, r, params=None, projector=None):
    """Run the recursion on sys from center z with starting radius r.

    Outcomes: ApproxSolution (eps-approximate for sys), Separator (certified
    hyperplane separating B(z, r) from the feasible set), Failure (opposite
    child normals; the system is infeasible), or BudgetExceeded.  All carry
    leaf/node counters.  CombinationFailed is raised as a diagnostic when a
    combination step falls short without opposite normals.
    """
    if params is None:
        params = DnCParams()
    if r <= 0 or params.eps <= 0 or params.theta <= 0:
        raise ValueError("need r > 0, eps > 0, theta > 0")
    z = as_vector(z)
    if projector is None:
        projector = build_projector(sys.A, sys.b)
    cnorms = np.linalg.norm(sys.C, axis=1) if sys.l else np.zeros(0)
    c_max = float(np.max(cnorms)) if sys.l else 0.0
    budget = params.node_budget
    if budget is None:
        budget = default_node_budget(r, c_max, params.eps)
    (kind, x, h1, d1, m1, h2, d2, m2, gamma, ep_calls, nodes) = _kernels._dnc_core(
        projector.A, projector.At, projector.b, projector.L,
        sys.C, sys.d, cnorms, c_max,
        z, float(r), float(params.eps), float(params.theta),
        float(params.tau_opp), int(budget))
    counters = DnCCounters(ep_calls=int(ep_calls), nodes=int(nodes))
    if kind == 0:
        return ApproxSolution(x=x, counters=counters)
    if kind == 1:
        hp = Hyperplane(h=h1, delta=float(d1), cert=make_certificate(sys, m1))
        return Separator(hyperplane=hp, counters=counters)
    if kind == 2:
        hp1 = Hyperplane(h=h1, delta=float(d1), cert=make_certificate(sys, m1))
        hp2 = Hyperplane(h=h2, delta=float(d2), cert=make_certificate(sys, m2))
        return Failure(h1=hp1, h2=hp2, gamma=float(gamma), counters=counters)
    if kind == 3:
        return BudgetExceeded(counters=counters)
    raise CombinationFailed(
        f"combination fell short of the separation target (best {gamma:g})",
        h1=h1, h2=h2, best_distance=float(gamma))
