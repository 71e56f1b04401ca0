"""The classical over-projection relaxation method.

Each step picks a violated hyperplane (the worst one, or a uniformly
random one among the violated) and moves z by lam times the projection
step, z <- z + lam (p(z) - z).  Equality rows compete for selection by
their normalized absolute residual and use the same update.  Iteration
count 0 means the start point already satisfied everything.
"""

import time
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .linalg import as_vector
from .solvers import Decision, SolveReport

CHUNK = 250_000
TRACE_CAP = 300_000


@dataclass(frozen=True)
class RelaxConfig:
    """Step multiplier, stopping tolerance, and row-selection rule.

    selection is "max" (worst violation, lowest index on ties) or "random"
    (uniform over rows violated by at least eps, seeded).
    """

    lam: float = 1.9
    eps: float = 1e-6
    selection: str = "max"
    seed: int = 0
    max_iters: int = 10_000_000
    time_limit: float = 600.0

    def __post_init__(self):
        if not 0.0 < self.lam <= 2.0:
            raise ValueError("lam must be in (0, 2]")
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.selection not in ("max", "random"):
            raise ValueError("selection must be 'max' or 'random'")


def relax_solve(sys, z0=None, cfg=None, keep_trace=False):
    """Iterate until every normalized violation is below cfg.eps.

    Returns a SolveReport: FEASIBLE with the final iterate, or
    BUDGET_EXCEEDED when max_iters or the time limit ran out.  With
    keep_trace the per-step iterates land in report.meta["iterates"]
    (capped at TRACE_CAP rows).
    """
    if cfg is None:
        cfg = RelaxConfig()
    t0 = time.perf_counter()
    n = sys.n
    z = np.zeros(n) if z0 is None else as_vector(z0).copy()
    rows = sys.m + sys.l
    report = SolveReport(decision=Decision.BUDGET_EXCEEDED, meta={"eps": cfg.eps})
    if rows == 0:
        report.decision = Decision.FEASIBLE
        report.x = z
        report.elapsed = time.perf_counter() - t0
        return report
    G = np.ascontiguousarray(np.vstack([sys.A, sys.C]) if sys.m else sys.C)
    rhs = np.concatenate([sys.b, sys.d])
    norms = np.linalg.norm(G, axis=1)
    cap = min(cfg.max_iters, TRACE_CAP) if keep_trace else 0
    trace = np.zeros((cap, n))
    rng = _kernels.seed_to_state(cfg.seed)
    random_sel = cfg.selection == "random"

    steps = 0
    status = 1
    with np.errstate(over="ignore"):
        while steps < cfg.max_iters:
            chunk = min(CHUNK, cfg.max_iters - steps)
            done, status, rng = _kernels._relax_core(
                G, rhs, norms, sys.m, z, cfg.lam, cfg.eps,
                chunk, steps, random_sel, rng, trace)
            # the jitted kernel boxes the unsigned state as a signed int
            rng = np.uint64(int(rng) & 0xFFFFFFFFFFFFFFFF)
            steps += int(done)
            if status == 0:
                break
            if time.perf_counter() - t0 > cfg.time_limit:
                report.meta["timed_out"] = True
                break
    report.iterations = steps
    if status == 0:
        report.decision = Decision.FEASIBLE
        report.x = z
    if keep_trace:
        report.meta["iterates"] = trace[:min(steps, cap)]
    report.elapsed = time.perf_counter() - t0
    return report


@dataclass(frozen=True)
class RandomRelaxStats:
    """Aggregates over independently seeded random-selection runs."""

    avg_iters: float
    std_iters: float
    min_iters: int
    max_iters: int
    avg_time: float
    std_time: float
    runs: int
    solved: int


def relax_random_stats(sys, z0, cfg, runs):
    """Run the random-selection variant `runs` times and aggregate.

    Run i uses a seed derived from (cfg.seed, i); the standard deviations
    are population standard deviations, so a single run reports 0.
    """
    if cfg.selection != "random":
        raise ValueError("relax_random_stats requires selection='random'")
    if runs < 1:
        raise ValueError("need runs >= 1")
    iters = np.zeros(runs)
    times = np.zeros(runs)
    solved = 0
    for i in range(runs):
        sub = int(np.random.SeedSequence(entropy=cfg.seed, spawn_key=(i,)).generate_state(1)[0])
        rep = relax_solve(sys, z0, replace(cfg, seed=sub))
        iters[i] = rep.iterations
        times[i] = rep.elapsed
        if rep.decision == Decision.FEASIBLE:
            solved += 1
    return RandomRelaxStats(
        avg_iters=float(np.mean(iters)),
        std_iters=float(np.std(iters)),
        min_iters=int(np.min(iters)),
        max_iters=int(np.max(iters)),
        avg_time=float(np.mean(times)),
        std_time=float(np.std(times)),
        runs=runs,
        solved=solved,
    )
