import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import random_bounded_system
from relaxfeas.dnc import (BudgetExceeded, Combined, DnCParams, Failure,
                           Opposite, combine_separators, complexity_estimate,
                           dnc)
from relaxfeas.ep import ApproxSolution, Separator, elementary_procedure, ep_threshold
from relaxfeas.errors import CombinationFailed
from relaxfeas.model import Certificate, Hyperplane, LinearSystem, validate_certificate
from relaxfeas.oracle import oracle_feasible

LOG2_75 = math.log2(7 / 5)


def leaf_depth(r, c_max, eps, theta=0.4):
    return math.ceil(math.log(2 * r * c_max / eps) / math.log(1 + theta))


class TestBaseCase:
    def test_delegates_to_ep(self):
        sys = LinearSystem(A=[[1, 1]], b=[2], C=[[1, 0]], d=[1])
        r = 0.5 * ep_threshold(sys, 1.0)
        out = dnc(sys, [1, 1], r, DnCParams(eps=1.0))
        ref = elementary_procedure(sys, [1, 1], r, 1.0)
        assert isinstance(out, type(ref))
        assert out.counters.ep_calls == 1 and out.counters.nodes == 1
        assert_allclose(out.x, ref.x)


class TestFeasibleToy:
    def test_solution_contract(self):
        sys = LinearSystem(A=[[1, 1]], b=[2], C=[[-1, 0], [0, -1]], d=[0, 0])
        out = dnc(sys, [0, 0], 4.0, DnCParams(eps=1.0))
        assert isinstance(out, ApproxSolution)
        assert out.x[0] + out.x[1] == pytest.approx(2.0, abs=1e-9)
        assert np.all(out.x >= -1.0 - 1e-8)
        # the basic-solution oracle confirms feasibility of the plain system
        assert oracle_feasible(sys).feasible


class TestInfeasibleToy:
    def test_separator_or_failure(self):
        sys = LinearSystem(A=[[0, 1]], b=[0], C=[[1, 0], [-1, 0]], d=[-10, 9])
        assert not oracle_feasible(sys).feasible
        out = dnc(sys, [0, 0], 4.0, DnCParams(eps=1.0))
        assert isinstance(out, (Separator, Failure))
        if isinstance(out, Separator):
            assert validate_certificate(sys, out.hyperplane).valid
            tau = 1e-8 * (1 + out.hyperplane.norm)
            assert out.hyperplane.distance_from([0, 0]) >= 4.0 - tau
        else:
            u1 = out.h1.h / out.h1.norm
            u2 = out.h2.h / out.h2.norm
            assert np.linalg.norm(u1 + u2) <= 1e-9
            assert out.gamma > 0


class TestCombineSeparators:
    def make_hp(self, h, delta, l=2):
        mults = np.zeros(l)
        return Hyperplane(h=h, delta=delta,
                          cert=Certificate(eq_mults=[], ineq_mults=mults))

    def test_grid_search_oracle(self):
        hp1 = self.make_hp([1, 0], 0.0)
        hp2 = self.make_hp([0, 1], 0.0)
        z = np.array([2.0, 2.0])
        res = combine_separators(hp1, hp2, z, 2.5)
        assert isinstance(res, Combined)
        assert_allclose(res.hyperplane.h, [0.5, 0.5])
        got = res.hyperplane.distance_from(z)
        assert got == pytest.approx(2 / math.sqrt(0.5), rel=1e-12)
        # exhaustive 1-D grid over alpha cannot beat the returned distance
        best = -np.inf
        for alpha in np.linspace(0, 1, 100001):
            h = alpha * hp1.h + (1 - alpha) * hp2.h
            nh = np.linalg.norm(h)
            if nh < 1e-12:
                continue
            best = max(best, (h @ z - (alpha * hp1.delta + (1 - alpha) * hp2.delta)) / nh)
        assert got >= best - 1e-9

    def test_opposite(self):
        hp1 = self.make_hp([1, 2], 0.0)
        hp2 = self.make_hp([-2, -4], 0.0)
        res = combine_separators(hp1, hp2, [0, 0], 1.0)
        assert isinstance(res, Opposite)
        assert res.gamma == pytest.approx(0.5)

    def test_degenerate_equal(self):
        hp1 = self.make_hp([1, 0], 0.0)
        res = combine_separators(hp1, hp1, [2, 0], 1.5)
        assert isinstance(res, Combined)
        assert res.hyperplane.distance_from([2, 0]) == pytest.approx(2.0)

    def test_failure_diagnostic(self):
        hp1 = self.make_hp([1, 0], 0.0)
        hp2 = self.make_hp([0, 1], 0.0)
        with pytest.raises(CombinationFailed):
            combine_separators(hp1, hp2, [0.1, 0.1], 10.0)


class TestComplexityEstimate:
    def test_unit_base(self):
        sys = LinearSystem(A=np.zeros((0, 2)), b=[], C=[[1, 0]], d=[1])
        est = complexity_estimate(sys, [0, 0], 1.0, 1.0)
        assert est.K == 1.0

    def test_high_precision_exponent(self):
        sys = LinearSystem(A=np.zeros((0, 2)), b=[], C=[[1, 0]], d=[1])
        est = complexity_estimate(sys, [0, 0], 100.0, 1.0)
        # frozen from the high-precision evaluation 1/log2(7/5) = 2.06004268...
        assert est.K == pytest.approx(100.0 ** (1.0 / LOG2_75), rel=1e-12)
        assert est.K == pytest.approx(13185.1609, rel=1e-8)

    def test_mu(self):
        sys = LinearSystem(A=np.zeros((0, 7)), b=[], C=[[1, 0, 0, 0, 0, 0, 0]], d=[1])
        est = complexity_estimate(sys, np.zeros(7), 1.0, 1.0)
        assert est.mu == pytest.approx(1.0 / 98.0)

    def test_counts_nonzeros(self):
        sys = LinearSystem(A=np.zeros((0, 3)), b=[], C=[[1, 0, 2], [0, 3, 0]], d=[1, 1])
        est = complexity_estimate(sys, np.zeros(3), 2.0, 1.0)
        assert est.N == 3
        assert est.rho == 0.0
        assert math.isfinite(est.predicted_ops)


class TestLeafCounts:
    def test_bound_holds(self):
        rng = np.random.default_rng(200)
        for _ in range(40):
            sys = random_bounded_system(rng, n_max=4)
            eps = float(rng.uniform(0.5, 2.0))
            r = float(rng.uniform(0.5, 4.0))
            out = dnc(sys, np.zeros(sys.n), r, DnCParams(eps=eps))
            if isinstance(out, BudgetExceeded):
                continue
            D = leaf_depth(r, sys.c_max, eps)
            assert out.counters.ep_calls <= 2 ** (D + 1)

    def test_budget_outcome(self):
        # the infeasible toy needs two leaf calls; a budget of one stops it
        sys = LinearSystem(A=[[0, 1]], b=[0], C=[[1, 0], [-1, 0]], d=[-10, 9])
        out = dnc(sys, [0, 0], 4.0, DnCParams(eps=1.0, node_budget=1))
        assert isinstance(out, BudgetExceeded)
        assert out.counters.ep_calls == 1


class TestDeterminism:
    def test_identical_runs(self):
        rng = np.random.default_rng(201)
        sys = random_bounded_system(rng, n_max=4)
        a = dnc(sys, np.zeros(sys.n), 3.0, DnCParams(eps=1.0))
        b = dnc(sys, np.zeros(sys.n), 3.0, DnCParams(eps=1.0))
        assert type(a) is type(b)
        assert a.counters == b.counters


class TestOutcomeSoundness:
    def test_random_systems(self):
        rng = np.random.default_rng(202)
        seen = {"sol": 0, "sep": 0, "fail": 0}
        for _ in range(60):
            sys = random_bounded_system(rng, n_max=4)
            eps = float(rng.uniform(0.5, 1.5))
            r = float(rng.uniform(1.0, 5.0))
            z = rng.uniform(-2, 2, size=sys.n)
            out = dnc(sys, z, r, DnCParams(eps=eps))
            if isinstance(out, ApproxSolution):
                seen["sol"] += 1
                if sys.m:
                    assert np.max(np.abs(sys.eq_residuals(out.x))) <= 1e-8 * (1 + np.max(np.abs(sys.b)))
                assert np.min(sys.ineq_slack(out.x)) >= -eps - 1e-8
            elif isinstance(out, Separator):
                seen["sep"] += 1
                hp = out.hyperplane
                assert validate_certificate(sys, hp).valid
                assert hp.distance_from(z) >= r - 1e-8 * (1 + hp.norm)
            elif isinstance(out, Failure):
                seen["fail"] += 1
                assert not oracle_feasible(sys).feasible
        assert seen["sol"] > 5 and seen["sep"] + seen["fail"] > 5
