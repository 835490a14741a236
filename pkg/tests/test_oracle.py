"""Tests for the full-constraint reference solver and the deviation audit."""

import numpy as np
import pytest

from creditscreen import (
    Income,
    IncomeKind,
    ModelConfig,
    PathKind,
    best_deviation,
    build_full_mechanism,
    build_full_program,
    solve_full,
    solve_low_path,
    sqrt_power,
)
from creditscreen.degenerate import path_objective
from creditscreen.model import Policy, continuation_value
from creditscreen.oracle import DESK_MAX_T, DESK_MAX_TYPES
from creditscreen.screening import reduced_objective, solve_equilibrium_t3

from conftest import assert_close, uniform_grid_config


class TestProgramAssembly:
    def test_constraint_count(self, penalty_n2):
        prog = build_full_program(penalty_n2, 2)
        # dates 2..T-1, N**(t-2) continuation histories, N(N-1) ordered pairs
        T, N = penalty_n2.T, penalty_n2.n_types
        expected = sum(N ** (t - 2) * N * (N - 1) for t in range(2, T))
        assert len(prog.ic_rows) == expected

    def test_constraint_count_t4_n3(self):
        cfg = ModelConfig(T=4, deltas=(0.5, 0.8, 1.0), p=(1 / 3,) * 3,
                          q=(1 / 3,) * 3, R=1.2,
                          income=Income(IncomeKind.TOTAL_NPV, 3.0),
                          utility=sqrt_power())
        prog = build_full_program(cfg, 1)
        assert len(prog.ic_rows) == 6 + 3 * 6
        assert prog.n_vars == 1 + 3 + 9 + 9

    def test_objective_is_agent_value(self, penalty_n2):
        from creditscreen.model import agent_value

        prog = build_full_program(penalty_n2, 2)
        pol = Policy(3, 2, 2)
        rng = np.random.default_rng(7)
        for t in (1, 2, 3):
            for hist in pol.node_histories(t):
                pol.set(t, hist, float(rng.uniform(0.1, 2.0)))
        direct = agent_value(pol, penalty_n2, 2)
        assert float(prog.objective @ prog.flatten(pol)) == pytest.approx(
            direct, rel=1e-12)

    def test_budget_weights_sum(self, penalty_n2):
        prog = build_full_program(penalty_n2, 2)
        # with every utility at u(1), consumption is 1 everywhere and the
        # break-even cost is the annuity value
        x = np.full(prog.n_vars, penalty_n2.utility.u(1.0))
        annuity = sum(penalty_n2.R ** -(t - 1) for t in (1, 2, 3))
        assert prog.budget_value(x) == pytest.approx(
            annuity - penalty_n2.income_npv(), rel=1e-12)

    def test_desk_scale_guard(self):
        cfg = uniform_grid_config(10)
        with pytest.raises(ValueError):
            build_full_program(cfg, 1)
        big_t = ModelConfig(T=DESK_MAX_T + 1, deltas=(0.5, 1.0),
                            p=(0.5, 0.5), q=(0.5, 0.5), R=1.5,
                            income=Income(IncomeKind.TOTAL_NPV, 3.0),
                            utility=sqrt_power())
        with pytest.raises(ValueError):
            build_full_program(big_t, 1)
        assert DESK_MAX_TYPES == 3


class TestSolveFull:
    def test_matches_reduced_solver_two_types(self, penalty_n2):
        sol = solve_equilibrium_t3(penalty_n2, 2)
        prog = build_full_program(penalty_n2, 2)
        full = solve_full(prog)
        obj = reduced_objective(sol, penalty_n2)
        assert abs(full.objective_value - obj) / abs(obj) <= 1e-6
        sup = float(np.max(np.abs(
            full.x - prog.flatten(sol.to_policy(penalty_n2)))))
        assert sup <= 1e-5
        assert full.kkt_residual <= 1e-7

    def test_matches_reduced_solver_three_types(self):
        cfg = uniform_grid_config(3)
        for idx in (1, 2, 3):
            sol = solve_equilibrium_t3(cfg, idx)
            full = solve_full(build_full_program(cfg, idx))
            obj = reduced_objective(sol, cfg)
            assert abs(full.objective_value - obj) / abs(obj) <= 1e-6

    def test_degenerate_embedding(self, degenerate_t3):
        eq = solve_low_path(degenerate_t3, PathKind.EQUILIBRIUM)
        full = solve_full(build_full_program(degenerate_t3, 1))
        obj = path_objective(degenerate_t3, eq.path)
        assert abs(full.objective_value - obj) / abs(obj) <= 1e-6
        low = [full.policy.get(t, (1,) * min(t, 2)) for t in (1, 2, 3)]
        assert_close(low, eq.path, 1e-5, "low path")
        assert abs(full.policy.get(2, (1, 2))) <= 1e-6

    def test_degenerate_embedding_t4_pinned_coordinates(self):
        cfg = ModelConfig(T=4, deltas=(0.4, 0.9), p=(1.0, 0.0),
                          q=(0.75, 0.25), R=1.0,
                          income=Income(IncomeKind.TOTAL_NPV, 3.0),
                          utility=sqrt_power())
        eq = solve_low_path(cfg, PathKind.EQUILIBRIUM)
        mech = build_full_mechanism(cfg, eq)
        full = solve_full(build_full_program(cfg, 1))
        low = [full.policy.get(t, (1,) * min(t, 3)) for t in (1, 2, 3, 4)]
        assert_close(low, eq.path, 1e-5, "low path")
        # departure-date utilities at the floor, continuation values pinned
        for t in (2, 3):
            hist = (1,) * (t - 1) + (2,)
            assert abs(full.policy.get(t, hist)) <= 1e-6
            assert continuation_value(full.policy, cfg, hist) == \
                pytest.approx(continuation_value(mech, cfg, hist), abs=1e-5)

    def test_two_starts_agree_where_unique(self, penalty_n2):
        prog = build_full_program(penalty_n2, 2)
        a = solve_full(prog)
        level = penalty_n2.utility.u(penalty_n2.income_npv() / 12.0)
        b = solve_full(prog, x0=np.full(prog.n_vars, float(level)))
        assert float(np.max(np.abs(a.x - b.x))) <= 1e-5
        assert a.objective_value == pytest.approx(b.objective_value,
                                                  rel=1e-9)

    def test_budget_cap_override(self, penalty_n2):
        shrunk = build_full_program(penalty_n2, 2, income=1.5)
        full = solve_full(shrunk)
        grown = solve_full(build_full_program(penalty_n2, 2))
        assert full.objective_value < grown.objective_value
        assert abs(shrunk.budget_value(full.x)) <= 1e-8

    def test_log_instance(self):
        from creditscreen import log_utility

        cfg = ModelConfig(T=3, deltas=(0.5, 1.0), p=(0.5, 0.5), q=(0.5, 0.5),
                          R=1.5, income=Income(IncomeKind.TOTAL_NPV, 3.0),
                          utility=log_utility())
        sol = solve_equilibrium_t3(cfg, 2)
        full = solve_full(build_full_program(cfg, 2))
        obj = reduced_objective(sol, cfg)
        assert abs(full.objective_value - obj) / abs(obj) <= 1e-6
        sup = float(np.max(np.abs(full.x - build_full_program(cfg, 2).flatten(
            sol.to_policy(cfg)))))
        assert sup <= 1e-5


class TestBestDeviation:
    def test_incentive_compatible_policy_gap_zero(self, penalty_n2):
        sol = solve_equilibrium_t3(penalty_n2, 2)
        report = best_deviation(sol.to_policy(penalty_n2), penalty_n2, 2)
        assert report.gap <= 1e-8
        assert report.best_value >= report.truthful_value - 1e-12

    def test_planted_violation_detected(self, penalty_n2):
        sol = solve_equilibrium_t3(penalty_n2, 2)
        pol = sol.to_policy(penalty_n2)
        s = 0.3
        pol.set(2, (2, 2), pol.get(2, (2, 1)) + s)  # patient report now pays more
        report = best_deviation(pol, penalty_n2, 2)
        assert report.gap >= s / 2.0
        assert report.witness

    def test_increasing_current_utility_invites_always_high(self, penalty_n2):
        pol = Policy(3, 2, 2)
        pol.set(1, (2,), 1.0)
        for n in (1, 2):
            pol.set(2, (2, n), 0.5 + 0.5 * n)   # rises in the report
            pol.set(3, (2, n), 1.0)
        report = best_deviation(pol, penalty_n2, 2)
        assert report.gap > 0
        assert report.witness[(2, (2,), 1)] == 2

    def test_constant_policy_gap_zero(self, penalty_n2):
        pol = Policy(3, 2, 2)
        for t in (1, 2, 3):
            for hist in pol.node_histories(t):
                pol.set(t, hist, 0.7)
        report = best_deviation(pol, penalty_n2, 2)
        assert report.gap == 0.0

    def test_root_mismatch_rejected(self, penalty_n2):
        pol = Policy(3, 2, 2)
        with pytest.raises(ValueError):
            best_deviation(pol, penalty_n2, 1)
