#!/usr/bin/env python3
"""
Joint assignment tests: exhaustive and relaxed solvers
"""

import itertools
import time

import numpy as np
import pytest

from groundkit.config.settings import GroundkitConfig, SolverConfig
from groundkit.errors import BudgetExceededError
from groundkit.models.inference import JointProblem, PairTerm
from groundkit.solvers import (
    AutoSolver,
    ExactSolver,
    RelaxedSolver,
    SolverFactory,
    project_simplex,
    solve_exact,
    solve_relaxed,
)


def random_problem(rng, max_phrases=5, max_candidates=8):
    n = int(rng.integers(1, max_phrases + 1))
    sizes = [int(rng.integers(1, max_candidates + 1)) for _ in range(n)]
    unary = [rng.random(m) for m in sizes]
    terms = []
    for i, j in itertools.permutations(range(n), 2):
        if rng.random() < 0.4:
            terms.append(PairTerm(i=i, j=j, costs=rng.random((sizes[i], sizes[j]))))
    return JointProblem(unary=unary, pair_terms=terms)


def brute_force(problem):
    best, best_value = None, np.inf
    for chosen in itertools.product(*(range(m) for m in problem.sizes)):
        value = problem.objective(list(chosen))
        if value < best_value:
            best, best_value = list(chosen), value
    return best, best_value


def test_single_phrase_is_unary_argmin():
    problem = JointProblem(unary=[[0.4, 0.1, 0.3]])
    assert solve_exact(problem).chosen == [1]
    assert solve_relaxed(problem).chosen == [1]


def test_pair_term_overrides_unary_preference():
    problem = JointProblem(
        unary=[[0.0, 1.0], [0.0, 1.0]],
        pair_terms=[PairTerm(i=0, j=1, costs=np.array([[10.0, 0.0], [0.0, 10.0]]))],
    )
    result = solve_exact(problem)
    assert result.chosen == [0, 1]
    assert result.objective == 1.0
    assert solve_relaxed(problem).chosen == [0, 1]


def test_zero_pair_term_decouples_phrases():
    rng = np.random.default_rng(0)
    unary = [rng.random(4), rng.random(6), rng.random(3)]
    problem = JointProblem(unary=unary, pair_terms=[PairTerm(i=2, j=0, costs=np.zeros((3, 4)))])
    expected = [int(np.argmin(u)) for u in unary]
    assert solve_exact(problem).chosen == expected
    assert solve_relaxed(problem).chosen == expected


def test_exact_matches_brute_force():
    rng = np.random.default_rng(1)
    solving = 0.0
    for _ in range(200):
        problem = random_problem(rng, max_phrases=5, max_candidates=8)
        chosen, value = brute_force(problem)
        start = time.perf_counter()
        result = solve_exact(problem)
        relaxed = solve_relaxed(problem, seed=0)
        solving += time.perf_counter() - start
        assert result.chosen == chosen
        assert result.objective == value
        assert relaxed.objective >= value
    assert solving < 10.0


def test_relaxed_stays_close_to_exact_optimum():
    rng = np.random.default_rng(2)
    close = 0
    for _ in range(200):
        problem = random_problem(rng)
        exact = solve_exact(problem)
        relaxed = solve_relaxed(problem, seed=0)
        assert relaxed.objective >= exact.objective - 1e-9
        assert relaxed.objective == pytest.approx(problem.objective(relaxed.chosen), abs=1e-9)
        if relaxed.objective <= 1.05 * exact.objective + 1e-12:
            close += 1
    assert close >= 190


def test_unary_shift_keeps_exact_argmin():
    rng = np.random.default_rng(3)
    for _ in range(20):
        problem = random_problem(rng)
        shifted = problem.model_copy(update={"unary": [problem.unary[0] + 2.5] + problem.unary[1:]})
        before, after = solve_exact(problem), solve_exact(shifted)
        assert after.chosen == before.chosen
        assert after.objective == pytest.approx(before.objective + 2.5, abs=1e-9)


def test_equal_costs_give_a_deterministic_answer():
    problem = JointProblem(
        unary=[np.ones(3), np.ones(4)],
        pair_terms=[PairTerm(i=0, j=1, costs=np.ones((3, 4)))],
    )
    assert solve_exact(problem).chosen == [0, 0]
    first, second = solve_relaxed(problem, seed=5), solve_relaxed(problem, seed=5)
    assert first.chosen == second.chosen
    assert first.objective == pytest.approx(3.0)


def test_budget_is_enforced():
    problem = JointProblem(unary=[np.zeros(10)] * 4)
    with pytest.raises(BudgetExceededError) as info:
        solve_exact(problem, budget=1000)
    assert info.value.to_dict()["error"] == "budget_exceeded"
    assert solve_exact(problem, budget=10_000).chosen == [0, 0, 0, 0]


def test_auto_solver_falls_back_to_relaxation():
    problem = JointProblem(unary=[np.array([1.0, 0.0])] * 3)
    solver = AutoSolver(SolverConfig(exhaustive_budget=4))
    result = solver.solve(problem)
    assert result.solver == "relaxed"
    assert result.chosen == [1, 1, 1]
    assert AutoSolver().solve(problem).solver == "exact"


def test_solver_factory():
    assert isinstance(SolverFactory.create_solver(SolverConfig(provider="exact")), ExactSolver)
    assert isinstance(SolverFactory.create_solver(SolverConfig(provider="relaxed")), RelaxedSolver)
    solver = SolverFactory.create_solver(GroundkitConfig())
    assert isinstance(solver, AutoSolver)
    assert solver.get_solver_info()["name"] == "auto"
    assert SolverFactory.get_available_solvers() == ["auto", "exact", "relaxed"]


def test_problem_validation():
    with pytest.raises(ValueError):
        JointProblem(unary=[np.zeros(2), np.zeros(3)], pair_terms=[PairTerm(i=0, j=1, costs=np.zeros((3, 2)))])
    with pytest.raises(ValueError):
        JointProblem(unary=[np.array([0.0, np.nan])])
    with pytest.raises(ValueError):
        PairTerm(i=1, j=1, costs=np.zeros((2, 2)))


def test_project_simplex():
    rng = np.random.default_rng(4)
    for _ in range(20):
        x = project_simplex(rng.normal(size=6) * 3)
        assert np.all(x >= 0)
        assert x.sum() == pytest.approx(1.0)
    point = np.array([0.2, 0.3, 0.5])
    np.testing.assert_allclose(project_simplex(point), point)
    np.testing.assert_allclose(project_simplex(np.array([5.0, 0.0])), [1.0, 0.0])
