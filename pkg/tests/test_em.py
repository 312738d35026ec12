from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from senselearn import em
from senselearn import naive_bayes as nb
from senselearn.errors import InvalidK, ShapeMismatch
from senselearn.events import ObservationSet
from worked import toy_data, toy_init

# parameter vectors after the first and second M-steps of the worked run,
# in the order prior, then p(F1|S) and p(F2|S) row by row
THETA_1 = [.4, .4, .2, .75, .25, .5, .5, 1.0, 0.0, .25, .75, .25, .75, .5, .5]
THETA_2 = [.4, .3, .3, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0]


def worked_run(**kw):
    return em.run_em(toy_data(), em.EmConfig(3, epsilon=0.01, init_assignments=toy_init(), **kw))


def test_random_init_is_seeded():
    a = em.random_init(toy_data(), 3, 7)
    assert np.array_equal(a, em.random_init(toy_data(), 3, 7))
    assert a.shape == (10,) and set(a) <= {0, 1, 2}
    assert not em.random_init(toy_data(), 1, 3).any()


def test_config_validation():
    with pytest.raises(InvalidK):
        em.EmConfig(0)
    with pytest.raises(ValueError):
        em.EmConfig(2, epsilon=0)
    with pytest.raises(ValueError):
        em.EmConfig(2, mode="fuzzy")


def test_hard_e_step_after_first_m_step():
    params = nb.ParameterSet.from_vector(THETA_1, 3, (2, 2))
    assignments, class_counts, tables = em.e_step(params, toy_data())
    # (1,2) rows -> class 1, (2,2) rows -> class 2, (1,1) rows -> class 3
    assert (assignments + 1).tolist() == [1, 1, 2, 2, 1, 3, 3, 3, 1, 2]
    assert tables[0][0, 0] == 4
    assert tables[0][1, 1] == 3
    assert tables[1][2, 0] == 3
    assert class_counts.tolist() == [4, 3, 3]


def test_second_e_step_is_a_fixed_point():
    params = nb.ParameterSet.from_vector(THETA_2, 3, (2, 2))
    a2, _, _ = em.e_step(params, toy_data())
    assert (a2 + 1).tolist() == [1, 1, 2, 2, 1, 3, 3, 3, 1, 2]


def test_soft_e_step_with_uniform_parameters():
    params = nb.ParameterSet([1 / 3] * 3, (np.full((3, 2), 0.5), np.full((3, 2), 0.5)), [False] * 3)
    assignments, class_counts, tables = em.e_step(params, toy_data(), em.SOFT)
    assert assignments is None
    assert np.allclose(class_counts, 10 / 3)
    # F1=1 occurs 7 times, F1=2 three times
    assert np.allclose(tables[0], [[7 / 3, 1], [7 / 3, 1], [7 / 3, 1]])


def test_param_distance_on_listed_vectors():
    old = nb.ParameterSet.from_vector(THETA_1, 3, (2, 2))
    new = nb.ParameterSet.from_vector(THETA_2, 3, (2, 2))
    oracle = max(abs(a - b) for a, b in zip(THETA_1, THETA_2))
    assert oracle == pytest.approx(0.5)
    assert em.param_distance(old, new) == pytest.approx(oracle)
    assert em.param_distance(new, old) == em.param_distance(old, new)
    assert em.param_distance(old, old) == 0


def test_param_distance_shape_mismatch():
    a = nb.ParameterSet.from_vector(THETA_1, 3, (2, 2))
    b = nb.ParameterSet([1.0], (np.ones((1, 2)) / 2,), [False])
    with pytest.raises(ShapeMismatch):
        em.param_distance(a, b)


def test_worked_run_converges_at_iteration_three():
    r = worked_run()
    assert r.converged and r.iterations == 3
    assert (r.assignments + 1).tolist() == [1, 1, 2, 2, 1, 3, 3, 3, 1, 2]
    assert r.trajectory[-1] < 0.01
    assert np.allclose(r.params.vector(), THETA_2)


def test_worked_run_likelihood_non_decreasing():
    lls = worked_run().log_likelihood
    assert all(b >= a - 1e-9 for a, b in zip(lls, lls[1:]))


def test_k_one():
    r = em.run_em(toy_data(), em.EmConfig(1, seed=0))
    assert r.converged and r.iterations <= 2
    assert r.params.class_prior.tolist() == [1.0]
    assert not r.assignments.any()


def test_likelihood_improves_on_four_rows():
    data = ObservationSet.from_rows([[0, 0], [0, 1], [1, 1], [1, 1]], (2, 2))
    for seed in range(20):
        r = em.run_em(data, em.EmConfig(2, seed=seed))
        init = em.random_init(data, 2, seed)
        c, t = em._counts(data.features, init, 2, (2, 2))
        start = nb.log_likelihood(em.m_step(c, t, 4), data.features, init)
        end = nb.log_likelihood(r.params, data.features, r.assignments)
        assert end >= start - 1e-9


def test_reproducible_given_seed():
    a = em.run_em(toy_data(), em.EmConfig(3, seed=11))
    b = em.run_em(toy_data(), em.EmConfig(3, seed=11))
    assert np.array_equal(a.assignments, b.assignments)
    assert a.trajectory == b.trajectory


def test_soft_mode_runs_and_reports_assignments():
    r = em.run_em(toy_data(), em.EmConfig(3, seed=2, mode=em.SOFT, max_iterations=200))
    assert r.assignments.shape == (10,)
    assert r.params.class_prior.sum() == pytest.approx(1.0)


def test_label_permuted_starts_on_worked_example():
    base = worked_run().assignments
    for perm in permutations(range(3)):
        init = tuple(perm[s] for s in toy_init())
        r = em.run_em(toy_data(), em.EmConfig(3, epsilon=0.01, init_assignments=init))
        assert np.array_equal(np.asarray(perm)[base], r.assignments)


@st.composite
def small_problems(draw):
    n = draw(st.integers(4, 12))
    cards = draw(st.lists(st.integers(2, 3), min_size=1, max_size=3))
    rows = [[draw(st.integers(0, c - 1)) for c in cards] for _ in range(n)]
    return ObservationSet.from_rows(rows, tuple(cards)), draw(st.integers(2, 3)), draw(st.integers(0, 10**6))


@settings(max_examples=100, deadline=None)
@given(small_problems())
def test_hard_em_likelihood_monotone(problem):
    data, k, seed = problem
    r = em.run_em(data, em.EmConfig(k, seed=seed))
    lls = r.log_likelihood
    assert all(b >= a - 1e-9 for a, b in zip(lls, lls[1:]))
    if r.converged:
        assert r.trajectory[-1] < 1e-3
