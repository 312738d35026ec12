from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from senselearn import naive_bayes as nb
from senselearn.errors import DegenerateClass, InconsistentCounts, ZeroEvidence
from senselearn.events import marginal_counts
from worked import toy_data, toy_init


def iteration1_params():
    data = toy_data().with_classes(toy_init(), k=3)
    return nb.fit(data)


def test_mle_from_first_random_assignment():
    p = iteration1_params()
    assert np.allclose(p.class_prior, [0.4, 0.4, 0.2], atol=1e-12)
    assert np.allclose(p.conditionals[0][:, 0], [0.75, 0.50, 1.00], atol=1e-12)
    assert p.conditionals[1][0, 0] == pytest.approx(0.25, abs=1e-12)
    assert p.conditionals[1][2, 0] == pytest.approx(0.50, abs=1e-12)


def test_mle_from_second_assignment():
    # (1,2) rows to class 1, (2,2) rows to class 2, (1,1) rows to class 3
    classes = [0, 0, 1, 1, 0, 2, 2, 2, 0, 1]
    p = nb.fit(toy_data().with_classes(classes, k=3))
    assert np.allclose(p.class_prior, [0.4, 0.3, 0.3])
    assert p.conditionals[0][0, 0] == 1.0
    assert p.conditionals[0][1, 0] == 0.0
    assert p.conditionals[1][0, 1] == 1.0
    assert p.conditionals[1][2, 0] == 1.0


def test_one_class_one_vector_is_one_hot():
    data = toy_data().subset([0, 1, 4]).with_classes([1, 1, 1], k=3)
    p = nb.fit(data)
    assert p.class_prior.tolist() == [0.0, 1.0, 0.0]
    assert p.conditionals[0][1].tolist() == [1.0, 0.0]
    assert p.degenerate.tolist() == [True, False, True]


def test_inconsistent_margins_rejected():
    with pytest.raises(InconsistentCounts):
        nb.mle_from_arrays([2, 2], [np.array([[1, 1], [1, 2]])])


def test_mle_from_marginal_counts_in_either_axis_order():
    data = toy_data().with_classes(toy_init(), k=3)
    cc = marginal_counts(data, ["S"])
    joints = [marginal_counts(data, ["F1", "S"]), marginal_counts(data, ["S", "F2"])]
    p = nb.mle_from_counts(cc, joints, 10)
    assert np.allclose(p.vector(), iteration1_params().vector())


def test_joint_prob_multiplies_factors():
    p = iteration1_params()
    assert nb.joint_prob(p, (0, 0), 2) == pytest.approx(0.2 * 1.0 * 0.5)


def test_joint_prob_strict_on_degenerate_class():
    data = toy_data().with_classes([0] * 10, k=2)
    p = nb.fit(data)
    assert nb.joint_prob(p, (0, 0), 1) == 0.0
    with pytest.raises(DegenerateClass):
        nb.joint_prob(p, (0, 0), 1, strict=True)


def test_posteriors_after_first_m_step():
    p = iteration1_params()
    assert np.allclose(nb.posterior(p, (0, 0)), [0.333, 0.222, 0.444], atol=5e-4)
    assert np.allclose(nb.posterior(p, (0, 1)), [0.474, 0.316, 0.211], atol=5e-4)


def test_posterior_from_two_decimal_sampled_parameters():
    p = nb.ParameterSet(
        [0.03, 0.51, 0.47],
        (np.array([[0.64, 0.36], [0.54, 0.46], [0.76, 0.24]]),
         np.array([[0.37, 0.63], [0.09, 0.91], [0.73, 0.27]])),
        [False] * 3,
    )
    assert np.allclose(nb.posterior(p, (0, 0)), [0.024, 0.085, 0.891], atol=2e-3)


def test_classify_bold_maxima():
    p = iteration1_params()
    got = {fv: nb.classify(p, fv) for fv in [(0, 0), (0, 1), (1, 0), (1, 1)]}
    assert got == {(0, 0): 2, (0, 1): 0, (1, 0): 1, (1, 1): 1}


def test_zero_evidence_names_rows():
    p = nb.ParameterSet([1.0, 0.0], (np.array([[1.0, 0.0], [0.5, 0.5]]),), [False, True])
    with pytest.raises(ZeroEvidence) as info:
        nb.posterior_matrix(p, [[0], [1], [1]])
    assert info.value.rows == [1, 2]


def test_ties_go_to_lowest_class():
    p = nb.ParameterSet([0.5, 0.5], (np.array([[0.5, 0.5], [0.5, 0.5]]),), [False, False])
    assert nb.classify(p, (1,)) == 0


def test_joint_table_axes():
    p = iteration1_params()
    table = nb.joint_table(p)
    assert table.shape == (2, 2, 3)
    assert table[0, 0, 2] == pytest.approx(nb.joint_prob(p, (0, 0), 2))


@st.composite
def parameter_sets(draw):
    k = draw(st.integers(1, 4))
    cards = draw(st.lists(st.integers(1, 3), min_size=1, max_size=3))
    weights = st.floats(0.05, 1.0)

    def dist(n):
        w = np.array([draw(weights) for _ in range(n)])
        return w / w.sum()

    prior = dist(k)
    conds = tuple(np.array([dist(c) for _ in range(k)]) for c in cards)
    return nb.ParameterSet(prior, conds, [False] * k)


@settings(max_examples=80, deadline=None)
@given(parameter_sets())
def test_exhaustive_event_space(p):
    cards = p.feature_cardinalities
    total = 0.0
    for fv in product(*(range(c) for c in cards)):
        joints = [nb.joint_prob(p, fv, s) for s in range(p.k)]
        total += sum(joints)
        post = nb.posterior(p, fv)
        assert post.sum() == pytest.approx(1.0, abs=1e-9)
        assert nb.classify(p, fv) == int(np.argmax(joints))
    assert total == pytest.approx(1.0, abs=1e-9)
    assert nb.joint_table(p).sum() == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(parameter_sets(), st.floats(0.01, 100))
def test_posterior_scale_invariant(p, c):
    scaled = nb.ParameterSet(p.class_prior * c, p.conditionals, p.degenerate)
    X = np.zeros((1, len(p.conditionals)), dtype=int)
    assert np.allclose(nb.posterior_matrix(scaled, X), nb.posterior_matrix(p, X))
