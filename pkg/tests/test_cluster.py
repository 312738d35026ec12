import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from senselearn import cluster as cl
from senselearn.errors import InvalidK, ShapeMismatch
from worked import SAMPLE_MATRIX, sample_word_data


def brute_mcquitty(D, k, seed):
    """McQuitty linkage rebuilt from scratch at every step.

    A cluster is a nested tuple of merges. Averaging at every merge makes
    the distance between two clusters the sum over leaf pairs of
    D[i, j] * w_i * w_j, where w is 2 ** -depth of the leaf in its tree.
    """
    D = np.asarray(D, dtype=float)
    rng = np.random.default_rng(seed)

    def leaves(tree, depth=0):
        if isinstance(tree, int):
            return [(tree, 0.5 ** depth)]
        return leaves(tree[0], depth + 1) + leaves(tree[1], depth + 1)

    def dist(a, b):
        return sum(D[i, j] * wi * wj for i, wi in leaves(a) for j, wj in leaves(b))

    clusters = {i: i for i in range(len(D))}
    while len(clusters) > k:
        slots = sorted(clusters)
        pairs = [(a, b) for x, a in enumerate(slots) for b in slots[x + 1:]]
        vals = [dist(clusters[a], clusters[b]) for a, b in pairs]
        best = min(vals)
        ties = [p for p, v in zip(pairs, vals) if v <= best + 1e-12]
        a, b = ties[0] if len(ties) == 1 else ties[rng.integers(len(ties))]
        clusters[a] = (clusters[a], clusters.pop(b))
    label = np.empty(len(D), dtype=int)
    for slot, tree in clusters.items():
        for i, _ in leaves(tree):
            label[i] = slot
    return cl.relabel_first_appearance(label)


def test_sample_dissimilarity_matrix():
    assert cl.dissimilarity_matrix(sample_word_data()).tolist() == SAMPLE_MATRIX


def test_identical_and_fully_different_rows():
    X = np.array([[0, 1, 2], [0, 1, 2], [1, 0, 0]])
    D = cl.dissimilarity_matrix(X)
    assert D[0, 1] == 0 and D[0, 2] == 3


def test_ward_variance_on_sample_words_rows():
    assert cl.ward_between_variance([0, 2, 1, 0], 1, [2, 0, 2, 2], 1) == pytest.approx(13 / 2)
    assert cl.ward_between_variance([1, 2], 1, [1, 2], 1) == 0
    a, b = np.array([0.0, 2, 1, 0]), np.array([2.0, 0, 2, 2])
    assert cl.ward_between_variance(3 * a, 2, 3 * b, 5) == pytest.approx(9 * cl.ward_between_variance(a, 2, b, 5))


def test_mcquitty_update():
    assert cl.mcquitty_update(2, 2) == 2
    assert cl.mcquitty_update(1, 1) == 1
    assert cl.mcquitty_update(1, 3) == 2


def test_mcquitty_first_merge_on_sample_words():
    labels, log = cl.agglomerate(SAMPLE_MATRIX, cl.MCQUITTY, 3, seed=0, return_log=True)
    assert (log[0].kept, log[0].absorbed, log[0].criterion) == (0, 3, 0.0)
    assert labels.tolist() == [0, 1, 2, 0]


def test_mcquitty_updated_distances_on_sample_words():
    D = np.array(SAMPLE_MATRIX, dtype=float)
    merged = cl.mcquitty_update(D[0], D[3])
    assert merged[1] == 2 and merged[2] == 1


def test_k_extremes():
    D = cl.dissimilarity_matrix(np.random.default_rng(0).integers(0, 3, (8, 4)))
    for linkage in (cl.WARD, cl.MCQUITTY):
        assert cl.agglomerate(D, linkage, 8, seed=0).tolist() == list(range(8))
        assert not cl.agglomerate(D, linkage, 1, seed=0).any()
    with pytest.raises(InvalidK):
        cl.agglomerate(D, cl.WARD, 0)
    with pytest.raises(InvalidK):
        cl.agglomerate(D, cl.WARD, 9)


def test_rejects_asymmetric_matrix():
    with pytest.raises(ShapeMismatch):
        cl.agglomerate([[0, 1], [2, 0]], cl.WARD, 1)


def test_ward_merges_closest_centroids():
    # two tight pairs far apart
    D = np.array([[0, 1, 9, 9], [1, 0, 9, 9], [9, 9, 0, 1], [9, 9, 1, 0]])
    assert cl.agglomerate(D, cl.WARD, 2, seed=0).tolist() == [0, 0, 1, 1]


def test_repeated_merging_keeps_equal_distances():
    # every pair at distance 2: any sequence of averages stays at 2
    D = 2 * (1 - np.eye(6))
    _, log = cl.agglomerate(D, cl.MCQUITTY, 1, seed=4, return_log=True)
    assert all(m.criterion == 2 for m in log)


def test_ties_are_seeded():
    D = 2 * (1 - np.eye(6))
    runs = {tuple(cl.agglomerate(D, cl.MCQUITTY, 3, seed=s)) for s in range(30)}
    assert len(runs) > 1
    assert all(
        np.array_equal(cl.agglomerate(D, cl.MCQUITTY, 3, seed=s), cl.agglomerate(D, cl.MCQUITTY, 3, seed=s))
        for s in range(5)
    )


@st.composite
def feature_matrices(draw):
    n = draw(st.integers(2, 7))
    m = draw(st.integers(1, 4))
    return np.array([[draw(st.integers(0, 2)) for _ in range(m)] for _ in range(n)])


@settings(max_examples=80, deadline=None)
@given(feature_matrices(), st.integers(0, 1000))
def test_mcquitty_matches_brute_force_on_mismatch_counts(X, seed):
    D = cl.dissimilarity_matrix(X)
    assert np.array_equal(D, D.T) and not np.diag(D).any()
    for k in range(1, len(X) + 1):
        assert np.array_equal(cl.agglomerate(D, cl.MCQUITTY, k, seed), brute_mcquitty(D, k, seed))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 7), st.integers(0, 10**6))
def test_mcquitty_matches_brute_force_on_real_distances(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.random((n, n))
    D = np.triu(A, 1) + np.triu(A, 1).T
    k = int(rng.integers(1, n + 1))
    assert np.array_equal(cl.agglomerate(D, cl.MCQUITTY, k, seed), brute_mcquitty(D, k, seed))


@settings(max_examples=40, deadline=None)
@given(feature_matrices(), st.integers(0, 1000))
def test_merged_distances_bounded(X, seed):
    D = cl.dissimilarity_matrix(X).astype(float)
    d_ki, d_li = D[0], D[-1]
    merged = cl.mcquitty_update(d_ki, d_li)
    assert np.all(np.minimum(d_ki, d_li) <= merged) and np.all(merged <= np.maximum(d_ki, d_li))


@settings(max_examples=30, deadline=None)
@given(feature_matrices(), st.integers(0, 1000), st.sampled_from([cl.WARD, cl.MCQUITTY]))
def test_deterministic_per_seed(X, seed, linkage):
    D = cl.dissimilarity_matrix(X)
    k = max(1, len(X) // 2)
    a = cl.agglomerate(D, linkage, k, seed)
    assert np.array_equal(a, cl.agglomerate(D, linkage, k, seed))
    assert len(set(a.tolist())) == k
