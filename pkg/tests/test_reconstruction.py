import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmlfs.errors import ContractError, ParseError
from pmlfs.infotheory import MIMatrix
from pmlfs.reconstruction import (
    FeatureRanking,
    load_ranking,
    rank_features,
    reconstruct_labels,
    reconstruct_weights,
    save_ranking,
)


def mi(values):
    return MIMatrix(values=np.array(values, dtype=float), kind="binary-over-Y")


# ---------------------------------------------------------------------------
# stage 1


def test_zero_row_stays_zero():
    Y = np.array([[0, 0, 0], [1, 0, 1]])
    Z = mi([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    T = reconstruct_labels(Y, Z).values
    assert np.all(T[0] == 0.0)


def test_single_candidate_row_normalizes_to_one():
    Y = np.array([[0, 1, 0]])
    Z = mi([[0.2, 0, 0], [0, 0.7, 0], [0, 0, 0.2]])
    rec = reconstruct_labels(Y, Z)
    np.testing.assert_array_equal(rec.values, [[0.0, 1.0, 0.0]])
    raw = reconstruct_labels(Y, Z, normalization="none").values
    np.testing.assert_allclose(raw, [[0.0, 0.7, 0.0]])


def test_two_candidate_hand_case():
    Y = np.array([[1, 1, 0]])
    Z = mi([[1, 0.5, 0], [0.5, 1, 0], [0, 0, 1]])
    raw = reconstruct_labels(Y, Z, normalization="none").values
    np.testing.assert_allclose(raw, [[1.5, 1.5, 0.0]])
    normalized = reconstruct_labels(Y, Z).values
    np.testing.assert_allclose(normalized, [[1.0, 1.0, 0.0]])


def test_degenerate_candidate_warns_and_zeroes():
    Y = np.array([[1, 1], [1, 0]])
    Z = mi([[0, 0], [0, 1]])  # label 0 carries no MI at all
    with pytest.warns(UserWarning, match=r"\[0\]"):
        rec = reconstruct_labels(Y, Z)
    assert np.all(rec.values[:, 0] == 0.0)


def test_exclude_diagonal_option():
    Y = np.array([[0, 1, 0]])
    Z = mi([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    with pytest.warns(UserWarning):
        rec = reconstruct_labels(Y, Z, include_diagonal=False)
    assert np.all(rec.values == 0.0)


def test_global_max_normalization():
    Y = np.array([[1, 0], [1, 1]])
    Z = mi([[1.0, 0.5], [0.5, 1.0]])
    rec = reconstruct_labels(Y, Z, normalization="global-max")
    assert rec.values.max() == 1.0


def test_dimension_mismatch_rejected():
    with pytest.raises(ContractError):
        reconstruct_labels(np.array([[1, 0]]), mi([[1.0]]))


@given(st.data())
@settings(max_examples=50, deadline=None)
def test_zero_pattern_preserved(data):
    n = data.draw(st.integers(1, 8))
    q = data.draw(st.integers(1, 5))
    Y = np.array(data.draw(st.lists(st.lists(st.integers(0, 1), min_size=q, max_size=q), min_size=n, max_size=n)))
    S = np.array(data.draw(st.lists(st.lists(st.floats(0, 1), min_size=q, max_size=q), min_size=q, max_size=q)))
    Z = (S + S.T) / 2
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        T = reconstruct_labels(Y, Z).values
    assert np.all(T[Y == 0] == 0.0)


def test_adding_candidate_never_decreases_raw_scores():
    rng = np.random.default_rng(0)
    for _ in range(20):
        q = 4
        S = rng.uniform(0, 1, (q, q))
        Z = (S + S.T) / 2
        Y = np.array([[1, 1, 0, 0]])
        with_extra = Y.copy()
        with_extra[0, 2] = 1
        base = reconstruct_labels(Y, Z, normalization="none").values
        grown = reconstruct_labels(with_extra, Z, normalization="none").values
        assert np.all(grown[0, [0, 1]] >= base[0, [0, 1]] - 1e-15)


# ---------------------------------------------------------------------------
# stage 3


def test_identity_connectivity_keeps_weights():
    W = np.array([[0.3, 0.1], [0.2, 0.9]])
    np.testing.assert_array_equal(reconstruct_weights(W, np.eye(2)), W)


def test_zero_weights_stay_zero():
    assert np.all(reconstruct_weights(np.zeros((3, 2)), np.eye(2)) == 0.0)


def test_hand_product():
    W = np.array([[1.0, 0.0], [0.0, 1.0]])
    Zp = np.array([[1.0, 0.4], [0.4, 1.0]])
    np.testing.assert_allclose(reconstruct_weights(W, Zp), [[1.0, 0.4], [0.4, 1.0]])


def test_weight_shape_mismatch_rejected():
    with pytest.raises(ContractError):
        reconstruct_weights(np.zeros((2, 3)), np.eye(2))


# ---------------------------------------------------------------------------
# ranking


def test_rank_by_norm():
    W = np.diag([3.0, 1.0, 2.0])
    ranking = rank_features(W)
    assert ranking.order.tolist() == [0, 2, 1]
    np.testing.assert_allclose(ranking.scores, [3.0, 1.0, 2.0])


def test_all_zero_ties_keep_index_order():
    ranking = rank_features(np.zeros((4, 2)))
    assert ranking.order.tolist() == [0, 1, 2, 3]
    assert np.all(ranking.scores == 0.0)


def test_hand_norms():
    ranking = rank_features(np.array([[1.0, 1.0], [2.0, 0.0]]))
    assert ranking.order.tolist() == [1, 0]
    np.testing.assert_allclose(ranking.scores, [np.sqrt(2.0), 2.0])


def test_permutation_equivariance():
    rng = np.random.default_rng(8)
    W = rng.uniform(0, 1, (6, 3))
    perm = rng.permutation(6)
    base = rank_features(W)
    shuffled = rank_features(W[perm])
    # mapping shuffled positions back through perm recovers the base ranking
    assert [perm[i] for i in shuffled.order] == base.order.tolist()


def test_scaled_identity_preserves_order():
    rng = np.random.default_rng(9)
    W = rng.uniform(0, 1, (5, 4))
    base = rank_features(reconstruct_weights(W, np.eye(4)))
    scaled = rank_features(reconstruct_weights(W, 2.5 * np.eye(4)))
    assert base.order.tolist() == scaled.order.tolist()
    np.testing.assert_allclose(scaled.scores, 2.5 * base.scores, rtol=1e-12)


def test_ranking_validates_order():
    with pytest.raises(ContractError):
        FeatureRanking(order=np.array([0, 0, 1]), scores=np.zeros(3))


def test_ranking_csv_roundtrip(tmp_path):
    ranking = rank_features(np.array([[1.0, 1.0], [2.0, 0.0], [0.5, 0.1]]))
    names = ["alpha", "beta", "gamma"]
    path = save_ranking(ranking, names, tmp_path / "ranking.csv")
    back, back_names = load_ranking(path)
    assert back.order.tolist() == ranking.order.tolist()
    np.testing.assert_array_equal(back.scores, ranking.scores)
    assert back_names == names


def test_ranking_csv_rejects_garbage(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("nope\n1,2,3,4\n")
    with pytest.raises(ParseError):
        load_ranking(path)
