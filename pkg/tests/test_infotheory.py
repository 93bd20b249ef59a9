import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmlfs.errors import ContractError
from pmlfs.infotheory import (
    MIMatrix,
    binary_mi,
    discretize_column,
    mi_matrix_binary,
    mi_matrix_real,
)

from oracles import entropy_bits, mi_bits

# frozen from the exhaustive joint-histogram oracle over the 4 samples
MI_3114 = 0.31127812445913283


def test_independent_columns_zero():
    assert binary_mi([1, 1, 0, 0], [1, 0, 1, 0]) == 0.0


def test_identical_columns_give_entropy():
    assert binary_mi([1, 1, 0, 0], [1, 1, 0, 0]) == 1.0


def test_overlapping_columns_match_oracle():
    a, b = [1, 1, 1, 0], [1, 1, 0, 0]
    assert abs(mi_bits(a, b) - MI_3114) < 1e-15
    assert binary_mi(a, b) == pytest.approx(MI_3114, abs=1e-12)


def test_length_mismatch_rejected():
    with pytest.raises(ContractError, match="mismatch"):
        binary_mi([0, 1], [0, 1, 1])


def test_non_binary_rejected():
    with pytest.raises(ContractError, match="0/1"):
        binary_mi([0, 2], [0, 1])


def test_empty_rejected():
    with pytest.raises(ContractError):
        binary_mi([], [])


def test_single_sample_is_zero():
    assert binary_mi([1], [1]) == 0.0


def test_matrix_identical_columns():
    Y = np.array([[1, 1], [1, 1], [0, 0], [0, 0]])
    Z = mi_matrix_binary(Y)
    assert Z.kind == "binary-over-Y"
    assert Z.values[0, 1] == 1.0
    assert Z.values[0, 0] == 1.0


def test_matrix_constant_column_is_all_zero():
    Y = np.array([[1, 1, 0], [1, 0, 1], [1, 1, 1], [1, 0, 0]])
    Z = mi_matrix_binary(Y).values
    assert np.all(Z[0, :] == 0.0)
    assert np.all(Z[:, 0] == 0.0)


def test_matrix_matches_pairwise_oracle():
    rng = np.random.default_rng(42)
    Y = rng.integers(0, 2, (4, 3))
    Z = mi_matrix_binary(Y).values
    for i in range(3):
        for j in range(3):
            assert Z[i, j] == pytest.approx(mi_bits(Y[:, i].tolist(), Y[:, j].tolist()), abs=1e-12)
    assert Z[2, 2] == pytest.approx(entropy_bits(Y[:, 2].tolist()), abs=1e-12)


def test_mi_matrix_validates_symmetry():
    with pytest.raises(ContractError, match="symmetric"):
        MIMatrix(values=np.array([[1.0, 0.2], [0.3, 1.0]]), kind="binary-over-Y")


# ---------------------------------------------------------------------------
# discretization


def test_equal_width_boundary_goes_up():
    codes = discretize_column(np.array([0.0, 0.5, 1.0]), bins=2, strategy="equal-width")
    assert codes.tolist() == [0, 1, 1]


def test_constant_column_codes_zero():
    assert discretize_column(np.full(5, 3.3), bins=4).tolist() == [0] * 5


def test_quantile_median_split():
    codes = discretize_column(np.array([1.0, 2.0, 3.0, 4.0]), bins=2, strategy="quantile")
    assert codes.tolist() == [0, 0, 1, 1]


def test_quantile_point_mass_keeps_own_code():
    codes = discretize_column(np.array([0.0, 0.0, 0.0, 1.0, 1.0]), bins=2, strategy="quantile")
    assert codes.tolist() == [0, 0, 0, 1, 1]


def test_discretize_rejects_nan():
    with pytest.raises(ContractError):
        discretize_column(np.array([0.0, np.nan]), bins=2)


def test_discretize_rejects_few_bins():
    with pytest.raises(ContractError):
        discretize_column(np.array([0.0, 1.0]), bins=1)


@given(
    st.lists(st.floats(min_value=-50, max_value=50), min_size=2, max_size=30),
    st.integers(min_value=2, max_value=8),
    st.sampled_from(["equal-width", "quantile"]),
)
def test_discretize_monotone(values, bins, strategy):
    col = np.array(values)
    codes = discretize_column(col, bins=bins, strategy=strategy)
    order = np.argsort(col, kind="stable")
    assert np.all(np.diff(codes[order]) >= 0)
    assert codes.min() >= 0 and codes.max() <= bins


# ---------------------------------------------------------------------------
# MI over reals


def test_real_matrix_on_binary_matches_binary_matrix():
    rng = np.random.default_rng(3)
    Y = rng.integers(0, 2, (30, 4))
    Zb = mi_matrix_binary(Y).values
    Zr = mi_matrix_real(Y.astype(float), bins=5, strategy="quantile").values
    np.testing.assert_allclose(Zr, Zb, atol=1e-12)


def test_proportional_columns_share_entropy():
    a = np.array([0.1, 0.4, 0.9, 0.4, 0.1, 0.9])
    T = np.column_stack([a, 2 * a])
    Z = mi_matrix_real(T, bins=3, strategy="quantile").values
    assert Z[0, 1] == pytest.approx(Z[0, 0], abs=1e-12)
    assert Z[0, 1] == pytest.approx(Z[1, 1], abs=1e-12)


def test_real_matrix_matches_histogram_oracle():
    T = np.array(
        [
            [0.0, 0.3, 0.7],
            [0.1, 0.3, 0.2],
            [0.5, 0.9, 0.7],
            [0.5, 0.1, 0.2],
            [0.9, 0.9, 0.4],
            [1.0, 0.5, 0.4],
        ]
    )
    bins = 3
    Z = mi_matrix_real(T, bins=bins, strategy="quantile").values
    codes = [discretize_column(T[:, j], bins=bins, strategy="quantile").tolist() for j in range(3)]
    for i in range(3):
        for j in range(3):
            assert Z[i, j] == pytest.approx(mi_bits(codes[i], codes[j]), abs=1e-12)


# ---------------------------------------------------------------------------
# invariants


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_symmetry_and_bounds(data):
    n = data.draw(st.integers(min_value=1, max_value=25))
    a = np.array(data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n)))
    b = np.array(data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n)))
    forward = binary_mi(a, b)
    assert forward == binary_mi(b, a)  # bit-exact symmetry
    h = min(entropy_bits(a.tolist()), entropy_bits(b.tolist()))
    assert -1e-15 <= forward <= h + 1e-12


@given(st.data())
@settings(max_examples=30, deadline=None)
def test_permutation_invariance(data):
    n = data.draw(st.integers(min_value=2, max_value=20))
    Y = np.array(data.draw(st.lists(st.lists(st.integers(0, 1), min_size=3, max_size=3), min_size=n, max_size=n)))
    perm = np.array(data.draw(st.permutations(range(n))))
    np.testing.assert_array_equal(mi_matrix_binary(Y).values, mi_matrix_binary(Y[perm]).values)
