"""Flat ordering, mode products, eigenvalue-sum tensors, CSV round trips."""

import numpy as np
import pytest

from fracspec import (
    PositiveEntry,
    eigen_sum_tensor,
    flat_index,
    hadamard_pow_neg,
    mode_product,
    read_field_csv,
    tuple_iter,
    write_field_csv,
)


# ----------------------------------------------------------------------------
# flat_index / tuple_iter
# ----------------------------------------------------------------------------


def test_flat_index_two_by_two_table():
    assert flat_index((2, 2), (1, 1)) == 1
    assert flat_index((2, 2), (2, 1)) == 2
    assert flat_index((2, 2), (1, 2)) == 3
    assert flat_index((2, 2), (2, 2)) == 4


def test_flat_index_first_index_is_fastest():
    assert flat_index((3, 4), (2, 3)) == 2 + (3 - 1) * 3


def test_flat_index_rejects_bad_input():
    with pytest.raises(ValueError):
        flat_index((2, 2), (1,))
    with pytest.raises(ValueError):
        flat_index((2, 2), (0, 1))
    with pytest.raises(ValueError):
        flat_index((2, 2), (3, 1))
    with pytest.raises(ValueError):
        flat_index((), ())


def test_tuple_iter_two_by_two_order():
    assert list(tuple_iter((2, 2))) == [
        ((2, 2), 4),
        ((1, 2), 3),
        ((2, 1), 2),
        ((1, 1), 1),
    ]


def test_tuple_iter_vector_counts_down():
    assert list(tuple_iter((3,))) == [((3,), 3), ((2,), 2), ((1,), 1)]


@pytest.mark.parametrize("shape", [(2,), (4, 3), (2, 3, 4), (5, 1, 2)])
def test_tuple_iter_agrees_with_flat_index(shape):
    seen = set()
    for tup, flat in tuple_iter(shape):
        assert flat_index(shape, tup) == flat
        seen.add(tup)
    assert len(seen) == int(np.prod(shape))


def test_tuple_iter_matches_fortran_ravel():
    """Descending flat positions line up with reversed 'F'-order raveling."""
    shape = (3, 4)
    arr = np.arange(12.0).reshape(shape)
    flat = np.ravel(arr, order="F")
    for tup, pos in tuple_iter(shape):
        assert flat[pos - 1] == arr[tuple(i - 1 for i in tup)]


# ----------------------------------------------------------------------------
# mode_product
# ----------------------------------------------------------------------------


def test_mode_product_identity_is_exact():
    U = np.random.default_rng(0).standard_normal((4, 5, 6))
    for axis in range(3):
        out = mode_product(np.eye(U.shape[axis]), U, axis)
        assert np.array_equal(out, U)


def test_mode_product_matches_matrix_algebra_in_2d():
    rng = np.random.default_rng(1)
    A = rng.standard_normal((4, 4))
    B = rng.standard_normal((5, 5))
    U = rng.standard_normal((4, 5))
    assert np.allclose(mode_product(A, U, 0), A @ U, rtol=1e-15, atol=0)
    assert np.allclose(mode_product(B, U, 1), U @ B.T, rtol=1e-15, atol=0)


def test_mode_product_row_swap_by_hand():
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    U = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert np.array_equal(mode_product(swap, U, 0), np.array([[3.0, 4.0], [1.0, 2.0]]))
    assert np.array_equal(mode_product(swap, U, 1), np.array([[2.0, 1.0], [4.0, 3.0]]))


def test_mode_products_on_distinct_axes_commute():
    rng = np.random.default_rng(2)
    A = rng.standard_normal((3, 3))
    B = rng.standard_normal((4, 4))
    U = rng.standard_normal((3, 4))
    ab = mode_product(B, mode_product(A, U, 0), 1)
    ba = mode_product(A, mode_product(B, U, 1), 0)
    assert np.allclose(ab, ba, rtol=1e-13, atol=1e-15)


def test_mode_product_validates_input():
    U = np.zeros((3, 4))
    with pytest.raises(ValueError):
        mode_product(np.zeros((3, 4)), U, 0)
    with pytest.raises(ValueError):
        mode_product(np.eye(3), U, 2)
    with pytest.raises(ValueError):
        mode_product(np.eye(3), U, 1)


# ----------------------------------------------------------------------------
# eigen_sum_tensor
# ----------------------------------------------------------------------------


def test_eigen_sum_single_axis_unit_scale():
    out = eigen_sum_tensor([np.array([-1.0, 0.0])], [1.0])
    assert np.array_equal(out, np.array([-1.0, 0.0]))


def test_eigen_sum_scale_divides_squared():
    out = eigen_sum_tensor([np.array([-4.0, 0.0])], [2.0])
    assert np.array_equal(out, np.array([-1.0, 0.0]))


def test_eigen_sum_two_axes_broadcast():
    out = eigen_sum_tensor([np.array([-1.0, 0.0]), np.array([-2.0, 0.0])], [1.0, 1.0])
    assert np.array_equal(out, np.array([[-3.0, -1.0], [-2.0, 0.0]]))


def test_eigen_sum_exactly_one_zero_with_kernel_modes():
    lams = [np.array([-3.0, -1.0, 0.0]), np.array([-2.0, 0.0])]
    out = eigen_sum_tensor(lams, [1.5, 0.5])
    assert np.count_nonzero(out == 0.0) == 1
    assert out[2, 1] == 0.0
    assert np.all(out <= 0.0)


def test_eigen_sum_validates_input():
    with pytest.raises(ValueError):
        eigen_sum_tensor([], [])
    with pytest.raises(ValueError):
        eigen_sum_tensor([np.array([-1.0])], [1.0, 2.0])
    with pytest.raises(ValueError):
        eigen_sum_tensor([np.array([-1.0])], [0.0])
    with pytest.raises(ValueError):
        eigen_sum_tensor([np.zeros((2, 2))], [1.0])


# ----------------------------------------------------------------------------
# hadamard_pow_neg
# ----------------------------------------------------------------------------


def test_hadamard_pow_zero_maps_to_zero():
    assert np.array_equal(hadamard_pow_neg(np.array([0.0]), 0.5), np.array([0.0]))


def test_hadamard_pow_square_root():
    assert np.array_equal(hadamard_pow_neg(np.array([-4.0]), 0.5), np.array([2.0]))


def test_hadamard_pow_cube_root():
    out = hadamard_pow_neg(np.array([-1.0, -8.0]), 1.0 / 3.0)
    assert out[0] == 1.0
    assert out[1] == pytest.approx(2.0, rel=1e-15)


def test_hadamard_pow_rejects_nonpositive_exponent():
    with pytest.raises(ValueError):
        hadamard_pow_neg(np.array([-1.0]), 0.0)
    with pytest.raises(ValueError):
        hadamard_pow_neg(np.array([-1.0]), -0.5)


def test_hadamard_pow_rejects_positive_entries():
    with pytest.raises(PositiveEntry):
        hadamard_pow_neg(np.array([-1.0, 1e-6]), 0.5)


def test_hadamard_pow_clamps_rounding_noise():
    # +1e-13 relative to a unit-magnitude tensor is rounding, not a sign error
    out = hadamard_pow_neg(np.array([-1.0, 1e-13]), 0.5)
    assert np.array_equal(out, np.array([1.0, 0.0]))


# ----------------------------------------------------------------------------
# field CSV
# ----------------------------------------------------------------------------


def test_field_csv_round_trip_is_bitwise(tmp_path):
    rng = np.random.default_rng(3)
    arr = rng.standard_normal((3, 4, 2))
    path = tmp_path / "field.csv"
    sidecar = write_field_csv(path, arr)
    assert sidecar.endswith("field.json")
    back = read_field_csv(path)
    assert np.array_equal(back, arr)


def test_field_csv_header_and_first_row(tmp_path):
    arr = np.array([[1.0, 2.0], [3.0, 4.0]])
    path = tmp_path / "f.csv"
    write_field_csv(path, arr)
    lines = path.read_text().splitlines()
    assert lines[0] == "i1,i2,value"
    # rows count down from the all-max tuple
    assert lines[1] == "2,2,4"
    assert lines[-1] == "1,1,1"


def test_field_csv_keeps_seventeen_digits(tmp_path):
    arr = np.array([1.0 / 3.0, np.pi, 1e-300])
    path = tmp_path / "digits.csv"
    write_field_csv(path, arr)
    assert np.array_equal(read_field_csv(path), arr)


def test_field_csv_sidecar_records_shape(tmp_path):
    import json

    arr = np.zeros((2, 5))
    path = tmp_path / "s.csv"
    sidecar = write_field_csv(path, arr)
    with open(sidecar) as fh:
        assert json.load(fh) == {"shape": [2, 5]}


def test_field_csv_read_rejects_column_mismatch(tmp_path):
    arr = np.zeros((2, 2))
    path = tmp_path / "c.csv"
    sidecar = write_field_csv(path, arr)
    with open(sidecar, "w") as fh:
        fh.write('{"shape": [4]}\n')
    with pytest.raises(ValueError):
        read_field_csv(path)


def test_field_csv_read_rejects_missing_rows(tmp_path):
    arr = np.zeros((3,))
    path = tmp_path / "r.csv"
    write_field_csv(path, arr)
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[:-1]) + "\n")
    with pytest.raises(ValueError):
        read_field_csv(path)
