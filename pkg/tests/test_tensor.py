import numpy as np
import pytest
from hypothesis import given, strategies as st

from tmcontact import tensor
from tmcontact.errors import SingularTensorError

finite = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False)


def tensors():
    return st.tuples(finite, finite, finite, finite).map(
        lambda t: np.array([[t[0], t[1]], [t[2], t[3]]])
    )


def test_det_inv_identity():
    d, inv = tensor.det_inv(np.eye(2))
    assert d == 1.0
    np.testing.assert_array_equal(inv, np.eye(2))


def test_det_inv_diagonal():
    d, inv = tensor.det_inv(np.diag([2.0, 0.5]))
    assert d == pytest.approx(1.0)
    np.testing.assert_allclose(inv, np.diag([0.5, 2.0]))


def test_det_inv_shear():
    # hand inversion of a unit shear
    a = np.array([[1.0, 1.0], [0.0, 1.0]])
    d, inv = tensor.det_inv(a)
    assert d == pytest.approx(1.0)
    np.testing.assert_allclose(inv, np.array([[1.0, -1.0], [0.0, 1.0]]))


def test_det_inv_singular_raises():
    with pytest.raises(SingularTensorError):
        tensor.det_inv(np.array([[1.0, 2.0], [0.5, 1.0]]))
    with pytest.raises(SingularTensorError):
        tensor.det_inv(np.zeros((2, 2)))


def test_det_inv_batched():
    a = np.stack([np.eye(2), np.diag([2.0, 0.5]), [[1.0, 1.0], [0.0, 1.0]]])
    d, inv = tensor.det_inv(a)
    np.testing.assert_allclose(d, [1.0, 1.0, 1.0])
    assert inv.shape == (3, 2, 2)
    np.testing.assert_allclose(np.einsum("...ij,...jk->...ik", a, inv), np.broadcast_to(np.eye(2), (3, 2, 2)), atol=1e-14)


def test_frobenius_norm_sq():
    assert tensor.frobenius_norm_sq(np.zeros((2, 2))) == 0.0
    assert tensor.frobenius_norm_sq(np.eye(2)) == 2.0
    assert tensor.frobenius_norm_sq(np.array([[1.0, 2.0], [3.0, 4.0]])) == 30.0


def test_voigt_ordering():
    np.testing.assert_array_equal(tensor.to_voigt(np.eye(2)), [1.0, 1.0, 0.0, 0.0])
    np.testing.assert_array_equal(
        tensor.to_voigt(np.array([[0.0, 1.0], [2.0, 0.0]])), [0.0, 0.0, 1.0, 2.0]
    )


@given(tensors())
def test_voigt_round_trip_exact(a):
    np.testing.assert_array_equal(tensor.from_voigt(tensor.to_voigt(a)), a)


@given(tensors())
def test_inverse_property(a):
    d = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    scale = max(1.0, float(np.sum(a * a)))
    if abs(d) < 1e-6 * scale:
        return
    _, inv = tensor.det_inv(a)
    np.testing.assert_allclose(a @ inv, np.eye(2), atol=1e-9)


def test_det_inv_near_identity_tolerance():
    # well-conditioned tensors invert to 1e-14 per component
    rng = np.random.default_rng(0)
    for _ in range(50):
        a = np.eye(2) + 0.3 * rng.uniform(-1, 1, (2, 2))
        _, inv = tensor.det_inv(a)
        np.testing.assert_allclose(a @ inv, np.eye(2), atol=1e-14)


@given(tensors(), st.floats(min_value=-10, max_value=10, allow_nan=False))
def test_fourth_identity_action(a, s):
    v = tensor.to_voigt(a)
    np.testing.assert_array_equal(tensor.fourth_identity(s) @ v, s * v)


def test_fourth_identity_scale_diagonal():
    np.testing.assert_array_equal(tensor.fourth_identity(200.0), 200.0 * np.eye(4))


def test_voigt4_contraction_matches_double_contraction():
    rng = np.random.default_rng(1)
    t = rng.normal(size=(2, 2, 2, 2))
    a = rng.normal(size=(2, 2))
    direct = np.einsum("ijkl,kl->ij", t, a)
    packed = tensor.from_voigt(tensor.to_voigt4(t) @ tensor.to_voigt(a))
    np.testing.assert_allclose(packed, direct, rtol=1e-15)


def test_voigt4_round_trip():
    rng = np.random.default_rng(2)
    t = rng.normal(size=(3, 2, 2, 2, 2))
    np.testing.assert_array_equal(tensor.from_voigt4(tensor.to_voigt4(t)), t)
