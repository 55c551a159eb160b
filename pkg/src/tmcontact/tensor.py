"""Dense 2x2 tensor algebra and 4-slot Voigt packing.

The kinematic and stress tensors of the plane-strain model (deformation
gradient F, first Piola-Kirchhoff stress P) are generally non-symmetric,
so the Voigt layout keeps all four components.  The ordering is fixed
once, here, as

    (11, 22, 12, 21)

and used everywhere: second-order tensors become length-4 vectors,
fourth-order tangents become 4x4 matrices, and double contraction turns
into an ordinary matrix-vector product with no engineering factors.

Plane strain is realized by carrying only the in-plane 2x2 block with
F33 = 1 implied; J = det of the 2x2 block and I1 = tr(F^T F) + 1.

All functions broadcast over leading axes: a stack of tensors has shape
(..., 2, 2), its Voigt form (..., 4), a stack of tangents (..., 4, 4).
"""

from __future__ import annotations

import numpy as np

from .errors import SingularTensorError

#: Index pairs (i, j) backing the Voigt slots, in slot order.
VOIGT_SLOTS = ((0, 0), (1, 1), (0, 1), (1, 0))

_DET_RTOL = 1e-14


def identity2() -> np.ndarray:
    """The 2x2 identity tensor."""
    return np.eye(2)


def det(a: np.ndarray) -> np.ndarray:
    """Determinant of the in-plane block, broadcasting over leading axes."""
    a = np.asarray(a, dtype=float)
    return a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]


def det_inv(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Determinant and inverse in one pass.

    Raises:
        SingularTensorError: if any determinant magnitude falls below
            1e-14 * max(1, ||a||_F^2), the machine-scaled invertibility
            threshold.
    """
    a = np.asarray(a, dtype=float)
    d = det(a)
    scale = np.maximum(1.0, frobenius_norm_sq(a))
    if np.any(np.abs(d) < _DET_RTOL * scale):
        raise SingularTensorError(
            "2x2 tensor is singular to working precision (|det| below "
            f"{_DET_RTOL} * max(1, ||a||^2))"
        )
    inv = np.empty_like(a)
    inv[..., 0, 0] = a[..., 1, 1]
    inv[..., 0, 1] = -a[..., 0, 1]
    inv[..., 1, 0] = -a[..., 1, 0]
    inv[..., 1, 1] = a[..., 0, 0]
    inv /= d[..., None, None]
    return d, inv


def frobenius_norm_sq(a: np.ndarray) -> np.ndarray:
    """Sum of squared components (squared Frobenius norm)."""
    a = np.asarray(a, dtype=float)
    return np.einsum("...ij,...ij->...", a, a)


def to_voigt(a: np.ndarray) -> np.ndarray:
    """Pack a (possibly non-symmetric) 2x2 tensor into the 4-slot vector."""
    a = np.asarray(a, dtype=float)
    return np.stack(
        [a[..., 0, 0], a[..., 1, 1], a[..., 0, 1], a[..., 1, 0]], axis=-1
    )


def from_voigt(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`to_voigt`; exact round trip."""
    v = np.asarray(v, dtype=float)
    out = np.empty(v.shape[:-1] + (2, 2), dtype=float)
    out[..., 0, 0] = v[..., 0]
    out[..., 1, 1] = v[..., 1]
    out[..., 0, 1] = v[..., 2]
    out[..., 1, 0] = v[..., 3]
    return out


def to_voigt4(t: np.ndarray) -> np.ndarray:
    """Pack a fourth-order tensor (..., 2, 2, 2, 2) into (..., 4, 4).

    Row slot maps the leading (i, j) pair, column slot the trailing
    (k, l) pair, so ``to_voigt4(T) @ to_voigt(A) == to_voigt(T : A)``.
    """
    t = np.asarray(t, dtype=float)
    out = np.empty(t.shape[:-4] + (4, 4), dtype=float)
    for r, (i, j) in enumerate(VOIGT_SLOTS):
        for c, (k, l) in enumerate(VOIGT_SLOTS):
            out[..., r, c] = t[..., i, j, k, l]
    return out


def from_voigt4(m: np.ndarray) -> np.ndarray:
    """Inverse of :func:`to_voigt4`."""
    m = np.asarray(m, dtype=float)
    out = np.empty(m.shape[:-2] + (2, 2, 2, 2), dtype=float)
    for r, (i, j) in enumerate(VOIGT_SLOTS):
        for c, (k, l) in enumerate(VOIGT_SLOTS):
            out[..., i, j, k, l] = m[..., r, c]
    return out


def fourth_identity(scale: float = 1.0) -> np.ndarray:
    """The fourth-order identity delta_ik delta_jl, scaled, in 4x4 form.

    Because the 4-slot ordering lists (12) and (21) separately, the
    identity is literally ``scale * eye(4)``: contracting it with any
    packed tensor returns the tensor scaled.
    """
    return scale * np.eye(4)
