"""Point-wise constitutive kernels.

Four kernels cover the whole model:

* compressible neo-Hookean (volumetric log barrier + isochoric term),
  used for the bulk and, volumetric part only, as the contact term of
  the gap-filling medium;
* linear elastic response written directly in the deformation gradient,
  giving the gap medium a constant stiffness (intentionally
  non-objective: pure rotations store energy E*(cos(theta)-1)^2);
* deformation-averaging penalty coupling the local gradient F to the
  element-centroid gradient Fbar, with the action-reaction stress pair
  (P, Pbar) and the four constant tangent blocks +-kappa*I;
* the combined gap-medium kernel summing the three.

Every kernel is a pure function of a :class:`DeformationState` and
broadcasts over leading axes, so a whole batch of quadrature points is
evaluated in one call.  Energies in Pa, stresses in Pa (first
Piola-Kirchhoff, packed in the 4-slot Voigt ordering), tangents in Pa.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import tensor
from .errors import KernelConfigurationError, SingularKinematicsError

IsoForm = Literal["classical", "as_written"]


def deformation_state(F: np.ndarray, Fbar: np.ndarray | None = None) -> "DeformationState":
    """Build a state from a gradient stack, deriving J and I1.

    Plane-strain convention: J = det of the 2x2 block (F33 = 1), and
    I1 = tr(F^T F) + 1 carries the out-of-plane unit stretch.
    """
    F = np.asarray(F, dtype=float)
    J = tensor.det(F)
    I1 = tensor.frobenius_norm_sq(F) + 1.0
    return DeformationState(F=F, Fbar=None if Fbar is None else np.asarray(Fbar, float), J=J, I1=I1)


@dataclass(frozen=True)
class DeformationState:
    """Kinematics at one quadrature point (or a batch of them).

    Fbar is present only for points of the gap medium, where the
    averaging penalty couples the point to the element centroid.
    """

    F: np.ndarray
    Fbar: np.ndarray | None
    J: np.ndarray
    I1: np.ndarray


@dataclass
class MaterialResponse:
    """Energy density, stresses and tangent blocks at evaluated points.

    P is conjugate to F and Pbar to Fbar; D1..D4 are the derivatives of
    (P, Pbar) with respect to (F, Fbar) in that order.  Kernels without
    centroid coupling return zero Pbar/D2/D3/D4.
    """

    W: np.ndarray
    P: np.ndarray
    Pbar: np.ndarray
    D1: np.ndarray
    D2: np.ndarray
    D3: np.ndarray
    D4: np.ndarray

    def __add__(self, other: "MaterialResponse") -> "MaterialResponse":
        return MaterialResponse(
            W=self.W + other.W,
            P=self.P + other.P,
            Pbar=self.Pbar + other.Pbar,
            D1=self.D1 + other.D1,
            D2=self.D2 + other.D2,
            D3=self.D3 + other.D3,
            D4=self.D4 + other.D4,
        )


def _zero_response(batch_shape: tuple[int, ...]) -> MaterialResponse:
    return MaterialResponse(
        W=np.zeros(batch_shape),
        P=np.zeros(batch_shape + (4,)),
        Pbar=np.zeros(batch_shape + (4,)),
        D1=np.zeros(batch_shape + (4, 4)),
        D2=np.zeros(batch_shape + (4, 4)),
        D3=np.zeros(batch_shape + (4, 4)),
        D4=np.zeros(batch_shape + (4, 4)),
    )


def _require_positive_j(J: np.ndarray) -> None:
    if np.any(J <= 0.0) or not np.all(np.isfinite(J)):
        raise SingularKinematicsError(
            "non-positive volume ratio J encountered (local interpenetration)"
        )


def iso_elasticity_tensor(E: float, nu: float) -> np.ndarray:
    """Plane-strain isotropic stiffness on the 4-slot basis.

    Built from the Lame constants lambda = E*nu/((1+nu)(1-2nu)) and
    mu = E/(2(1+nu)); carries both minor symmetries, so contraction with
    any tensor sees only its symmetric part.
    """
    if E < 0.0:
        raise ValueError(f"Young's modulus must be nonnegative, got {E}")
    if not 0.0 <= nu < 0.5:
        raise ValueError(f"Poisson's ratio must lie in [0, 0.5), got {nu}")
    lam = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu))
    mu = E / (2.0 * (1.0 + nu))
    eye = np.eye(2)
    d4 = (
        lam * np.einsum("ij,kl->ijkl", eye, eye)
        + mu * np.einsum("ik,jl->ijkl", eye, eye)
        + mu * np.einsum("il,jk->ijkl", eye, eye)
    )
    return tensor.to_voigt4(d4)


def neo_hookean(
    state: DeformationState,
    kappa_vol: float,
    kappa_iso: float = 0.0,
    iso_form: IsoForm = "classical",
) -> MaterialResponse:
    """Compressible neo-Hookean kernel.

    W = 0.5*kappa_vol*ln(J)^2 + isochoric term in Ibar1 = J^(-2/3)*I1.
    ``iso_form`` selects the isochoric term:

    * "classical":  0.5*kappa_iso*(Ibar1 - 3), the standard law whose
      small-strain shear modulus is kappa_iso;
    * "as_written": 0.5*kappa_iso*(Ibar1 - 3)^2, which is quartic near
      the reference state and contributes no small-strain stiffness.
    """
    _require_positive_j(state.J)
    F = state.F
    J = state.J
    I1 = state.I1
    batch = F.shape[:-2]
    lnJ = np.log(J)
    _, Finv = tensor.det_inv(F)
    FinvT = np.swapaxes(Finv, -1, -2)

    # Volumetric part: P = kappa_vol*ln(J)*F^-T with its exact tangent.
    W = 0.5 * kappa_vol * lnJ**2
    P2 = kappa_vol * lnJ[..., None, None] * FinvT
    d4 = kappa_vol * (
        np.einsum("...ji,...lk->...ijkl", Finv, Finv)
        - lnJ[..., None, None, None, None]
        * np.einsum("...jk,...li->...ijkl", Finv, Finv)
    )

    if kappa_iso != 0.0:
        c = J ** (-2.0 / 3.0)
        ibar1 = c * I1
        eye = np.eye(2)
        i4 = np.einsum("ik,jl->ijkl", eye, eye)
        # A = F - (I1/3) F^-T drives both isochoric stress expressions.
        A = F - (I1 / 3.0)[..., None, None] * FinvT
        cB = c[..., None, None]
        if iso_form == "classical":
            W = W + 0.5 * kappa_iso * (ibar1 - 3.0)
            P2 = P2 + kappa_iso * cB * A
            d4 = d4 + kappa_iso * c[..., None, None, None, None] * (
                -(2.0 / 3.0) * np.einsum("...lk,...ij->...ijkl", Finv, A)
                + i4
                - (2.0 / 3.0) * np.einsum("...kl,...ji->...ijkl", F, Finv)
                + (I1 / 3.0)[..., None, None, None, None]
                * np.einsum("...jk,...li->...ijkl", Finv, Finv)
            )
        elif iso_form == "as_written":
            g = ibar1 - 3.0
            G = 2.0 * cB * A
            W = W + 0.5 * kappa_iso * g**2
            P2 = P2 + kappa_iso * g[..., None, None] * G
            dG = 2.0 * c[..., None, None, None, None] * (
                -(2.0 / 3.0) * np.einsum("...lk,...ij->...ijkl", Finv, A)
                + i4
                - (2.0 / 3.0) * np.einsum("...kl,...ji->...ijkl", F, Finv)
                + (I1 / 3.0)[..., None, None, None, None]
                * np.einsum("...jk,...li->...ijkl", Finv, Finv)
            )
            d4 = d4 + kappa_iso * (
                np.einsum("...ij,...kl->...ijkl", G, G)
                + g[..., None, None, None, None] * dG
            )
        else:
            raise ValueError(f"unknown isochoric form {iso_form!r}")

    out = _zero_response(batch)
    out.W = W
    out.P = tensor.to_voigt(P2)
    out.D1 = tensor.to_voigt4(d4)
    return out


def linear_elastic_in_F(state: DeformationState, D3M: np.ndarray) -> MaterialResponse:
    """Constant-stiffness term: W = 0.5*(F-I):D:(F-I), P = D:(F-I).

    Valid for any F (no J restriction).  Because D carries both minor
    symmetries, P is a symmetric tensor for every F; the tangent is the
    constant D itself.
    """
    F = np.asarray(state.F, dtype=float)
    batch = F.shape[:-2]
    e = tensor.to_voigt(F - np.eye(2))
    P = np.einsum("ab,...b->...a", D3M, e)
    out = _zero_response(batch)
    out.W = 0.5 * np.einsum("...a,...a->...", e, P)
    out.P = P
    out.D1 = np.broadcast_to(D3M, batch + (4, 4)).copy()
    return out


def averaging_regularization(state: DeformationState, kappa_fbar: float) -> MaterialResponse:
    """Centroid-averaging penalty W = 0.5*kappa*||F - Fbar||^2.

    Stresses form an action-reaction pair, P = kappa*(F - Fbar) and
    Pbar = -P; the four tangent blocks are the constant +-kappa times
    the fourth-order identity.
    """
    if state.Fbar is None:
        raise KernelConfigurationError(
            "averaging penalty needs the centroid gradient Fbar in the state"
        )
    F = np.asarray(state.F, dtype=float)
    batch = F.shape[:-2]
    diff = tensor.to_voigt(F - state.Fbar)
    i4 = tensor.fourth_identity(kappa_fbar)
    out = _zero_response(batch)
    out.W = 0.5 * kappa_fbar * np.einsum("...a,...a->...", diff, diff)
    out.P = kappa_fbar * diff
    out.Pbar = -kappa_fbar * diff
    out.D1 = np.broadcast_to(i4, batch + (4, 4)).copy()
    out.D4 = out.D1.copy()
    out.D2 = -out.D1
    out.D3 = out.D2.copy()
    return out


class Material(ABC):
    """A constitutive kernel assignable to a mesh region."""

    #: whether the kernel couples to the element-centroid gradient
    uses_centroid: bool = False
    #: whether stability requires J > 0 at every evaluated point
    needs_positive_j: bool = True

    @abstractmethod
    def evaluate(self, state: DeformationState) -> MaterialResponse:
        ...


@dataclass
class NeoHookean(Material):
    """Bulk material: compressible neo-Hookean."""

    kappa_vol: float
    kappa_iso: float = 0.0
    iso_form: IsoForm = "classical"
    uses_centroid = False

    def __post_init__(self):
        if self.kappa_vol < 0.0 or self.kappa_iso < 0.0:
            raise ValueError("neo-Hookean moduli must be nonnegative")

    def evaluate(self, state: DeformationState) -> MaterialResponse:
        return neo_hookean(state, self.kappa_vol, self.kappa_iso, self.iso_form)


@dataclass
class LinearInF(Material):
    """Constant-stiffness linear term, default Poisson ratio zero."""

    E: float
    nu: float = 0.0
    D3M: np.ndarray = field(init=False, repr=False)
    uses_centroid = False
    needs_positive_j = False

    def __post_init__(self):
        self.D3M = iso_elasticity_tensor(self.E, self.nu)

    def evaluate(self, state: DeformationState) -> MaterialResponse:
        return linear_elastic_in_F(state, self.D3M)


@dataclass
class AveragingRegularization(Material):
    """Standalone deformation-averaging penalty (mainly for testing)."""

    kappa_fbar: float
    uses_centroid = True
    needs_positive_j = False

    def evaluate(self, state: DeformationState) -> MaterialResponse:
        return averaging_regularization(state, self.kappa_fbar)


@dataclass
class ThirdMedium(Material):
    """Combined gap-medium kernel.

    Sum of the volumetric log barrier (isochoric part dropped so only
    volumetric compression reacts), the constant-stiffness linear term,
    and the averaging penalty.  A J <= 0 evaluation raises, signalling
    interpenetration to the solver.
    """

    kappa_vol: float
    E: float
    kappa_fbar: float
    nu: float = 0.0
    D3M: np.ndarray = field(init=False, repr=False)
    uses_centroid = True

    def __post_init__(self):
        if min(self.kappa_vol, self.E, self.kappa_fbar) < 0.0:
            raise ValueError("gap-medium parameters must be nonnegative")
        self.D3M = iso_elasticity_tensor(self.E, self.nu)

    def evaluate(self, state: DeformationState) -> MaterialResponse:
        if state.Fbar is None:
            raise KernelConfigurationError(
                "gap-medium kernel needs the centroid gradient Fbar"
            )
        out = neo_hookean(state, self.kappa_vol, kappa_iso=0.0)
        out = out + linear_elastic_in_F(state, self.D3M)
        return out + averaging_regularization(state, self.kappa_fbar)


def third_medium(
    state: DeformationState,
    kappa_vol: float,
    E: float,
    kappa_fbar: float,
    nu: float = 0.0,
) -> MaterialResponse:
    """Functional form of :class:`ThirdMedium`."""
    return ThirdMedium(kappa_vol=kappa_vol, E=E, kappa_fbar=kappa_fbar, nu=nu).evaluate(state)


def linearized_moduli(kernel: Material, step: float = 1e-6) -> tuple[float, float]:
    """Small-strain Young's modulus and Poisson ratio of a kernel.

    Central finite differences of P around F = I give the tangent, from
    which the Lame constants are read off assuming isotropy; the
    isotropy is cross-checked before converting to (E, nu).  Use the
    returned pair (not nominal inputs) wherever a classical reference
    formula needs the bulk stiffness actually present in the model.
    """
    eye = np.eye(2)

    def stress(Fm: np.ndarray) -> np.ndarray:
        st = deformation_state(Fm, Fbar=Fm if kernel.uses_centroid else None)
        return kernel.evaluate(st).P

    d = np.zeros((4, 4))
    for c, (k, l) in enumerate(tensor.VOIGT_SLOTS):
        dF = np.zeros((2, 2))
        dF[k, l] = step
        d[:, c] = (stress(eye + dF) - stress(eye - dF)) / (2.0 * step)
    if not np.all(np.isfinite(d)):
        raise ValueError("non-finite tangent at the reference state")
    mu = 0.5 * (d[2, 2] + d[2, 3])
    lam = 0.5 * (d[0, 1] + d[1, 0])
    scale = max(abs(d).max(), 1e-30)
    if abs(d[0, 0] - (lam + 2.0 * mu)) > 1e-4 * scale:
        raise ValueError("reference-state tangent is not isotropic")
    if lam + mu <= 0.0:
        raise ValueError("reference-state tangent is not positive definite")
    E_eff = mu * (3.0 * lam + 2.0 * mu) / (lam + mu)
    nu_eff = lam / (2.0 * (lam + mu))
    return float(E_eff), float(nu_eff)


def plane_strain_flexural_modulus(E_eff: float, nu_eff: float) -> float:
    """Effective modulus E/(1-nu^2) governing in-plane bending of a
    plane-strain strip; pairs with I = t^3/12 per unit depth."""
    return E_eff / (1.0 - nu_eff**2)
