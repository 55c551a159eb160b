"""Isoparametric element kinematics, quadrature, and element integrals.

The deformation gradient at a quadrature point is F = I + B(xi) d, where
B maps the nodal displacement vector (interleaved ux, uy per node) to
the 4-slot Voigt gradient.  The element-centroid gradient uses the same
B evaluated at the centroid, Bbar, so the averaging penalty couples B
and Bbar rows in both the force vector and the stiffness:

    f_e = sum_q  w_q (B^T P + Bbar^T Pbar)
    K_e = sum_q  w_q (B^T D1 B + B^T D2 Bbar + Bbar^T D3 B + Bbar^T D4 Bbar)

with w_q = rule weight times the isoparametric Jacobian determinant.
Element evaluation is batched: all arrays carry a leading element axis.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import tensor
from .errors import GeometryError, SingularKinematicsError
from .materials import Material, MaterialResponse, DeformationState

_XI_TOL = 1e-12


class ElementFamily(Enum):
    QUAD4 = "quad4"
    QUAD8 = "quad8"
    TRI6 = "tri6"

    @property
    def n_nodes(self) -> int:
        return {ElementFamily.QUAD4: 4, ElementFamily.QUAD8: 8, ElementFamily.TRI6: 6}[self]

    @property
    def centroid(self) -> tuple[float, float]:
        if self is ElementFamily.TRI6:
            return (1.0 / 3.0, 1.0 / 3.0)
        return (0.0, 0.0)

    @property
    def is_quad(self) -> bool:
        return self in (ElementFamily.QUAD4, ElementFamily.QUAD8)


_QUAD4_NODES = np.array([(-1, -1), (1, -1), (1, 1), (-1, 1)], dtype=float)
_QUAD8_NODES = np.vstack([_QUAD4_NODES, [(0, -1), (1, 0), (0, 1), (-1, 0)]])


def _check_domain(family: ElementFamily, xi: np.ndarray) -> None:
    x, y = xi
    if family.is_quad:
        if abs(x) > 1.0 + _XI_TOL or abs(y) > 1.0 + _XI_TOL:
            raise ValueError(f"natural coordinates {xi} outside the reference square")
    else:
        if x < -_XI_TOL or y < -_XI_TOL or x + y > 1.0 + _XI_TOL:
            raise ValueError(f"natural coordinates {xi} outside the reference triangle")


def shape_functions(family: ElementFamily, xi) -> tuple[np.ndarray, np.ndarray]:
    """Shape-function values and natural gradients at one point.

    Returns (N, dN) with N of shape (n_nodes,) and dN of shape
    (n_nodes, 2); values sum to 1 and gradients to the zero vector.
    """
    xi = np.asarray(xi, dtype=float)
    _check_domain(family, xi)
    x, y = xi
    if family is ElementFamily.QUAD4:
        xa, ya = _QUAD4_NODES[:, 0], _QUAD4_NODES[:, 1]
        N = 0.25 * (1 + xa * x) * (1 + ya * y)
        dN = np.stack([0.25 * xa * (1 + ya * y), 0.25 * ya * (1 + xa * x)], axis=1)
        return N, dN
    if family is ElementFamily.QUAD8:
        N = np.empty(8)
        dN = np.empty((8, 2))
        for a in range(4):
            xa, ya = _QUAD8_NODES[a]
            N[a] = 0.25 * (1 + xa * x) * (1 + ya * y) * (xa * x + ya * y - 1)
            dN[a, 0] = 0.25 * xa * (1 + ya * y) * (2 * xa * x + ya * y)
            dN[a, 1] = 0.25 * ya * (1 + xa * x) * (xa * x + 2 * ya * y)
        for a in range(4, 8):
            xa, ya = _QUAD8_NODES[a]
            if xa == 0.0:
                N[a] = 0.5 * (1 - x * x) * (1 + ya * y)
                dN[a, 0] = -x * (1 + ya * y)
                dN[a, 1] = 0.5 * (1 - x * x) * ya
            else:
                N[a] = 0.5 * (1 + xa * x) * (1 - y * y)
                dN[a, 0] = 0.5 * xa * (1 - y * y)
                dN[a, 1] = -y * (1 + xa * x)
        return N, dN
    # six-node triangle in barycentric form
    l1, l2, l3 = 1.0 - x - y, x, y
    dl = np.array([(-1.0, -1.0), (1.0, 0.0), (0.0, 1.0)])
    N = np.array(
        [l1 * (2 * l1 - 1), l2 * (2 * l2 - 1), l3 * (2 * l3 - 1),
         4 * l1 * l2, 4 * l2 * l3, 4 * l3 * l1]
    )
    dN = np.vstack(
        [
            (4 * l1 - 1) * dl[0],
            (4 * l2 - 1) * dl[1],
            (4 * l3 - 1) * dl[2],
            4 * (l2 * dl[0] + l1 * dl[1]),
            4 * (l3 * dl[1] + l2 * dl[2]),
            4 * (l1 * dl[2] + l3 * dl[0]),
        ]
    )
    return N, dN


@dataclass(frozen=True)
class QuadratureRule:
    name: str
    points: np.ndarray  # (nq, 2) natural coordinates
    weights: np.ndarray  # (nq,)


def _tensor_rule(name, pts1d, w1d) -> QuadratureRule:
    pts = [(x, y) for y in pts1d for x in pts1d]
    w = [wx * wy for wy in w1d for wx in w1d]
    return QuadratureRule(name, np.array(pts, dtype=float), np.array(w, dtype=float))


_G2 = 1.0 / np.sqrt(3.0)
_G3 = np.sqrt(3.0 / 5.0)
_G4A = np.sqrt((3.0 - 2.0 * np.sqrt(6.0 / 5.0)) / 7.0)
_G4B = np.sqrt((3.0 + 2.0 * np.sqrt(6.0 / 5.0)) / 7.0)
_W4A = (18.0 + np.sqrt(30.0)) / 36.0
_W4B = (18.0 - np.sqrt(30.0)) / 36.0


def _tri_degree5() -> QuadratureRule:
    # symmetric 7-point rule, exact through degree 5 on the unit triangle
    s15 = np.sqrt(15.0)
    b1 = (6.0 + s15) / 21.0
    a1 = 1.0 - 2.0 * b1
    w1 = (155.0 + s15) / 1200.0
    b2 = (6.0 - s15) / 21.0
    a2 = 1.0 - 2.0 * b2
    w2 = (155.0 - s15) / 1200.0
    bary = [
        ((1 / 3, 1 / 3, 1 / 3), 9.0 / 40.0),
        ((a1, b1, b1), w1), ((b1, a1, b1), w1), ((b1, b1, a1), w1),
        ((a2, b2, b2), w2), ((b2, a2, b2), w2), ((b2, b2, a2), w2),
    ]
    pts = np.array([(l2, l3) for (l1, l2, l3), _ in bary])
    w = 0.5 * np.array([wt for _, wt in bary])
    return QuadratureRule("tri_degree5", pts, w)


_RULES: dict[str, QuadratureRule] = {
    "lobatto2x2": _tensor_rule("lobatto2x2", [-1.0, 1.0], [1.0, 1.0]),
    "lobatto3x3": _tensor_rule("lobatto3x3", [-1.0, 0.0, 1.0], [1 / 3, 4 / 3, 1 / 3]),
    "gauss2x2": _tensor_rule("gauss2x2", [-_G2, _G2], [1.0, 1.0]),
    "gauss3x3": _tensor_rule("gauss3x3", [-_G3, 0.0, _G3], [5 / 9, 8 / 9, 5 / 9]),
    "gauss4x4": _tensor_rule("gauss4x4", [-_G4B, -_G4A, _G4A, _G4B], [_W4B, _W4A, _W4A, _W4B]),
    "tri_degree5": _tri_degree5(),
}

#: the 9-point bulk rule; "rule3x3" resolves to Lobatto unless overridden
RULE3X3_DEFAULT = "lobatto3x3"


def quadrature(family: ElementFamily, spec: str) -> QuadratureRule:
    """Look up an integration rule compatible with the element family."""
    name = RULE3X3_DEFAULT if spec == "rule3x3" else spec
    if name not in _RULES:
        raise ValueError(f"unknown quadrature rule {spec!r}")
    rule = _RULES[name]
    tri_rule = name.startswith("tri")
    if family.is_quad == tri_rule:
        raise ValueError(f"rule {spec!r} is incompatible with {family.value} elements")
    return rule


def _b_from_phys_grad(dn_phys: np.ndarray) -> np.ndarray:
    """Assemble the 4 x 2n gradient matrix from physical shape gradients.

    Leading axes of dn_phys (..., n, 2) are preserved.
    """
    lead = dn_phys.shape[:-2]
    n = dn_phys.shape[-2]
    B = np.zeros(lead + (4, 2 * n))
    B[..., 0, 0::2] = dn_phys[..., :, 0]  # dux/dX
    B[..., 1, 1::2] = dn_phys[..., :, 1]  # duy/dY
    B[..., 2, 0::2] = dn_phys[..., :, 1]  # dux/dY
    B[..., 3, 1::2] = dn_phys[..., :, 0]  # duy/dX
    return B


def b_matrix(family: ElementFamily, coords: np.ndarray, xi) -> tuple[np.ndarray, float]:
    """Gradient matrix B and isoparametric Jacobian determinant at xi."""
    _, dN = shape_functions(family, xi)
    jac = dN.T @ np.asarray(coords, dtype=float)  # J[a,b] = dX_b/dxi_a
    det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
    if det <= 0.0:
        raise GeometryError(f"non-positive isoparametric Jacobian ({det:g}) at xi={tuple(xi)}")
    inv = np.array([[jac[1, 1], -jac[0, 1]], [-jac[1, 0], jac[0, 0]]]) / det
    dn_phys = dN @ inv.T
    return _b_from_phys_grad(dn_phys), float(det)


def centroid_b_matrix(family: ElementFamily, coords: np.ndarray) -> np.ndarray:
    """B evaluated at the element centroid (used for the averaged gradient)."""
    B, _ = b_matrix(family, coords, family.centroid)
    return B


# ---------------------------------------------------------------------------
# batched element integration
# ---------------------------------------------------------------------------


@dataclass
class ElementTables:
    """Geometry-dependent factors, precomputed once per element batch."""

    family: ElementFamily
    rule: QuadratureRule
    B: np.ndarray      # (nel, nq, 4, 2n)
    wdet: np.ndarray   # (nel, nq) rule weight * detJ
    Bbar: np.ndarray   # (nel, 4, 2n)
    area: np.ndarray   # (nel,)


def build_tables(family: ElementFamily, coords: np.ndarray, rule: QuadratureRule) -> ElementTables:
    """Precompute B matrices and weights for a batch of elements.

    coords has shape (nel, n_nodes, 2).  Raises GeometryError naming the
    offending batch-local element if any map Jacobian is non-positive.
    """
    coords = np.asarray(coords, dtype=float)
    nel = coords.shape[0]
    dn_nat = np.stack([shape_functions(family, p)[1] for p in rule.points])  # (nq, n, 2)
    dn_cent = shape_functions(family, family.centroid)[1]

    def phys_grads(dn):
        jac = np.einsum("...na,enb->e...ab", dn, coords)
        det = jac[..., 0, 0] * jac[..., 1, 1] - jac[..., 0, 1] * jac[..., 1, 0]
        if np.any(det <= 0.0):
            bad = int(np.argwhere(det <= 0.0)[0][0])
            raise GeometryError(f"inverted or degenerate element geometry (batch element {bad})")
        inv = np.empty_like(jac)
        inv[..., 0, 0] = jac[..., 1, 1]
        inv[..., 0, 1] = -jac[..., 0, 1]
        inv[..., 1, 0] = -jac[..., 1, 0]
        inv[..., 1, 1] = jac[..., 0, 0]
        inv /= det[..., None, None]
        return np.einsum("...na,e...ba->e...nb", dn, inv), det

    dn_phys, det = phys_grads(dn_nat)           # (nel, nq, n, 2), (nel, nq)
    dn_phys_c, _ = phys_grads(dn_cent)          # (nel, n, 2)
    B = _b_from_phys_grad(dn_phys)
    Bbar = _b_from_phys_grad(dn_phys_c)
    wdet = rule.weights[None, :] * det
    return ElementTables(family, rule, B, wdet, Bbar, area=wdet.sum(axis=1))


_IDENTITY_V = np.array([1.0, 1.0, 0.0, 0.0])


def gradients_from_displacements(tables: ElementTables, d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deformation gradients (F at each point, Fbar at centroids)."""
    Fv = _IDENTITY_V + np.einsum("eqai,ei->eqa", tables.B, d)
    Fbarv = _IDENTITY_V + np.einsum("eai,ei->ea", tables.Bbar, d)
    return tensor.from_voigt(Fv), tensor.from_voigt(Fbarv)


def evaluate_material(
    tables: ElementTables, d: np.ndarray, material: Material
) -> tuple[MaterialResponse, np.ndarray]:
    """Material response at every quadrature point of the batch."""
    F, Fbar = gradients_from_displacements(tables, d)
    J = tensor.det(F)
    if material.needs_positive_j and (np.any(J <= 0.0) or not np.all(np.isfinite(J))):
        e, q = np.argwhere(~(J > 0.0))[0]
        raise SingularKinematicsError(
            f"J <= 0 at quadrature point {q} of batch element {e}",
            element=int(e), point=int(q),
        )
    Fbar_b = Fbar[:, None, :, :] if material.uses_centroid else None
    state = DeformationState(
        F=F,
        Fbar=np.broadcast_to(Fbar_b, F.shape) if Fbar_b is not None else None,
        J=J,
        I1=tensor.frobenius_norm_sq(F) + 1.0,
    )
    return material.evaluate(state), J


def force_stiffness_batch(
    tables: ElementTables,
    d: np.ndarray,
    material: Material,
    need_stiffness: bool = True,
):
    """Internal force vectors and tangent matrices for an element batch.

    Returns (f, K, J, W): f is (nel, 2n); K is (nel, 2n, 2n) or None;
    J and W are per-quadrature-point diagnostics (nel, nq).
    """
    resp, J = evaluate_material(tables, d, material)
    w, B, Bbar = tables.wdet, tables.B, tables.Bbar
    f = np.einsum("eq,eqai,eqa->ei", w, B, resp.P)
    if material.uses_centroid:
        f += np.einsum("eai,ea->ei", Bbar, np.einsum("eq,eqa->ea", w, resp.Pbar))
    K = None
    if need_stiffness:
        K = np.einsum("eq,eqai,eqab,eqbj->eij", w, B, resp.D1, B, optimize=True)
        if material.uses_centroid:
            K += np.einsum("eq,eqai,eqab,ebj->eij", w, B, resp.D2, Bbar, optimize=True)
            K += np.einsum("eq,eai,eqab,eqbj->eij", w, Bbar, resp.D3, B, optimize=True)
            K += np.einsum("eq,eai,eqab,ebj->eij", w, Bbar, resp.D4, Bbar, optimize=True)
    return f, K, J, resp.W


def element_energy(tables: ElementTables, d: np.ndarray, material: Material) -> np.ndarray:
    """Integrated strain energy per element."""
    resp, _ = evaluate_material(tables, d, material)
    return np.einsum("eq,eq->e", tables.wdet, resp.W)


@dataclass
class ElementOutput:
    """Single-element force vector, stiffness and point diagnostics."""

    f_e: np.ndarray
    K_e: np.ndarray
    J: np.ndarray
    W: np.ndarray


def element_force_stiffness(
    family: ElementFamily,
    coords: np.ndarray,
    d: np.ndarray,
    rule: QuadratureRule,
    material: Material,
) -> ElementOutput:
    """Convenience single-element wrapper around the batched path."""
    tables = build_tables(family, np.asarray(coords, float)[None], rule)
    f, K, J, W = force_stiffness_batch(tables, np.asarray(d, float)[None], material)
    return ElementOutput(f_e=f[0], K_e=K[0], J=J[0], W=W[0])
