"""Global DOF management, sparse assembly, and reaction recovery.

Prescribed displacements are imposed by elimination: the solver sees
only the reduced system on free DOFs, so reactions are recovered
exactly as the internal forces on prescribed DOFs, and the stability
logic always works with the physical Hessian.

Assembly is batched per (family, quadrature, region) group with a
deterministic element order, so repeated runs are bit-reproducible.
DOF numbering is interleaved: node n owns DOFs (2n, 2n+1) for (x, y).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp

from . import tensor
from .element import (
    build_tables,
    element_energy,
    force_stiffness_batch,
    gradients_from_displacements,
    quadrature,
)
from .errors import BoundaryConflictError, SingularKinematicsError
from .mesh import MeshModel


@dataclass
class Prescription:
    """One displacement prescription: profile(load factor) in meters."""

    nodes: np.ndarray
    component: int  # 0 = x, 1 = y
    profile: Callable[[float], float]
    name: str = ""


def fixed(nodes, component, name="") -> Prescription:
    return Prescription(np.asarray(nodes, dtype=int), component, lambda lam: 0.0, name)


def ramp(nodes, component, target, name="") -> Prescription:
    return Prescription(np.asarray(nodes, dtype=int), component, lambda lam: lam * target, name)


@dataclass
class BoundaryProgram:
    prescriptions: list[Prescription] = field(default_factory=list)

    def add(self, prescription: Prescription) -> "BoundaryProgram":
        self.prescriptions.append(prescription)
        return self

    def dofs(self) -> np.ndarray:
        out = []
        for p in self.prescriptions:
            out.append(2 * p.nodes + p.component)
        return np.concatenate(out) if out else np.empty(0, dtype=int)


class DofMap:
    """Free/prescribed partition of the global DOF vector."""

    def __init__(self, mesh: MeshModel, bc: BoundaryProgram):
        ndof = mesh.n_dofs
        taken = np.zeros(ndof, dtype=bool)
        entries: list[tuple[int, Callable[[float], float]]] = []
        for p in bc.prescriptions:
            if len(p.nodes) and (p.nodes.min() < 0 or p.nodes.max() >= mesh.n_nodes):
                raise BoundaryConflictError(f"prescription {p.name!r} references invalid nodes")
            for n in p.nodes:
                dof = 2 * int(n) + p.component
                if taken[dof]:
                    raise BoundaryConflictError(
                        f"DOF {dof} (node {n}, component {p.component}) prescribed twice"
                    )
                taken[dof] = True
                entries.append((dof, p.profile))
        self.ndof = ndof
        self.prescribed = np.array([d for d, _ in entries], dtype=int)
        self.profiles = [f for _, f in entries]
        self.free = np.flatnonzero(~taken)

    def apply(self, d_full: np.ndarray, lam: float) -> np.ndarray:
        """Overwrite prescribed entries with their profile values at lam."""
        out = d_full.copy()
        for dof, profile in zip(self.prescribed, self.profiles):
            out[dof] = profile(lam)
        return out

    def expand(self, d_free: np.ndarray, lam: float) -> np.ndarray:
        out = np.zeros(self.ndof)
        out[self.free] = d_free
        return self.apply(out, lam)


def build_dof_map(mesh: MeshModel, bc: BoundaryProgram) -> DofMap:
    return DofMap(mesh, bc)


class _Group:
    """Elements sharing family, quadrature rule and region (one batch)."""

    def __init__(self, mesh: MeshModel, element_ids: list[int]):
        recs = [mesh.elements[i] for i in element_ids]
        first = recs[0]
        self.element_ids = np.array(element_ids, dtype=int)
        self.material = mesh.regions[first.region].material
        rule = quadrature(first.family, mesh.regions[first.region].quadrature)
        coords = np.stack([mesh.element_coords(r) for r in recs])
        self.tables = build_tables(first.family, coords, rule)
        conn = np.array([r.nodes for r in recs], dtype=int)
        self.edofs = np.empty((len(recs), 2 * first.family.n_nodes), dtype=int)
        self.edofs[:, 0::2] = 2 * conn
        self.edofs[:, 1::2] = 2 * conn + 1
        # scatter indices for the element stiffness blocks
        n2 = self.edofs.shape[1]
        self.rows = np.repeat(self.edofs, n2, axis=1).ravel()
        self.cols = np.tile(self.edofs, (1, n2)).ravel()


class Assembler:
    """Holds precomputed element tables and performs global assembly."""

    def __init__(self, mesh: MeshModel):
        mesh.validate()
        self.mesh = mesh
        groups: dict[tuple, list[int]] = {}
        for i, rec in enumerate(mesh.elements):
            key = (rec.family, mesh.regions[rec.region].quadrature, rec.region)
            groups.setdefault(key, []).append(i)
        self.groups = [_Group(mesh, ids) for _, ids in sorted(groups.items(), key=lambda kv: kv[1][0])]
        self.ndof = mesh.n_dofs

    def internal_force(self, d_full: np.ndarray) -> np.ndarray:
        f = np.zeros(self.ndof)
        for g in self.groups:
            fe = self._batch(g, d_full, need_stiffness=False)[0]
            np.add.at(f, g.edofs.ravel(), fe.ravel())
        return f

    def force_and_energy(self, d_full: np.ndarray) -> tuple[np.ndarray, float]:
        """Internal force and total strain energy in one element pass."""
        f = np.zeros(self.ndof)
        energy = 0.0
        for g in self.groups:
            fe, _, _, W = self._batch(g, d_full, need_stiffness=False)
            np.add.at(f, g.edofs.ravel(), fe.ravel())
            energy += float(np.einsum("eq,eq->", g.tables.wdet, W))
        return f, energy

    def assemble(self, d_full: np.ndarray) -> tuple[np.ndarray, sp.csr_matrix]:
        """Internal force vector and tangent stiffness at d_full."""
        f = np.zeros(self.ndof)
        rows, cols, vals = [], [], []
        for g in self.groups:
            fe, Ke = self._batch(g, d_full, need_stiffness=True)[:2]
            np.add.at(f, g.edofs.ravel(), fe.ravel())
            rows.append(g.rows)
            cols.append(g.cols)
            vals.append(Ke.ravel())
        K = sp.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(self.ndof, self.ndof),
        ).tocsr()
        return f, K

    def total_energy(self, d_full: np.ndarray) -> float:
        total = 0.0
        for g in self.groups:
            d = d_full[g.edofs]
            total += float(element_energy(g.tables, d, g.material).sum())
        return total

    def point_fields(self, d_full: np.ndarray) -> list[dict]:
        """Per-group quadrature-point diagnostics (F, J, W) for output."""
        out = []
        for g in self.groups:
            d = d_full[g.edofs]
            F, _ = gradients_from_displacements(g.tables, d)
            _, _, J, W = force_stiffness_batch(g.tables, d, g.material, need_stiffness=False)
            out.append(
                {"element_ids": g.element_ids, "F": F, "J": J, "W": W, "material": g.material}
            )
        return out

    def min_j(self, d_full: np.ndarray) -> float:
        """Smallest volume ratio over all quadrature points."""
        worst = np.inf
        for g in self.groups:
            F, _ = gradients_from_displacements(g.tables, d_full[g.edofs])
            worst = min(worst, float(tensor.det(F).min()))
        return worst

    def _batch(self, g: _Group, d_full: np.ndarray, need_stiffness: bool):
        d = d_full[g.edofs]
        try:
            return force_stiffness_batch(g.tables, d, g.material, need_stiffness)
        except SingularKinematicsError as err:
            eid = int(g.element_ids[err.element]) if err.element is not None else None
            raise SingularKinematicsError(
                f"J <= 0 in element {eid} (quadrature point {err.point})",
                element=eid,
                point=err.point,
            ) from None


def assemble(mesh: MeshModel, bc: BoundaryProgram, d_full: np.ndarray):
    """One-shot assembly reduced to free DOFs: (f_free, K_free)."""
    dof_map = DofMap(mesh, bc)
    asm = Assembler(mesh)
    f, K = asm.assemble(d_full)
    free = dof_map.free
    return f[free], K[free][:, free].tocsr()


def reactions(mesh_or_f, d_full_or_nodes=None, node_set=None, component=None, *, assembler=None):
    """Sum of internal forces over a node set.

    Two call shapes: reactions(mesh, d_full, node_set) re-assembles, or
    reactions(f_full, node_set) reuses a force vector.  Returns the
    (2,)-vector of summed (x, y) force components unless ``component``
    selects one.
    """
    if isinstance(mesh_or_f, MeshModel):
        asm = assembler if assembler is not None else Assembler(mesh_or_f)
        f_full = asm.internal_force(d_full_or_nodes)
        nodes = node_set
    else:
        f_full = np.asarray(mesh_or_f)
        nodes = d_full_or_nodes
    nodes = np.asarray(nodes, dtype=int)
    out = np.array([f_full[2 * nodes].sum(), f_full[2 * nodes + 1].sum()])
    if component is not None:
        return out[component]
    return out
