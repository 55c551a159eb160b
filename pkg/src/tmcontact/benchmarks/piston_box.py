"""Constrained buckling of a double-clamped beam inside a rigid box.

A rigid piston (the top boundary) descends into a rigid box, axially
compressing a slender vertical beam clamped to the piston above and to
the box floor below.  The gap medium fills the box on both sides of the
beam, so the beam can buckle sideways, contact the walls, buckle again
in its lower part, and finally fold onto the box floor -- all without
contact search.

Rigid parts are boundary conditions: the floor is fixed, the piston
nodes move straight down, and the side-wall nodes (medium and piston
ends) are constrained horizontally only, so they slide vertically along
the walls.  The prescribed piston travel follows a quadratic ramp in
the load factor so the early buckling knee is finely resolved while the
deep post-buckling range advances in larger increments.

A tiny first-mode geometric imperfection (amplitude beam_thickness/500)
makes the buckled branch a smooth limit path under displacement
control; its effect on the critical load is far below the verification
tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..assembly import BoundaryProgram, Prescription, fixed
from ..materials import IsoForm
from ..mesh import MeshModel, Region, StructuredQuadGrid, nodes_on_line
from .common import GapMediumParams, bulk_kernel


@dataclass
class PistonBoxGeometry:
    beam_length: float = 1.0     # m, clamp-to-clamp (floor to piston)
    beam_thickness: float = 0.04  # m (= piston and wall thickness d)
    box_width: float = 0.4       # m, inner width of the box
    piston_travel: float = 0.4   # m, total prescribed descent
    elements_through_beam: int = 6
    side_columns: int = 8        # medium columns per side, graded
    rows: int = 100              # element rows over the beam length
    imperfection: float = 1.0 / 500.0  # amplitude / beam_thickness


def _graded_lines(a: float, b: float, n: int, fine_at_b: bool) -> np.ndarray:
    """n+1 grid lines on [a, b] with geometric size grading (ratio 1.35)."""
    r = 1.35
    sizes = r ** np.arange(n)
    sizes = sizes / sizes.sum() * (b - a)
    if fine_at_b:
        sizes = sizes[::-1]
    return a + np.concatenate([[0.0], np.cumsum(sizes)])


def gen_piston_box(
    geometry: PistonBoxGeometry | None = None,
    gamma_c: float = 1e-6,
    gamma_e: float = 1e-5,
    kappa_fbar: float = 4000.0,
    iso_form: IsoForm = "classical",
    bulk_quadrature: str = "rule3x3",
) -> tuple[MeshModel, BoundaryProgram]:
    geo = geometry or PistonBoxGeometry()
    L, d, W = geo.beam_length, geo.beam_thickness, geo.box_width
    half_d = d / 2.0
    xs = np.concatenate(
        [
            _graded_lines(-W / 2.0, -half_d, geo.side_columns, fine_at_b=True),
            np.linspace(-half_d, half_d, geo.elements_through_beam + 1)[1:],
            _graded_lines(half_d, W / 2.0, geo.side_columns, fine_at_b=False)[1:],
        ]
    )
    ys = np.linspace(0.0, L, geo.rows + 1)

    gap = GapMediumParams(gamma_c=gamma_c, gamma_e=gamma_e, kappa_fbar=kappa_fbar)
    regions = {
        "bulk": Region(bulk_kernel(iso_form), bulk_quadrature),
        "gap": Region(gap.kernel(), "lobatto2x2"),
    }
    grid = StructuredQuadGrid(xs, ys)
    mesh = grid.build(
        lambda cx, cy: "bulk" if abs(cx) < half_d else "gap", regions
    )

    # first-mode imperfection of the beam column block (clamped-clamped)
    amp = geo.imperfection * d
    beam_nodes = np.flatnonzero(np.abs(mesh.nodes[:, 0]) <= half_d + 1e-12)
    y = mesh.nodes[beam_nodes, 1]
    mesh.nodes[beam_nodes, 0] += amp * 0.5 * (1.0 - np.cos(2.0 * np.pi * y / L))

    floor = nodes_on_line(mesh, 1, 0.0)
    piston = nodes_on_line(mesh, 1, L)
    walls = np.unique(
        np.concatenate([nodes_on_line(mesh, 0, -W / 2.0), nodes_on_line(mesh, 0, W / 2.0)])
    )
    walls = np.setdiff1d(walls, np.concatenate([floor, piston]))
    clamp = np.flatnonzero(
        (np.abs(mesh.nodes[:, 0]) <= half_d + 1e-12) & (np.abs(mesh.nodes[:, 1]) < 1e-12)
    )

    mesh.node_sets.update(
        {"piston": piston, "floor": floor, "walls": walls, "clamp": clamp}
    )
    mesh.metadata.update(
        {
            "benchmark": "piston_box",
            "geometry": geo.__dict__,
            "d": d,
            "beam_length": L,
            "second_moment": d**3 / 12.0,
            "load_target": -geo.piston_travel,
        }
    )

    travel = geo.piston_travel
    bc = BoundaryProgram(
        [
            fixed(floor, 0, name="floor"),
            fixed(floor, 1, name="floor"),
            fixed(walls, 0, name="walls"),
            fixed(piston, 0, name="piston"),
            Prescription(piston, 1, lambda lam: -travel * lam * lam, name="piston"),
        ]
    )
    return mesh, bc
