"""Two-cantilever contact benchmark with a mesh-refinement family.

Geometry: a C-shaped solid made of a vertical spine and two horizontal
cantilevers of height h with a gap of height h between them; the gap is
filled with the compliant contact medium, which also gets one extra
column of elements along its free right surface.  The top cantilever's
tip (node A, on its top surface) is driven down by 2h, closing the gap
onto the bottom cantilever (tip node B).

The mesh family is named by the number of element rows across the
contact gap (3/9/15/21); the beams carry a third of that across their
height, and the averaging penalty grows linearly with refinement.
Dimensions are not published for this benchmark; the defaults below are
read off the task sketch and frozen here.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..assembly import BoundaryProgram, fixed, ramp
from ..materials import IsoForm
from ..mesh import MeshModel, Region, StructuredQuadGrid, grid_lines, nodes_on_line
from .common import GapMediumParams, bulk_kernel

#: level name -> (beam elements per height, default averaging penalty in Pa)
CSHAPE_LEVELS = {
    "M3": (1, 200.0),
    "M9": (3, 600.0),
    "M15": (5, 1000.0),
    "M21": (7, 1400.0),
}


@dataclass
class CShapeGeometry:
    h: float = 1.0             # beam height = initial gap height (m)
    spine_width: float = 1.0   # m
    beam_length: float = 10.0  # m; slender beams keep contact pressures
                               # at the scale the gap medium can carry
    tip_travel: float = 2.0    # prescribed tip displacement, multiples of h
    columns_per_gap_row: float = 3.0  # element width = this * gap row height


def gen_cshape(
    level: str = "M15",
    geometry: CShapeGeometry | None = None,
    gamma_c: float = 1e-6,
    gamma_e: float = 1e-6,
    kappa_fbar: float | None = None,
    iso_form: IsoForm = "classical",
    bulk_quadrature: str = "rule3x3",
) -> tuple[MeshModel, BoundaryProgram]:
    if level not in CSHAPE_LEVELS:
        raise ValueError(f"unknown mesh level {level!r}; expected one of {sorted(CSHAPE_LEVELS)}")
    k, kf_default = CSHAPE_LEVELS[level]
    geo = geometry or CShapeGeometry()
    kf = kf_default if kappa_fbar is None else kappa_fbar

    h, w, lb = geo.h, geo.spine_width, geo.beam_length
    dx = geo.columns_per_gap_row * h / (3 * k)  # square-ish gap elements
    n_spine = max(1, round(w / dx))
    n_beam_cols = max(1, round(lb / dx))
    x_tip = w + lb
    xs = grid_lines([(0.0, w, n_spine), (w, x_tip, n_beam_cols), (x_tip, x_tip + dx, 1)])
    ys = grid_lines([(0.0, h, k), (h, 2 * h, 3 * k), (2 * h, 3 * h, k)])

    gap = GapMediumParams(gamma_c=gamma_c, gamma_e=gamma_e, kappa_fbar=kf)
    regions = {
        "bulk": Region(bulk_kernel(iso_form), bulk_quadrature),
        "gap": Region(gap.kernel(), "lobatto2x2"),
    }

    def classify(cx, cy):
        in_gap_band = h < cy < 2 * h
        if cx > x_tip:
            return "gap" if in_gap_band else None  # free-surface extra column
        if cx < w:
            return "bulk"  # spine
        return "gap" if in_gap_band else "bulk"

    grid = StructuredQuadGrid(xs, ys)
    mesh = grid.build(classify, regions)

    node_a = grid.node_id(mesh, x_tip, 3 * h)
    node_b = grid.node_id(mesh, x_tip, h)
    contact_upper = grid.node_id(mesh, x_tip, 2 * h)
    clamp = nodes_on_line(mesh, 0, 0.0)
    mesh.node_sets.update(
        {
            "load": np.array([node_a]),
            "monitor_b": np.array([node_b]),
            "clamp": clamp,
            "contact_upper": np.array([contact_upper]),
            "contact_lower": np.array([node_b]),
        }
    )
    mesh.metadata.update(
        {
            "benchmark": "cshape",
            "level": level,
            "geometry": geo.__dict__ | {"dx": dx},
            "initial_gap": h,
            "kappa_fbar": kf,
            "load_target": -geo.tip_travel * h,
        }
    )

    bc = BoundaryProgram(
        [
            fixed(clamp, 0, name="clamp"),
            fixed(clamp, 1, name="clamp"),
            ramp([node_a], 1, -geo.tip_travel * h, name="load"),
        ]
    )
    return mesh, bc
