"""Mesh model, structured quad-grid generation, and mesh audits.

A mesh is plain data: node coordinates, element records (family,
connectivity, region tag), and a region table mapping tags to a
material kernel and a quadrature rule.  Benchmark generators also stash
named node sets (supports, load points, contact pairs) and geometry
metadata so downstream metrics never search for nodes geometrically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .element import ElementFamily, build_tables, quadrature
from .errors import GeometryError
from .materials import Material


@dataclass
class Region:
    material: Material
    quadrature: str


@dataclass
class ElementRecord:
    family: ElementFamily
    nodes: tuple[int, ...]
    region: str


@dataclass
class MeshModel:
    nodes: np.ndarray                      # (n_nodes, 2), meters
    elements: list[ElementRecord]
    regions: dict[str, Region]
    node_sets: dict[str, np.ndarray] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_dofs(self) -> int:
        return 2 * self.n_nodes

    def element_coords(self, rec: ElementRecord) -> np.ndarray:
        return self.nodes[list(rec.nodes)]

    def region_elements(self, tag: str) -> list[int]:
        return [i for i, e in enumerate(self.elements) if e.region == tag]

    def validate(self) -> None:
        """Audit connectivity, region resolution and element geometry."""
        n = self.n_nodes
        for i, rec in enumerate(self.elements):
            if rec.region not in self.regions:
                raise GeometryError(f"element {i}: unresolvable region tag {rec.region!r}")
            if len(rec.nodes) != rec.family.n_nodes:
                raise GeometryError(f"element {i}: wrong node count for {rec.family.value}")
            if min(rec.nodes) < 0 or max(rec.nodes) >= n:
                raise GeometryError(f"element {i}: connectivity index out of range")
        for i, rec in enumerate(self.elements):
            rule = quadrature(rec.family, self.regions[rec.region].quadrature)
            try:
                build_tables(rec.family, self.element_coords(rec)[None], rule)
            except GeometryError as err:
                raise GeometryError(f"element {i}: {err}") from err

    def total_area(self, tag: str | None = None) -> float:
        total = 0.0
        for rec in self.elements:
            if tag is not None and rec.region != tag:
                continue
            rule = quadrature(rec.family, self.regions[rec.region].quadrature)
            tables = build_tables(rec.family, self.element_coords(rec)[None], rule)
            total += float(tables.area[0])
        return total

    def boundary_edges(self) -> list[tuple[int, int]]:
        """Edges used by exactly one element (corner-node graph)."""
        count: dict[tuple[int, int], int] = {}
        for rec in self.elements:
            for a, b in _corner_edges(rec):
                key = (min(a, b), max(a, b))
                count[key] = count.get(key, 0) + 1
        return [e for e, c in count.items() if c == 1]

    def check_conforming(self) -> None:
        """Every interior corner edge must be shared by exactly 2 elements."""
        count: dict[tuple[int, int], int] = {}
        for rec in self.elements:
            for a, b in _corner_edges(rec):
                key = (min(a, b), max(a, b))
                count[key] = count.get(key, 0) + 1
        bad = [e for e, c in count.items() if c > 2]
        if bad:
            raise GeometryError(f"non-conforming edges shared by >2 elements: {bad[:5]}")


def _corner_edges(rec: ElementRecord):
    if rec.family is ElementFamily.TRI6:
        corners = rec.nodes[:3]
    else:
        corners = rec.nodes[:4]
    m = len(corners)
    return [(corners[i], corners[(i + 1) % m]) for i in range(m)]


# ---------------------------------------------------------------------------
# structured grid generation
# ---------------------------------------------------------------------------


def grid_lines(breaks: list[tuple[float, float, int]]) -> np.ndarray:
    """Concatenate uniform subdivisions, e.g. [(0, 1, 4), (1, 3, 2)]."""
    xs = [np.array([breaks[0][0]])]
    for a, b, n in breaks:
        xs.append(np.linspace(a, b, n + 1)[1:])
    return np.concatenate(xs)


class StructuredQuadGrid:
    """Tensor-product quad4 mesh over given x/y grid lines.

    A classifier decides, from each cell's centroid, which region tag it
    belongs to (or None to leave a hole).  Unused grid nodes are dropped
    and node indices compacted.
    """

    def __init__(self, xs: np.ndarray, ys: np.ndarray):
        self.xs = np.asarray(xs, dtype=float)
        self.ys = np.asarray(ys, dtype=float)
        if np.any(np.diff(self.xs) <= 0) or np.any(np.diff(self.ys) <= 0):
            raise GeometryError("grid lines must be strictly increasing")

    def build(
        self,
        classify: Callable[[float, float], str | None],
        regions: dict[str, Region],
    ) -> MeshModel:
        nx, ny = len(self.xs), len(self.ys)
        gid = lambda i, j: j * nx + i
        used = np.zeros(nx * ny, dtype=bool)
        cells = []
        for j in range(ny - 1):
            for i in range(nx - 1):
                cx = 0.5 * (self.xs[i] + self.xs[i + 1])
                cy = 0.5 * (self.ys[j] + self.ys[j + 1])
                tag = classify(cx, cy)
                if tag is None:
                    continue
                conn = (gid(i, j), gid(i + 1, j), gid(i + 1, j + 1), gid(i, j + 1))
                cells.append((conn, tag))
                for c in conn:
                    used[c] = True
        remap = -np.ones(nx * ny, dtype=int)
        remap[used] = np.arange(used.sum())
        grid_xy = np.array([(x, y) for y in self.ys for x in self.xs])
        nodes = grid_xy[used]
        elements = [
            ElementRecord(ElementFamily.QUAD4, tuple(int(remap[c]) for c in conn), tag)
            for conn, tag in cells
        ]
        mesh = MeshModel(nodes=nodes, elements=elements, regions=dict(regions))
        mesh.metadata["grid_shape"] = (nx, ny)
        return mesh

    def node_id(self, mesh: MeshModel, x: float, y: float, tol: float = 1e-9) -> int:
        """Index of the mesh node at grid coordinates (x, y)."""
        d = np.abs(mesh.nodes - [x, y]).max(axis=1)
        hit = int(np.argmin(d))
        if d[hit] > tol:
            raise KeyError(f"no node at ({x}, {y})")
        return hit


def nodes_on_line(
    mesh: MeshModel,
    axis: int,
    value: float,
    lo: float = -np.inf,
    hi: float = np.inf,
    tol: float = 1e-9,
) -> np.ndarray:
    """Node ids on the line {coordinate[axis] == value}, within [lo, hi]
    along the other axis, sorted by that coordinate."""
    other = 1 - axis
    mask = (np.abs(mesh.nodes[:, axis] - value) <= tol) & \
        (mesh.nodes[:, other] >= lo - tol) & (mesh.nodes[:, other] <= hi + tol)
    ids = np.flatnonzero(mask)
    return ids[np.argsort(mesh.nodes[ids, other])]
