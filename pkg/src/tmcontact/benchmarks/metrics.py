"""Postprocessing quantities behind the benchmark tables and figures."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NotInContactError
from ..mesh import MeshModel


@dataclass
class GapMetrics:
    residual_gap: float   # m
    initial_gap: float    # m

    @property
    def gap_error(self) -> float:
        """Residual gap relative to the initial gap (1.0 before contact)."""
        return self.residual_gap / self.initial_gap


def pair_gap(mesh: MeshModel, d_full: np.ndarray, upper: int, lower: int, axis: int = 1) -> float:
    """Signed distance between two tracked contact nodes, deformed."""
    xu = mesh.nodes[upper, axis] + d_full[2 * upper + axis]
    xl = mesh.nodes[lower, axis] + d_full[2 * lower + axis]
    return float(xu - xl)


def gap_metrics(mesh: MeshModel, d_full: np.ndarray) -> GapMetrics:
    """Residual/initial gap at the declared contact pair of the mesh."""
    upper = int(mesh.node_sets["contact_upper"][0])
    lower = int(mesh.node_sets["contact_lower"][0])
    g0 = mesh.metadata["initial_gap"]
    return GapMetrics(residual_gap=pair_gap(mesh, d_full, upper, lower), initial_gap=g0)


def gap_error(history, mesh: MeshModel) -> GapMetrics:
    """Contact-enforcement error at the end of a solved history.

    Raises NotInContactError when the monitored gap never closed below
    half of its initial value, i.e. the run ended pre-contact.
    """
    metrics = gap_metrics(mesh, history.final.d_full)
    if metrics.gap_error > 0.5:
        raise NotInContactError(
            f"residual gap is {metrics.gap_error:.0%} of the initial gap; contact "
            "was never established"
        )
    return metrics


def dimensionless_force(f: float, L: float, E: float, t: float, d: float) -> float:
    """f * L^3 / (E t d^4): geometry- and stiffness-free force measure."""
    for name, val in (("L", L), ("E", E), ("t", t), ("d", d)):
        if val <= 0.0:
            raise ValueError(f"{name} must be positive, got {val}")
    return f * L**3 / (E * t * d**4)


def critical_load_ref(E_eff: float, I: float, L: float) -> float:
    """Euler critical load of a both-ends-clamped column: pi^2 E I / (L/2)^2.

    E_eff must be the modulus actually governing the simulated bending
    stiffness (for plane strain, the flexural modulus E/(1-nu^2) built
    from the linearized kernel moduli).
    """
    for name, val in (("E_eff", E_eff), ("I", I), ("L", L)):
        if val <= 0.0:
            raise ValueError(f"{name} must be positive, got {val}")
    return np.pi**2 * E_eff * I / (0.5 * L) ** 2


def config_force_reference(W_right: float, W_left: float, lambda1_right: float, h0: float) -> float:
    """Closed-form horizontal indenter reaction (W^r - W^l)/lambda1^r * h0."""
    if lambda1_right <= 0.0:
        raise ValueError("horizontal stretch must be positive")
    return (W_right - W_left) / lambda1_right * h0


def self_contact_gap(
    mesh: MeshModel,
    d_full: np.ndarray,
    nodes: np.ndarray,
    min_reference_separation: float,
) -> float:
    """Smallest deformed distance between surface nodes that are far
    apart in the reference configuration.

    Detects self-contact closure generically: pairs closer than
    ``min_reference_separation`` in the reference are skipped so that
    neighboring nodes do not mask genuinely approaching surface pairs.
    """
    nodes = np.asarray(nodes, dtype=int)
    x0 = mesh.nodes[nodes]
    x = x0 + d_full.reshape(-1, 2)[nodes]
    ref_d = np.linalg.norm(x0[:, None, :] - x0[None, :, :], axis=-1)
    cur_d = np.linalg.norm(x[:, None, :] - x[None, :, :], axis=-1)
    mask = ref_d > min_reference_separation
    if not mask.any():
        raise ValueError("reference separation threshold excludes all node pairs")
    return float(cur_d[mask].min())


def first_knee_force(u: np.ndarray, f: np.ndarray, slope_drop: float = 0.2) -> tuple[float, int]:
    """Force at the first knee of a stiff-then-plateau loading curve.

    The knee is the first sample where the local slope falls below
    ``slope_drop`` times the initial slope; returns (force, index).
    """
    u = np.asarray(u, dtype=float)
    f = np.asarray(f, dtype=float)
    if len(u) < 4:
        raise ValueError("history too short for knee detection")
    slopes = np.diff(f) / np.maximum(np.diff(u), 1e-300)
    ref = np.median(slopes[: max(3, len(slopes) // 10)])
    for i, s in enumerate(slopes):
        if s < slope_drop * ref:
            return float(f[i]), i
    raise ValueError("no knee found: the response never softened")
