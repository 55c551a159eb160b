"""Load stepping, Newton iteration, and descent-safe factorization.

Loading is displacement-driven: a load factor lambda in [0, 1] scales
the boundary prescriptions, the free-DOF internal force is driven to
zero at each accepted lambda, and an adaptive stepper cuts or grows the
increment based on Newton success.

Near instabilities the tangent loses positive definiteness; a plain
Newton direction then may point uphill.  The factorization below adds
the smallest diagonal shift tau (from a geometric trial sequence) that
restores positive definiteness, which guarantees a descent direction
and steers the iteration onto stable branches.  Indefiniteness is
detected from the diagonal of the SuperLU factor computed in symmetric
mode with diagonal pivoting, and is cross-checked by a direct descent
test on the computed direction.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import Assembler, DofMap
from .errors import IllConditionedSystemError, SingularKinematicsError, TmContactError

log = logging.getLogger(__name__)


@dataclass
class SolverConfig:
    tol_rel_residual: float = 1e-8
    tol_abs_residual: float | None = None   # defaults to 1e-10 * force_scale
    force_scale: float = 1.0                # newtons; sets the absolute floor
    max_newton_iters: int = 25
    ls_backtrack: float = 0.5
    ls_sufficient_decrease: float = 1e-4
    ls_max_trials: int = 15
    dlam_initial: float = 0.05
    dlam_min: float = 1e-6
    dlam_growth: float = 1.2
    dlam_cut: float = 0.5
    dlam_cap_factor: float = 4.0
    shift_beta0_rel: float = 1e-8           # first trial shift, times mean |diag|
    shift_growth: float = 10.0
    shift_max_rel: float = 1e12             # give up beyond this times diag scale
    log_every_iteration: bool = True

    def abs_tol(self) -> float:
        if self.tol_abs_residual is not None:
            return self.tol_abs_residual
        return 1e-10 * self.force_scale


@dataclass
class Factorization:
    """PD-shifted factorization of a symmetric sparse matrix."""

    lu: spla.SuperLU
    tau: float
    was_indefinite: bool

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return self.lu.solve(rhs)


def _try_factor(K: sp.csc_matrix):
    """SuperLU factorization preferring diagonal pivots; returns None on
    breakdown, otherwise (lu, positive_definite)."""
    try:
        lu = spla.splu(
            K,
            diag_pivot_thresh=0.0,
            permc_spec="MMD_AT_PLUS_A",
            options={"SymmetricMode": True},
        )
    except RuntimeError:
        return None
    du = lu.U.diagonal()
    pd = bool(np.all(np.isfinite(du)) and np.all(du > 0.0))
    return lu, pd


def modified_cholesky(K: sp.spmatrix, cfg: SolverConfig | None = None) -> Factorization:
    """Factor K + tau*I with the smallest tau restoring positive
    definiteness (tau = 0 when K already is).

    Raises IllConditionedSystemError when the trial shift exceeds
    ``shift_max_rel`` times the diagonal scale.
    """
    cfg = cfg or SolverConfig()
    K = sp.csc_matrix(K)
    diag_scale = float(np.mean(np.abs(K.diagonal()))) or 1.0
    result = _try_factor(K)
    if result is not None and result[1]:
        return Factorization(result[0], tau=0.0, was_indefinite=False)
    tau = cfg.shift_beta0_rel * diag_scale
    eye = sp.identity(K.shape[0], format="csc")
    while tau <= cfg.shift_max_rel * diag_scale:
        result = _try_factor(K + tau * eye)
        if result is not None and result[1]:
            return Factorization(result[0], tau=tau, was_indefinite=True)
        tau *= cfg.shift_growth
    raise IllConditionedSystemError(
        f"no positive definite factorization up to shift {tau:.3e}"
    )


@dataclass
class StepResult:
    converged: bool
    iterations: int
    residual_norm: float
    lam: float
    d_full: np.ndarray
    reason: str = ""


@dataclass
class StepRecord:
    index: int
    lam: float
    d_full: np.ndarray
    iterations: int
    residual_norm: float
    monitors: dict = field(default_factory=dict)


@dataclass
class SolveHistory:
    steps: list[StepRecord] = field(default_factory=list)
    termination: str = "completed"

    @property
    def lam_values(self) -> np.ndarray:
        return np.array([s.lam for s in self.steps])

    def monitor(self, key: str) -> np.ndarray:
        return np.array([s.monitors[key] for s in self.steps])

    @property
    def final(self) -> StepRecord:
        return self.steps[-1]


def newton_solve(
    assembler: Assembler,
    dof_map: DofMap,
    lam: float,
    d_start: np.ndarray,
    cfg: SolverConfig,
) -> StepResult:
    """Drive the free-DOF residual to zero at fixed load factor.

    Direction from the PD-shifted factorization; step length by
    backtracking.  A trial step is accepted when it satisfies the
    residual sufficient-decrease rule |f(d+s*dd)| <= (1 - c*s)|f(d)| or,
    failing that, the Armijo rule on the total strain energy, for which
    the shifted direction is guaranteed descent.  The energy fallback is
    what lets the iteration traverse the indefinite regions around
    contact stiffening and instabilities instead of stalling on a
    non-decreasing residual norm.
    """
    free = dof_map.free
    d = dof_map.apply(d_start, lam)
    abs_tol = cfg.abs_tol()

    def force_energy(dv):
        f_full, energy = assembler.force_and_energy(dv)
        return f_full[free], energy

    try:
        r, energy = force_energy(d)
    except SingularKinematicsError as err:
        return StepResult(False, 0, np.inf, lam, d_start, reason=f"singular start: {err}")
    norm0 = float(np.linalg.norm(r))
    if norm0 <= abs_tol:
        return StepResult(True, 0, norm0, lam, d)
    tol = max(cfg.tol_rel_residual * norm0, abs_tol)

    norm = norm0
    for it in range(1, cfg.max_newton_iters + 1):
        try:
            f, K = assembler.assemble(d)
        except SingularKinematicsError as err:
            return StepResult(False, it, norm, lam, d, reason=f"singular tangent state: {err}")
        Kff = K[free][:, free].tocsc()
        try:
            fact = modified_cholesky(Kff, cfg)
        except IllConditionedSystemError as err:
            return StepResult(False, it, norm, lam, d, reason=str(err))
        dd = fact.solve(-f[free])
        if not np.all(np.isfinite(dd)):
            return StepResult(False, it, norm, lam, d, reason="non-finite Newton direction")
        slope = float(f[free] @ dd)  # energy slope along dd, negative by construction

        s = 1.0
        accepted = None
        for _ in range(cfg.ls_max_trials):
            d_try = d.copy()
            d_try[free] += s * dd
            try:
                r_try, energy_try = force_energy(d_try)
            except SingularKinematicsError:
                s *= cfg.ls_backtrack
                continue
            norm_try = float(np.linalg.norm(r_try))
            if norm_try <= (1.0 - cfg.ls_sufficient_decrease * s) * norm:
                accepted = (d_try, norm_try, energy_try)
                break
            if energy_try <= energy + cfg.ls_sufficient_decrease * s * slope:
                accepted = (d_try, norm_try, energy_try)
                break
            s *= cfg.ls_backtrack
        if accepted is None:
            return StepResult(False, it, norm, lam, d, reason="line search failed")
        d, norm, energy = accepted
        if cfg.log_every_iteration:
            log.debug(
                "newton lam=%.6f iter=%d residual=%.3e s=%.3g tau=%.3e",
                lam, it, norm, s, fact.tau,
            )
        if norm <= tol:
            return StepResult(True, it, norm, lam, d)
    return StepResult(False, cfg.max_newton_iters, norm, lam, d, reason="max iterations")


def adaptive_march(
    assembler: Assembler,
    dof_map: DofMap,
    cfg: SolverConfig,
    monitor: Callable[[int, float, np.ndarray, np.ndarray], dict] | None = None,
) -> SolveHistory:
    """March lambda from 0 to 1 with halving on failure and capped regrowth.

    Each accepted step is recorded with its monitors; on failure the
    last accepted state is restored bit-for-bit and the increment is
    halved until ``dlam_min``, at which point the partial history is
    returned with a termination reason.
    """
    history = SolveHistory()
    d = dof_map.apply(np.zeros(dof_map.ndof), 0.0)

    def record(index, lam, res: StepResult):
        monitors = {}
        if monitor is not None:
            f_full = assembler.internal_force(res.d_full)
            monitors = monitor(index, lam, res.d_full, f_full)
        history.steps.append(
            StepRecord(index, lam, res.d_full.copy(), res.iterations, res.residual_norm, monitors)
        )

    record(0, 0.0, StepResult(True, 0, 0.0, 0.0, d))

    lam = 0.0
    dlam = cfg.dlam_initial
    cap = cfg.dlam_cap_factor * cfg.dlam_initial
    streak = 0
    index = 0
    while lam < 1.0 - 1e-12:
        lam_try = min(lam + dlam, 1.0)
        res = newton_solve(assembler, dof_map, lam_try, d, cfg)
        if res.converged:
            lam = lam_try
            d = res.d_full
            index += 1
            streak += 1
            record(index, lam, res)
            log.info(
                "step %d accepted: lam=%.6f iters=%d residual=%.3e dlam=%.3g",
                index, lam, res.iterations, res.residual_norm, dlam,
            )
            if streak >= 2:
                dlam = min(dlam * cfg.dlam_growth, cap)
        else:
            streak = 0
            dlam *= cfg.dlam_cut
            log.info("step failed at lam=%.6f (%s); dlam cut to %.3g", lam_try, res.reason, dlam)
            if dlam < cfg.dlam_min:
                history.termination = f"non-convergence at lam={lam_try:.6f}: {res.reason}"
                return history
    history.termination = "completed"
    return history
