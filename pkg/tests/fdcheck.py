"""Finite-difference oracles shared by the constitutive and element tests.

These differentiate only energies/stresses returned by the code under
test; the analytic derivative paths are never reused here, so agreement
is a genuine cross-check.
"""

import numpy as np

from tmcontact import tensor
from tmcontact.materials import deformation_state

SLOTS = tensor.VOIGT_SLOTS


def random_deformation_gradients(n, seed, j_range=(0.2, 3.0)):
    """Random gradients with volume ratio rescaled into j_range."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        F = np.eye(2) + 0.4 * rng.uniform(-1.0, 1.0, size=(2, 2))
        j = np.linalg.det(F)
        if j <= 0.05:
            continue
        target = rng.uniform(*j_range)
        out.append(F * np.sqrt(target / j))
    return out


def eval_kernel(kernel, F, Fbar=None):
    return kernel.evaluate(deformation_state(F, Fbar=Fbar))


def fd_stress_from_energy(kernel, F, Fbar=None, h=1e-6):
    """Central differences of W giving (P_fd, Pbar_fd) in Voigt form."""

    def energy(Fm, Fbarm):
        return float(eval_kernel(kernel, Fm, Fbarm).W)

    P = np.zeros(4)
    for a, (i, j) in enumerate(SLOTS):
        dF = np.zeros((2, 2))
        dF[i, j] = h
        P[a] = (energy(F + dF, Fbar) - energy(F - dF, Fbar)) / (2 * h)
    Pbar = None
    if Fbar is not None:
        Pbar = np.zeros(4)
        for a, (i, j) in enumerate(SLOTS):
            dF = np.zeros((2, 2))
            dF[i, j] = h
            Pbar[a] = (energy(F, Fbar + dF) - energy(F, Fbar - dF)) / (2 * h)
    return P, Pbar


def fd_tangent_blocks(kernel, F, Fbar=None, h=1e-6):
    """Central differences of (P, Pbar) giving the four tangent blocks."""
    D1 = np.zeros((4, 4))
    D2 = np.zeros((4, 4))
    D3 = np.zeros((4, 4))
    D4 = np.zeros((4, 4))
    for b, (k, l) in enumerate(SLOTS):
        dF = np.zeros((2, 2))
        dF[k, l] = h
        rp = eval_kernel(kernel, F + dF, Fbar)
        rm = eval_kernel(kernel, F - dF, Fbar)
        D1[:, b] = (rp.P - rm.P) / (2 * h)
        D3[:, b] = (rp.Pbar - rm.Pbar) / (2 * h)
        if Fbar is not None:
            rp = eval_kernel(kernel, F, Fbar + dF)
            rm = eval_kernel(kernel, F, Fbar - dF)
            D2[:, b] = (rp.P - rm.P) / (2 * h)
            D4[:, b] = (rp.Pbar - rm.Pbar) / (2 * h)
    return D1, D2, D3, D4


def rel_err(got, ref):
    scale = max(np.max(np.abs(ref)), 1e-12)
    return np.max(np.abs(np.asarray(got) - np.asarray(ref))) / scale
