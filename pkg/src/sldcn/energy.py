"""Energies of the phase field and per-step diagnostic records.

Two energies are tracked: the free energy E_eps (gradient part plus bulk
potential) and the modified discrete energy E_C, which augments E_eps with
weighted squares of the last increment and is the quantity that decreases
step over step when the stabilization constants satisfy the dissipation
conditions.  E_C needs a concrete Lipschitz bound for the bulk force; the
truncated-well bound 11 is always used, regardless of which potential the
scheme actually stepped with, and the stabilization constant B entering
E_C is the one the run used.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .legendre import SpectralField, dealias_transform, synthesize
from .operators import norms, stiffness_apply_2d
from .potential import TRUNCATED_LIPSCHITZ, F, PotentialSpec


@dataclass
class EnergyRecord:
    """Diagnostics of one accepted (or rejected) time step.

    ``accepted`` is 1 for accepted steps, 0 for rejected adaptive
    candidates, and 2 for steps accepted at the minimum step size although
    the error indicator still exceeded its tolerance.
    """

    t: float
    tau: float
    E_eps: float
    E_C: float
    mass: float
    dt_l2: float
    dt_h1: float
    accepted: int = 1


def energy_eps(phi: SpectralField, eps: float, potential: PotentialSpec) -> float:
    """Free energy (eps/2) |grad phi|^2 + (1/eps) integral of F(phi).

    The bulk term is integrated on the dealiased 2M x 2M Gauss grid.
    """
    rule, _, _ = dealias_transform(phi.M)
    grid = synthesize(phi)
    f_int = float(rule.weights @ F(grid.values, potential) @ rule.weights)
    h1_sq = float(np.sum(phi.coeffs * stiffness_apply_2d(phi.coeffs)))
    return 0.5 * eps * max(h1_sq, 0.0) + f_int / eps


def energy_discrete(phi_next: SpectralField, phi_curr: SpectralField, params) -> float:
    """Modified energy E_C of the pair (phi^{n+1}, phi^n).

    E_eps(phi^{n+1}) + (L/(4 eps) + B/2) ||d||^2 + (eps/8) |d|_1^2 with
    d = phi^{n+1} - phi^n and L the truncated-well Lipschitz bound.
    ``params`` must expose eps, B and potential (a SchemeParams works).
    """
    if phi_next.M != phi_curr.M:
        raise ValueError("fields must share dimensions")
    diff = SpectralField(phi_next.coeffs - phi_curr.coeffs)
    dl2, dh1 = norms(diff)
    coef = TRUNCATED_LIPSCHITZ / (4.0 * params.eps) + 0.5 * params.B
    return (
        energy_eps(phi_next, params.eps, params.potential)
        + coef * dl2 * dl2
        + 0.125 * params.eps * dh1 * dh1
    )


def mass_mean(phi: SpectralField) -> float:
    """Spatial mean of the field, (phi, 1) / |domain|.

    Only the constant basis function has nonzero integral, so the mean is
    exactly the (0, 0) coefficient.
    """
    return float(phi.coeffs[0, 0])


def dissipation_violations(records, rtol: float = 1e-10, start: int = 1):
    """Indices where E_C increased beyond tolerance along a trajectory.

    Rejected records are skipped.  By default the comparison starts at the
    second record: the first row describes the initial state and the
    one-step starter opens the monotone chain, which the two-step scheme
    then must not break.  Returns a list of (record_index, increase).
    """
    kept = [(i, r) for i, r in enumerate(records) if r.accepted != 0]
    out = []
    for (_, prev), (j, curr) in zip(kept[start:], kept[start + 1:]):
        gap = curr.E_C - prev.E_C
        if gap > rtol * (1.0 + abs(prev.E_C)):
            out.append((j, gap))
    return out
