"""Adaptive time stepping driven by the interface-speed indicator.

A candidate step is accepted when

    e = 10 (||phi^{n+1} - phi^n|| / (eps E_C^{n+1}))^2  <=  tol,

otherwise it is recomputed with the updated step

    A_dp(e, tau) = rho sqrt(tol / e) tau,

clamped into [tau_min, tau_max] on rejection and only from above by
tau_max on acceptance.  The two-level history is reused unchanged across
step-size changes (the constant-step stencil is applied as is), the final
step is clipped to land exactly on the end time (even below tau_min when
the remaining gap demands it), and a step that still violates the
tolerance although it cannot shrink any further is accepted with a flag
(record.accepted == 2) instead of livelocking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .energy import EnergyRecord
from .legendre import SpectralField
from .operators import norms
from .scheme import (
    BLOW_UP_LIMIT,
    RunResult,
    SchemeParams,
    StepState,
    discrete_energy_coef,
    workspace,
)


@dataclass(frozen=True)
class AdaptiveConfig:
    """Controller settings: safety factor, tolerance, step bounds."""

    rho: float = 0.9
    tol: float = 1e-3
    tau_min: float = 1e-6
    tau_max: float = 1e-2
    tau_init: float = 1e-3

    def __post_init__(self) -> None:
        if not 0.0 < self.rho <= 1.0:
            raise ValueError("safety coefficient rho must lie in (0, 1]")
        if self.tol <= 0.0:
            raise ValueError("tolerance must be positive")
        if not 0.0 < self.tau_min <= self.tau_init <= self.tau_max:
            raise ValueError("step bounds must satisfy 0 < tau_min <= tau_init <= tau_max")


def indicator(phi_next: SpectralField, phi_curr: SpectralField, eps: float, e_c: float) -> float:
    """Step-error indicator e = 10 (||d phi|| / (eps E_C))^2."""
    if e_c <= 0.0:
        raise ValueError("indicator undefined: discrete energy must be positive")
    dl2, _ = norms(SpectralField(phi_next.coeffs - phi_curr.coeffs))
    return 10.0 * (dl2 / (eps * e_c)) ** 2


def adp(e: float, tau: float, cfg: AdaptiveConfig) -> float:
    """Proposed step rho sqrt(tol/e) tau; grows maximally when e == 0."""
    if e < 0.0 or tau <= 0.0:
        raise ValueError("indicator and step must be nonnegative/positive")
    if e == 0.0:
        return cfg.tau_max
    return cfg.rho * math.sqrt(cfg.tol / e) * tau


def adaptive_run(phi0: SpectralField, params: SchemeParams, cfg: AdaptiveConfig,
                 T: float, on_step=None) -> RunResult:
    """March with adaptive steps from phi^0 to exactly t = T.

    The starter scheme takes the first step at tau_init (clipped to T).
    Rejected candidates are recorded with accepted == 0 and discarded;
    accepted steps carry 1, or 2 when forced through at the smallest
    admissible step.  params.tau is ignored; the controller owns the step.
    """
    if T <= 0.0:
        raise ValueError("end time must be positive")
    ws = workspace(phi0.M)
    kind = params.potential.code
    ecc = discrete_energy_coef(params.eps, params.B)
    lam2 = ws.lam2
    tiny = 1e-12 * max(T, 1.0)

    def record_of(t, tau, stats, a, accepted):
        return EnergyRecord(t=t, tau=tau, E_eps=stats[0], E_C=stats[1],
                            mass=ws.mean_of(a), dt_l2=stats[2], dt_h1=stats[3],
                            accepted=accepted)

    a_prev = ws.to_modes(phi0.coeffs)
    g_prev = ws.grid_of(a_prev)
    e0 = ws.energy_of(a_prev, g_prev, params.eps, params.potential)
    records = [EnergyRecord(t=0.0, tau=0.0, E_eps=e0, E_C=e0,
                            mass=ws.mean_of(a_prev), dt_l2=0.0, dt_h1=0.0, accepted=1)]
    if on_step is not None:
        on_step(records[0])

    tau0 = min(cfg.tau_init, T)
    denom1 = ws.first_denominators(params, tau0)
    a_curr, g_curr, stats = kernels.first_step(
        a_prev, g_prev, ws.P, ws.Pt, ws.PW, ws.PWt, lam2, denom1, ws.wq,
        params.eps, params.gamma, tau0, kind, ecc, BLOW_UP_LIMIT,
    )
    if stats[4] == 0.0:
        return RunResult(records, None, "blow-up", 1)
    t = T if tau0 >= T else tau0
    records.append(record_of(t, tau0, stats, a_curr, 1))
    if on_step is not None:
        on_step(records[-1])

    step_index = 1
    tau_next = cfg.tau_init
    while T - t > tiny:
        remaining = T - t
        tau_try = min(tau_next, remaining)
        while True:
            denom = 1.0 + tau_try * params.gamma * lam2 * (
                (0.75 * params.eps + params.A * tau_try) * lam2 + params.B
            )
            a_cand, g_cand, stats = kernels.sldcn_step(
                a_prev, a_curr, g_prev, g_curr,
                ws.P, ws.Pt, ws.PW, ws.PWt, lam2, denom, ws.wq,
                params.eps, params.gamma, tau_try, params.A, params.B,
                kind, ecc, BLOW_UP_LIMIT,
            )
            if stats[4] == 0.0:
                # blown candidate: treat as e = inf, so the update law sends
                # the step straight to tau_min; at tau_min it is a real blow-up
                if tau_try <= cfg.tau_min * (1.0 + 1e-12):
                    return RunResult(records, None, "blow-up", step_index + 1)
                tau_try = min(cfg.tau_min, remaining)
                continue
            e_c = stats[1]
            dl2 = stats[2]
            e = 0.0 if dl2 == 0.0 else 10.0 * (dl2 / (params.eps * e_c)) ** 2
            proposed = adp(e, tau_try, cfg)
            if e <= cfg.tol:
                accepted = 1
            else:
                new_tau = min(max(cfg.tau_min, min(proposed, cfg.tau_max)), remaining)
                if new_tau < tau_try * (1.0 - 1e-12):
                    rec = record_of(t + tau_try, tau_try, stats, a_cand, 0)
                    records.append(rec)
                    if on_step is not None:
                        on_step(rec)
                    tau_try = new_tau
                    continue
                accepted = 2  # cannot shrink further: accept and flag
            t = T if tau_try >= remaining * (1.0 - 1e-12) else t + tau_try
            step_index += 1
            rec = record_of(t, tau_try, stats, a_cand, accepted)
            records.append(rec)
            if on_step is not None:
                on_step(rec)
            a_prev, a_curr = a_curr, a_cand
            g_prev, g_curr = g_curr, g_cand
            tau_next = min(proposed, cfg.tau_max)
            break

    state = StepState(
        prev=SpectralField(ws.from_modes(a_prev)),
        curr=SpectralField(ws.from_modes(a_curr)),
        t=t,
        step_index=step_index,
    )
    return RunResult(records, state, "completed")
