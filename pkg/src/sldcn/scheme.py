"""Time integrators for the Cahn-Hilliard gradient flow.

Two integrators share one mode-space workspace:

* a stabilized first-order starter that produces phi^1 from phi^0 (explicit
  bulk force, stabilization constant 1/eps on the increment), and
* the two-step scheme proper, which treats the Laplacian with the diffusive
  average (3 phi^{n+1} + phi^{n-1})/4, evaluates the bulk force explicitly
  at the extrapolant (3 phi^n - phi^{n-1})/2 on the dealiased grid, and adds
  the two linear stabilization terms -A tau Lap(d_t phi) and B d_tt phi.

Eliminating the chemical potential leaves one constant-coefficient system
per step, diagonal in the joint eigenbasis of the 1-D mass/stiffness pair,
so each step is two tensor transforms and a per-mode division.  The zero
mode has denominator exactly one, making the spatial mean a bitwise
invariant of both integrators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kernels
from .energy import EnergyRecord
from .legendre import SpectralField, dealias_transform
from .operators import StepFactor, eigenfactorization, operators_1d, step_factor
from .potential import TRUNCATED_LIPSCHITZ, F, PotentialSpec

#: max norm on the dealiased grid beyond which a trajectory counts as blown up
BLOW_UP_LIMIT = 1e3


class BlowUpError(RuntimeError):
    """The numerical solution left the finite/bounded regime."""

    def __init__(self, step_index: int, t: float):
        super().__init__(f"solution blew up at step {step_index} (t = {t:g})")
        self.step_index = step_index
        self.t = t


@dataclass(frozen=True)
class SchemeParams:
    """Physical and stabilization constants of one run.

    eps: interface thickness (0 < eps < 1); gamma: mobility; tau: time
    step; A, B: nonnegative stabilization constants; potential: bulk well.
    """

    eps: float
    gamma: float
    tau: float
    A: float
    B: float
    potential: PotentialSpec = field(default_factory=PotentialSpec)

    def __post_init__(self) -> None:
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")
        if self.gamma <= 0.0:
            raise ValueError("gamma must be positive")
        if self.tau <= 0.0:
            raise ValueError("tau must be positive")
        if self.A < 0.0 or self.B < 0.0:
            raise ValueError("stabilization constants must be nonnegative")


@dataclass
class StepState:
    """The two-level history the scheme marches: (phi^{n-1}, phi^n)."""

    prev: SpectralField
    curr: SpectralField
    t: float
    step_index: int

    def __post_init__(self) -> None:
        if self.prev.M != self.curr.M:
            raise ValueError("history fields must share dimensions")


@dataclass
class RunResult:
    """Trajectory summary: per-step records plus the final two-level state."""

    records: list[EnergyRecord]
    state: StepState | None
    outcome: str  # "completed" | "blow-up"
    blow_up_step: int | None = None


def discrete_energy_coef(eps: float, B: float) -> float:
    """Weight of ||d_t phi||^2 in the modified energy: L/(4 eps) + B/2."""
    return TRUNCATED_LIPSCHITZ / (4.0 * eps) + 0.5 * B


class Workspace:
    """Cached per-resolution geometry: mode maps and grid transforms."""

    def __init__(self, M: int):
        ops = operators_1d(M)
        eig = eigenfactorization(M)
        rule, phi, _ = dealias_transform(M)
        E = eig.eigvecs
        self.M = M
        self.eig = eig
        self.lam2 = np.ascontiguousarray(eig.eigvals[:, None] + eig.eigvals[None, :])
        self.P = np.ascontiguousarray(phi @ E)
        self.Pt = np.ascontiguousarray(self.P.T)
        self.PW = np.ascontiguousarray(rule.weights[:, None] * self.P)
        self.PWt = np.ascontiguousarray(self.PW.T)
        self.wq = np.ascontiguousarray(np.outer(rule.weights, rule.weights))
        self._me = np.ascontiguousarray(ops.mass @ E)
        # mean = E00^2 * a00 since only the constant mode has nonzero integral
        self.mean_scale = float(E[0, 0] * E[0, 0])

    def to_modes(self, coeffs: np.ndarray) -> np.ndarray:
        return self._me.T @ coeffs @ self._me

    def from_modes(self, a: np.ndarray) -> np.ndarray:
        E = self.eig.eigvecs
        return E @ a @ E.T

    def grid_of(self, a: np.ndarray) -> np.ndarray:
        return self.P @ a @ self.Pt

    def load_modes(self, grid_values: np.ndarray) -> np.ndarray:
        return self.PWt @ grid_values @ self.PW

    def mean_of(self, a: np.ndarray) -> float:
        return float(a[0, 0] * self.mean_scale)

    def first_denominators(self, params: SchemeParams, tau: float) -> np.ndarray:
        lam2 = self.lam2
        return 1.0 + tau * params.gamma * lam2 * (params.eps * lam2 + 1.0 / params.eps)

    def energy_of(self, a: np.ndarray, g: np.ndarray, eps: float, potential: PotentialSpec) -> float:
        grad_sq = float((self.lam2 * a * a).sum())
        f_int = float((self.wq * F(g, potential)).sum())
        return 0.5 * eps * grad_sq + f_int / eps


@lru_cache(maxsize=16)
def workspace(M: int) -> Workspace:
    return Workspace(M)


def _step_args(ws: Workspace, params: SchemeParams, tau: float, denom: np.ndarray,
               blow_limit: float):
    return (
        ws.P, ws.Pt, ws.PW, ws.PWt, ws.lam2, denom, ws.wq,
        params.eps, params.gamma, tau, params.A, params.B,
        params.potential.code, discrete_energy_coef(params.eps, params.B), blow_limit,
    )


def first_step(phi0: SpectralField, params: SchemeParams) -> SpectralField:
    """Generate phi^1 from phi^0 with the stabilized first-order scheme."""
    ws = workspace(phi0.M)
    a0 = ws.to_modes(phi0.coeffs)
    g0 = ws.grid_of(a0)
    denom = ws.first_denominators(params, params.tau)
    a1, _, stats = kernels.first_step(
        a0, g0, ws.P, ws.Pt, ws.PW, ws.PWt, ws.lam2, denom, ws.wq,
        params.eps, params.gamma, params.tau,
        params.potential.code, discrete_energy_coef(params.eps, params.B), np.inf,
    )
    if stats[4] == 0.0:
        raise BlowUpError(1, params.tau)
    return SpectralField(ws.from_modes(a1))


def _mu_modes(ws: Workspace, params: SchemeParams, tau: float,
              a_prev: np.ndarray, a_curr: np.ndarray, a_next: np.ndarray,
              g_prev: np.ndarray, g_curr: np.ndarray) -> np.ndarray:
    """Recover the midpoint chemical potential from the second weak equation."""
    from .potential import f as bulk_force

    gh = 1.5 * g_curr - 0.5 * g_prev
    load = ws.load_modes(bulk_force(gh, params.potential))
    lam2 = ws.lam2
    return (
        params.eps * lam2 * (3.0 * a_next + a_prev) / 4.0
        + load / params.eps
        + params.A * tau * lam2 * (a_next - a_curr)
        + params.B * (a_next - 2.0 * a_curr + a_prev)
    )


def sldcn_step(state: StepState, params: SchemeParams,
               factor: StepFactor | None = None) -> tuple[SpectralField, SpectralField]:
    """Advance one two-step update; returns (phi^{n+1}, mu^{n+1/2}).

    Raises :class:`BlowUpError` if the new state is non-finite.
    """
    ws = workspace(state.curr.M)
    if factor is None:
        factor = step_factor(ws.M, params.tau, params.eps, params.gamma, params.A, params.B)
    elif factor.M != ws.M:
        raise ValueError("step factor was built for a different resolution")
    a_prev = ws.to_modes(state.prev.coeffs)
    a_curr = ws.to_modes(state.curr.coeffs)
    g_prev = ws.grid_of(a_prev)
    g_curr = ws.grid_of(a_curr)
    a_next, _, stats = kernels.sldcn_step(
        a_prev, a_curr, g_prev, g_curr,
        *_step_args(ws, params, params.tau, factor.denom, np.inf),
    )
    if stats[4] == 0.0:
        raise BlowUpError(state.step_index + 1, state.t + params.tau)
    mu = _mu_modes(ws, params, params.tau, a_prev, a_curr, a_next, g_prev, g_curr)
    return SpectralField(ws.from_modes(a_next)), SpectralField(ws.from_modes(mu))


def run_uniform(phi0: SpectralField, params: SchemeParams,
                T: float | None = None, n_steps: int | None = None,
                on_step=None) -> RunResult:
    """March the scheme with a uniform step from phi^0.

    Exactly one of ``T`` (end time; ceil(T/tau) steps) and ``n_steps`` must
    be given.  The starter scheme produces phi^1, the two-step scheme the
    rest.  One :class:`EnergyRecord` is emitted per step (plus one for the
    initial state) and passed to ``on_step`` when provided.  A blow-up stops
    the run early and is reported in the result instead of raising.
    """
    if (T is None) == (n_steps is None):
        raise ValueError("specify exactly one of T and n_steps")
    tau = params.tau
    if n_steps is None:
        if T <= tau:
            raise ValueError("end time must exceed the step size")
        n_steps = int(np.ceil(T / tau - 1e-9))
    if n_steps < 1:
        raise ValueError("need at least one step")

    ws = workspace(phi0.M)
    kind = params.potential.code
    ecc = discrete_energy_coef(params.eps, params.B)
    a_prev = ws.to_modes(phi0.coeffs)
    g_prev = ws.grid_of(a_prev)

    e0 = ws.energy_of(a_prev, g_prev, params.eps, params.potential)
    records = [EnergyRecord(t=0.0, tau=0.0, E_eps=e0, E_C=e0,
                            mass=ws.mean_of(a_prev), dt_l2=0.0, dt_h1=0.0, accepted=1)]
    if on_step is not None:
        on_step(records[0])

    denom1 = ws.first_denominators(params, tau)
    a_curr, g_curr, stats = kernels.first_step(
        a_prev, g_prev, ws.P, ws.Pt, ws.PW, ws.PWt, ws.lam2, denom1, ws.wq,
        params.eps, params.gamma, tau, kind, ecc, BLOW_UP_LIMIT,
    )
    if stats[4] == 0.0:
        return RunResult(records, None, "blow-up", 1)
    rec = EnergyRecord(t=tau, tau=tau, E_eps=stats[0], E_C=stats[1],
                       mass=ws.mean_of(a_curr), dt_l2=stats[2], dt_h1=stats[3], accepted=1)
    records.append(rec)
    if on_step is not None:
        on_step(rec)

    denom = step_factor(ws.M, tau, params.eps, params.gamma, params.A, params.B).denom
    args = _step_args(ws, params, tau, denom, BLOW_UP_LIMIT)
    for n in range(2, n_steps + 1):
        a_next, g_next, stats = kernels.sldcn_step(a_prev, a_curr, g_prev, g_curr, *args)
        if stats[4] == 0.0:
            return RunResult(records, None, "blow-up", n)
        rec = EnergyRecord(t=n * tau, tau=tau, E_eps=stats[0], E_C=stats[1],
                           mass=ws.mean_of(a_next), dt_l2=stats[2], dt_h1=stats[3], accepted=1)
        records.append(rec)
        if on_step is not None:
            on_step(rec)
        a_prev, a_curr = a_curr, a_next
        g_prev, g_curr = g_curr, g_next

    state = StepState(
        prev=SpectralField(ws.from_modes(a_prev)),
        curr=SpectralField(ws.from_modes(a_curr)),
        t=n_steps * tau,
        step_index=n_steps,
    )
    return RunResult(records, state, "completed")
