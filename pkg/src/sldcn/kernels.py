"""Hot per-step kernels: numba-compiled fast path, pure-numpy fallback.

The time loop spends essentially all of its work in one kernel per step
(two tensor-product transforms, a pointwise nonlinearity, a per-mode solve
and the step diagnostics).  The kernel is written once in numpy style that
numba can compile; both variants are importable, and the one the solver
uses is chosen at import time:

* default: the numba build when numba is importable,
* ``SLDCN_NUMBA=0`` in the environment forces the pure-numpy fallback.

``benchmarks/bench_step.py`` times the two variants against each other.

State enters in mode coordinates (the jointly diagonal basis), accompanied
by the current grid values so the extrapolated midpoint never needs an
extra transform.  The potential is selected by an integer code (0 quartic,
1 truncated) and is inlined so the kernels stay self-contained.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    _HAVE_NUMBA = False


def _sldcn_step(a_prev, a_curr, g_prev, g_curr, P, Pt, PW, PWt, lam2, denom, wq,
                eps, gamma, tau, A, B, kind, ec_coef, blow_limit):
    """One two-step update in mode coordinates, plus step diagnostics.

    Returns (a_next, g_next, stats) with stats = [E_eps, E_C, dt_l2, dt_h1,
    ok]; ok is 0.0 when the new grid values are non-finite or exceed
    blow_limit in max norm.
    """
    gh = 1.5 * g_curr - 0.5 * g_prev
    if kind == 1:
        fg = np.where(
            gh > 2.0,
            11.0 * (gh - 2.0) + 6.0,
            np.where(gh < -2.0, 11.0 * (gh + 2.0) - 6.0, gh * gh * gh - gh),
        )
    else:
        fg = gh * gh * gh - gh
    load = np.dot(np.dot(PWt, fg), PW)
    rhs = a_curr - (tau * gamma) * lam2 * (
        (0.25 * eps) * lam2 * a_prev
        + (1.0 / eps) * load
        - (A * tau) * lam2 * a_curr
        - B * (2.0 * a_curr - a_prev)
    )
    a_next = rhs / denom
    g_next = np.dot(np.dot(P, a_next), Pt)

    gmax = np.abs(g_next).max()
    ok = 1.0 if (np.isfinite(gmax) and gmax <= blow_limit) else 0.0
    d = a_next - a_curr
    dt_l2_sq = (d * d).sum()
    dt_h1_sq = (lam2 * d * d).sum()
    grad_sq = (lam2 * a_next * a_next).sum()
    if kind == 1:
        fpot = np.where(
            g_next > 2.0,
            5.5 * (g_next - 2.0) ** 2 + 6.0 * (g_next - 2.0) + 2.25,
            np.where(
                g_next < -2.0,
                5.5 * (g_next + 2.0) ** 2 - 6.0 * (g_next + 2.0) + 2.25,
                0.25 * (g_next * g_next - 1.0) ** 2,
            ),
        )
    else:
        w = g_next * g_next - 1.0
        fpot = 0.25 * w * w
    f_int = (wq * fpot).sum()
    e_eps = 0.5 * eps * grad_sq + f_int / eps
    e_c = e_eps + ec_coef * dt_l2_sq + 0.125 * eps * dt_h1_sq

    stats = np.empty(5)
    stats[0] = e_eps
    stats[1] = e_c
    stats[2] = np.sqrt(dt_l2_sq)
    stats[3] = np.sqrt(dt_h1_sq)
    stats[4] = ok
    return a_next, g_next, stats


def _first_step(a0, g0, P, Pt, PW, PWt, lam2, denom, wq,
                eps, gamma, tau, kind, ec_coef, blow_limit):
    """One stabilized first-order starter step in mode coordinates.

    Semi-implicit update with explicit bulk force f(phi^0) and stabilization
    (1/eps) * (phi^1 - phi^0); denom must hold 1 + tau*gamma*lam*(eps*lam +
    1/eps).  Diagnostics as in :func:`_sldcn_step`.
    """
    stab = 1.0 / eps
    if kind == 1:
        fg = np.where(
            g0 > 2.0,
            11.0 * (g0 - 2.0) + 6.0,
            np.where(g0 < -2.0, 11.0 * (g0 + 2.0) - 6.0, g0 * g0 * g0 - g0),
        )
    else:
        fg = g0 * g0 * g0 - g0
    load = np.dot(np.dot(PWt, fg), PW)
    num = a0 + (tau * gamma) * lam2 * (stab * a0 - (1.0 / eps) * load)
    a1 = num / denom
    g1 = np.dot(np.dot(P, a1), Pt)

    gmax = np.abs(g1).max()
    ok = 1.0 if (np.isfinite(gmax) and gmax <= blow_limit) else 0.0
    d = a1 - a0
    dt_l2_sq = (d * d).sum()
    dt_h1_sq = (lam2 * d * d).sum()
    grad_sq = (lam2 * a1 * a1).sum()
    if kind == 1:
        fpot = np.where(
            g1 > 2.0,
            5.5 * (g1 - 2.0) ** 2 + 6.0 * (g1 - 2.0) + 2.25,
            np.where(
                g1 < -2.0,
                5.5 * (g1 + 2.0) ** 2 - 6.0 * (g1 + 2.0) + 2.25,
                0.25 * (g1 * g1 - 1.0) ** 2,
            ),
        )
    else:
        w = g1 * g1 - 1.0
        fpot = 0.25 * w * w
    f_int = (wq * fpot).sum()
    e_eps = 0.5 * eps * grad_sq + f_int / eps
    e_c = e_eps + ec_coef * dt_l2_sq + 0.125 * eps * dt_h1_sq

    stats = np.empty(5)
    stats[0] = e_eps
    stats[1] = e_c
    stats[2] = np.sqrt(dt_l2_sq)
    stats[3] = np.sqrt(dt_h1_sq)
    stats[4] = ok
    return a1, g1, stats


sldcn_step_numpy = _sldcn_step
first_step_numpy = _first_step

if _HAVE_NUMBA:
    sldcn_step_numba = numba.njit(cache=True)(_sldcn_step)
    first_step_numba = numba.njit(cache=True)(_first_step)
else:  # pragma: no cover
    sldcn_step_numba = None
    first_step_numba = None

USE_NUMBA = _HAVE_NUMBA and os.environ.get("SLDCN_NUMBA", "1") != "0"

if USE_NUMBA:
    sldcn_step = sldcn_step_numba
    first_step = first_step_numba
else:
    sldcn_step = sldcn_step_numpy
    first_step = first_step_numpy


def backend() -> str:
    """Name of the kernel backend in use ('numba' or 'numpy')."""
    return "numba" if USE_NUMBA else "numpy"
