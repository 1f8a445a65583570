"""Double-well potential, its derivatives, and the quadratic-growth truncation.

Two variants are supported:

* ``quartic`` -- the plain Ginzburg-Landau well F(u) = (u^2-1)^2 / 4.
* ``truncated`` -- identical on [-2, 2], continued quadratically outside so
  that the bulk force f = F' is globally Lipschitz with constant 11.  The
  pieces are matched so that F, f and f' are all continuous at u = +-2.

Only the truncated variant has a finite global Lipschitz bound, which is
what the unconditional-stability conditions on the stabilization constants
are stated in terms of.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: half-width of the interval on which the truncated well equals the quartic
TRUNCATION_LIMIT = 2.0

#: global bound on |f'| for the truncated well: max of 3u^2-1 on [-2,2]
TRUNCATED_LIPSCHITZ = 11.0

_KINDS = ("quartic", "truncated")

#: integer codes used by the jit-compiled kernels
KIND_CODES = {"quartic": 0, "truncated": 1}


@dataclass(frozen=True)
class PotentialSpec:
    """Selects the bulk potential used by the scheme and the energies."""

    kind: str = "quartic"

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown potential kind {self.kind!r}; expected one of {_KINDS}")

    @property
    def code(self) -> int:
        return KIND_CODES[self.kind]


QUARTIC = PotentialSpec("quartic")
TRUNCATED = PotentialSpec("truncated")


def _dispatch(phi, quartic_fn, outer_fn):
    """Evaluate quartic_fn on [-2,2] and outer_fn outside (truncated kinds)."""
    arr = np.asarray(phi, dtype=float)
    core = quartic_fn(arr)
    hi = outer_fn(arr - TRUNCATION_LIMIT, 1.0)
    lo = outer_fn(arr + TRUNCATION_LIMIT, -1.0)
    out = np.where(arr > TRUNCATION_LIMIT, hi, np.where(arr < -TRUNCATION_LIMIT, lo, core))
    return float(out) if np.isscalar(phi) or arr.ndim == 0 else out


def F(phi, spec: PotentialSpec = QUARTIC):
    """Potential energy density F(phi).

    Quartic: (phi^2-1)^2/4.  Truncated: same on [-2,2]; outside,
    11/2 (phi -+ 2)^2 +- 6 (phi -+ 2) + 9/4, which matches value, slope and
    curvature bound at the truncation points.
    """
    quart = lambda u: 0.25 * (u * u - 1.0) ** 2
    if spec.kind == "quartic":
        arr = np.asarray(phi, dtype=float)
        out = quart(arr)
        return float(out) if np.isscalar(phi) or arr.ndim == 0 else out
    return _dispatch(phi, quart, lambda s, sign: 5.5 * s * s + sign * 6.0 * s + 2.25)


def f(phi, spec: PotentialSpec = QUARTIC):
    """Bulk force f = F': phi^3 - phi on the core, linear with slope 11 outside."""
    cubic = lambda u: u * u * u - u
    if spec.kind == "quartic":
        arr = np.asarray(phi, dtype=float)
        out = cubic(arr)
        return float(out) if np.isscalar(phi) or arr.ndim == 0 else out
    return _dispatch(phi, cubic, lambda s, sign: TRUNCATED_LIPSCHITZ * s + sign * 6.0)


def f_prime(phi, spec: PotentialSpec = QUARTIC):
    """Derivative of the bulk force: 3 phi^2 - 1 on the core, 11 outside."""
    quad = lambda u: 3.0 * u * u - 1.0
    if spec.kind == "quartic":
        arr = np.asarray(phi, dtype=float)
        out = quad(arr)
        return float(out) if np.isscalar(phi) or arr.ndim == 0 else out
    return _dispatch(phi, quad, lambda s, sign: np.full_like(s, TRUNCATED_LIPSCHITZ))


def lipschitz(spec: PotentialSpec) -> float:
    """Global Lipschitz constant of f.  Only the truncated kind has one."""
    if spec.kind != "truncated":
        raise ValueError("the quartic potential has no global Lipschitz bound; use kind='truncated'")
    return TRUNCATED_LIPSCHITZ
