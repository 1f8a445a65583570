"""Galerkin operators and the tensor-product fast solver.

One-dimensional mass and stiffness matrices are assembled once per basis
size, simultaneously diagonalized (E^T M E = I, E^T S E = diag(lambda)),
and every constant-coefficient solve then reduces to a transform, a
per-mode division, and an inverse transform.  The same factorization
backs the Neumann Poisson inverse and the negative-order norm used by the
diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .legendre import (
    Basis1D,
    GridField,
    SpectralField,
    basis_deriv_matrix,
    galerkin_inner,
    gauss_legendre,
)


class CompatibilityError(ValueError):
    """Right-hand side of a pure-Neumann solve has a nonzero mean."""


@dataclass(frozen=True)
class OperatorPair1D:
    """1-D mass matrix (phi_j, phi_i) and stiffness matrix (phi_j', phi_i')."""

    mass: np.ndarray
    stiffness: np.ndarray


@dataclass(frozen=True)
class EigenFactorization:
    """Joint diagonalization of a mass/stiffness pair.

    Columns e_i of ``eigvecs`` satisfy E^T M E = I and E^T S E =
    diag(eigvals) with eigvals ascending; eigvals[0] is the exact zero of
    the constant mode.
    """

    eigvals: np.ndarray
    eigvecs: np.ndarray


@dataclass(frozen=True)
class StepFactor:
    """Per-mode denominators of one implicit step, cached per (M, tau, ...).

    denom[i, j] = 1 + tau*gamma*lam*((3 eps/4 + A tau)*lam + B) with
    lam = eigvals[i] + eigvals[j].  The zero mode has denominator exactly 1,
    which is what makes the spatial mean an exact invariant of the update.
    """

    denom: np.ndarray
    M: int
    tau: float
    eps: float
    gamma: float
    A: float
    B: float


def build_operators(basis: Basis1D | int) -> OperatorPair1D:
    """Assemble the 1-D mass and stiffness matrices of the basis.

    Mass entries follow exactly from Legendre orthogonality
    ||L_k||^2 = 2/(2k+1); stiffness entries are computed by Gauss
    quadrature of phi_k' phi_j' (exact for these polynomial degrees).
    """
    if isinstance(basis, int):
        basis = Basis1D(basis)
    M = basis.M
    mass = np.zeros((M, M))
    for k in range(M):
        for j in range(k, M):
            acc = 0.0
            for deg_a, ca in basis.terms(k):
                for deg_b, cb in basis.terms(j):
                    if deg_a == deg_b:
                        acc += ca * cb * 2.0 / (2 * deg_a + 1)
            mass[k, j] = acc
            mass[j, k] = acc
    rule = gauss_legendre(M + 2)
    dmat = basis_deriv_matrix(M, rule.nodes)
    stiffness = dmat.T @ (rule.weights[:, None] * dmat)
    stiffness = 0.5 * (stiffness + stiffness.T)
    return OperatorPair1D(mass=mass, stiffness=stiffness)


def simultaneous_diag(ops: OperatorPair1D) -> EigenFactorization:
    """Simultaneously diagonalize the (stiffness, mass) pair.

    Returns ascending eigenvalues with the constant mode pinned to an exact
    zero, and its eigenvector snapped to the exact constant so that the
    conserved zero mode of the flow round-trips without error.
    """
    lam, vecs = scipy.linalg.eigh(ops.stiffness, ops.mass)
    scale = max(float(np.abs(ops.stiffness).max()), 1.0)
    if abs(lam[0]) > 1e-10 * scale:
        raise np.linalg.LinAlgError(
            f"expected a zero eigenvalue for the constant mode, got {lam[0]:.3e}"
        )
    lam = lam.copy()
    vecs = vecs.copy()
    lam[0] = 0.0
    if lam.size > 1 and lam[1] <= 1e-8 * scale:
        raise np.linalg.LinAlgError("stiffness kernel is not one-dimensional")
    # Exactness of the conserved mode: the constant eigenvector is
    # [1/sqrt(2), 0, ...] analytically; enforce it bitwise.
    vecs[:, 0] = 0.0
    vecs[0, 0] = 1.0 / np.sqrt(2.0)
    vecs[0, 1:] = 0.0
    return EigenFactorization(eigvals=lam, eigvecs=np.ascontiguousarray(vecs))


@lru_cache(maxsize=32)
def operators_1d(M: int) -> OperatorPair1D:
    return build_operators(Basis1D(M))


@lru_cache(maxsize=32)
def eigenfactorization(M: int) -> EigenFactorization:
    return simultaneous_diag(operators_1d(M))


@lru_cache(maxsize=32)
def _mode_maps(M: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(E, M E, lam_i + lam_j) for basis size M."""
    ops = operators_1d(M)
    eig = eigenfactorization(M)
    me = np.ascontiguousarray(ops.mass @ eig.eigvecs)
    lam2 = eig.eigvals[:, None] + eig.eigvals[None, :]
    return eig.eigvecs, me, lam2


def to_modes(coeffs: np.ndarray, M: int | None = None) -> np.ndarray:
    """Basis coefficients -> coordinates in the jointly diagonal basis."""
    c = np.asarray(coeffs, dtype=float)
    _, me, _ = _mode_maps(M if M is not None else c.shape[0])
    return me.T @ c @ me


def from_modes(modes: np.ndarray, M: int | None = None) -> np.ndarray:
    """Inverse of :func:`to_modes`."""
    a = np.asarray(modes, dtype=float)
    vecs, _, _ = _mode_maps(M if M is not None else a.shape[0])
    return vecs @ a @ vecs.T


def step_factor(M: int, tau: float, eps: float, gamma: float, A: float, B: float) -> StepFactor:
    """Build (or fetch) the per-mode denominators for one implicit step."""
    return _step_factor_cached(M, float(tau), float(eps), float(gamma), float(A), float(B))


@lru_cache(maxsize=128)
def _step_factor_cached(M, tau, eps, gamma, A, B) -> StepFactor:
    _, _, lam2 = _mode_maps(M)
    denom = 1.0 + tau * gamma * lam2 * ((0.75 * eps + A * tau) * lam2 + B)
    if A >= 0.0 and B >= 0.0:
        dmin = float(denom.min())
        if dmin < 1.0 - 1e-12:
            raise AssertionError(f"step denominators must stay >= 1, got {dmin}")
    assert denom[0, 0] == 1.0
    return StepFactor(denom=denom, M=M, tau=tau, eps=eps, gamma=gamma, A=A, B=B)


def _as_load(rhs) -> np.ndarray:
    return rhs.coeffs if isinstance(rhs, SpectralField) else np.asarray(rhs, dtype=float)


def apply_step_inverse(rhs, factor: StepFactor, eig: EigenFactorization | None = None) -> SpectralField:
    """Solve one implicit step system for a given Galerkin load vector.

    ``rhs`` holds the inner products of the right-hand side against the
    basis.  The solve is transform -> per-mode divide -> inverse transform;
    with tau = 0 it degenerates to a plain mass solve.
    """
    load = _as_load(rhs)
    M = factor.M
    if load.shape != (M, M):
        raise ValueError(f"load shape {load.shape} does not match factor size {M}")
    vecs = eig.eigvecs if eig is not None else eigenfactorization(M).eigvecs
    bhat = vecs.T @ load @ vecs
    return SpectralField(vecs @ (bhat / factor.denom) @ vecs.T)


def mass_apply_2d(coeffs: np.ndarray) -> np.ndarray:
    """Load vector of a field: (Mx (x) My) applied to its coefficients."""
    c = np.asarray(coeffs, dtype=float)
    mass = operators_1d(c.shape[0]).mass
    return mass @ c @ mass


def stiffness_apply_2d(coeffs: np.ndarray) -> np.ndarray:
    """Gradient-form load: (Sx (x) My + Mx (x) Sy) applied to coefficients."""
    c = np.asarray(coeffs, dtype=float)
    ops = operators_1d(c.shape[0])
    return ops.stiffness @ c @ ops.mass + ops.mass @ c @ ops.stiffness


def norms(v: SpectralField) -> tuple[float, float]:
    """(L2 norm, H1 seminorm) of a field."""
    c = v.coeffs
    l2_sq = float(np.sum(c * mass_apply_2d(c)))
    h1_sq = float(np.sum(c * stiffness_apply_2d(c)))
    return np.sqrt(max(l2_sq, 0.0)), np.sqrt(max(h1_sq, 0.0))


def _check_compatible(v: SpectralField) -> None:
    mean = v.coeffs[0, 0]
    l2, _ = norms(v)
    if abs(mean) > 1e-10 * l2:
        raise CompatibilityError(
            f"pure-Neumann solve needs zero-mean data: |mean|={abs(mean):.3e} vs ||v||={l2:.3e}"
        )


def poisson_neumann(rhs: SpectralField) -> SpectralField:
    """Zero-mean solution u of (grad u, grad w) = (rhs, w) for all test w.

    The inverse Neumann Laplacian on mean-free data: per-mode division by
    lam_i + lam_j with the zero mode pinned to 0.
    """
    _check_compatible(rhs)
    M = rhs.M
    vecs, _, lam2 = _mode_maps(M)
    ahat = to_modes(rhs.coeffs, M)
    uhat = np.zeros_like(ahat)
    mask = lam2 > 0.0
    uhat[mask] = ahat[mask] / lam2[mask]
    return SpectralField(vecs @ uhat @ vecs.T)


def hminus1_norm(v: SpectralField) -> float:
    """Negative-order norm sqrt((v, -Lap^{-1} v)) of a zero-mean field."""
    _check_compatible(v)
    _, _, lam2 = _mode_maps(v.M)
    ahat = to_modes(v.coeffs, v.M)
    mask = lam2 > 0.0
    return float(np.sqrt(np.sum(ahat[mask] ** 2 / lam2[mask])))


def project_grid(grid: GridField) -> SpectralField:
    """L2 projection of grid data onto the Galerkin space (mass solve)."""
    load = galerkin_inner(grid)
    mass = operators_1d(grid.M).mass
    tmp = np.linalg.solve(mass, load)
    return SpectralField(np.linalg.solve(mass, tmp.T).T)
