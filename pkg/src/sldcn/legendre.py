"""Legendre polynomials, Gauss quadrature, and the 2-D Galerkin transforms.

The Galerkin space on [-1,1]^2 is the tensor product of full polynomial
spaces: the 1-D basis is phi_k = L_k, the Legendre polynomial of degree k,
for k = 0..M-1.  Homogeneous Neumann conditions are natural in the weak
form, so the trial space carries no boundary constraint; only phi_0 has a
nonzero integral, which keeps the conserved zero mode a single
coefficient.  (Short difference combinations like L_k - L_{k+2} vanish at
the endpoints and span a strict subspace that cannot represent x^2 at any
resolution, which destroys spectral accuracy; the full space avoids that.)

Nonlinear terms are evaluated on a doubled tensor-product Gauss grid (2M
points per direction for M basis functions) to cut aliasing in the
projected loads, so the transforms here map between M x M coefficient
tensors and 2M x 2M grids.  Transforms apply dense evaluation matrices per
dimension; at the target resolutions (M <= 255) this is cheap and exactly
reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

_NEWTON_TOL = 1e-14
_NEWTON_MAX_ITER = 100


def _legendre_table(n_max: int, x: np.ndarray) -> np.ndarray:
    """Values of L_0..L_n_max at the points x, shape (len(x), n_max+1)."""
    x = np.asarray(x, dtype=float)
    table = np.empty((x.size, n_max + 1))
    table[:, 0] = 1.0
    if n_max >= 1:
        table[:, 1] = x
    for k in range(1, n_max):
        table[:, k + 1] = ((2 * k + 1) * x * table[:, k] - k * table[:, k - 1]) / (k + 1)
    return table


def _legendre_deriv_table(n_max: int, x: np.ndarray) -> np.ndarray:
    """Values of L_0'..L_n_max' at x; recurrence valid at the endpoints too."""
    x = np.asarray(x, dtype=float)
    vals = _legendre_table(n_max, x)
    table = np.zeros((x.size, n_max + 1))
    if n_max >= 1:
        table[:, 1] = 1.0
    # L'_{k+1} = L'_{k-1} + (2k+1) L_k
    for k in range(1, n_max):
        table[:, k + 1] = table[:, k - 1] + (2 * k + 1) * vals[:, k]
    return table


def legendre_eval(k: int, x):
    """L_k(x) via the three-term recurrence; x may be a scalar or an array."""
    if k < 0:
        raise ValueError("degree must be nonnegative")
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.abs(arr) > 1.0 + 1e-12):
        raise ValueError("Legendre evaluation is restricted to [-1, 1]")
    out = _legendre_table(k, arr)[:, k]
    return float(out[0]) if np.isscalar(x) or np.asarray(x).ndim == 0 else out


def legendre_deriv(k: int, x):
    """L_k'(x); companion of :func:`legendre_eval`."""
    if k < 0:
        raise ValueError("degree must be nonnegative")
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.abs(arr) > 1.0 + 1e-12):
        raise ValueError("Legendre evaluation is restricted to [-1, 1]")
    out = _legendre_deriv_table(k, arr)[:, k]
    return float(out[0]) if np.isscalar(x) or np.asarray(x).ndim == 0 else out


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes (strictly increasing, in (-1,1)) and weights."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return self.nodes.size


def gauss_legendre(n: int) -> QuadratureRule:
    """n-point Gauss-Legendre rule on [-1, 1].

    Nodes are the roots of L_n, found by Newton iteration from Chebyshev
    initial guesses to an increment tolerance of 1e-14; weights are the
    classical 2 / ((1-x^2) L_n'(x)^2).  Exact for polynomials of degree
    <= 2n-1.
    """
    if n < 1:
        raise ValueError("rule size must be >= 1")
    if n == 1:
        return QuadratureRule(np.zeros(1), np.full(1, 2.0))
    k = np.arange(n)
    x = np.cos(np.pi * (4 * k + 3) / (4 * n + 2))
    for _ in range(_NEWTON_MAX_ITER):
        table = _legendre_table(n, x)
        p = table[:, n]
        dp = n * (table[:, n - 1] - x * p) / (1.0 - x * x)
        dx = p / dp
        x -= dx
        if np.max(np.abs(dx)) < _NEWTON_TOL:
            break
    else:
        raise RuntimeError(f"Gauss node iteration failed to converge for n={n}")
    # one polishing step, then symmetrize so paired nodes cancel exactly
    table = _legendre_table(n, x)
    p = table[:, n]
    dp = n * (table[:, n - 1] - x * p) / (1.0 - x * x)
    x -= p / dp
    x = 0.5 * (x - x[::-1])
    table = _legendre_table(n, x)
    p = table[:, n]
    dp = n * (table[:, n - 1] - x * p) / (1.0 - x * x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    w = 0.5 * (w + w[::-1])
    order = np.argsort(x)
    return QuadratureRule(np.ascontiguousarray(x[order]), np.ascontiguousarray(w[order]))


@dataclass(frozen=True)
class Basis1D:
    """The 1-D Galerkin basis of dimension M: phi_k = L_k, k = 0..M-1.

    The combination table maps each basis index to its Legendre
    (degree, coefficient) terms; for this basis every function is a single
    Legendre polynomial, so the span is the full space of polynomials of
    degree < M.
    """

    M: int

    def __post_init__(self) -> None:
        if self.M < 1:
            raise ValueError("basis dimension must be >= 1")

    def terms(self, k: int) -> tuple[tuple[int, float], ...]:
        """Legendre (degree, coefficient) pairs of basis function k."""
        if not 0 <= k < self.M:
            raise ValueError(f"basis index {k} out of range for M={self.M}")
        return ((k, 1.0),)

    @property
    def max_degree(self) -> int:
        return self.M - 1


def basis_matrix(M: int, x: np.ndarray) -> np.ndarray:
    """Evaluation matrix phi_k(x_i), shape (len(x), M)."""
    basis = Basis1D(M)
    table = _legendre_table(basis.max_degree, np.asarray(x, dtype=float))
    out = np.zeros((table.shape[0], M))
    for k in range(M):
        for deg, c in basis.terms(k):
            out[:, k] += c * table[:, deg]
    return out


def basis_deriv_matrix(M: int, x: np.ndarray) -> np.ndarray:
    """Derivative evaluation matrix phi_k'(x_i), shape (len(x), M)."""
    basis = Basis1D(M)
    table = _legendre_deriv_table(basis.max_degree, np.asarray(x, dtype=float))
    out = np.zeros((table.shape[0], M))
    for k in range(M):
        for deg, c in basis.terms(k):
            out[:, k] += c * table[:, deg]
    return out


@dataclass
class SpectralField:
    """Coefficient tensor of a function in the 2-D Galerkin basis.

    Entry (k, j) multiplies phi_k(x) phi_j(y).
    """

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        self.coeffs = np.ascontiguousarray(self.coeffs, dtype=float)
        if self.coeffs.ndim != 2 or self.coeffs.shape[0] != self.coeffs.shape[1]:
            raise ValueError("coefficients must form a square 2-D tensor")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("coefficients must be finite")

    @property
    def M(self) -> int:
        return self.coeffs.shape[0]

    def copy(self) -> "SpectralField":
        return SpectralField(self.coeffs.copy())


@dataclass
class GridField:
    """Point values on the dealiased 2M x 2M tensor-product Gauss grid."""

    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.ascontiguousarray(self.values, dtype=float)
        if (
            self.values.ndim != 2
            or self.values.shape[0] != self.values.shape[1]
            or self.values.shape[0] % 2
        ):
            raise ValueError("grid values must form a square tensor of even size 2M")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must be finite")

    @property
    def M(self) -> int:
        return self.values.shape[0] // 2


@lru_cache(maxsize=32)
def dealias_transform(M: int) -> tuple[QuadratureRule, np.ndarray, np.ndarray]:
    """Cached (rule, Phi, W Phi) for the 2M-point grid of an M-dim basis.

    Phi has shape (2M, M) with Phi[i, k] = phi_k(x_i); the weighted copy
    has rows scaled by the quadrature weights.
    """
    rule = gauss_legendre(2 * M)
    phi = basis_matrix(M, rule.nodes)
    return rule, phi, rule.weights[:, None] * phi


def synthesize(field: SpectralField) -> GridField:
    """Evaluate the Galerkin expansion on the dealiased 2M x 2M grid."""
    _, phi, _ = dealias_transform(field.M)
    return GridField(phi @ field.coeffs @ phi.T)


def galerkin_inner(values) -> np.ndarray:
    """Inner products (g, phi_k phi_j) of grid data g, by 2M-point quadrature.

    Accepts a :class:`GridField` or a bare 2M x 2M array; returns the M x M
    load tensor.
    """
    g = values.values if isinstance(values, GridField) else np.asarray(values, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] % 2:
        raise ValueError("grid values must form a square tensor of even size 2M")
    M = g.shape[0] // 2
    _, _, phi_w = dealias_transform(M)
    return phi_w.T @ g @ phi_w
