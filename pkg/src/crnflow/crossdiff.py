"""Cross-diffusion coefficients and the entropy dissipation inequality.

The diffusion matrix is ``A_ij(u) = delta_ij (a_i0 + sum_k a_ik u_k) + a_ij u_i``.
The quadratic form ``sum_i (1/u_i) (A(u) g)_i . g_i`` admits an explicit lower
bound under either of two structural conditions on the coefficient matrix:
a positive weak-cross constant alpha, or symmetry (detailed balance).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NeitherConditionHolds

__all__ = [
    "DiffusionParams",
    "diffusion_matrix",
    "weak_cross_alpha",
    "is_detailed_balanced",
    "validate_structure",
    "dissipation_form",
    "dissipation_lower_bound",
]


@dataclass(frozen=True)
class DiffusionParams:
    """Constant coefficients of the diffusion matrix.

    ``a0`` holds the density-independent self-diffusion floors, ``a`` the
    crowding coefficients (row i scales how every species k enhances the
    self-diffusion of species i, and a_ij itself drives the cross term).
    """

    a0: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        a0 = np.asarray(self.a0, dtype=float)
        a = np.asarray(self.a, dtype=float)
        n = a0.shape[0] if a0.ndim == 1 else -1
        if a0.ndim != 1 or a.shape != (n, n):
            raise ValueError("a0 must be a vector and a a matching square matrix")
        if not (np.all(np.isfinite(a0)) and np.all(np.isfinite(a))):
            raise ValueError("diffusion coefficients must be finite")
        if np.any(a0 < 0) or np.any(a < 0):
            raise ValueError("diffusion coefficients must be nonnegative")
        object.__setattr__(self, "a0", a0)
        object.__setattr__(self, "a", a)

    @property
    def n_species(self) -> int:
        return self.a0.shape[0]


def diffusion_matrix(params: DiffusionParams, u) -> np.ndarray:
    """Evaluate ``A(u)`` at a nonnegative state."""
    u = np.asarray(u, dtype=float)
    if u.shape != (params.n_species,):
        raise ValueError(f"state has shape {u.shape}, expected ({params.n_species},)")
    if np.any(u < 0):
        raise ValueError("negative species density")
    return np.diag(params.a0 + params.a @ u) + params.a * u[:, None]


def weak_cross_alpha(params: DiffusionParams) -> float:
    """The weak-cross constant ``min_i (a_ii - 1/4 sum_j (sqrt(a_ij) - sqrt(a_ji))^2)``.

    Positive alpha certifies the quadratic-form lower bound with an
    ``alpha * sum_i |g_i|^2`` term even for asymmetric coefficients.
    """
    root = np.sqrt(params.a)
    gap = root - root.T
    return float(np.min(np.diag(params.a) - 0.25 * np.sum(gap**2, axis=1)))


def is_detailed_balanced(params: DiffusionParams, rtol: float = 1e-14) -> bool:
    """Whether the crowding matrix is symmetric up to relative rounding."""
    amax = float(np.max(np.abs(params.a))) if params.a.size else 0.0
    return float(np.max(np.abs(params.a - params.a.T))) <= rtol * amax


def validate_structure(params: DiffusionParams) -> str:
    """Check the hypotheses under which entropy decay is guaranteed.

    Requires positive self-diffusion floors and diagonal crowding plus one of
    the two structural conditions; returns which condition applies
    (``"detailed_balance"`` wins when both hold) or raises
    :class:`NeitherConditionHolds`.
    """
    if np.any(params.a0 <= 0):
        raise NeitherConditionHolds("self-diffusion floors a_i0 must all be positive")
    if np.any(np.diag(params.a) <= 0):
        raise NeitherConditionHolds("diagonal crowding coefficients a_ii must all be positive")
    if is_detailed_balanced(params):
        return "detailed_balance"
    if weak_cross_alpha(params) > 0:
        return "weak_cross"
    raise NeitherConditionHolds(
        "crowding matrix is neither symmetric nor weakly cross-diffusive"
        f" (alpha = {weak_cross_alpha(params):.3e})"
    )


def _as_gradients(g, n):
    g = np.asarray(g, dtype=float)
    if g.ndim == 1:
        g = g[:, None]
    if g.ndim != 2 or g.shape[0] != n:
        raise ValueError(f"gradient block must be (n,) or (n, d), got shape {g.shape}")
    return g


def dissipation_form(params: DiffusionParams, u, g) -> float:
    """The quadratic form ``sum_i (1/u_i) (A(u) g)_i . g_i``.

    ``g`` stacks one gradient row per species; a 1-D input is treated as a
    single spatial dimension.
    """
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0):
        raise ValueError("dissipation form requires a strictly positive state")
    g = _as_gradients(g, params.n_species)
    amat = diffusion_matrix(params, u)
    return float(np.sum((amat @ g) * g / u[:, None]))


def dissipation_lower_bound(params: DiffusionParams, u, g) -> float:
    """Certified lower bound for :func:`dissipation_form` at the same arguments.

    Under detailed balance (used whenever the matrix is symmetric)::

        sum_i a_i0 |g_i|^2 / u_i + 2 sum_i a_ii |g_i|^2
            + 2 sum_{i != j} a_ij |(sqrt(u_j/u_i) g_i + sqrt(u_i/u_j) g_j) / 2|^2

    and for symmetric coefficients the bound coincides with the form up to
    rounding.  Otherwise, with alpha = :func:`weak_cross_alpha` positive::

        sum_i a_i0 |g_i|^2 / u_i + alpha sum_i |g_i|^2
    """
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0):
        raise ValueError("dissipation bound requires a strictly positive state")
    g = _as_gradients(g, params.n_species)
    fisher = float(np.sum(params.a0[:, None] * g**2 / u[:, None]))
    if is_detailed_balanced(params):
        diag = 2.0 * float(np.sum(np.diag(params.a)[:, None] * g**2))
        ratio = np.sqrt(u[None, :] / u[:, None])
        mixed = 0.5 * (ratio[:, :, None] * g[:, None, :] + ratio.T[:, :, None] * g[None, :, :])
        weights = params.a * (1.0 - np.eye(params.n_species))
        cross = 2.0 * float(np.sum(weights * np.sum(mixed**2, axis=2)))
        return fisher + diag + cross
    alpha = weak_cross_alpha(params)
    if alpha <= 0:
        raise NeitherConditionHolds(
            "crowding matrix is neither symmetric nor weakly cross-diffusive"
            f" (alpha = {alpha:.3e})"
        )
    return fisher + alpha * float(np.sum(g**2))
