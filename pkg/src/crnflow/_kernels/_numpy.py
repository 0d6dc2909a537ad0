"""Pure-numpy reference implementations of the solver kernels.

Same contracts as the compiled backend: states enter as log densities
``w = log u`` on an N x n cell grid, stoichiometry as dense (R, n) arrays,
and the Jacobian is assembled by finite differences with a three-color cell
perturbation that is exact for the block-tridiagonal sparsity of the scheme.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_banded

FD_EPS = 1e-7


def rates(u, y, yp, k):
    """Net mass-action production rates for every cell, (N, n)."""
    mono = np.prod(np.power(u[:, None, :], y[None, :, :]), axis=2)
    return mono @ (k[:, None] * (yp - y))


def face_fluxes(u, h, a0, amat):
    """Diffusive fluxes ``A(mean u) * du/h`` on the N-1 interior faces."""
    um = 0.5 * (u[1:] + u[:-1])
    du = (u[1:] - u[:-1]) / h
    return (a0[None, :] + um @ amat.T) * du + um * (du @ amat.T)


def residual(w, uprev, dt, h, a0, amat, y, yp, k):
    """Implicit Euler residual ``u - uprev - dt*(div flux + f(u))`` at ``u = exp(w)``."""
    n = w.shape[1]
    with np.errstate(over="ignore", invalid="ignore"):
        u = np.exp(w)
        flux = face_fluxes(u, h, a0, amat)
        zero = np.zeros((1, n))
        div = np.diff(flux, axis=0, prepend=zero, append=zero)
        return u - uprev - (dt / h) * div - dt * rates(u, y, yp, k)


def jacobian_blocks(w, uprev, dt, h, a0, amat, y, yp, k, base, fd_eps=FD_EPS):
    """Finite-difference Jacobian in block-tridiagonal form.

    Returns ``(sub, diag, sup)`` of shape (N, n, n) where ``diag[c]`` holds
    the derivatives of the residual at cell c with respect to ``w`` at cells
    c-1, c, c+1 respectively.  Cells of equal index mod 3 are perturbed
    together, so the full Jacobian costs 3n residual evaluations.
    """
    nc, n = w.shape
    sub = np.zeros((nc, n, n))
    diag = np.zeros((nc, n, n))
    sup = np.zeros((nc, n, n))
    cells = np.arange(nc)
    for color in range(3):
        group = cells[cells % 3 == color]
        if group.size == 0:
            continue
        for j in range(n):
            wp = w.copy()
            delta = fd_eps * (1.0 + np.abs(w[group, j]))
            wp[group, j] += delta
            dg = residual(wp, uprev, dt, h, a0, amat, y, yp, k) - base
            diag[group, :, j] = dg[group] / delta[:, None]
            has_left = group >= 1
            left = group[has_left]
            sup[left - 1, :, j] = dg[left - 1] / delta[has_left, None]
            has_right = group + 1 < nc
            right = group[has_right]
            sub[right + 1, :, j] = dg[right + 1] / delta[has_right, None]
    return sub, diag, sup


def solve_block_tridiag(sub, diag, sup, rhs):
    """Solve the block-tridiagonal system via a banded LU factorization."""
    nc, n = rhs.shape
    nb = 2 * n - 1
    ab = np.zeros((2 * nb + 1, nc * n))
    cells = np.arange(nc)
    for blocks, off in ((diag, 0), (sup, 1), (sub, -1)):
        valid = (cells + off >= 0) & (cells + off < nc)
        cols_base = (cells[valid] + off) * n
        for i in range(n):
            for j in range(n):
                ab[nb + i - j - off * n, cols_base + j] = blocks[valid, i, j]
    x = solve_banded((nb, nb), ab, rhs.reshape(-1))
    return x.reshape(nc, n)
