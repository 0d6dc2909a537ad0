"""Compiled solver kernels; contracts identical to the numpy backend."""

from __future__ import annotations

import numpy as np
from numba import njit

FD_EPS = 1e-7


@njit(cache=True)
def rates(u, y, yp, k):
    nc, n = u.shape
    nr = k.shape[0]
    f = np.zeros((nc, n))
    for c in range(nc):
        for r in range(nr):
            mono = k[r]
            for s in range(n):
                ys = y[r, s]
                if ys != 0.0:
                    mono *= u[c, s] ** ys
            for i in range(n):
                dy = yp[r, i] - y[r, i]
                if dy != 0.0:
                    f[c, i] += dy * mono
    return f


@njit(cache=True)
def face_fluxes(u, h, a0, amat):
    nc, n = u.shape
    flux = np.empty((nc - 1, n))
    um = np.empty(n)
    du = np.empty(n)
    for c in range(nc - 1):
        for j in range(n):
            um[j] = 0.5 * (u[c, j] + u[c + 1, j])
            du[j] = (u[c + 1, j] - u[c, j]) / h
        for i in range(n):
            crowd = a0[i]
            cross = 0.0
            for j in range(n):
                crowd += amat[i, j] * um[j]
                cross += amat[i, j] * du[j]
            flux[c, i] = crowd * du[i] + um[i] * cross
    return flux


@njit(cache=True)
def residual(w, uprev, dt, h, a0, amat, y, yp, k):
    nc, n = w.shape
    nr = k.shape[0]
    u = np.exp(w)
    g = np.empty((nc, n))
    for c in range(nc):
        for i in range(n):
            g[c, i] = u[c, i] - uprev[c, i]
        for r in range(nr):
            mono = k[r]
            for s in range(n):
                ys = y[r, s]
                if ys != 0.0:
                    mono *= u[c, s] ** ys
            for i in range(n):
                dy = yp[r, i] - y[r, i]
                if dy != 0.0:
                    g[c, i] -= dt * dy * mono
    coef = dt / h
    um = np.empty(n)
    du = np.empty(n)
    for c in range(nc - 1):
        for j in range(n):
            um[j] = 0.5 * (u[c, j] + u[c + 1, j])
            du[j] = (u[c + 1, j] - u[c, j]) / h
        for i in range(n):
            crowd = a0[i]
            cross = 0.0
            for j in range(n):
                crowd += amat[i, j] * um[j]
                cross += amat[i, j] * du[j]
            f = crowd * du[i] + um[i] * cross
            g[c, i] -= coef * f
            g[c + 1, i] += coef * f
    return g


@njit(cache=True)
def jacobian_blocks(w, uprev, dt, h, a0, amat, y, yp, k, base, fd_eps=FD_EPS):
    nc, n = w.shape
    sub = np.zeros((nc, n, n))
    diag = np.zeros((nc, n, n))
    sup = np.zeros((nc, n, n))
    wp = np.empty_like(w)
    for color in range(3):
        for j in range(n):
            wp[:] = w
            for c in range(color, nc, 3):
                wp[c, j] += fd_eps * (1.0 + abs(w[c, j]))
            gp = residual(wp, uprev, dt, h, a0, amat, y, yp, k)
            for c in range(color, nc, 3):
                delta = fd_eps * (1.0 + abs(w[c, j]))
                for i in range(n):
                    diag[c, i, j] = (gp[c, i] - base[c, i]) / delta
                if c >= 1:
                    for i in range(n):
                        sup[c - 1, i, j] = (gp[c - 1, i] - base[c - 1, i]) / delta
                if c + 1 < nc:
                    for i in range(n):
                        sub[c + 1, i, j] = (gp[c + 1, i] - base[c + 1, i]) / delta
    return sub, diag, sup


@njit(cache=True)
def solve_block_tridiag(sub, diag, sup, rhs):
    nc, n = rhs.shape
    dmod = diag.copy()
    r = rhs.copy()
    for c in range(1, nc):
        mult = np.linalg.solve(dmod[c - 1].T.copy(), sub[c].T.copy()).T
        dmod[c] -= mult @ sup[c - 1]
        r[c] -= mult @ r[c - 1].copy()
    x = np.empty((nc, n))
    x[nc - 1] = np.linalg.solve(dmod[nc - 1].copy(), r[nc - 1].copy())
    for c in range(nc - 2, -1, -1):
        x[c] = np.linalg.solve(dmod[c].copy(), r[c] - sup[c] @ x[c + 1])
    return x
