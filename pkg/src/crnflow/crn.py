"""Reaction-network algebra.

Mass-action rates, conservation laws, the complex/linkage decomposition,
deficiency, and complex-balanced equilibria.  A network is a list of
reactions y -> y' with positive rate constants acting on nonnegative species
densities.  Everything in this module is exact bookkeeping plus small dense
numerics; nothing here depends on the PDE solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import MassNotReachable, NoComplexBalance

__all__ = [
    "Reaction",
    "ReactionNetwork",
    "ConservationBasis",
    "ComplexDecomposition",
    "EquilibriumResult",
    "BoundaryFace",
    "stoich_arrays",
    "mass_action_rates",
    "conservation_basis",
    "complex_decomposition",
    "deficiency",
    "complex_balance_residual",
    "find_complex_balanced_equilibrium",
    "project_equilibrium_to_mass",
    "scan_boundary_equilibria",
]


@dataclass(frozen=True)
class Reaction:
    """One reaction: a reactant complex turned into a product complex at a fixed rate.

    Coefficient tuples are aligned with the owning network's species order.
    """

    reactants: tuple[float, ...]
    products: tuple[float, ...]
    rate: float

    def __post_init__(self):
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise ValueError(f"rate constant must be positive and finite, got {self.rate!r}")
        if len(self.reactants) != len(self.products):
            raise ValueError("reactant and product coefficient tuples differ in length")
        if any(c < 0 or not math.isfinite(c) for c in self.reactants + self.products):
            raise ValueError("stoichiometric coefficients must be finite and nonnegative")
        if self.reactants == self.products:
            raise ValueError("reaction must change at least one species")


@dataclass(frozen=True)
class ReactionNetwork:
    """An ordered species list plus the reactions acting on it."""

    species: tuple[str, ...]
    reactions: tuple[Reaction, ...]

    def __post_init__(self):
        if len(set(self.species)) != len(self.species):
            raise ValueError("duplicate species name")
        n = len(self.species)
        if n == 0 and self.reactions:
            raise ValueError("reactions given but no species declared")
        for rx in self.reactions:
            if len(rx.reactants) != n:
                raise ValueError("reaction coefficient length does not match species count")

    @property
    def n_species(self) -> int:
        return len(self.species)

    @property
    def n_reactions(self) -> int:
        return len(self.reactions)


@dataclass(frozen=True)
class ConservationBasis:
    """Basis of linear conserved quantities.

    ``matrix`` has one conserved combination per row; every reaction vector
    y' - y lies in its kernel.  ``integral`` records whether the rows were
    obtained by exact rational elimination (integer entries, canonical
    reduced form) rather than an SVD null space.
    """

    matrix: np.ndarray
    integral: bool

    @property
    def m(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class ComplexDecomposition:
    """Distinct complexes of a network and their connectivity.

    ``complexes`` lists coefficient tuples in first-appearance order;
    ``source_index``/``target_index`` map each reaction to its endpoint
    complexes.  ``linkage_labels`` assigns each complex to a weakly connected
    component of the reaction graph.
    """

    complexes: tuple[tuple[float, ...], ...]
    source_index: tuple[int, ...]
    target_index: tuple[int, ...]
    linkage_labels: tuple[int, ...]
    stoich_dim: int
    weakly_reversible: bool

    @property
    def n_complexes(self) -> int:
        return len(self.complexes)

    @property
    def n_linkage_classes(self) -> int:
        return len(set(self.linkage_labels))

    @property
    def deficiency(self) -> int:
        return self.n_complexes - self.n_linkage_classes - self.stoich_dim


@dataclass(frozen=True)
class EquilibriumResult:
    """A positive complex-balanced state together with its certificate numbers."""

    u: np.ndarray
    residual: float
    mass: np.ndarray
    iterations: int


@dataclass(frozen=True)
class BoundaryFace:
    """One face of the positive orthant examined by the boundary scan."""

    zero_species: tuple[str, ...]
    u: np.ndarray
    residual: float
    mass_feasible: bool
    note: str = ""


@lru_cache(maxsize=128)
def _stoich_cached(network: ReactionNetwork):
    n = network.n_species
    nr = network.n_reactions
    y = np.zeros((nr, n))
    yp = np.zeros((nr, n))
    k = np.zeros(nr)
    for r, rx in enumerate(network.reactions):
        y[r] = rx.reactants
        yp[r] = rx.products
        k[r] = rx.rate
    for arr in (y, yp, k):
        arr.setflags(write=False)
    return y, yp, k


def stoich_arrays(network: ReactionNetwork):
    """Dense stoichiometry of a network.

    Returns
    -------
    (y, yp, k)
        Reactant coefficients, product coefficients (both R x n) and the
        rate-constant vector.  Fresh writable copies.
    """
    y, yp, k = _stoich_cached(network)
    return y.copy(), yp.copy(), k.copy()


def mass_action_rates(network: ReactionNetwork, u) -> np.ndarray:
    """Net mass-action production rate of every species at state ``u``.

    Uses the convention 0**0 = 1 so species absent from a reactant complex
    do not gate the reaction.
    """
    u = np.asarray(u, dtype=float)
    if u.shape != (network.n_species,):
        raise ValueError(f"state has shape {u.shape}, expected ({network.n_species},)")
    if np.any(u < 0):
        raise ValueError("negative species density")
    if network.n_reactions == 0:
        return np.zeros(network.n_species)
    y, yp, k = _stoich_cached(network)
    mono = np.prod(np.power(u[None, :], y), axis=1)
    return (yp - y).T @ (k * mono)


def _rref_fraction(rows):
    """Reduced row echelon form over exact rationals.

    Returns the nonzero rows and the pivot column indices.
    """
    rows = [list(r) for r in rows]
    nrow = len(rows)
    ncol = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(ncol):
        piv = next((i for i in range(r, nrow) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        lead = rows[r][c]
        rows[r] = [x / lead for x in rows[r]]
        for i in range(nrow):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrow:
            break
    return rows[:r], pivots


def _rational_nullspace(rows, ncol):
    """Canonical rational basis (as rows) of the kernel of the given matrix."""
    rref, pivots = _rref_fraction(rows)
    free = [c for c in range(ncol) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncol
        v[f] = Fraction(1)
        for ri, pc in enumerate(pivots):
            v[pc] = -rref[ri][f]
        basis.append(v)
    if not basis:
        return []
    canon, _ = _rref_fraction(basis)
    return canon


def _primitive_int_row(row):
    """Scale a rational row to coprime integers with a positive leading entry."""
    den = 1
    for x in row:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in row]
    g = 0
    for v in ints:
        g = math.gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    lead = next((v for v in ints if v != 0), 1)
    if lead < 0:
        ints = [-v for v in ints]
    return ints


def conservation_basis(network: ReactionNetwork) -> ConservationBasis:
    """Left kernel of the stoichiometric vectors, one conserved total per row.

    With all-integer stoichiometry the basis is computed by exact rational
    elimination and scaled to coprime integer rows in canonical reduced form,
    so the result is reproducible down to the last digit.  Otherwise an SVD
    null space is used with singular values below 1e-10 times the largest one
    treated as zero.
    """
    n = network.n_species
    y, yp, k = _stoich_cached(network)
    smat = yp - y
    integral = bool(np.all(y == np.round(y)) and np.all(yp == np.round(yp)))
    if integral:
        rows = [[Fraction(int(round(v))) for v in row] for row in smat]
        basis = _rational_nullspace(rows, n)
        if basis:
            q = np.array([_primitive_int_row(r) for r in basis], dtype=float)
        else:
            q = np.zeros((0, n))
        return ConservationBasis(q, True)
    if network.n_reactions == 0:
        return ConservationBasis(np.eye(n), False)
    _, sing, vh = np.linalg.svd(smat)
    rank = int(np.sum(sing > 1e-10 * sing[0]))
    q = vh[rank:].copy()
    for row in q:
        lead = next((v for v in row if abs(v) > 1e-8), 1.0)
        if lead < 0:
            row *= -1.0
    return ConservationBasis(q, False)


@lru_cache(maxsize=128)
def complex_decomposition(network: ReactionNetwork) -> ComplexDecomposition:
    """Group reaction endpoints into distinct complexes and classify the graph.

    Linkage classes are the weakly connected components of the directed
    complex graph; the network is weakly reversible when every edge has its
    endpoints in a common strongly connected component.
    """
    y, yp, _ = _stoich_cached(network)
    index: dict[tuple[float, ...], int] = {}
    complexes: list[tuple[float, ...]] = []
    src = []
    dst = []
    for r in range(network.n_reactions):
        for vec, slot in ((y[r], src), (yp[r], dst)):
            key = tuple(vec.tolist())
            if key not in index:
                index[key] = len(complexes)
                complexes.append(key)
            slot.append(index[key])
    c = len(complexes)
    s_dim = network.n_species - conservation_basis(network).m
    if c == 0:
        return ComplexDecomposition((), (), (), (), s_dim, True)
    adj = np.zeros((c, c))
    for a, b in zip(src, dst):
        adj[a, b] = 1.0
    _, weak = connected_components(adj, directed=True, connection="weak")
    _, strong = connected_components(adj, directed=True, connection="strong")
    weakly_reversible = all(strong[a] == strong[b] for a, b in zip(src, dst))
    return ComplexDecomposition(
        tuple(complexes),
        tuple(src),
        tuple(dst),
        tuple(int(v) for v in weak),
        s_dim,
        weakly_reversible,
    )


def deficiency(network: ReactionNetwork) -> int:
    """Number of complexes minus linkage classes minus stoichiometric dimension."""
    return complex_decomposition(network).deficiency


def complex_balance_residual(network: ReactionNetwork, u) -> np.ndarray:
    """Net flow through every complex at a positive state.

    Each reaction contributes ``+k * u**y`` at its source complex and the
    same amount negated at its target, so the flow bookkeeping cancels
    exactly and the residuals sum to zero up to rounding of the per-complex
    partial sums.  The residual vector is ordered like
    :func:`complex_decomposition`.
    """
    u = np.asarray(u, dtype=float)
    if u.shape != (network.n_species,):
        raise ValueError(f"state has shape {u.shape}, expected ({network.n_species},)")
    if np.any(u <= 0):
        raise ValueError("complex balance residual requires a strictly positive state")
    decomp = complex_decomposition(network)
    res = np.zeros(decomp.n_complexes)
    if network.n_reactions == 0:
        return res
    y, yp, k = _stoich_cached(network)
    flows = k * np.prod(np.power(u[None, :], y), axis=1)
    np.add.at(res, np.asarray(decomp.source_index), flows)
    np.add.at(res, np.asarray(decomp.target_index), -flows)
    return res


def _gauss_newton(residual_fn, w0, stop, max_iter=200, step_cap=10.0):
    """Damped Gauss-Newton in log coordinates.

    ``residual_fn(w) -> (res, jac)``; ``stop(w, res) -> bool`` decides scaled
    convergence.  Steps use the minimum-norm least-squares direction (the
    Jacobian is rank deficient along conserved directions) with Armijo
    backtracking on the squared residual norm.
    """
    w = np.array(w0, dtype=float)
    res, jac = residual_fn(w)
    phi = float(res @ res)
    its = 0
    for its in range(1, max_iter + 1):
        if stop(w, res):
            return w, res, its - 1, True
        d = np.linalg.lstsq(jac, -res, rcond=None)[0]
        dmax = np.max(np.abs(d)) if d.size else 0.0
        if not np.isfinite(dmax) or dmax == 0.0:
            return w, res, its, False
        if dmax > step_cap:
            d *= step_cap / dmax
        lam = 1.0
        moved = False
        while lam >= 1e-8:
            wt = w + lam * d
            rt, jt = residual_fn(wt)
            pt = float(rt @ rt)
            if np.isfinite(pt) and pt <= (1.0 - 1e-4 * lam) * phi:
                w, res, jac, phi = wt, rt, jt, pt
                moved = True
                break
            lam *= 0.5
        if not moved:
            return w, res, its, stop(w, res)
    return w, res, max_iter, stop(w, res)


def _balance_problem(network):
    """Closures evaluating complex in/out flows and their log-space Jacobian."""
    y, yp, k = _stoich_cached(network)
    decomp = complex_decomposition(network)
    src = np.asarray(decomp.source_index)
    dst = np.asarray(decomp.target_index)
    nc = decomp.n_complexes
    logk = np.log(k)

    def evaluate(w):
        flows = np.exp(logk + y @ w)
        res = np.zeros(nc)
        np.add.at(res, src, flows)
        np.add.at(res, dst, -flows)
        jac = np.zeros((nc, w.size))
        contrib = flows[:, None] * y
        np.add.at(jac, src, contrib)
        np.add.at(jac, dst, -contrib)
        out = np.zeros(nc)
        np.add.at(out, src, flows)
        return res, jac, out

    return evaluate


def find_complex_balanced_equilibrium(
    network: ReactionNetwork,
    seed: int = 0,
    *,
    starts: int = 16,
    tol_factor: float = 1e-10,
    max_iter: int = 200,
) -> EquilibriumResult:
    """Search for a positive state where every complex has zero net flow.

    Runs damped Gauss-Newton on the summed squared complex flows in log
    coordinates from ``starts`` seeded random points and keeps the best
    result.  A candidate is accepted when its largest residual is at most
    ``tol_factor * (1 + largest complex outflow)``; candidates whose
    components span more than eight orders of magnitude are treated as
    escapes toward the orthant boundary and rejected, which is what happens
    for networks that are not weakly reversible.
    """
    if network.n_reactions == 0:
        raise ValueError("network has no reactions")
    n = network.n_species
    evaluate = _balance_problem(network)

    def residual_jac(w):
        res, jac, _ = evaluate(w)
        return res, jac

    def stop(w, res):
        out = evaluate(w)[2]
        return float(np.max(np.abs(res))) <= 0.05 * tol_factor * (1.0 + float(np.max(out)))

    rng = np.random.default_rng(seed)
    best = None
    for w0 in rng.uniform(-2.0, 2.0, size=(starts, n)):
        w, res, its, _ = _gauss_newton(residual_jac, w0, stop, max_iter=max_iter)
        out = evaluate(w)[2]
        scaled = float(np.max(np.abs(res))) / (1.0 + float(np.max(out)))
        u = np.exp(w)
        if np.min(u) < 1e-8 * np.max(u):
            continue
        if best is None or scaled < best[0]:
            best = (scaled, u, float(np.max(np.abs(res))), its)
    if best is None or best[0] > tol_factor:
        detail = "all starts escaped toward the boundary" if best is None else (
            f"best scaled residual {best[0]:.3e} after {starts} starts"
        )
        raise NoComplexBalance(
            f"no positive complex-balanced equilibrium found ({detail})"
        )
    _, u, resmax, its = best
    q = conservation_basis(network).matrix
    return EquilibriumResult(u, resmax, q @ u, its)


def project_equilibrium_to_mass(
    network: ReactionNetwork,
    u_star,
    q,
    mass,
    *,
    tol: float = 1e-12,
    max_iter: int = 100,
) -> EquilibriumResult:
    """Move an equilibrium along its positive coset to prescribed conserved totals.

    Solves ``Q (u_star * exp(Q^T c)) = mass`` for the multipliers ``c`` by
    Newton iteration on the strictly convex potential
    ``sum_i u_star_i * exp((Q^T c)_i) - mass . c``; the shifted state stays
    complex balanced because every reaction vector is orthogonal to the rows
    of ``Q``.  With no conserved quantities the projection is skipped.
    """
    u_star = np.asarray(u_star, dtype=float)
    if np.any(u_star <= 0):
        raise ValueError("equilibrium to project must be strictly positive")
    q = np.atleast_2d(np.asarray(q, dtype=float))
    m = q.shape[0]
    if m == 0:
        res = complex_balance_residual(network, u_star)
        resmax = float(np.max(np.abs(res))) if res.size else 0.0
        return EquilibriumResult(u_star.copy(), resmax, np.zeros(0), 0)
    mass = np.asarray(mass, dtype=float)
    if mass.shape != (m,):
        raise ValueError(f"mass vector has shape {mass.shape}, expected ({m},)")
    for j in range(m):
        row = q[j]
        if np.all(row >= 0) and np.any(row > 0) and mass[j] <= 0:
            raise MassNotReachable(
                f"conserved total {j} must be positive for a positive state"
            )
        if np.all(row <= 0) and np.any(row < 0) and mass[j] >= 0:
            raise MassNotReachable(
                f"conserved total {j} must be negative for a positive state"
            )
    scale = 1.0 + float(np.max(np.abs(mass)))
    c = np.zeros(m)
    done = 0
    for it in range(1, max_iter + 1):
        expo = q.T @ c
        if np.max(expo) > 500.0:
            raise MassNotReachable("projection multipliers diverged")
        v = u_star * np.exp(expo)
        g = q @ v - mass
        if float(np.max(np.abs(g))) <= tol * scale:
            done = it - 1
            break
        hess = (q * v) @ q.T
        try:
            d = np.linalg.solve(hess, -g)
        except np.linalg.LinAlgError as exc:
            raise MassNotReachable("projection Hessian is singular") from exc
        pot = float(np.sum(v) - mass @ c)
        slope = float(g @ d)
        lam = 1.0
        while True:
            ct = c + lam * d
            vt = u_star * np.exp(np.minimum(q.T @ ct, 500.0))
            pt = float(np.sum(vt) - mass @ ct)
            if pt <= pot + 1e-4 * lam * slope:
                c = ct
                break
            lam *= 0.5
            if lam < 1e-12:
                raise MassNotReachable("projection line search stalled")
    else:
        raise MassNotReachable(f"projection did not converge in {max_iter} iterations")
    u = u_star * np.exp(q.T @ c)
    res = complex_balance_residual(network, u)
    resmax = float(np.max(np.abs(res))) if res.size else 0.0
    return EquilibriumResult(u, resmax, q @ u, done)


def _face_flows(network, u):
    """Complex flows at a possibly boundary state, with exact zero monomials."""
    y, yp, k = _stoich_cached(network)
    decomp = complex_decomposition(network)
    nc = decomp.n_complexes
    flows = np.empty(network.n_reactions)
    for r in range(network.n_reactions):
        t = k[r]
        for s in range(network.n_species):
            ys = y[r, s]
            if ys != 0.0:
                t = t * u[s] ** ys if u[s] > 0.0 else 0.0
        flows[r] = t
    res = np.zeros(nc)
    out = np.zeros(nc)
    np.add.at(res, np.asarray(decomp.source_index), flows)
    np.add.at(res, np.asarray(decomp.target_index), -flows)
    np.add.at(out, np.asarray(decomp.source_index), flows)
    return res, out


def scan_boundary_equilibria(
    network: ReactionNetwork,
    q,
    mass,
    seed: int = 0,
    *,
    tol_factor: float = 1e-10,
) -> list[BoundaryFace]:
    """Look for complex-balanced states on faces of the positive orthant.

    Every nonempty proper subset of species is pinned to zero in turn.  On
    each face a seeded multi-start search first asks whether the conserved
    totals are attainable at all; if the only attainable points push further
    species to zero the face closure is checked directly and reported with
    ``mass_feasible=False`` when balanced.  Otherwise the search minimizes
    balance and mass error jointly and reports the face as feasible when both
    drop below tolerance at a safely positive interior point.  This is a
    numerical certificate, not a proof.
    """
    n = network.n_species
    if n > 16:
        raise ValueError("boundary scan is limited to networks with at most 16 species")
    if network.n_reactions == 0:
        return []
    q = np.atleast_2d(np.asarray(q, dtype=float))
    m = q.shape[0]
    mass = np.asarray(mass, dtype=float).reshape(m)
    mass_scale = 1.0 + (float(np.max(np.abs(mass))) if m else 0.0)
    mass_tol = 1e-8 * mass_scale
    eps_pos = 1e-6 * mass_scale
    rng = np.random.default_rng(seed)
    reports: list[BoundaryFace] = []

    for zbits in range(1, 2**n - 1):
        zero = [i for i in range(n) if zbits >> i & 1]
        alive = [i for i in range(n) if not zbits >> i & 1]
        q_alive = q[:, alive] if m else np.zeros((0, len(alive)))

        def mass_fn(w):
            v = np.exp(w)
            return q_alive @ v - mass, q_alive * v[None, :]

        v_found = None
        if m:
            best = None
            for w0 in rng.uniform(-2.0, 2.0, size=(6, len(alive))):
                w, res, _, _ = _gauss_newton(
                    mass_fn,
                    w0,
                    lambda _w, r: float(np.max(np.abs(r))) <= 0.01 * mass_tol,
                    max_iter=100,
                )
                err = float(np.max(np.abs(res)))
                if best is None or err < best[0]:
                    best = (err, np.exp(w))
            if best[0] > mass_tol:
                continue
            v_found = best[1]

        if v_found is not None and np.min(v_found) < eps_pos:
            u0 = np.zeros(n)
            u0[alive] = np.where(v_found < eps_pos, 0.0, v_found)
            if m and float(np.max(np.abs(q @ u0 - mass))) > mass_tol:
                continue
            res, out = _face_flows(network, u0)
            resmax = float(np.max(np.abs(res)))
            if resmax <= tol_factor * (1.0 + float(np.max(out))):
                reports.append(
                    BoundaryFace(
                        tuple(network.species[i] for i in zero),
                        u0,
                        resmax,
                        False,
                        "balanced only where the mass constraint forces further species to zero",
                    )
                )
            continue

        def joint_fn(w):
            u = np.zeros(n)
            u[alive] = np.exp(w)
            bal, _ = _face_flows(network, u)
            jac_bal = _face_balance_jac(network, u, alive)
            if m:
                g, jac_g = mass_fn(w)
                return np.concatenate([bal, g]), np.vstack([jac_bal, jac_g])
            return bal, jac_bal

        accepted = None
        for w0 in rng.uniform(-2.0, 2.0, size=(8, len(alive))):
            w, _, _, _ = _gauss_newton(
                joint_fn, w0, lambda _w, r: float(r @ r) <= 1e-30, max_iter=150
            )
            v = np.exp(w)
            u_face = np.zeros(n)
            u_face[alive] = v
            bal, out = _face_flows(network, u_face)
            balmax = float(np.max(np.abs(bal)))
            ok_bal = balmax <= tol_factor * (1.0 + float(np.max(out)))
            ok_mass = (not m) or float(np.max(np.abs(q @ u_face - mass))) <= mass_tol
            if ok_bal and ok_mass and np.min(v) >= eps_pos:
                accepted = (u_face, balmax)
                break
        if accepted is not None:
            reports.append(
                BoundaryFace(
                    tuple(network.species[i] for i in zero),
                    accepted[0],
                    accepted[1],
                    True,
                    "" if m else "no conserved totals constrain this face",
                )
            )
    return reports


def _face_balance_jac(network, u, alive):
    """Jacobian of the complex flows with respect to log densities of live species."""
    y, yp, k = _stoich_cached(network)
    decomp = complex_decomposition(network)
    nc = decomp.n_complexes
    jac = np.zeros((nc, len(alive)))
    src = decomp.source_index
    dst = decomp.target_index
    for r in range(network.n_reactions):
        t = k[r]
        for s in range(network.n_species):
            ys = y[r, s]
            if ys != 0.0:
                t = t * u[s] ** ys if u[s] > 0.0 else 0.0
        if t == 0.0:
            continue
        for col, s in enumerate(alive):
            ys = y[r, s]
            if ys != 0.0:
                jac[src[r], col] += t * ys
                jac[dst[r], col] -= t * ys
    return jac
