"""Entropy-stable finite-volume solver for reaction-cross-diffusion systems.

One spatial dimension, uniform cells, zero-flux boundaries.  Each implicit
Euler step solves for the log densities ``w = log u`` with a damped Newton
iteration, so positivity holds by construction; the Jacobian is assembled by
colored finite differences and solved as a block-tridiagonal system.  Steps
that fail to converge are retried on halved substeps.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as kernels
from .crn import (
    ConservationBasis,
    ReactionNetwork,
    _stoich_cached,
    conservation_basis,
    find_complex_balanced_equilibrium,
    project_equilibrium_to_mass,
    scan_boundary_equilibria,
)
from .crossdiff import DiffusionParams, validate_structure
from .entropy import entropy_production_field, l1_distance, relative_entropy_field
from .errors import StepFailed
from .netparse import RunConfig

__all__ = [
    "Mesh",
    "StepStats",
    "Trajectory",
    "init_field",
    "assemble_fluxes",
    "step_implicit_euler",
    "simulate",
    "format_trajectory_csv",
    "write_trajectory_csv",
]

_MAX_HALVINGS = 10


@dataclass(frozen=True)
class Mesh:
    """Uniform subdivision of the interval [0, length]."""

    length: float
    cells: int

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("mesh length must be positive")
        if self.cells < 2:
            raise ValueError("mesh needs at least 2 cells")

    @property
    def h(self) -> float:
        return self.length / self.cells

    def centers(self) -> np.ndarray:
        return (np.arange(self.cells) + 0.5) * self.h


@dataclass(frozen=True)
class StepStats:
    """Newton work done by one accepted time step."""

    newton_iterations: int
    dt_sub: float
    substeps: int


@dataclass
class Trajectory:
    """Recorded samples of one simulation.

    ``masses`` holds the conserved totals per record; ``total_density`` the
    plain integral of all species, kept for the distance-vs-entropy check.
    Fields that only full simulations populate default to None so that
    post-processing also accepts externally built series.
    """

    times: np.ndarray
    entropy: np.ndarray
    d_diffusion: np.ndarray
    d_reaction: np.ndarray
    l1: np.ndarray
    masses: np.ndarray
    newton_iters: np.ndarray
    total_density: np.ndarray | None = None
    mass_reference: np.ndarray | None = None
    u_inf: np.ndarray | None = None
    basis: ConservationBasis | None = None
    mesh: Mesh | None = None
    final_field: np.ndarray | None = None
    boundary_faces: list = field(default_factory=list)

    @property
    def production(self) -> np.ndarray:
        return self.d_diffusion + self.d_reaction


def init_field(config: RunConfig, mesh: Mesh) -> np.ndarray:
    """Sample the initial profiles at cell centers and floor them positive.

    The floor is ``1e-12`` times the grand mean density, so strictly positive
    log coordinates exist from the first step on; conserved totals are taken
    after flooring.
    """
    centers = mesh.centers()
    u0 = np.column_stack([p.evaluate(centers) for p in config.profiles])
    if np.any(u0 < 0):
        bad = int(np.argmax(np.any(u0 < 0, axis=0)))
        raise ValueError(f"initial profile for {config.network.species[bad]!r} is negative")
    floor = 1e-12 * float(u0.mean())
    return np.maximum(u0, floor)


def _arrays(network: ReactionNetwork, params: DiffusionParams):
    y, yp, k = _stoich_cached(network)
    return (
        np.ascontiguousarray(params.a0, dtype=float),
        np.ascontiguousarray(params.a, dtype=float),
        np.ascontiguousarray(y, dtype=float),
        np.ascontiguousarray(yp, dtype=float),
        np.ascontiguousarray(k, dtype=float),
    )


def assemble_fluxes(params: DiffusionParams, field, mesh: Mesh) -> np.ndarray:
    """Diffusive fluxes on the N-1 interior faces, ``A(face mean) * du/h``.

    Boundary faces are not represented: they carry exactly zero flux and the
    stepper imposes them as such.
    """
    field = np.ascontiguousarray(field, dtype=float)
    a0 = np.ascontiguousarray(params.a0, dtype=float)
    a = np.ascontiguousarray(params.a, dtype=float)
    return kernels.face_fluxes(field, mesh.h, a0, a)


def _newton(w, uprev, dt, h, arrs, tol, max_iter):
    """Damped Newton on the implicit Euler residual; returns (w, iters) or None."""
    a0, amat, y, yp, k = arrs
    g = kernels.residual(w, uprev, dt, h, a0, amat, y, yp, k)
    scale = tol * (1.0 + float(np.max(np.abs(uprev))))
    gnorm2 = float(np.sum(g * g))
    for it in range(max_iter + 1):
        if float(np.max(np.abs(g))) <= scale:
            return w, it
        if it == max_iter:
            return None
        sub, diag, sup = kernels.jacobian_blocks(w, uprev, dt, h, a0, amat, y, yp, k, g)
        d = kernels.solve_block_tridiag(sub, diag, sup, -g)
        if not np.all(np.isfinite(d)):
            return None
        dmax = float(np.max(np.abs(d)))
        if dmax > 20.0:
            d *= 20.0 / dmax
        lam = 1.0
        accepted = False
        while lam >= 2.0**-24:
            wt = w + lam * d
            gt = kernels.residual(wt, uprev, dt, h, a0, amat, y, yp, k)
            gt2 = float(np.sum(gt * gt))
            if np.isfinite(gt2) and gt2 <= (1.0 - 1e-4 * lam) * gnorm2:
                w, g, gnorm2 = wt, gt, gt2
                accepted = True
                break
            lam *= 0.5
        if not accepted:
            return None
    return None


def step_implicit_euler(
    network: ReactionNetwork,
    params: DiffusionParams,
    field,
    mesh: Mesh,
    dt: float,
    tol: float = 1e-10,
    max_iter: int = 50,
):
    """Advance the field by one implicit Euler step of size ``dt``.

    On Newton failure the step is retried as 2, 4, ... substeps (up to
    2**10) composed to cover the same interval.  Returns the new field and a
    :class:`StepStats`; raises :class:`StepFailed` with the last good state
    attached when every retry fails.
    """
    field = np.ascontiguousarray(field, dtype=float)
    if np.any(field <= 0):
        raise ValueError("field must be strictly positive to start a step")
    arrs = _arrays(network, params)
    for halving in range(_MAX_HALVINGS + 1):
        nsub = 2**halving
        sub_dt = dt / nsub
        u = field
        total = 0
        ok = True
        for _ in range(nsub):
            out = _newton(np.log(u), u, sub_dt, mesh.h, arrs, tol, max_iter)
            if out is None:
                ok = False
                break
            w, its = out
            u = np.exp(w)
            total += its
        if ok:
            return u, StepStats(total, sub_dt, nsub)
    raise StepFailed(
        f"implicit step of size {dt:g} failed to converge even on {2**_MAX_HALVINGS}"
        " substeps",
        state=field.copy(),
    )


def simulate(config: RunConfig) -> Trajectory:
    """Run a full simulation described by a configuration.

    Refuses to start unless the network admits a positive complex-balanced
    equilibrium and the diffusion coefficients satisfy one structural
    condition; warns when the boundary scan reports a mass-feasible boundary
    equilibrium (exponential decay to the interior equilibrium is then not
    guaranteed).  Samples are recorded at t = 0 and every ``stride`` steps.
    """
    network = config.network
    params = DiffusionParams(config.a0, config.a)
    validate_structure(params)
    star = find_complex_balanced_equilibrium(network, seed=config.seed)
    basis = conservation_basis(network)
    mesh = Mesh(config.length, config.cells)
    u = init_field(config, mesh)
    mass0 = basis.matrix @ u.mean(axis=0) if basis.m else np.zeros(0)
    if basis.m:
        u_inf = project_equilibrium_to_mass(network, star.u, basis.matrix, mass0).u
    else:
        u_inf = star.u
    faces = []
    if network.n_species <= 16:
        faces = scan_boundary_equilibria(network, basis.matrix, mass0, seed=config.seed)
        feasible = [f for f in faces if f.mass_feasible]
        if feasible:
            names = ", ".join("{" + ",".join(f.zero_species) + "}" for f in feasible)
            warnings.warn(
                f"boundary equilibria compatible with the conserved totals: {names};"
                " exponential relaxation is not guaranteed",
                stacklevel=2,
            )
    else:
        warnings.warn("boundary-equilibrium scan skipped (more than 16 species)", stacklevel=2)

    n_full = int(np.floor(config.t_end / config.dt + 1e-9))
    steps = [config.dt] * n_full
    leftover = config.t_end - n_full * config.dt
    if leftover > 1e-12 * config.dt:
        steps.append(leftover)

    times = [0.0]
    entropy = []
    d_diff = []
    d_reac = []
    l1 = []
    masses = []
    iters = [0]
    density = []

    def record(state):
        e = relative_entropy_field(state, u_inf, mesh)
        dd, dr = entropy_production_field(network, params, state, u_inf, mesh)
        if not (np.isfinite(e) and np.isfinite(dd) and np.isfinite(dr)):
            raise StepFailed("non-finite entropy sample", state=state.copy())
        entropy.append(e)
        d_diff.append(dd)
        d_reac.append(dr)
        l1.append(l1_distance(state, u_inf, mesh))
        masses.append(basis.matrix @ state.mean(axis=0) if basis.m else np.zeros(0))
        density.append(mesh.h * float(np.sum(state)))

    record(u)
    t = 0.0
    pending = 0
    for k, dt_k in enumerate(steps, start=1):
        u, stats = step_implicit_euler(
            network, params, u, mesh, dt_k, config.newton_tol, config.newton_max_iter
        )
        t += dt_k
        pending += stats.newton_iterations
        if k % config.stride == 0 or k == len(steps):
            times.append(t)
            iters.append(pending)
            pending = 0
            record(u)

    return Trajectory(
        times=np.array(times),
        entropy=np.array(entropy),
        d_diffusion=np.array(d_diff),
        d_reaction=np.array(d_reac),
        l1=np.array(l1),
        masses=np.array(masses).reshape(len(times), basis.m),
        newton_iters=np.array(iters, dtype=int),
        total_density=np.array(density),
        mass_reference=mass0,
        u_inf=u_inf,
        basis=basis,
        mesh=mesh,
        final_field=u,
        boundary_faces=faces,
    )


def format_trajectory_csv(traj: Trajectory) -> str:
    """Render a trajectory as CSV with 17 significant digits per float."""
    m = traj.masses.shape[1]
    header = "t,E,D_diff,D_reac,L1" + "".join(f",mass_{i + 1}" for i in range(m))
    header += ",newton_iters"
    lines = [header]
    for i in range(traj.times.size):
        cols = [
            f"{traj.times[i]:.17g}",
            f"{traj.entropy[i]:.17g}",
            f"{traj.d_diffusion[i]:.17g}",
            f"{traj.d_reaction[i]:.17g}",
            f"{traj.l1[i]:.17g}",
        ]
        cols += [f"{traj.masses[i, j]:.17g}" for j in range(m)]
        cols.append(str(int(traj.newton_iters[i])))
        lines.append(",".join(cols))
    return "".join(line + "\n" for line in lines)


def write_trajectory_csv(traj: Trajectory, path) -> None:
    with open(path, "w") as handle:
        handle.write(format_trajectory_csv(traj))
