"""Post-processing of recorded trajectories.

Decay-rate estimation by least squares on log entropy, entropy monotonicity
and quadrature audits, conservation drift, and the pointwise
dissipation-to-entropy ratio with its Gronwall consistency check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .entropy import ckp_check
from .errors import InsufficientDecayData
from .fvsolver import Trajectory

__all__ = [
    "ENTROPY_FLOOR",
    "RateEstimate",
    "EntropyAudit",
    "RatioReport",
    "synthetic_trajectory",
    "estimate_decay_rate",
    "entropy_audit",
    "conservation_audit",
    "dissipation_ratio",
    "summarize",
]

# Entropy samples at or below this are treated as resolved to rounding noise
# and excluded from fits and ratios.
ENTROPY_FLOOR = 1e-13


@dataclass(frozen=True)
class RateEstimate:
    """Least-squares fit of ``log E = log C - rate * t`` over a tail window."""

    rate: float
    amplitude: float
    r_squared: float
    window: tuple[float, float]
    samples: int


@dataclass(frozen=True)
class EntropyAudit:
    """Worst-case violations of entropy monotonicity and the production bound."""

    max_increment: float
    eep_defect: float


@dataclass(frozen=True)
class RatioReport:
    """Minimum production-to-entropy ratio and its agreement with the fitted rate."""

    min_ratio: float
    gronwall_consistent: bool | None


def synthetic_trajectory(times, entropy, production=None, masses=None) -> Trajectory:
    """Wrap externally produced samples so the estimators below accept them."""
    times = np.asarray(times, dtype=float)
    entropy = np.asarray(entropy, dtype=float)
    production = (
        np.zeros_like(entropy) if production is None else np.asarray(production, dtype=float)
    )
    masses = (
        np.zeros((times.size, 0)) if masses is None else np.asarray(masses, dtype=float)
    )
    return Trajectory(
        times=times,
        entropy=entropy,
        d_diffusion=production,
        d_reaction=np.zeros_like(entropy),
        l1=np.zeros_like(entropy),
        masses=masses,
        newton_iters=np.zeros(times.size, dtype=int),
    )


def estimate_decay_rate(traj: Trajectory) -> RateEstimate:
    """Fit an exponential to the tail of the entropy samples.

    Samples with entropy at the rounding floor are discarded; the fit runs
    over the latter half of what remains so the transient does not bias the
    asymptotic rate.  Raises :class:`InsufficientDecayData` below 10 usable
    samples.
    """
    usable = np.nonzero(traj.entropy > ENTROPY_FLOOR)[0]
    if usable.size < 10:
        raise InsufficientDecayData(
            f"only {usable.size} entropy samples above the floor, need 10"
        )
    tail = usable[usable.size // 2 :]
    x = traj.times[tail]
    z = np.log(traj.entropy[tail])
    slope, intercept = np.polyfit(x, z, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((z - pred) ** 2))
    ss_tot = float(np.sum((z - np.mean(z)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return RateEstimate(
        rate=float(-slope),
        amplitude=float(np.exp(intercept)),
        r_squared=r2,
        window=(float(x[0]), float(x[-1])),
        samples=int(tail.size),
    )


def entropy_audit(traj: Trajectory) -> EntropyAudit:
    """Audit entropy decrease and the integrated production inequality.

    ``max_increment`` is the largest positive jump of E between consecutive
    records (0 for a monotone trajectory); ``eep_defect`` is the worst
    positive value of ``E(t_k) + integral of production - E(0)`` with the
    integral taken by the trapezoidal rule on the recorded samples.
    """
    e = traj.entropy
    increments = np.diff(e)
    max_inc = float(max(0.0, np.max(increments))) if increments.size else 0.0
    dt = np.diff(traj.times)
    prod = traj.production
    integral = np.concatenate([[0.0], np.cumsum(0.5 * dt * (prod[1:] + prod[:-1]))])
    defect = float(max(0.0, np.max(e + integral - e[0])))
    return EntropyAudit(max_inc, defect)


def conservation_audit(traj: Trajectory, reference=None):
    """Worst relative drift of the conserved totals, or None without any.

    The drift is ``max_k |mass(t_k) - M|_inf / (1 + |M|_inf)`` against the
    reference totals (by default the ones recorded at t = 0).
    """
    if traj.masses.shape[1] == 0:
        return None
    if reference is None:
        reference = (
            traj.mass_reference if traj.mass_reference is not None else traj.masses[0]
        )
    reference = np.asarray(reference, dtype=float)
    drift = np.max(np.abs(traj.masses - reference[None, :]))
    return float(drift / (1.0 + np.max(np.abs(reference))))


def dissipation_ratio(traj: Trajectory, rate: RateEstimate | None = None) -> RatioReport:
    """Minimum of production over entropy across usable samples.

    By the Gronwall argument the fitted decay rate cannot exceed this
    minimum; the report carries ``rate <= 1.1 * min_ratio`` when a rate is
    supplied.  Raises :class:`InsufficientDecayData` when every sample sits
    at the entropy floor.
    """
    usable = traj.entropy > ENTROPY_FLOOR
    if not np.any(usable):
        raise InsufficientDecayData("no entropy samples above the floor")
    ratios = traj.production[usable] / traj.entropy[usable]
    min_ratio = float(np.min(ratios))
    consistent = None if rate is None else bool(rate.rate <= 1.1 * min_ratio)
    return RatioReport(min_ratio, consistent)


def summarize(traj: Trajectory) -> dict:
    """Bundle every diagnostic of a finished run into one JSON-ready dict."""
    audit = entropy_audit(traj)
    summary = {
        "lambda_est": None,
        "C_est": None,
        "r2": None,
        "fit_window": None,
        "entropy_audit": audit.max_increment,
        "eep_defect": audit.eep_defect,
        "mass_drift": conservation_audit(traj),
        "dissipation_ratio": None,
        "ckp_pass": None,
    }
    rate = None
    try:
        rate = estimate_decay_rate(traj)
    except InsufficientDecayData:
        pass
    if rate is not None:
        summary["lambda_est"] = rate.rate
        summary["C_est"] = rate.amplitude
        summary["r2"] = rate.r_squared
        summary["fit_window"] = [rate.window[0], rate.window[1]]
    try:
        summary["dissipation_ratio"] = dissipation_ratio(traj).min_ratio
    except InsufficientDecayData:
        pass
    if traj.total_density is not None and traj.u_inf is not None and traj.mesh is not None:
        ref_total = traj.mesh.length * float(np.sum(traj.u_inf))
        summary["ckp_pass"] = bool(
            all(
                ckp_check(e, d, tot + ref_total)
                for e, d, tot in zip(traj.entropy, traj.l1, traj.total_density)
            )
        )
    return summary
