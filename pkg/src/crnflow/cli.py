"""Command-line interface.

Four subcommands: ``analyze`` (network structure and equilibria),
``equilibrium`` (equilibrium at prescribed conserved totals), ``simulate``
(full run writing trajectory.csv and summary.json), and ``check``
(pre-flight gates for a configuration).  Every failure prints a one-line
JSON object to stderr and exits with 1 (parse), 2 (equilibrium), 3
(diffusion structure), or 4 (solver).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .analysis import summarize
from .crn import (
    complex_decomposition,
    conservation_basis,
    find_complex_balanced_equilibrium,
    project_equilibrium_to_mass,
    scan_boundary_equilibria,
)
from .crossdiff import (
    DiffusionParams,
    is_detailed_balanced,
    validate_structure,
    weak_cross_alpha,
)
from .errors import (
    ConfigError,
    InsufficientDecayData,
    MassNotReachable,
    NeitherConditionHolds,
    NetworkParseError,
    NoComplexBalance,
    StepFailed,
)
from .fvsolver import Mesh, format_trajectory_csv, init_field, simulate
from .netparse import parse_config_file, parse_network_file

_EXIT_PARSE = 1
_EXIT_EQUILIBRIUM = 2
_EXIT_DIFFUSION = 3
_EXIT_SOLVER = 4


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _faces_payload(faces):
    return [
        {
            "zero_species": list(f.zero_species),
            "u": [float(v) for v in f.u],
            "residual": f.residual,
            "mass_feasible": f.mass_feasible,
            "note": f.note,
        }
        for f in faces
    ]


def _emit(args, payload) -> int:
    text = json.dumps(payload, indent=2) + "\n"
    if getattr(args, "out", None):
        _write_atomic(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_analyze(args) -> int:
    network = parse_network_file(args.network)
    basis = conservation_basis(network)
    decomp = complex_decomposition(network)
    star = find_complex_balanced_equilibrium(network, seed=args.seed)
    mass = basis.matrix @ star.u if basis.m else np.zeros(0)
    faces = scan_boundary_equilibria(network, basis.matrix, mass, seed=args.seed)
    payload = {
        "species": list(network.species),
        "m": basis.m,
        "Q": [float(v) for v in basis.matrix.reshape(-1)],
        "c": decomp.n_complexes,
        "ell": decomp.n_linkage_classes,
        "s": decomp.stoich_dim,
        "deficiency": decomp.deficiency,
        "weakly_reversible": decomp.weakly_reversible,
        "u_star": [float(v) for v in star.u],
        "u_infinity": [float(v) for v in star.u],
        "residual": star.residual,
        "boundary_faces": _faces_payload(faces),
    }
    return _emit(args, payload)


def _cmd_equilibrium(args) -> int:
    network = parse_network_file(args.network)
    basis = conservation_basis(network)
    star = find_complex_balanced_equilibrium(network, seed=args.seed)
    if args.mass is not None:
        mass = np.array([float(t) for t in args.mass.split(",")])
        if mass.shape != (basis.m,):
            raise ConfigError(
                f"--mass needs {basis.m} comma-separated values, got {mass.size}"
            )
        result = project_equilibrium_to_mass(network, star.u, basis.matrix, mass)
    else:
        result = project_equilibrium_to_mass(
            network, star.u, basis.matrix, basis.matrix @ star.u if basis.m else np.zeros(0)
        )
    payload = {
        "species": list(network.species),
        "u_infinity": [float(v) for v in result.u],
        "residual": result.residual,
        "mass": [float(v) for v in result.mass],
        "iterations": result.iterations,
    }
    return _emit(args, payload)


def _cmd_simulate(args) -> int:
    config = parse_config_file(args.config)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    traj = simulate(config)
    out_dir = Path(args.out)
    _write_atomic(out_dir / "trajectory.csv", format_trajectory_csv(traj))
    summary = summarize(traj)
    _write_atomic(out_dir / "summary.json", json.dumps(summary, indent=2) + "\n")
    sys.stdout.write(f"{out_dir / 'trajectory.csv'}\n{out_dir / 'summary.json'}\n")
    return 0


def _cmd_check(args) -> int:
    config = parse_config_file(args.config)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    network = config.network
    params = DiffusionParams(config.a0, config.a)
    condition = validate_structure(params)
    star = find_complex_balanced_equilibrium(network, seed=config.seed)
    basis = conservation_basis(network)
    decomp = complex_decomposition(network)
    mesh = Mesh(config.length, config.cells)
    u0 = init_field(config, mesh)
    mass = basis.matrix @ u0.mean(axis=0) if basis.m else np.zeros(0)
    u_inf = (
        project_equilibrium_to_mass(network, star.u, basis.matrix, mass).u
        if basis.m
        else star.u
    )
    faces = []
    if network.n_species <= 16:
        faces = scan_boundary_equilibria(network, basis.matrix, mass, seed=config.seed)
    payload = {
        "condition": condition,
        "weak_cross_alpha": weak_cross_alpha(params),
        "detailed_balanced": is_detailed_balanced(params),
        "complex_balanced": True,
        "deficiency": decomp.deficiency,
        "weakly_reversible": decomp.weakly_reversible,
        "mass": [float(v) for v in mass],
        "u_infinity": [float(v) for v in u_inf],
        "boundary_faces": _faces_payload(faces),
    }
    return _emit(args, payload)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crnflow",
        description="Analyze reaction networks and simulate their cross-diffusion dynamics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="structure, equilibrium, and boundary scan")
    p.add_argument("network", help="path to a .crn network file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("equilibrium", help="equilibrium at prescribed conserved totals")
    p.add_argument("network", help="path to a .crn network file")
    p.add_argument("--mass", help="comma-separated conserved totals")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.set_defaults(func=_cmd_equilibrium)

    p = sub.add_parser("simulate", help="run a configuration and write outputs")
    p.add_argument("config", help="path to a run-configuration file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("check", help="validate the gates of a configuration")
    p.add_argument("config", help="path to a run-configuration file")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.set_defaults(func=_cmd_check)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (NetworkParseError, ConfigError, OSError, ValueError) as exc:
        return _fail(_EXIT_PARSE, exc)
    except (NoComplexBalance, MassNotReachable) as exc:
        return _fail(_EXIT_EQUILIBRIUM, exc)
    except NeitherConditionHolds as exc:
        return _fail(_EXIT_DIFFUSION, exc)
    except (StepFailed, InsufficientDecayData) as exc:
        return _fail(_EXIT_SOLVER, exc)


def _fail(code: int, exc: Exception) -> int:
    sys.stderr.write(
        json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n"
    )
    return code


if __name__ == "__main__":
    sys.exit(main())
