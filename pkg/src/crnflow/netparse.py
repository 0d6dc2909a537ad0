"""Text formats: reaction networks (.crn) and run configurations (.cfg).

A network file holds one reaction per line::

    A + B -> C @ 2.5        # irreversible, one rate constant
    S1 <-> S2 @ 1.0, 2.0    # reversible, forward and backward constants
    0 -> X @ 0.5            # the literal 0 is the empty complex

A complex is a ``+``-separated list of ``coefficient species`` terms with the
coefficient defaulting to 1; repeated species within a complex accumulate.
``#`` starts a comment anywhere, blank lines are skipped, and species are
numbered in order of first appearance.

A configuration file is INI-style with a top-level ``network = path`` line
followed by the sections ``[domain]``, ``[time]``, ``[diffusion]``,
``[initial]`` and optionally ``[solver]``.  Values that are lists (diffusion
coefficients, profile parameters) are whitespace- or comma-separated.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .crn import Reaction, ReactionNetwork
from .errors import ConfigError, NetworkParseError

__all__ = [
    "InitialProfile",
    "RunConfig",
    "parse_network",
    "parse_network_file",
    "format_network",
    "parse_config",
    "parse_config_file",
]

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")

_PROFILE_ARITY = {"constant": 1, "step": 3, "gaussian": 4}


@dataclass(frozen=True)
class InitialProfile:
    """Closed-form initial datum for one species on the interval."""

    kind: str
    params: tuple[float, ...]

    def __post_init__(self):
        if self.kind not in _PROFILE_ARITY:
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if len(self.params) != _PROFILE_ARITY[self.kind]:
            raise ValueError(
                f"profile {self.kind!r} takes {_PROFILE_ARITY[self.kind]} parameters,"
                f" got {len(self.params)}"
            )
        if self.kind == "gaussian" and self.params[2] <= 0:
            raise ValueError("gaussian width must be positive")

    def evaluate(self, x) -> np.ndarray:
        """Profile values at positions ``x``."""
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            return np.full(x.shape, self.params[0])
        if self.kind == "step":
            x0, left, right = self.params
            return np.where(x < x0, left, right)
        amp, center, width, baseline = self.params
        return amp * np.exp(-0.5 * ((x - center) / width) ** 2) + baseline


@dataclass(frozen=True)
class RunConfig:
    """Everything one simulation needs, resolved and validated."""

    network_path: str
    network: ReactionNetwork
    length: float
    cells: int
    dt: float
    t_end: float
    stride: int
    a0: np.ndarray
    a: np.ndarray
    profiles: tuple[InitialProfile, ...]
    newton_tol: float
    newton_max_iter: int
    seed: int

    def with_seed(self, seed: int) -> "RunConfig":
        return replace(self, seed=int(seed))


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _parse_rate(token: str, lineno: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise NetworkParseError(f"bad rate constant {token!r}", lineno) from None
    if not np.isfinite(value) or value <= 0:
        raise NetworkParseError(f"rate constant must be positive, got {token!r}", lineno)
    return value


def _parse_complex(text: str, lineno: int, species_index: dict[str, int]) -> dict[int, float]:
    text = text.strip()
    if not text:
        raise NetworkParseError("empty complex (use 0 for the empty complex)", lineno)
    terms = [t.strip() for t in text.split("+")]
    if text == "0":
        return {}
    coeffs: dict[int, float] = {}
    for term in terms:
        if not term:
            raise NetworkParseError("empty term in complex", lineno)
        if term == "0":
            raise NetworkParseError(
                "the empty complex 0 cannot be combined with other terms", lineno
            )
        tokens = term.split()
        if len(tokens) == 1:
            coef, name = 1.0, tokens[0]
        elif len(tokens) == 2:
            try:
                coef = float(tokens[0])
            except ValueError:
                raise NetworkParseError(f"bad coefficient {tokens[0]!r}", lineno) from None
            name = tokens[1]
        else:
            raise NetworkParseError(f"cannot parse term {term!r}", lineno)
        if not _NAME_RE.match(name):
            raise NetworkParseError(f"bad species name {name!r}", lineno)
        if not np.isfinite(coef) or coef <= 0:
            raise NetworkParseError(
                f"stoichiometric coefficient must be positive, got {tokens[0]!r}", lineno
            )
        if coef < 1.0:
            warnings.warn(
                f"line {lineno}: coefficient {coef:g} for {name} is below 1;"
                " mass-action monomials with fractional orders below one are unusual",
                stacklevel=3,
            )
        if name not in species_index:
            species_index[name] = len(species_index)
        idx = species_index[name]
        coeffs[idx] = coeffs.get(idx, 0.0) + coef
    return coeffs


def parse_network(text: str) -> ReactionNetwork:
    """Parse the reaction-line format into a network.

    Raises :class:`NetworkParseError` with the line number on any malformed
    line.  A file with no reaction lines yields the empty network.
    """
    species_index: dict[str, int] = {}
    raw: list[tuple[dict[int, float], dict[int, float], float, int]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = _strip(line)
        if not body:
            continue
        if "@" not in body:
            raise NetworkParseError("expected '@ rate' after the reaction", lineno)
        head, _, rate_part = body.partition("@")
        if "@" in rate_part:
            raise NetworkParseError("duplicate '@' clause", lineno)
        if "<->" in head:
            arrow = "<->"
        elif "->" in head:
            arrow = "->"
        else:
            raise NetworkParseError("expected '->' or '<->' between complexes", lineno)
        lhs_text, _, rhs_text = head.partition(arrow)
        if arrow in rhs_text:
            raise NetworkParseError("more than one arrow on the line", lineno)
        lhs = _parse_complex(lhs_text, lineno, species_index)
        rhs = _parse_complex(rhs_text, lineno, species_index)
        rate_tokens = [t.strip() for t in rate_part.split(",")]
        if arrow == "->":
            if len(rate_tokens) != 1:
                raise NetworkParseError(
                    "irreversible reaction takes exactly one rate constant", lineno
                )
            raw.append((lhs, rhs, _parse_rate(rate_tokens[0], lineno), lineno))
        else:
            if len(rate_tokens) != 2:
                raise NetworkParseError(
                    "reversible reaction takes exactly two rate constants", lineno
                )
            raw.append((lhs, rhs, _parse_rate(rate_tokens[0], lineno), lineno))
            raw.append((rhs, lhs, _parse_rate(rate_tokens[1], lineno), lineno))

    n = len(species_index)
    species = tuple(sorted(species_index, key=species_index.get))
    reactions = []
    for lhs, rhs, rate, lineno in raw:
        src = tuple(lhs.get(i, 0.0) for i in range(n))
        dst = tuple(rhs.get(i, 0.0) for i in range(n))
        try:
            reactions.append(Reaction(src, dst, rate))
        except ValueError as exc:
            raise NetworkParseError(str(exc), lineno) from None
    return ReactionNetwork(species, tuple(reactions))


def parse_network_file(path) -> ReactionNetwork:
    """Read and parse a network file."""
    return parse_network(Path(path).read_text())


def _format_number(value: float) -> str:
    short = f"{value:g}"
    return short if float(short) == value else repr(value)


def _format_complex(coeffs, species) -> str:
    terms = []
    for i, name in enumerate(species):
        c = coeffs[i]
        if c == 0:
            continue
        terms.append(name if c == 1 else f"{_format_number(c)} {name}")
    return " + ".join(terms) if terms else "0"


def format_network(network: ReactionNetwork) -> str:
    """Render a network back into the reaction-line format.

    Every reaction is written on its own irreversible line in canonical
    form (species in declaration order, unit coefficients elided), so
    parsing the output reproduces the network exactly.
    """
    lines = [
        f"{_format_complex(rx.reactants, network.species)} -> "
        f"{_format_complex(rx.products, network.species)} @ {_format_number(rx.rate)}"
        for rx in network.reactions
    ]
    return "".join(line + "\n" for line in lines)


_SECTIONS = {"domain", "time", "diffusion", "initial", "solver"}
_SECTION_KEYS = {
    None: {"network"},
    "domain": {"L", "N"},
    "time": {"dt", "T", "stride"},
    "diffusion": {"a0", "a"},
    "solver": {"newton_tol", "newton_max_iter", "seed"},
}


def _floats(value: str, lineno: int, what: str) -> list[float]:
    tokens = value.replace(",", " ").split()
    try:
        return [float(t) for t in tokens]
    except ValueError:
        raise ConfigError(f"bad number in {what}: {value!r}", lineno) from None


def _require(entries, section, key, lineno_hint=None):
    item = entries.get((section, key))
    if item is None:
        where = f"[{section}]" if section else "top level"
        raise ConfigError(f"missing required key {key!r} in {where}", lineno_hint)
    return item


def parse_config(text: str, base_dir=".") -> RunConfig:
    """Parse a run-configuration file.

    ``base_dir`` anchors the relative path given by the ``network`` key; the
    referenced network file is read and parsed as part of configuration
    loading.  All numbers are validated here, including that every initial
    profile is nonnegative at the cell centers it will be sampled on.
    """
    entries: dict[tuple[str | None, str], tuple[str, int]] = {}
    section: str | None = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = _strip(line)
        if not body:
            continue
        if body.startswith("[") and body.endswith("]"):
            section = body[1:-1].strip()
            if section not in _SECTIONS:
                raise ConfigError(f"unknown section [{section}]", lineno)
            continue
        if "=" not in body:
            raise ConfigError("expected 'key = value'", lineno)
        key, _, value = body.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigError("expected 'key = value'", lineno)
        if (section, key) in entries:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        entries[(section, key)] = (value, lineno)

    for (sec, key), (_, lineno) in entries.items():
        if sec == "initial":
            continue
        if key not in _SECTION_KEYS.get(sec, set()):
            where = f"[{sec}]" if sec else "top level"
            raise ConfigError(f"unknown key {key!r} in {where}", lineno)

    net_value, net_line = _require(entries, None, "network")
    net_path = Path(base_dir) / net_value
    try:
        network = parse_network_file(net_path)
    except OSError as exc:
        raise ConfigError(f"cannot read network file {net_value!r}: {exc}", net_line) from None
    if network.n_species == 0:
        raise ConfigError(f"network file {net_value!r} declares no species", net_line)

    value, lineno = _require(entries, "domain", "L")
    length = _floats(value, lineno, "L")[0]
    if length <= 0:
        raise ConfigError("L must be positive", lineno)
    value, lineno = _require(entries, "domain", "N")
    try:
        cells = int(value)
    except ValueError:
        raise ConfigError(f"N must be an integer, got {value!r}", lineno) from None
    if cells < 2:
        raise ConfigError("N must be at least 2", lineno)

    value, lineno = _require(entries, "time", "dt")
    dt = _floats(value, lineno, "dt")[0]
    if dt <= 0:
        raise ConfigError("dt must be positive", lineno)
    value, lineno = _require(entries, "time", "T")
    t_end = _floats(value, lineno, "T")[0]
    if t_end <= dt:
        raise ConfigError("T must exceed dt", lineno)
    stride = 1
    if ("time", "stride") in entries:
        value, lineno = entries[("time", "stride")]
        try:
            stride = int(value)
        except ValueError:
            raise ConfigError(f"stride must be an integer, got {value!r}", lineno) from None
        if stride < 1:
            raise ConfigError("stride must be at least 1", lineno)

    n = network.n_species
    value, lineno = _require(entries, "diffusion", "a0")
    a0 = np.array(_floats(value, lineno, "a0"))
    if a0.shape != (n,):
        raise ConfigError(f"a0 needs {n} entries, got {a0.size}", lineno)
    if np.any(a0 < 0):
        raise ConfigError("a0 entries must be nonnegative", lineno)
    value, lineno = _require(entries, "diffusion", "a")
    a_flat = np.array(_floats(value, lineno, "a"))
    if a_flat.size != n * n:
        raise ConfigError(f"a needs {n * n} entries (row-major), got {a_flat.size}", lineno)
    a = a_flat.reshape(n, n)
    if np.any(a < 0):
        raise ConfigError("a entries must be nonnegative", lineno)

    profiles = []
    centers = (np.arange(cells) + 0.5) * (length / cells)
    for name in network.species:
        item = entries.get(("initial", name))
        if item is None:
            raise ConfigError(f"missing initial profile for species {name!r}")
        value, lineno = item
        tokens = value.split()
        kind = tokens[0] if tokens else ""
        try:
            profile = InitialProfile(kind, tuple(_floats(" ".join(tokens[1:]), lineno, name)))
        except ValueError as exc:
            raise ConfigError(str(exc), lineno) from None
        sampled = profile.evaluate(centers)
        if np.any(sampled < 0):
            raise ConfigError(
                f"initial profile for {name!r} is negative on the mesh", lineno
            )
        profiles.append(profile)
    for (sec, key), (_, lineno) in entries.items():
        if sec == "initial" and key not in network.species:
            raise ConfigError(f"initial profile for unknown species {key!r}", lineno)

    newton_tol = 1e-10
    newton_max_iter = 50
    seed = 0
    if ("solver", "newton_tol") in entries:
        value, lineno = entries[("solver", "newton_tol")]
        newton_tol = _floats(value, lineno, "newton_tol")[0]
        if newton_tol <= 0:
            raise ConfigError("newton_tol must be positive", lineno)
    if ("solver", "newton_max_iter") in entries:
        value, lineno = entries[("solver", "newton_max_iter")]
        try:
            newton_max_iter = int(value)
        except ValueError:
            raise ConfigError("newton_max_iter must be an integer", lineno) from None
        if newton_max_iter < 1:
            raise ConfigError("newton_max_iter must be at least 1", lineno)
    if ("solver", "seed") in entries:
        value, lineno = entries[("solver", "seed")]
        try:
            seed = int(value)
        except ValueError:
            raise ConfigError("seed must be an integer", lineno) from None
        if seed < 0:
            raise ConfigError("seed must be nonnegative", lineno)

    return RunConfig(
        network_path=str(net_path),
        network=network,
        length=length,
        cells=cells,
        dt=dt,
        t_end=t_end,
        stride=stride,
        a0=a0,
        a=a,
        profiles=tuple(profiles),
        newton_tol=newton_tol,
        newton_max_iter=newton_max_iter,
        seed=seed,
    )


def parse_config_file(path) -> RunConfig:
    """Read and parse a configuration file, resolving the network path nearby."""
    path = Path(path)
    return parse_config(path.read_text(), base_dir=path.parent)
