"""Shared fixtures: reference networks, a config factory, the parser corpus."""

import pathlib

import pytest

import crnflow as cf

TWO_SPECIES = "S1 <-> S2 @ 1.0, 2.0\n"
ASSOCIATION = "A + B <-> C @ 1.0, 1.0\n"
TRIANGLE = "A -> B @ 1\nB -> C @ 1\nC -> A @ 1\n"

# Round-trip corpus: deliberately varied complexes, coefficients, rate
# notations, and naming.
ROUND_TRIP_CORPUS = [
    TWO_SPECIES,
    ASSOCIATION,
    TRIANGLE,
    "0 -> X @ 0.5\nX -> 0 @ 0.25\n",
    "2 A -> B @ 3\nB -> 2 A @ 0.5\n",
    "1.5 A -> B @ 0.7\nB -> 1.5 A @ 0.2\n",
    "E + S <-> ES @ 10, 1\nES -> E + P @ 2\nP -> S @ 0.1\n",
    "A_1 + B_2 -> C_3 @ 1e-3\nC_3 -> A_1 + B_2 @ 2.5e2\n",
    "X1 <-> X2 @ 1, 1\nX2 <-> X3 @ 2, 1\nX3 <-> X4 @ 1, 3\n",
    "A + A -> A @ 1\nA -> A + A @ 2\n",
    "A + 2 B + C -> 3 D @ 4.5\n3 D -> A + 2 B + C @ 1\n",
    "# comment only at the top\nW -> V @ 0.125  # trailing comment\nV -> W @ 8\n",
]


@pytest.fixture(scope="session")
def two_species():
    return cf.parse_network(TWO_SPECIES)


@pytest.fixture(scope="session")
def association():
    return cf.parse_network(ASSOCIATION)


@pytest.fixture(scope="session")
def triangle():
    return cf.parse_network(TRIANGLE)


def make_config(
    tmp_path: pathlib.Path,
    network_text: str,
    *,
    cells=32,
    dt=1e-3,
    t_end=0.5,
    stride=1,
    a0="0.05 0.05",
    a="0.2 0.1 0.1 0.2",
    initial=("S1 = step 0.5 1.5 0.5", "S2 = constant 1.0"),
    solver=("seed = 3",),
    length=1.0,
) -> cf.RunConfig:
    """Write a network plus config file pair and parse it."""
    (tmp_path / "net.crn").write_text(network_text)
    lines = [
        "network = net.crn",
        "[domain]",
        f"L = {length}",
        f"N = {cells}",
        "[time]",
        f"dt = {dt}",
        f"T = {t_end}",
        f"stride = {stride}",
        "[diffusion]",
        f"a0 = {a0}",
        f"a = {a}",
        "[initial]",
        *initial,
        "[solver]",
        *solver,
    ]
    (tmp_path / "run.cfg").write_text("\n".join(lines) + "\n")
    return cf.parse_config_file(tmp_path / "run.cfg")
