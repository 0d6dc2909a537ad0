"""Network and configuration parsing."""

import numpy as np
import pytest

import crnflow as cf
from conftest import ROUND_TRIP_CORPUS, make_config


class TestNetworkGrammar:
    def test_species_in_first_appearance_order(self):
        net = cf.parse_network("B + A -> C @ 1\nD -> B @ 2")
        assert net.species == ("B", "A", "C", "D")

    def test_reversible_expands_to_two_reactions(self):
        net = cf.parse_network("S1 <-> S2 @ 1.0, 2.0")
        assert net.n_reactions == 2
        fwd, bwd = net.reactions
        assert fwd.reactants == (1.0, 0.0) and fwd.products == (0.0, 1.0)
        assert bwd.reactants == (0.0, 1.0) and bwd.products == (1.0, 0.0)
        assert (fwd.rate, bwd.rate) == (1.0, 2.0)

    def test_empty_complex(self):
        net = cf.parse_network("0 -> A @ 0.5\nA -> 0 @ 2")
        assert net.reactions[0].reactants == (0.0,)
        assert net.reactions[0].products == (1.0,)
        assert net.reactions[1].products == (0.0,)

    def test_repeated_species_accumulate(self):
        net = cf.parse_network("A + A -> A @ 1")
        assert net.reactions[0].reactants == (2.0,)

    def test_default_and_explicit_coefficients(self):
        net = cf.parse_network("2 A + B -> 3 C @ 1")
        assert net.reactions[0].reactants == (2.0, 1.0, 0.0)
        assert net.reactions[0].products == (0.0, 0.0, 3.0)

    def test_comments_and_blank_lines(self):
        net = cf.parse_network("# header\n\nA -> B @ 1  # inline\n\n")
        assert net.n_reactions == 1

    def test_fractional_coefficient_below_one_warns(self):
        with pytest.warns(UserWarning, match="below 1"):
            cf.parse_network("0.5 A -> B @ 1")

    def test_empty_text_gives_empty_network(self):
        net = cf.parse_network("# nothing\n")
        assert net.species == () and net.reactions == ()


MALFORMED = [
    ("A -> B", 1, "@"),
    ("A -> B @ -1", 1, "positive"),
    ("A -> B @ 1 @ 2", 1, "duplicate '@'"),
    ("A B -> C @ 1", 1, "coefficient"),
    ("-> B @ 1", 1, "empty complex"),
    ("A <- B @ 1", 1, "'->' or '<->'"),
    ("A -> B @ 1, 2", 1, "exactly one rate"),
    ("A <-> B @ 1", 1, "exactly two rate"),
    ("A + -> B @ 1", 1, "empty term"),
    ("0 A -> B @ 1", 1, "positive"),
    ("9A -> B @ 1", 1, "species name"),
    ("A -> B @ fast", 1, "rate"),
    ("A -> A @ 1", 1, "change"),
    ("A + 0 -> B @ 1", 1, "combined"),
    ("# ok\n\nA -> B @ 1\nB -> @ 1", 4, "empty complex"),
    ("A -> B @ 1\nA -> B -> C @ 1", 2, "arrow"),
]


class TestMalformed:
    @pytest.mark.parametrize("text,line,fragment", MALFORMED)
    def test_rejected_with_line_number(self, text, line, fragment):
        with pytest.raises(cf.NetworkParseError) as exc:
            cf.parse_network(text)
        assert exc.value.line == line
        assert fragment in str(exc.value)


class TestFormat:
    def test_canonical_rendering(self):
        net = cf.parse_network("B + 2 A <-> C @ 1.0, 0.5")
        out = cf.format_network(net)
        assert out == "B + 2 A -> C @ 1\nC -> B + 2 A @ 0.5\n"

    def test_empty_complex_rendering(self):
        net = cf.parse_network("0 -> A @ 0.5")
        assert cf.format_network(net) == "0 -> A @ 0.5\n"

    def test_empty_network(self):
        assert cf.format_network(cf.parse_network("")) == ""

    def test_rate_formatting_is_exact(self):
        rate = 0.1 + 0.2  # not representable as a short literal
        net = cf.ReactionNetwork(("A", "B"), (cf.Reaction((1.0, 0.0), (0.0, 1.0), rate),))
        again = cf.parse_network(cf.format_network(net))
        assert again.reactions[0].rate == rate

    @pytest.mark.parametrize("text", ROUND_TRIP_CORPUS)
    def test_round_trip(self, text):
        first = cf.parse_network(text)
        second = cf.parse_network(cf.format_network(first))
        assert first == second


class TestConfig:
    def test_full_parse_and_defaults(self, tmp_path):
        cfg = make_config(tmp_path, "S1 <-> S2 @ 1.0, 2.0", solver=())
        assert cfg.cells == 32 and cfg.length == 1.0
        assert cfg.dt == 1e-3 and cfg.t_end == 0.5 and cfg.stride == 1
        assert cfg.newton_tol == 1e-10 and cfg.newton_max_iter == 50 and cfg.seed == 0
        np.testing.assert_array_equal(cfg.a0, [0.05, 0.05])
        np.testing.assert_array_equal(cfg.a, [[0.2, 0.1], [0.1, 0.2]])

    def test_solver_overrides(self, tmp_path):
        cfg = make_config(
            tmp_path,
            "S1 <-> S2 @ 1.0, 2.0",
            solver=("newton_tol = 1e-12", "newton_max_iter = 20", "seed = 9"),
        )
        assert cfg.newton_tol == 1e-12 and cfg.newton_max_iter == 20 and cfg.seed == 9

    def test_profiles_evaluate(self, tmp_path):
        cfg = make_config(
            tmp_path,
            "S1 <-> S2 @ 1.0, 2.0",
            initial=("S1 = gaussian 1 0.5 0.1 0.2", "S2 = step 0.25 2 1"),
        )
        x = np.array([0.0, 0.5])
        gauss = cfg.profiles[0].evaluate(x)
        assert gauss[1] == pytest.approx(1.2)
        assert np.all(cfg.profiles[0].evaluate(np.linspace(0, 1, 101)) >= 0.2)
        np.testing.assert_array_equal(cfg.profiles[1].evaluate(x), [2.0, 1.0])

    def test_missing_profile(self, tmp_path):
        with pytest.raises(cf.ConfigError, match="S2"):
            make_config(tmp_path, "S1 <-> S2 @ 1.0, 2.0", initial=("S1 = constant 1",))

    def test_unknown_profile_species(self, tmp_path):
        with pytest.raises(cf.ConfigError, match="unknown species"):
            make_config(
                tmp_path,
                "S1 <-> S2 @ 1.0, 2.0",
                initial=("S1 = constant 1", "S2 = constant 1", "S9 = constant 1"),
            )

    def test_negative_profile_on_mesh(self, tmp_path):
        with pytest.raises(cf.ConfigError, match="negative"):
            make_config(
                tmp_path,
                "S1 <-> S2 @ 1.0, 2.0",
                initial=("S1 = step 0.5 -1 1", "S2 = constant 1"),
            )

    def test_dimension_mismatches(self, tmp_path):
        with pytest.raises(cf.ConfigError, match="a0 needs 2"):
            make_config(tmp_path, "S1 <-> S2 @ 1.0, 2.0", a0="0.05")
        with pytest.raises(cf.ConfigError, match="a needs 4"):
            make_config(tmp_path, "S1 <-> S2 @ 1.0, 2.0", a="0.2 0.1 0.1")

    def test_bad_numbers_carry_line_numbers(self, tmp_path):
        (tmp_path / "net.crn").write_text("S1 <-> S2 @ 1.0, 2.0")
        text = "network = net.crn\n[domain]\nL = 1.0\nN = sixty\n"
        with pytest.raises(cf.ConfigError) as exc:
            cf.parse_config(text, base_dir=tmp_path)
        assert exc.value.line == 4

    def test_unknown_key_and_section(self, tmp_path):
        (tmp_path / "net.crn").write_text("S1 <-> S2 @ 1.0, 2.0")
        with pytest.raises(cf.ConfigError, match="unknown key"):
            cf.parse_config("network = net.crn\n[domain]\nL = 1\nN = 4\nM = 2\n", tmp_path)
        with pytest.raises(cf.ConfigError, match="unknown section"):
            cf.parse_config("network = net.crn\n[space]\n", tmp_path)

    def test_duplicate_key(self, tmp_path):
        (tmp_path / "net.crn").write_text("S1 <-> S2 @ 1.0, 2.0")
        with pytest.raises(cf.ConfigError, match="duplicate"):
            cf.parse_config("network = net.crn\n[domain]\nL = 1\nL = 2\n", tmp_path)

    def test_time_bounds(self, tmp_path):
        with pytest.raises(cf.ConfigError, match="T must exceed dt"):
            make_config(tmp_path, "S1 <-> S2 @ 1.0, 2.0", dt=1.0, t_end=0.5)

    def test_missing_network_file(self, tmp_path):
        with pytest.raises(cf.ConfigError, match="cannot read"):
            cf.parse_config("network = missing.crn\n", base_dir=tmp_path)

    def test_with_seed(self, tmp_path):
        cfg = make_config(tmp_path, "S1 <-> S2 @ 1.0, 2.0")
        assert cfg.with_seed(99).seed == 99 and cfg.seed == 3
