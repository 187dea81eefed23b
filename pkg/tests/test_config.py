"""Config file parsing and validation."""

import pytest

from opinionstream.config import (
    ConfigError,
    config_from_dict,
    load_config,
    parse_kv_text,
)
from opinionstream.sampling import StrategyKind

GOOD = """
# experiment
stream = "data/stream.tsv"
seed_size = 100
output_dir = "runs/demo"

[strategy]
kind = "uncertainty"
alpha = 1e-20

[window]
length = 500
mode = "sliding"
"""


class TestParser:
    def test_sections_and_scalars(self):
        parsed = parse_kv_text(GOOD)
        assert parsed["stream"] == "data/stream.tsv"
        assert parsed["seed_size"] == 100
        assert parsed["strategy"]["kind"] == "uncertainty"
        assert parsed["strategy"]["alpha"] == pytest.approx(1e-20)
        assert parsed["window"]["length"] == 500

    def test_value_types(self):
        parsed = parse_kv_text(
            'a = "text"\nb = 3\nc = 3.5\nd = 2e-4\ne = true\nf = false\n'
        )
        assert parsed == {
            "a": "text",
            "b": 3,
            "c": 3.5,
            "d": 2e-4,
            "e": True,
            "f": False,
        }

    def test_comments_stripped_outside_quotes(self):
        parsed = parse_kv_text('a = 5 # five\nb = "has # inside"  # note\n')
        assert parsed == {"a": 5, "b": "has # inside"}

    def test_unparseable_value_names_key(self):
        with pytest.raises(ConfigError, match="strategy.alpha"):
            parse_kv_text("[strategy]\nalpha = pi\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="defined twice"):
            parse_kv_text("a = 1\na = 2\n")

    def test_bad_section_header(self):
        with pytest.raises(ConfigError, match="line 1"):
            parse_kv_text("[strategy\n")

    def test_missing_equals(self):
        with pytest.raises(ConfigError, match="key = value"):
            parse_kv_text("just some words\n")


def config_dict(**overrides):
    data = {
        "stream": "stream.tsv",
        "seed_size": 50,
        "output_dir": "out",
        "strategy": {"kind": "ig"},
    }
    data.update(overrides)
    return data


class TestValidation:
    def test_minimal_config(self, tmp_path):
        config = config_from_dict(config_dict(), base_dir=tmp_path)
        assert config.seed_size == 50
        assert config.strategy.kind is StrategyKind.INFO_GAIN
        assert config.window_length == 100
        assert config.window_mode == "sliding"
        assert config.variant == "original"
        assert config.query_timeout == 120.0
        assert config.stream_path == (tmp_path / "stream.tsv").resolve()
        assert config.output_dir == tmp_path / "out"

    def test_missing_key_named(self):
        with pytest.raises(ConfigError, match="seed_size"):
            config_from_dict({"stream": "s", "output_dir": "o",
                              "strategy": {"kind": "ig"}})

    def test_missing_strategy_section(self):
        with pytest.raises(ConfigError, match=r"\[strategy\]"):
            config_from_dict({"stream": "s", "seed_size": 5, "output_dir": "o"})

    def test_bad_strategy_kind_lists_choices(self):
        with pytest.raises(ConfigError, match="ig"):
            config_from_dict(config_dict(strategy={"kind": "smart"}))

    def test_strategy_param_mix_rejected(self):
        with pytest.raises(ConfigError, match="strategy"):
            config_from_dict(config_dict(strategy={"kind": "ig", "alpha": 0.5}))

    def test_unknown_strategy_key_named(self):
        with pytest.raises(ConfigError, match="alfa"):
            config_from_dict(config_dict(strategy={"kind": "ig", "alfa": 0.5}))

    def test_unknown_top_level_key_named(self):
        with pytest.raises(ConfigError, match="seeed"):
            config_from_dict(config_dict(seeed=3))

    def test_window_validation(self):
        with pytest.raises(ConfigError, match="window.length"):
            config_from_dict(config_dict(window={"length": 0}))
        with pytest.raises(ConfigError, match="window.mode"):
            config_from_dict(config_dict(window={"mode": "bouncing"}))

    def test_variant_validation(self):
        with pytest.raises(ConfigError, match="variant"):
            config_from_dict(config_dict(variant="shuffled"))

    def test_seed_size_bound(self):
        with pytest.raises(ConfigError, match="seed_size"):
            config_from_dict(config_dict(seed_size=1))

    def test_type_mismatch_named(self):
        with pytest.raises(ConfigError, match="seed_size"):
            config_from_dict(config_dict(seed_size="many"))

    def test_int_promotes_to_float(self):
        config = config_from_dict(config_dict(query_timeout=60))
        assert config.query_timeout == 60.0

    def test_random_strategy_full(self):
        config = config_from_dict(
            config_dict(strategy={"kind": "random", "budget": 0.3, "rng_seed": 7})
        )
        assert config.strategy.budget == 0.3
        assert config.strategy.rng_seed == 7


def test_load_config_resolves_relative_to_file(tmp_path):
    (tmp_path / "exp.conf").write_text(GOOD)
    config = load_config(tmp_path / "exp.conf")
    assert config.stream_path == (tmp_path / "data" / "stream.tsv").resolve()
    assert config.output_dir == tmp_path / "runs" / "demo"
    assert config.strategy.alpha == pytest.approx(1e-20, rel=1e-12)


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "absent.conf")
