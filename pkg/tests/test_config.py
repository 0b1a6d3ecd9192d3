"""Config parsing and validation tests."""

from __future__ import annotations

import pytest

from symlife.config import ConfigError, ExperimentConfig, load_config, parse_config


class TestDefaults:
    def test_empty_file_yields_standard_defaults(self):
        config = parse_config("")
        assert config.pop_size == 200
        assert config.num_trials == 2
        assert config.num_generations == 100
        assert config.seed_density == 0.375
        assert config.width_factor == 6.0
        assert config.height_factor == 3.0
        assert config.time_factor == 6.0
        assert config.tournament_size == 2
        assert config.elite_size == 50
        assert config.mutation_rate == 0.01
        assert (config.prob_flip, config.prob_grow, config.prob_shrink) == (0.6, 0.2, 0.2)
        assert (config.min_similarity, config.max_similarity) == (0.8, 0.99)
        assert (config.prob_fission, config.prob_fusion) == (0.01, 0.005)
        assert (config.max_area_first, config.max_area_last) == (120, 170)
        assert config.symbiosis_flag == 0 and config.fusion_test_flag == 0

    def test_comments_and_blank_lines_are_skipped(self):
        config = parse_config("# a comment\n\npop_size = 10\nelite_size = 5\n")
        assert config.pop_size == 10


class TestValidation:
    def test_mutation_mix_must_sum_to_one(self):
        with pytest.raises(ConfigError, match="prob_flip"):
            parse_config("prob_flip = 0.5\n")

    def test_flag_domain(self):
        with pytest.raises(ConfigError, match="symbiosis_flag"):
            parse_config("symbiosis_flag = 2\n")

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown"):
            parse_config("population = 50\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config("pop_size = 10\npop_size = 20\nelite_size = 5\n")

    def test_type_errors_name_the_key(self):
        with pytest.raises(ConfigError, match="pop_size"):
            parse_config("pop_size = many\n")
        with pytest.raises(ConfigError, match="pop_size"):
            parse_config("pop_size = 200.5\n")

    def test_similarity_window_ordering(self):
        with pytest.raises(ConfigError, match="min_similarity"):
            parse_config("min_similarity = 0.9\nmax_similarity = 0.5\n")

    def test_area_bounds_ordering(self):
        with pytest.raises(ConfigError, match="max_area_last"):
            parse_config("max_area_first = 150\nmax_area_last = 120\n")

    def test_fission_fusion_budget(self):
        with pytest.raises(ConfigError, match="prob_fusion"):
            parse_config("prob_fission = 0.7\nprob_fusion = 0.5\n")

    def test_elite_within_population(self):
        with pytest.raises(ConfigError, match="elite_size"):
            parse_config("pop_size = 10\nelite_size = 20\n")


class TestLayerLabel:
    def test_plain_layers(self):
        for n in (1, 2, 3, 4):
            assert parse_config(f"experiment_type_num = {n}\n").layer_label() == f"layer{n}"

    def test_modifier_flags(self):
        assert parse_config("fusion_test_flag = 1\n").layer_label() == "layer4_shuffled"
        assert parse_config("symbiosis_flag = 1\n").layer_label() == "layer4_mutualism"

    def test_flags_ignored_off_layer_four(self):
        config = parse_config("experiment_type_num = 2\nsymbiosis_flag = 1\n")
        assert config.layer_label() == "layer2"


class TestRoundTrip:
    def test_to_text_parses_back_identically(self):
        config = ExperimentConfig(pop_size=24, num_generations=7, rng_seed=99,
                                  output_dir="out/exp", elite_size=12)
        assert parse_config(config.to_text()) == config

    def test_load_config_reads_files(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text("pop_size = 12\nelite_size = 6\nnum_generations = 3\n")
        config = load_config(path)
        assert (config.pop_size, config.elite_size, config.num_generations) == (12, 6, 3)

    def test_digest_is_stable(self):
        assert ExperimentConfig().digest() == ExperimentConfig().digest()
        assert ExperimentConfig().digest() != ExperimentConfig(pop_size=10, elite_size=5).digest()
