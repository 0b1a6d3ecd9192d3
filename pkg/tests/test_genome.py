"""Genetic operator tests: construction, mutation, recombination, fusion."""

from __future__ import annotations

import numpy as np
import pytest

from symlife.genome import (
    DimensionMismatch,
    SeedGenome,
    crossover,
    fission,
    fuse,
    grow,
    matched_random_seed,
    mutate_flip,
    random_seed,
    random_seed_exact,
    rotate,
    shrink,
    shuffle,
    similarity,
)


def genome_of(rows):
    return SeedGenome(np.array(rows, dtype=np.uint8))


class TestSeedGenome:
    def test_rejects_non_binary(self):
        with pytest.raises(ValueError):
            SeedGenome(np.array([[0, 2]], np.uint8))

    def test_bits_are_read_only(self, rng):
        g = random_seed(3, 3, 0.5, rng)
        with pytest.raises(ValueError):
            g.bits[0, 0] = 1

    def test_text_round_trip(self, rng):
        g = random_seed(4, 7, 0.4, rng)
        assert SeedGenome.from_text(g.to_text()) == g

    def test_from_text_rejects_ragged_rows(self):
        with pytest.raises(ValueError):
            SeedGenome.from_text("2 3\n010\n01\n")


class TestRandomSeed:
    def test_density_extremes(self, rng):
        assert random_seed(4, 4, 0.0, rng).live_cells == 0
        assert random_seed(4, 4, 1.0, rng).live_cells == 16

    def test_binomial_expectation(self, rng):
        total = sum(random_seed(5, 5, 0.375, rng).live_cells for _ in range(10_000))
        assert 9.0 <= total / 10_000 <= 9.75

    def test_exact_count_variant(self, rng):
        for want in (0, 7, 25):
            assert random_seed_exact(5, 5, want, rng).live_cells == want

    def test_matched_seed_shares_the_triple(self, rng):
        g = random_seed(6, 4, 0.3, rng)
        m = matched_random_seed(g, rng)
        assert (m.rows, m.cols, m.live_cells) == (g.rows, g.cols, g.live_cells)


class TestMutateFlip:
    def test_zero_rate_forces_exactly_one_flip(self, rng):
        g = random_seed(5, 5, 0.5, rng)
        for _ in range(50):
            child = mutate_flip(g, 0.0, rng)
            assert int(np.count_nonzero(child.bits != g.bits)) == 1

    def test_rate_one_complements(self, rng):
        g = random_seed(5, 5, 0.5, rng)
        child = mutate_flip(g, 1.0, rng)
        assert np.array_equal(child.bits, 1 - g.bits)

    def test_child_never_equals_parent(self, rng):
        g = random_seed(5, 5, 0.5, rng)
        assert all(mutate_flip(g, 0.01, rng) != g for _ in range(300))

    def test_mean_hamming_distance_includes_forcing(self, rng):
        g = random_seed(5, 5, 0.375, rng)
        total = sum(int(np.count_nonzero(mutate_flip(g, 0.01, rng).bits != g.bits))
                    for _ in range(10_000))
        assert 1.0 <= total / 10_000 <= 1.35


class TestGrowShrink:
    def test_grow_adds_one_line(self, rng):
        g = random_seed(5, 5, 0.5, rng)
        child = grow(g, 0.375, rng)
        assert (child.rows, child.cols) in {(6, 5), (5, 6)}

    def test_grow_zero_density_line_is_empty(self, rng):
        g = random_seed(5, 5, 1.0, rng)
        child = grow(g, 0.0, rng)
        assert child.live_cells == g.live_cells

    def test_grow_side_choice_is_uniform(self, rng):
        g = random_seed(3, 3, 0.5, rng)
        sides = {"top": 0, "bottom": 0, "left": 0, "right": 0}
        for _ in range(4000):
            child = grow(g, 0.5, rng)
            if child.rows > g.rows:
                sides["top" if np.array_equal(child.bits[1:], g.bits) else "bottom"] += 1
            else:
                sides["left" if np.array_equal(child.bits[:, 1:], g.bits) else "right"] += 1
        for count in sides.values():
            assert 0.23 <= count / 4000 <= 0.27

    def test_grow_is_undoable_by_cropping(self, rng):
        g = random_seed(4, 6, 0.5, rng)
        child = grow(g, 0.5, rng)
        crops = [child.bits[1:], child.bits[:-1], child.bits[:, 1:], child.bits[:, :-1]]
        assert any(c.shape == g.bits.shape and np.array_equal(c, g.bits) for c in crops)

    def test_shrink_at_floor_is_identity(self, rng):
        g = random_seed(5, 5, 0.5, rng)
        assert shrink(g, 5, 5, rng) is g

    def test_shrink_only_legal_axis(self, rng):
        g = random_seed(6, 5, 0.5, rng)
        child = shrink(g, 5, 5, rng)
        assert (child.rows, child.cols) == (5, 5)

    def test_shrink_preserves_inner_submatrix(self, rng):
        for _ in range(200):
            g = random_seed(8, 8, 0.5, rng)
            child = shrink(g, 5, 5, rng)
            candidates = [g.bits[1:], g.bits[:-1], g.bits[:, 1:], g.bits[:, :-1]]
            assert any(c.shape == child.bits.shape and np.array_equal(c, child.bits)
                       for c in candidates)


class TestSimilarity:
    def test_identical_is_one(self, rng):
        g = random_seed(5, 5, 0.5, rng)
        assert similarity(g, g) == 1.0

    def test_different_shapes_are_zero(self, rng):
        assert similarity(random_seed(5, 5, 0.5, rng), random_seed(5, 6, 0.5, rng)) == 0.0

    def test_counts_matching_cells(self):
        a = genome_of([[1] * 5] * 5)
        bits = np.ones((5, 5), np.uint8)
        bits[0, :5] = 0
        b = SeedGenome(bits)
        assert similarity(a, b) == 0.8

    def test_symmetry(self, rng):
        a, b = random_seed(4, 4, 0.5, rng), random_seed(4, 4, 0.5, rng)
        assert similarity(a, b) == similarity(b, a)


class TestCrossover:
    def test_identical_parents_reproduce_themselves(self, rng):
        g = random_seed(5, 5, 0.5, rng)
        assert crossover(g, g, rng) == g

    def test_known_row_cut(self):
        a = genome_of([[1, 1], [1, 1]])
        b = genome_of([[0, 0], [0, 0]])
        child = crossover(a, b, np.random.default_rng(0))
        # Only one cut position exists per axis on 2x2 parents.
        assert child in (genome_of([[1, 1], [0, 0]]), genome_of([[1, 0], [1, 0]]))

    def test_lines_come_verbatim_from_parents(self, rng):
        for _ in range(300):
            a = random_seed(6, 6, 0.5, rng)
            b = random_seed(6, 6, 0.5, rng)
            child = crossover(a, b, rng)
            rows_ok = all(
                np.array_equal(child.bits[i], a.bits[i])
                or np.array_equal(child.bits[i], b.bits[i])
                for i in range(6))
            cols_ok = all(
                np.array_equal(child.bits[:, j], a.bits[:, j])
                or np.array_equal(child.bits[:, j], b.bits[:, j])
                for j in range(6))
            assert rows_ok or cols_ok

    def test_dimension_mismatch_raises(self, rng):
        with pytest.raises(DimensionMismatch):
            crossover(random_seed(5, 5, 0.5, rng), random_seed(5, 6, 0.5, rng), rng)


class TestRotate:
    def test_zero_turns_is_identity(self, rng):
        g = random_seed(3, 5, 0.5, rng)
        assert rotate(g, 0) == g

    def test_four_turns_is_identity(self, rng):
        g = random_seed(3, 5, 0.5, rng)
        assert rotate(g, 4) == g

    def test_row_becomes_column(self):
        g = genome_of([[1, 0, 1]])
        turned = rotate(g, 1)
        assert (turned.rows, turned.cols) == (3, 1)
        assert list(turned.bits[:, 0]) == [1, 0, 1]

    def test_counterclockwise_convention(self):
        g = genome_of([[1, 0], [0, 0]])
        # CCW: the top-left cell moves to the bottom-left.
        assert rotate(g, 1) == genome_of([[0, 0], [1, 0]])

    def test_live_count_preserved(self, rng):
        g = random_seed(4, 7, 0.5, rng)
        assert all(rotate(g, k).live_cells == g.live_cells for k in range(4))


class TestFuse:
    def test_equal_squares_form_buffered_pair(self, rng):
        a = genome_of([[1] * 5] * 5)
        b = genome_of([[1] * 5] * 5)
        fused = fuse(a, b, rng)
        assert (fused.rows, fused.cols) == (5, 11)
        assert fused.bits[:, 5].sum() == 0

    def test_all_zero_inputs_fuse_to_all_zero(self, rng):
        z = SeedGenome(np.zeros((3, 3), np.uint8))
        assert fuse(z, z, rng).live_cells == 0

    def test_live_count_is_additive(self, rng):
        for _ in range(200):
            a = random_seed(3, 6, 0.5, rng)
            b = random_seed(5, 2, 0.5, rng)
            assert fuse(a, b, rng).live_cells == a.live_cells + b.live_cells

    def test_shorter_block_centres_with_extra_row_on_top(self, rng):
        a = genome_of([[1] * 4] * 4)   # rotation-invariant
        b = genome_of([[1]])
        fused = fuse(a, b, rng)
        assert (fused.rows, fused.cols) == (4, 6)
        # Gap of 3 rows splits 2 above, 1 below.
        assert fused.bits[2, 5] == 1
        assert fused.bits[:, 5].sum() == 1


class TestFission:
    def test_split_at_zero_buffer_column(self, rng):
        left = np.ones((5, 5), np.uint8)
        buffered = np.hstack([left, np.zeros((5, 1), np.uint8), left])
        g = SeedGenome(buffered)
        kept = fission(g, 5, 5, rng)
        assert kept is not None
        assert (kept.rows, kept.cols) == (5, 5)
        assert kept.live_cells == 25

    def test_minimum_sized_seed_is_rejected(self, rng):
        g = random_seed(5, 5, 0.5, rng)
        assert fission(g, 5, 5, rng) is None

    def test_kept_part_matches_independent_scan(self, rng):
        for _ in range(300):
            g = random_seed(7, 9, 0.4, rng)
            kept = fission(g, 1, 1, rng)
            # Independent sparsest-line scan: rows first, then columns.
            densities = [(g.bits[i].sum() / g.cols, 0, i) for i in range(g.rows)]
            densities += [(g.bits[:, j].sum() / g.rows, 1, j) for j in range(g.cols)]
            best = min(densities, key=lambda t: t[0])
            axis, index = best[1], best[2]
            if axis == 0:
                parts = (g.bits[:index], g.bits[index + 1:])
            else:
                parts = (g.bits[:, :index], g.bits[:, index + 1:])
            if kept is None:
                assert any(p.size == 0 for p in parts)
            else:
                assert any(p.shape == kept.bits.shape and np.array_equal(p, kept.bits)
                           for p in parts)
                assert parts[0].size + parts[1].size + (g.cols if axis == 0 else g.rows) \
                    == g.area

    def test_tie_breaks_to_first_row_in_scan_order(self, rng):
        # Row 2 and column 2 are both all-dead; the row must win the tie.
        bits = np.ones((5, 5), np.uint8)
        bits[2, :] = 0
        bits[:, 2] = 0
        g = SeedGenome(bits)
        for _ in range(20):
            kept = fission(g, 1, 1, rng)
            assert kept is not None
            assert (kept.rows, kept.cols) == (2, 5)  # row split keeps full width


class TestShuffle:
    def test_all_zero_stays_all_zero(self, rng):
        z = SeedGenome(np.zeros((4, 4), np.uint8))
        assert shuffle(z, rng).live_cells == 0

    def test_multiset_of_bits_is_preserved(self, rng):
        for _ in range(200):
            g = random_seed(5, 7, 0.4, rng)
            shuffled = shuffle(g, rng)
            assert shuffled.bits.shape == g.bits.shape
            assert shuffled.live_cells == g.live_cells

    def test_cell_occupancy_is_uniform(self, rng):
        g = random_seed_exact(10, 10, 30, rng)
        hits = np.zeros((10, 10))
        trials = 10_000
        for _ in range(trials):
            hits += shuffle(g, rng).bits
        freq = hits / trials
        assert freq.min() >= 0.28 and freq.max() <= 0.32
