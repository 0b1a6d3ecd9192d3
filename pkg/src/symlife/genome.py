"""Seed genomes and the genetic operators that act on them.

A seed genome is a binary matrix: a 1 marks a cell that starts alive when
the seed is dropped into an Immigration Game arena. Everything in this
module is a pure function of its inputs plus an explicit numpy random
generator, so operators can be freely parallelised across distinct RNG
streams.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DimensionMismatch(ValueError):
    """Raised when crossover receives parents of different shapes."""


@dataclass(frozen=True, eq=False)
class SeedGenome:
    """Immutable binary matrix; the unit of heredity.

    ``bits`` is a read-only uint8 array of 0s and 1s with shape
    (rows, cols). Operators never mutate a genome in place; they return
    new ones.
    """

    bits: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.bits, dtype=np.uint8)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError(f"genome must be a non-empty 2-D matrix, got shape {arr.shape}")
        if arr.max(initial=0) > 1:
            raise ValueError("genome bits must be 0 or 1")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "bits", arr)

    @property
    def rows(self) -> int:
        return self.bits.shape[0]

    @property
    def cols(self) -> int:
        return self.bits.shape[1]

    @property
    def area(self) -> int:
        return self.bits.size

    @property
    def live_cells(self) -> int:
        return int(np.count_nonzero(self.bits))

    @property
    def density(self) -> float:
        return self.live_cells / self.area

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SeedGenome):
            return NotImplemented
        return self.bits.shape == other.bits.shape and bool(np.array_equal(self.bits, other.bits))

    def __repr__(self) -> str:
        return f"SeedGenome({self.rows}x{self.cols}, live={self.live_cells})"

    def to_text(self) -> str:
        """Canonical text form: ``rows cols`` then one 0/1 line per row."""
        lines = [f"{self.rows} {self.cols}"]
        lines.extend("".join(str(int(b)) for b in row) for row in self.bits)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SeedGenome":
        lines = text.splitlines()
        if not lines:
            raise ValueError("empty seed text")
        header = lines[0].split()
        if len(header) != 2:
            raise ValueError(f"bad seed header {lines[0]!r}, expected 'rows cols'")
        try:
            rows, cols = int(header[0]), int(header[1])
        except ValueError:
            raise ValueError(f"bad seed header {lines[0]!r}, expected 'rows cols'") from None
        body = lines[1:]
        if len(body) != rows:
            raise ValueError(f"expected {rows} rows of bits, got {len(body)}")
        bits = np.zeros((rows, cols), dtype=np.uint8)
        for i, line in enumerate(body):
            if len(line) != cols or any(c not in "01" for c in line):
                raise ValueError(f"row {i} is not {cols} characters of 0/1: {line!r}")
            bits[i] = [int(c) for c in line]
        return cls(bits)


def random_seed(rows: int, cols: int, density: float, rng: np.random.Generator) -> SeedGenome:
    """Bernoulli seed: each bit is 1 independently with probability ``density``."""
    if rows < 1 or cols < 1:
        raise ValueError("seed dimensions must be at least 1x1")
    if not 0.0 <= density <= 1.0:
        raise ValueError(f"density must be in [0, 1], got {density}")
    return SeedGenome((rng.random((rows, cols)) < density).astype(np.uint8))


def random_seed_exact(rows: int, cols: int, live_cells: int, rng: np.random.Generator) -> SeedGenome:
    """Seed with exactly ``live_cells`` ones placed uniformly at random.

    This is the matching variant used by the external fitness measure,
    where opponents must share the subject's live-cell count precisely,
    not just in expectation.
    """
    area = rows * cols
    if not 0 <= live_cells <= area:
        raise ValueError(f"live_cells must be in [0, {area}], got {live_cells}")
    flat = np.zeros(area, dtype=np.uint8)
    if live_cells:
        flat[rng.choice(area, size=live_cells, replace=False)] = 1
    return SeedGenome(flat.reshape(rows, cols))


def matched_random_seed(g: SeedGenome, rng: np.random.Generator) -> SeedGenome:
    """Random seed with the same rows, cols and live-cell count as ``g``."""
    return random_seed_exact(g.rows, g.cols, g.live_cells, rng)


def mutate_flip(g: SeedGenome, mutation_rate: float, rng: np.random.Generator) -> SeedGenome:
    """Flip each bit independently with probability ``mutation_rate``.

    At least one bit always flips: if no bit flipped by chance, one
    uniformly random bit is forced, so the child never equals the parent.
    """
    mask = rng.random(g.bits.shape) < mutation_rate
    if not mask.any():
        mask.flat[rng.integers(g.area)] = True
    return SeedGenome(g.bits ^ mask.astype(np.uint8))


def grow(g: SeedGenome, density: float, rng: np.random.Generator) -> SeedGenome:
    """Append one outer row or column of Bernoulli(density) bits.

    The side (top, bottom, left, right) is chosen uniformly.
    """
    side = int(rng.integers(4))
    if side < 2:
        line = (rng.random((1, g.cols)) < density).astype(np.uint8)
        stacked = np.vstack([line, g.bits]) if side == 0 else np.vstack([g.bits, line])
    else:
        line = (rng.random((g.rows, 1)) < density).astype(np.uint8)
        stacked = np.hstack([line, g.bits]) if side == 2 else np.hstack([g.bits, line])
    return SeedGenome(stacked)


def shrink(g: SeedGenome, min_rows: int, min_cols: int, rng: np.random.Generator) -> SeedGenome:
    """Remove one outer row or column, chosen uniformly among legal sides.

    Removals that would push the matrix below ``min_rows`` x ``min_cols``
    are excluded; if no legal removal exists the genome is returned
    unchanged.
    """
    legal: list[int] = []
    if g.rows > min_rows:
        legal += [0, 1]  # top, bottom
    if g.cols > min_cols:
        legal += [2, 3]  # left, right
    if not legal:
        return g
    side = legal[int(rng.integers(len(legal)))]
    if side == 0:
        return SeedGenome(g.bits[1:])
    if side == 1:
        return SeedGenome(g.bits[:-1])
    if side == 2:
        return SeedGenome(g.bits[:, 1:])
    return SeedGenome(g.bits[:, :-1])


def similarity(a: SeedGenome, b: SeedGenome) -> float:
    """Fraction of corresponding cells with equal values; 0 if shapes differ."""
    if a.bits.shape != b.bits.shape:
        return 0.0
    return int(np.count_nonzero(a.bits == b.bits)) / a.area


def crossover(a: SeedGenome, b: SeedGenome, rng: np.random.Generator) -> SeedGenome:
    """Single-point crossover along rows or columns, equal probability.

    A row cut k in {1, ..., rows-1} stacks a's rows [0, k) on b's rows
    [k, rows); the column form is the transpose analogue. Parents must
    share dimensions. A single-row (or single-column) pair can only be
    cut along the other axis; 1x1 parents yield a copy of ``a``.
    """
    if a.bits.shape != b.bits.shape:
        raise DimensionMismatch(
            f"cannot cross {a.rows}x{a.cols} with {b.rows}x{b.cols}; "
            "mate selection should only pair identical shapes"
        )
    axes = [ax for ax in (0, 1) if a.bits.shape[ax] >= 2]
    if not axes:
        return SeedGenome(a.bits)
    if len(axes) == 2:
        axis = 0 if rng.random() < 0.5 else 1
    else:
        axis = axes[0]
    cut = int(rng.integers(1, a.bits.shape[axis]))
    if axis == 0:
        child = np.vstack([a.bits[:cut], b.bits[cut:]])
    else:
        child = np.hstack([a.bits[:, :cut], b.bits[:, cut:]])
    return SeedGenome(child)


def rotate(g: SeedGenome, quarter_turns: int) -> SeedGenome:
    """Rotate by 90 degrees counterclockwise ``quarter_turns`` times."""
    return SeedGenome(np.rot90(g.bits, k=quarter_turns % 4))


def fuse(a: SeedGenome, b: SeedGenome, rng: np.random.Generator) -> SeedGenome:
    """Join two independently rotated seeds side by side.

    Each input is rotated by a uniform quarter-turn count (a's turns are
    drawn first). The rotated blocks sit left and right of a single
    all-zero buffer column; the shorter block is vertically centred with
    the extra padding row on top when the gap is odd.
    """
    ra = rotate(a, int(rng.integers(4)))
    rb = rotate(b, int(rng.integers(4)))
    height = max(ra.rows, rb.rows)
    out = np.zeros((height, ra.cols + 1 + rb.cols), dtype=np.uint8)
    top_a = (height - ra.rows + 1) // 2
    top_b = (height - rb.rows + 1) // 2
    out[top_a:top_a + ra.rows, :ra.cols] = ra.bits
    out[top_b:top_b + rb.rows, ra.cols + 1:] = rb.bits
    return SeedGenome(out)


def fission(
    g: SeedGenome, min_rows: int, min_cols: int, rng: np.random.Generator
) -> SeedGenome | None:
    """Split at the sparsest line, discard it, keep one part at random.

    All rows (top to bottom) then all columns (left to right) are scanned;
    the line with the lowest live-cell density wins, first in scan order
    on ties. The kept part is chosen uniformly between the two remainders.
    Returns None when the kept part would violate the minimum dimensions;
    the caller treats that as a rejection, not an error.
    """
    row_ones = g.bits.sum(axis=1, dtype=np.int64)
    col_ones = g.bits.sum(axis=0, dtype=np.int64)
    best_density = np.inf
    best: tuple[int, int] = (0, 0)  # (axis, index); axis 0 = row, 1 = column
    for i in range(g.rows):
        d = row_ones[i] / g.cols
        if d < best_density:
            best_density, best = d, (0, i)
    for j in range(g.cols):
        d = col_ones[j] / g.rows
        if d < best_density:
            best_density, best = d, (1, j)
    axis, index = best
    if axis == 0:
        parts = (g.bits[:index], g.bits[index + 1:])
    else:
        parts = (g.bits[:, :index], g.bits[:, index + 1:])
    kept = parts[int(rng.integers(2))]
    if kept.shape[0] < min_rows or kept.shape[1] < min_cols:
        return None
    return SeedGenome(kept)


def shuffle(g: SeedGenome, rng: np.random.Generator) -> SeedGenome:
    """Uniform random permutation of the cell values.

    Shape and live-cell count are preserved exactly; only the arrangement
    changes.
    """
    return SeedGenome(rng.permutation(g.bits.ravel()).reshape(g.bits.shape))
