"""Shared fixtures and independent oracle steppers.

The oracles here deliberately avoid the production kernel's pad-and-sum
mechanics: plain-Life stepping uses np.roll shifts, and the reference
two-colour stepper is a straight Python transcription of the update
rules, one cell at a time. Agreement between these and the engine is
what the engine tests assert.
"""

from __future__ import annotations

import numpy as np
import pytest


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0xC0FFEE)


def life_step_roll(grid: np.ndarray) -> np.ndarray:
    """Independent single-state B3/S23 step via toroidal np.roll shifts.

    Works on (..., H, W) stacks of 0/1 grids.
    """
    neighbours = np.zeros(grid.shape, dtype=np.int16)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy == 0 and dx == 0:
                continue
            neighbours += np.roll(grid, (dy, dx), axis=(-2, -1))
    born = (grid == 0) & (neighbours == 3)
    survive = (grid == 1) & ((neighbours == 2) | (neighbours == 3))
    return (born | survive).astype(np.uint8)


def immigration_step_slow(grid: np.ndarray) -> np.ndarray:
    """Reference two-colour step, pure Python, one cell at a time."""
    height, width = grid.shape
    out = np.zeros_like(grid)
    for r in range(height):
        for c in range(width):
            live = red = 0
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    if dy == 0 and dx == 0:
                        continue
                    value = grid[(r + dy) % height, (c + dx) % width]
                    if value:
                        live += 1
                        if value == 1:
                            red += 1
            if grid[r, c]:
                if live in (2, 3):
                    out[r, c] = grid[r, c]
            elif live == 3:
                out[r, c] = 1 if red >= 2 else 2
    return out


def random_soups(rng: np.random.Generator, count: int, height: int, width: int,
                 live_density: float = 0.35) -> np.ndarray:
    """Batch of random two-colour soups, shape (count, height, width)."""
    alive = rng.random((count, height, width)) < live_density
    colours = rng.integers(1, 3, size=(count, height, width)).astype(np.uint8)
    return np.where(alive, colours, np.uint8(0))
