"""Shared fixtures and analytic helpers for the test suite."""

import numpy as np
import pytest

from torusmix import GridSpec, ScalarField, VectorField


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def grid64():
    return GridSpec(64)


def sine_field(grid, kx=1, ky=0, amp=1.0):
    x, y = grid.coordinates()
    return ScalarField.from_values(
        grid, amp * np.sin(2 * np.pi * (kx * x + ky * y))
    )


def product_sine_field(grid, kx=1, ky=1):
    x, y = grid.coordinates()
    return ScalarField.from_values(
        grid, np.sin(2 * np.pi * kx * x) * np.sin(2 * np.pi * ky * y)
    )


def mixture_field(grid):
    """A non-eigenfunction mixture (gives a non-degenerate descent velocity)."""
    x, y = grid.coordinates()
    v = np.sin(2 * np.pi * x) * np.sin(2 * np.pi * y) + 0.5 * np.sin(4 * np.pi * x)
    return ScalarField.from_values(grid, v)


def brute_force_ball_counts(mask_values, delta):
    """Independent pixel-count oracle for ball averages.

    Integer arithmetic throughout: a grid offset (dx, dy) is inside the ball
    iff min(dx, n-dx)^2 + min(dy, n-dy)^2 <= (delta*n)^2. Returns
    (counts array, ball size).
    """
    n = mask_values.shape[0]
    lim = delta * delta * n * n
    counts = np.zeros_like(mask_values, dtype=np.int64)
    size = 0
    mask_int = np.rint(mask_values).astype(np.int64)
    for dx in range(n):
        ax = min(dx, n - dx)
        if ax * ax > lim:
            continue
        for dy in range(n):
            ay = min(dy, n - dy)
            if ax * ax + ay * ay <= lim:
                # point x sees mask at x - offset
                counts += np.roll(mask_int, (dx, dy), axis=(0, 1))
                size += 1
    return counts, size
