"""Small input-validation helpers shared across modules."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import DimensionMismatchError

#: Absolute tolerance applied to denominators before dividing.
DENOMINATOR_TOL = 1e-14


def as_square(matrix, name: str) -> np.ndarray:
    """Return ``matrix`` as a complex square 2-D array or raise."""
    arr = np.asarray(matrix, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatchError(f"{name} must be a square matrix, got shape {arr.shape}")
    return arr


def frozen(arr: np.ndarray) -> np.ndarray:
    """Return a read-only copy so value objects stay immutable."""
    out = np.array(arr, copy=True)
    out.setflags(write=False)
    return out


def mode_indices(modes: Iterable[int], count: int, name: str = "modes") -> list[int]:
    """Validate 1-indexed mode labels and return them as 0-indexed positions.

    Args:
        modes: Mode labels, each in ``1..count``.
        count: Number of modes available.
        name: Field name used in error messages.

    Returns:
        Sorted list of zero-based indices.
    """
    labels = sorted(int(m) for m in modes)
    for m in labels:
        if m < 1 or m > count:
            raise ValueError(f"{name}: mode index {m} outside 1..{count}")
    if len(set(labels)) != len(labels):
        raise ValueError(f"{name}: duplicate mode index")
    return [m - 1 for m in labels]


def check_xi(xi: float) -> float:
    xi = float(xi)
    if not np.isfinite(xi) or xi < 0:
        raise ValueError(f"xi must be a finite nonnegative number, got {xi}")
    return xi
