"""Input checks shared by the estimators and the experiment harness."""

import numbers

import numpy as np

from .attack_model import AttackContext
from .exceptions import ValidationError
from .grid import Grid


def check_grid(grid):
    if isinstance(grid, AttackContext):
        return grid.grid
    if not isinstance(grid, Grid):
        raise TypeError(f"expected a Grid, got {type(grid).__name__}")
    if grid.N == 0:
        raise ValidationError("grid has no surviving nodes")
    return grid


def check_theta(theta):
    if not isinstance(theta, numbers.Real) or not 0.0 <= float(theta) <= 1.0:
        raise ValidationError(f"theta must be a number in [0, 1], got {theta!r}")
    return float(theta)


def check_positive(value, name):
    if not isinstance(value, numbers.Real) or not value > 0:
        raise ValidationError(f"{name} must be positive, got {value!r}")
    return float(value)


def check_non_negative(value, name):
    if not isinstance(value, numbers.Real) or not value >= 0:
        raise ValidationError(f"{name} must be non-negative, got {value!r}")
    return float(value)


def check_random_state(seed):
    """Anything ``numpy.random.default_rng`` accepts; a Generator passes through."""
    if isinstance(seed, np.random.RandomState):
        seed = seed.randint(np.iinfo(np.int32).max)
    return np.random.default_rng(seed)


def check_attack(attacked, size):
    """Boolean mask of length ``size`` from a mask or an iterable of indices."""
    arr = np.asarray(attacked)
    if arr.dtype == bool:
        if arr.shape != (size,):
            raise ValidationError(f"attack mask must have length {size}")
        return arr
    arr = arr.astype(np.intp).ravel()
    if len(arr) and (arr.min() < 0 or arr.max() >= size):
        raise ValidationError(f"component index outside [0, {size})")
    mask = np.zeros(size, dtype=bool)
    mask[arr] = True
    return mask


def check_attack_matrix(X, size):
    X = np.atleast_2d(np.asarray(X))
    if X.ndim != 2 or X.shape[1] != size:
        raise ValidationError(f"attack matrix must have shape (n_attacks, {size})")
    if not np.isin(X, (0, 1)).all():
        raise ValidationError("attack matrix entries must be 0 or 1")
    return X.astype(bool)
