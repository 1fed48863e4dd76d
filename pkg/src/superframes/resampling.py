"""Sampling grid data at arbitrary points.

Two paths: when every requested point sits on a grid node (quarter-turn
rotations, whole-cell translations) values are gathered by index, which is
exact. Otherwise separable cubic convolution (Keys kernel, a = -1/2) is used,
i.e. bicubic interpolation in two dimensions. Points outside the grid read
zero.
"""
from __future__ import annotations

import itertools

import numpy as np

LATTICE_TOL = 1e-9


def _keys_weights(t: np.ndarray) -> tuple[np.ndarray, ...]:
    # weights for nodes at offsets -1, 0, 1, 2 from floor(index)
    t2 = t * t
    t3 = t2 * t
    return (
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    )


def is_lattice(frac_index: np.ndarray, tol: float = LATTICE_TOL) -> bool:
    return bool(np.all(np.abs(frac_index - np.rint(frac_index)) < tol))


def gather(values: np.ndarray, index: np.ndarray) -> np.ndarray:
    """Values at integer node indices ``index`` (shape ``(ndim, ...)``), zero outside."""
    shape = np.array(values.shape).reshape((-1,) + (1,) * (index.ndim - 1))
    inside = np.all((index >= 0) & (index < shape), axis=0)
    clipped = np.where(inside, index, 0)
    out = values[tuple(clipped)]
    return np.where(inside, out, 0)


def cubic(values: np.ndarray, frac_index: np.ndarray) -> np.ndarray:
    """Tensor-product cubic convolution at fractional indices ``frac_index``."""
    base = np.floor(frac_index).astype(np.intp)
    weights = [_keys_weights(frac_index[ax] - base[ax]) for ax in range(values.ndim)]
    out = np.zeros(frac_index.shape[1:], dtype=np.result_type(values, float))
    for offsets in itertools.product(range(4), repeat=values.ndim):
        idx = np.stack([base[ax] + (o - 1) for ax, o in enumerate(offsets)])
        w = weights[0][offsets[0]]
        for ax in range(1, values.ndim):
            w = w * weights[ax][offsets[ax]]
        out += w * gather(values, idx)
    return out


def sample(values: np.ndarray, frac_index: np.ndarray) -> tuple[np.ndarray, bool]:
    """Sample at fractional node indices; returns (samples, used_exact_lattice_path)."""
    if is_lattice(frac_index):
        return gather(values, np.rint(frac_index).astype(np.intp)), True
    return cubic(values, frac_index), False
