"""Wavefunctions on uniform grids and their transformation into superposed frames.

Grids are cell-centered and symmetric about the origin: along an axis with
``n`` nodes and half-width ``L`` the nodes sit at ``(j - (n - 1)/2) * dx``
with ``dx = 2L/n``. Sign flips and axis swaps therefore map nodes onto
nodes, which keeps quarter-turn rotations exact. Arrays use ``ij``
indexing: ``values[ix, iy]``.

A configuration-space grid for ``n`` particles in ``d`` dimensions has
``n * d`` axes, particle ``I`` owning axes ``I*d .. I*d + d - 1``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import resampling
from .errors import ClippingError, GridError, ValidationError
from .frame_algebra import FrameSuperposition
from .transforms import EuclideanTransform

log = logging.getLogger(__name__)

MAX_CLIPPED = 1e-6


@dataclass(frozen=True)
class GridSpec:
    n: tuple[int, ...]
    extent: tuple[float, ...]

    def __post_init__(self):
        n = tuple(int(v) for v in np.atleast_1d(self.n))
        ext = tuple(float(v) for v in np.atleast_1d(self.extent))
        if len(ext) == 1 and len(n) > 1:
            ext = ext * len(n)
        if len(ext) != len(n):
            raise ValidationError(f"{len(n)} axis sizes but {len(ext)} extents")
        for v in n:
            if v < 2 or v & (v - 1):
                raise ValidationError(f"nodes per axis must be a power of two >= 2, got {v}")
        if not all(e > 0 and math.isfinite(e) for e in ext):
            raise ValidationError(f"half-widths must be positive, got {ext}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "extent", ext)

    @classmethod
    def square(cls, n: int, half_width: float, ndim: int = 2) -> GridSpec:
        return cls((n,) * ndim, (half_width,) * ndim)

    @property
    def ndim(self) -> int:
        return len(self.n)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.n

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(2.0 * e / k for e, k in zip(self.extent, self.n))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axis(self, i: int) -> np.ndarray:
        k = self.n[i]
        return (np.arange(k) - (k - 1) / 2.0) * self.spacing[i]

    def axes(self) -> list[np.ndarray]:
        return [self.axis(i) for i in range(self.ndim)]

    def mesh(self) -> np.ndarray:
        """Node coordinates, shape ``(ndim, *n)``."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"))

    def to_index(self, coords: np.ndarray) -> np.ndarray:
        """Fractional node index of physical coordinates (shape ``(ndim, ...)``)."""
        dx = np.array(self.spacing).reshape((-1,) + (1,) * (coords.ndim - 1))
        half = np.array([(k - 1) / 2.0 for k in self.n]).reshape(dx.shape)
        return coords / dx + half

    def wavenumbers(self) -> list[np.ndarray]:
        return [2.0 * np.pi * np.fft.fftfreq(k, d=d) for k, d in zip(self.n, self.spacing)]


@dataclass(frozen=True, eq=False)
class WaveField:
    """Single-particle wavefunction sampled on ``grid`` at ``time``."""

    grid: GridSpec
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex)
        if vals.shape != self.grid.shape:
            raise GridError(f"values have shape {vals.shape}, grid is {self.grid.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValidationError("wavefunction values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "time", float(self.time))

    @property
    def n_particles(self) -> int:
        return 1

    @property
    def particle_dim(self) -> int:
        return self.grid.ndim // self.n_particles

    def with_values(self, values: np.ndarray, time: float | None = None):
        return replace(self, values=values, time=self.time if time is None else time)

    def __add__(self, other):
        _check_same_grid(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return self.with_values(self.values - other.values)

    def __mul__(self, scalar: complex):
        return self.with_values(self.values * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class MultiParticleField(WaveField):
    """Wavefunction of ``n_particles`` particles over a product grid."""

    particles: int = 2

    def __post_init__(self):
        super().__post_init__()
        if self.particles < 1 or self.grid.ndim % self.particles:
            raise ValidationError(
                f"{self.grid.ndim} grid axes cannot be split among {self.particles} particles")

    @property
    def n_particles(self) -> int:
        return self.particles


def _check_same_grid(a: WaveField, b: WaveField) -> None:
    if a.grid != b.grid:
        raise GridError(f"grids differ: {a.grid} vs {b.grid}")
    if a.n_particles != b.n_particles:
        raise GridError("fields describe different particle numbers")


def l2_norm(psi: WaveField) -> float:
    return math.sqrt(float(np.sum(np.abs(psi.values) ** 2)) * psi.grid.cell_volume)


def l2_distance(a: WaveField, b: WaveField) -> float:
    _check_same_grid(a, b)
    return math.sqrt(float(np.sum(np.abs(a.values - b.values) ** 2)) * a.grid.cell_volume)


def normalized(psi: WaveField) -> WaveField:
    return psi * (1.0 / l2_norm(psi))


def _check_dims(psi: WaveField, sup_dim: int) -> None:
    if sup_dim != psi.particle_dim:
        raise ValidationError(
            f"{sup_dim}-D transforms cannot act on {psi.particle_dim}-D particle coordinates")


def map_points(t: EuclideanTransform, coords: np.ndarray, n_particles: int) -> np.ndarray:
    """Apply ``t`` to every particle's coordinate block of ``coords``."""
    d = coords.shape[0] // n_particles
    return np.concatenate([t(coords[i * d:(i + 1) * d]) for i in range(n_particles)])


def resample(psi: WaveField, t: EuclideanTransform, values: np.ndarray | None = None) -> np.ndarray:
    """``values(t x')`` on the nodes x' of ``psi.grid`` (defaults to ``psi.values``)."""
    _check_dims(psi, t.dim)
    src = psi.values if values is None else values
    mapped = map_points(t, psi.grid.mesh(), psi.n_particles)
    out, _ = resampling.sample(src, psi.grid.to_index(mapped))
    return out


def is_lattice_exact(psi: WaveField, t: EuclideanTransform) -> bool:
    mapped = map_points(t, psi.grid.mesh(), psi.n_particles)
    return resampling.is_lattice(psi.grid.to_index(mapped))


def clipped_fraction(psi: WaveField, sup: FrameSuperposition) -> float:
    """Largest fraction of ``|psi|^2`` that some term maps from outside the grid box."""
    weights = np.abs(psi.values) ** 2
    total = float(np.sum(weights))
    if total == 0.0:
        return 0.0
    mesh = psi.grid.mesh()
    n = np.array(psi.grid.n).reshape((-1,) + (1,) * psi.grid.ndim)
    worst = 0.0
    for t, _ in sup.terms:
        pre = psi.grid.to_index(map_points(t.inverse(), mesh, psi.n_particles))
        outside = np.any((pre < -0.5) | (pre > n - 0.5), axis=0)
        worst = max(worst, float(np.sum(weights[outside])) / total)
    return worst


def transform_field(psi: WaveField, sup: FrameSuperposition,
                    max_clipped: float = MAX_CLIPPED) -> WaveField:
    """Field seen from the superposed frame: ``sum_k c_k psi(T_k x')``.

    Every particle's coordinates go through the same ``T_k`` within a term.
    Terms are summed in canonical order. Raises :class:`ClippingError` when
    more than ``max_clipped`` of the probability mass falls off the grid.
    """
    _check_dims(psi, sup.dim)
    clipped = clipped_fraction(psi, sup)
    if clipped > max_clipped:
        raise ClippingError(f"{clipped:.3e} of the norm mapped outside the grid")
    if clipped > 0.0:
        log.debug("transform_field: clipped mass fraction %.3e", clipped)
    out = np.zeros(psi.grid.shape, dtype=complex)
    for t, c in sup.terms:
        out += c * resample(psi, t)
    return psi.with_values(out)


def transform_multiparticle(psi: MultiParticleField, sup: FrameSuperposition,
                            max_clipped: float = MAX_CLIPPED) -> MultiParticleField:
    return transform_field(psi, sup, max_clipped)


# --- analytic test states -------------------------------------------------

def gaussian_values(points: np.ndarray, center: Sequence[float], width: float,
                    momentum: Sequence[float] | None = None) -> np.ndarray:
    """``(pi s^2)^(-d/4) exp(-|x-c|^2 / (2 s^2) + i p.x)`` at ``points`` (shape ``(d, ...)``)."""
    d = points.shape[0]
    c = np.asarray(center, dtype=float).reshape((d,) + (1,) * (points.ndim - 1))
    p = np.zeros(d) if momentum is None else np.asarray(momentum, dtype=float)
    p = p.reshape(c.shape)
    r2 = np.sum((points - c) ** 2, axis=0)
    phase = np.sum(p * points, axis=0)
    return (math.pi * width ** 2) ** (-d / 4) * np.exp(-r2 / (2 * width ** 2) + 1j * phase)


def gaussian(grid: GridSpec, center: Sequence[float] | None = None, width: float = 1.0,
             momentum: Sequence[float] | None = None, time: float = 0.0) -> WaveField:
    center = np.zeros(grid.ndim) if center is None else center
    return WaveField(grid, gaussian_values(grid.mesh(), center, width, momentum), time)


def gaussian_gradient(center, width: float, momentum=None) -> Callable[[np.ndarray], np.ndarray]:
    """Analytic gradient of :func:`gaussian_values`, shape ``(d, ...)``."""
    def grad(points: np.ndarray) -> np.ndarray:
        d = points.shape[0]
        c = np.asarray(center, dtype=float).reshape((d,) + (1,) * (points.ndim - 1))
        p = np.zeros(c.shape) if momentum is None else np.asarray(momentum, dtype=float).reshape(c.shape)
        return gaussian_values(points, center, width, momentum) * (-(points - c) / width ** 2 + 1j * p)
    return grad


def gaussian_laplacian(center, width: float, momentum=None) -> Callable[[np.ndarray], np.ndarray]:
    """Analytic Laplacian of :func:`gaussian_values`."""
    def lap(points: np.ndarray) -> np.ndarray:
        d = points.shape[0]
        c = np.asarray(center, dtype=float).reshape((d,) + (1,) * (points.ndim - 1))
        p = np.zeros(c.shape) if momentum is None else np.asarray(momentum, dtype=float).reshape(c.shape)
        q = -(points - c) / width ** 2 + 1j * p
        return gaussian_values(points, center, width, momentum) * (np.sum(q * q, axis=0) - d / width ** 2)
    return lap


def spike(grid: GridSpec, node: Sequence[int], amplitude: complex = 1.0) -> WaveField:
    """Discrete position eigenstate: one nonzero node."""
    vals = np.zeros(grid.shape, dtype=complex)
    vals[tuple(node)] = amplitude
    return WaveField(grid, vals)


# --- derivative-transform checks -----------------------------------------

def central_gradient(values: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Second-order central differences (one-sided second order at the edges), shape ``(ndim, *n)``."""
    return np.stack([np.gradient(values, grid.spacing[ax], axis=ax, edge_order=2)
                     for ax in range(grid.ndim)])


def laplacian(values: np.ndarray, grid: GridSpec, axes: Sequence[int] | None = None) -> np.ndarray:
    """Standard (2*ndim+1)-point Laplacian with zero values beyond the grid."""
    axes = range(grid.ndim) if axes is None else axes
    out = np.zeros(values.shape, dtype=np.result_type(values, float))
    for ax in axes:
        padded = np.pad(values, [(1, 1) if a == ax else (0, 0) for a in range(values.ndim)])
        lo = np.take(padded, range(0, values.shape[ax]), axis=ax)
        hi = np.take(padded, range(2, values.shape[ax] + 2), axis=ax)
        out += (hi - 2.0 * values + lo) / grid.spacing[ax] ** 2
    return out


def _particle_axes(psi: WaveField, i: int) -> range:
    d = psi.particle_dim
    return range(i * d, (i + 1) * d)


def check_derivative_transform(psi: WaveField, sup: FrameSuperposition,
                               reference: Callable[[np.ndarray], np.ndarray] | None = None) -> float:
    """Max-norm gap in the chain rule for gradients of a transformed field.

    Compares the central-difference gradient of ``transform_field(psi, sup)``
    with ``sum_k c_k R_k^T (grad psi)(T_k x')``. By default ``grad psi`` is
    the same central-difference gradient, resampled at the mapped points,
    so the result isolates the transformation rule from truncation error.
    ``reference``, when given, returns the exact gradient at arbitrary
    points (shape ``(ndim, ...)``); the result then includes the O(dx^2)
    differencing error.
    """
    transformed = transform_field(psi, sup)
    lhs = central_gradient(transformed.values, psi.grid)
    grad_src = None if reference is not None else central_gradient(psi.values, psi.grid)
    mesh = psi.grid.mesh()
    rhs = np.zeros_like(lhs)
    d = psi.particle_dim
    for t, c in sup.terms:
        if reference is not None:
            g = reference(map_points(t, mesh, psi.n_particles))
        else:
            g = np.stack([resample(psi, t, grad_src[ax]) for ax in range(psi.grid.ndim)])
        for i in range(psi.n_particles):
            block = g[i * d:(i + 1) * d]
            rhs[i * d:(i + 1) * d] += c * np.tensordot(t.rotation.T, block, axes=1)
    return float(np.max(np.abs(lhs - rhs)))


def check_laplacian_transform(psi: WaveField, sup: FrameSuperposition,
                              reference: Callable[[np.ndarray], np.ndarray] | None = None) -> float:
    """Max-norm gap between each particle's Laplacian of the transformed field
    and the superposed, transformed Laplacians of ``psi``.

    ``reference`` returns exact per-particle Laplacians at arbitrary points,
    shape ``(n_particles, ...)`` (for one particle a plain ``(...)`` array is
    accepted).
    """
    transformed = transform_field(psi, sup)
    mesh = psi.grid.mesh()
    worst = 0.0
    src = None
    if reference is None:
        src = [laplacian(psi.values, psi.grid, _particle_axes(psi, i)) for i in range(psi.n_particles)]
    for i in range(psi.n_particles):
        lhs = laplacian(transformed.values, psi.grid, _particle_axes(psi, i))
        rhs = np.zeros_like(lhs)
        for t, c in sup.terms:
            if reference is not None:
                ref = np.asarray(reference(map_points(t, mesh, psi.n_particles)))
                rhs += c * (ref if ref.shape == lhs.shape else ref[i])
            else:
                rhs += c * resample(psi, t, src[i])
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst
