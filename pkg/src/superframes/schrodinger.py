"""Split-step Fourier evolution (hbar = 1) and the frame-commutation checks."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import SimulationError, ValidationError
from .frame_algebra import FrameSuperposition
from .wavefield import (GridSpec, WaveField, gaussian_laplacian, l2_distance,
                        l2_norm, map_points, transform_field)

KINDS = ("free", "isotropic_harmonic", "anisotropic_harmonic", "pairwise_central")


@dataclass(frozen=True)
class Potential:
    """Time-independent potential on configuration space.

    ``isotropic_harmonic``: ``omega^2/2 * sum_I |x_I|^2``.
    ``anisotropic_harmonic``: per-axis frequencies ``omegas``; not rotation
    invariant, kept as a negative control.
    ``pairwise_central``: ``sum_{I<J} v(|x_I - x_J|)`` with ``v`` tabulated on
    ``r_table`` and interpolated linearly (clamped beyond the table).
    """

    kind: str = "free"
    omega: float = 1.0
    omegas: tuple[float, ...] = ()
    r_table: tuple[float, ...] = ()
    v_table: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown potential kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "anisotropic_harmonic" and not self.omegas:
            raise ValidationError("anisotropic_harmonic needs per-axis omegas")
        if self.kind == "pairwise_central":
            r = np.asarray(self.r_table, dtype=float)
            v = np.asarray(self.v_table, dtype=float)
            if r.size < 2 or r.shape != v.shape or np.any(np.diff(r) <= 0):
                raise ValidationError("pairwise_central needs increasing r_table and matching v_table")
        object.__setattr__(self, "omegas", tuple(float(w) for w in self.omegas))
        object.__setattr__(self, "r_table", tuple(float(x) for x in self.r_table))
        object.__setattr__(self, "v_table", tuple(float(x) for x in self.v_table))

    @classmethod
    def free(cls) -> Potential:
        return cls("free")

    @classmethod
    def isotropic_harmonic(cls, omega: float = 1.0) -> Potential:
        return cls("isotropic_harmonic", omega=float(omega))

    @classmethod
    def anisotropic_harmonic(cls, omegas: Sequence[float]) -> Potential:
        return cls("anisotropic_harmonic", omegas=tuple(omegas))

    @classmethod
    def pairwise_central(cls, r_table: Sequence[float], v_table: Sequence[float]) -> Potential:
        return cls("pairwise_central", r_table=tuple(r_table), v_table=tuple(v_table))

    def __call__(self, points: np.ndarray, n_particles: int = 1) -> np.ndarray:
        """Potential at configuration points of shape ``(n_particles * d, ...)``."""
        pts = np.asarray(points, dtype=float)
        d = pts.shape[0] // n_particles
        if self.kind == "free":
            return np.zeros(pts.shape[1:])
        if self.kind == "isotropic_harmonic":
            return 0.5 * self.omega ** 2 * np.sum(pts ** 2, axis=0)
        if self.kind == "anisotropic_harmonic":
            w = np.resize(np.asarray(self.omegas), d)
            out = np.zeros(pts.shape[1:])
            for i in range(n_particles):
                for j in range(d):
                    out += 0.5 * w[j] ** 2 * pts[i * d + j] ** 2
            return out
        out = np.zeros(pts.shape[1:])
        for i in range(n_particles):
            for j in range(i + 1, n_particles):
                r = np.sqrt(np.sum((pts[i * d:(i + 1) * d] - pts[j * d:(j + 1) * d]) ** 2, axis=0))
                out += np.interp(r, self.r_table, self.v_table)
        return out

    def on_grid(self, grid: GridSpec, n_particles: int = 1) -> np.ndarray:
        return self(grid.mesh(), n_particles)

    def describe(self) -> dict:
        if self.kind == "isotropic_harmonic":
            return {"kind": self.kind, "omega": self.omega}
        if self.kind == "anisotropic_harmonic":
            return {"kind": self.kind, "omega": list(self.omegas)}
        if self.kind == "pairwise_central":
            return {"kind": self.kind, "r": list(self.r_table), "v": list(self.v_table)}
        return {"kind": "free"}


@dataclass(frozen=True)
class EvolutionParams:
    dt: float
    steps: int
    masses: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValidationError(f"dt must be positive and finite, got {self.dt}")
        if int(self.steps) != self.steps or self.steps < 0:
            raise ValidationError(f"steps must be a nonnegative integer, got {self.steps}")
        masses = tuple(float(m) for m in self.masses)
        if any(not (m > 0) for m in masses):
            raise ValidationError("masses must be positive")
        object.__setattr__(self, "steps", int(self.steps))
        object.__setattr__(self, "masses", masses)

    def mass_of(self, particle: int) -> float:
        if not self.masses:
            return 1.0
        if len(self.masses) == 1:
            return self.masses[0]
        return self.masses[particle]


def _masses(psi: WaveField, masses: Sequence[float]) -> list[float]:
    if not masses:
        return [1.0] * psi.n_particles
    if len(masses) == 1:
        return [float(masses[0])] * psi.n_particles
    if len(masses) != psi.n_particles:
        raise ValidationError(f"{len(masses)} masses given for {psi.n_particles} particles")
    return [float(m) for m in masses]


def kinetic_symbol(psi: WaveField, masses: Sequence[float] = ()) -> np.ndarray:
    """``sum_I |k_I|^2 / (2 m_I)`` on the FFT frequency grid."""
    grid = psi.grid
    ms = _masses(psi, masses)
    d = psi.particle_dim
    ks = grid.wavenumbers()
    out = np.zeros(grid.shape)
    for ax, k in enumerate(ks):
        shape = [1] * grid.ndim
        shape[ax] = -1
        out = out + (k.reshape(shape) ** 2) / (2.0 * ms[ax // d])
    return out


def _check_resolution(psi: WaveField, tail: float = 1e-10) -> None:
    spec = np.abs(np.fft.fftn(psi.values)) ** 2
    total = float(np.sum(spec))
    if total == 0.0:
        return
    band = np.zeros(psi.grid.shape, dtype=bool)
    for ax, k in enumerate(psi.grid.n):
        f = np.abs(np.fft.fftfreq(k)) * k
        shape = [1] * psi.grid.ndim
        shape[ax] = -1
        band |= (f > k / 3).reshape(shape)
    frac = float(np.sum(spec[band])) / total
    if frac > tail:
        warnings.warn(f"state is under-resolved: {frac:.2e} of the norm sits in the top third "
                      "of the spectrum", RuntimeWarning, stacklevel=3)


def _propagate(psi: WaveField, v: Potential, dt: float, steps: int,
               masses: Sequence[float] = ()) -> WaveField:
    if steps == 0:
        return psi
    vgrid = v.on_grid(psi.grid, psi.n_particles)
    kick_half = np.exp(-0.5j * dt * vgrid)
    kick_full = kick_half * kick_half
    drift = np.exp(-1j * dt * kinetic_symbol(psi, masses))
    axes = tuple(range(psi.grid.ndim))
    phi = psi.values * kick_half
    for step in range(steps):
        phi = np.fft.ifftn(drift * np.fft.fftn(phi, axes=axes), axes=axes)
        phi *= kick_full if step < steps - 1 else kick_half
    if not np.all(np.isfinite(phi)):
        raise SimulationError("evolution produced non-finite values")
    return psi.with_values(phi, psi.time + steps * dt)


def evolve(psi: WaveField, v: Potential, p: EvolutionParams) -> WaveField:
    """Strang split-step evolution: half kick, drift, half kick per step.

    Periodic boundaries. Consecutive half kicks are fused. Warns when
    ``dt * max|V|`` exceeds 0.1 or when the state has spectral weight near
    the grid cutoff.
    """
    if p.steps == 0:
        return psi
    vmax = float(np.max(np.abs(v.on_grid(psi.grid, psi.n_particles))))
    if p.dt * vmax > 0.1:
        warnings.warn(f"dt * max|V| = {p.dt * vmax:.3g} exceeds 0.1", RuntimeWarning, stacklevel=2)
    _check_resolution(psi)
    return _propagate(psi, v, p.dt, p.steps, p.masses)


def energy(psi: WaveField, v: Potential, masses: Sequence[float] = ()) -> float:
    """Expectation of the Hamiltonian (spectral kinetic term) per unit norm."""
    spec = np.fft.fftn(psi.values)
    kin = float(np.sum(kinetic_symbol(psi, masses) * np.abs(spec) ** 2)) / float(np.sum(np.abs(spec) ** 2))
    dens = np.abs(psi.values) ** 2
    pot = float(np.sum(v.on_grid(psi.grid, psi.n_particles) * dens)) / float(np.sum(dens))
    return kin + pot


def commutation_fields(psi0: WaveField, v: Potential, p: EvolutionParams,
                       sup: FrameSuperposition) -> tuple[WaveField, WaveField]:
    """(evolve-then-transform, transform-then-evolve)."""
    return transform_field(evolve(psi0, v, p), sup), evolve(transform_field(psi0, sup), v, p)


def relative_gap(a: WaveField, b: WaveField) -> float:
    """``|a - b| / |a|`` in the discrete L2 norm."""
    norm = l2_norm(a)
    if norm == 0.0:
        return 0.0 if l2_norm(b) == 0.0 else math.inf
    return l2_distance(a, b) / norm


def commutation_residual(psi0: WaveField, v: Potential, p: EvolutionParams,
                         sup: FrameSuperposition) -> float:
    """Relative L2 gap between evolve-then-transform and transform-then-evolve."""
    return relative_gap(*commutation_fields(psi0, v, p, sup))


def check_potential_invariance(v: Potential, sup: FrameSuperposition, grid: GridSpec,
                               n_particles: int = 1) -> float:
    """``max |V(T_k x) - V(x)|`` over grid nodes and support transforms."""
    mesh = grid.mesh()
    base = v(mesh, n_particles)
    worst = 0.0
    for t, _ in sup.terms:
        worst = max(worst, float(np.max(np.abs(v(map_points(t, mesh, n_particles), n_particles) - base))))
    return worst


def time_derivative(psi: WaveField, v: Potential, p: EvolutionParams) -> np.ndarray:
    """Centered difference ``(psi(t+dt) - psi(t-dt)) / (2 dt)`` using single split steps."""
    fwd = _propagate(psi, v, p.dt, 1, p.masses)
    bwd = _propagate(psi, v, -p.dt, 1, p.masses)
    return (fwd.values - bwd.values) / (2.0 * p.dt)


def check_time_derivative_transform(psi: WaveField, v: Potential, p: EvolutionParams,
                                    sup: FrameSuperposition,
                                    reference: Callable[[np.ndarray], np.ndarray] | None = None) -> float:
    """Max-norm gap between d/dt of the transformed field and the transformed d/dt.

    By default both sides use centered differences over one step.
    ``reference`` replaces the right side with an exact time derivative
    evaluated at the mapped points, exposing the O(dt^2) differencing error.
    """
    lhs = time_derivative(transform_field(psi, sup), v, p)
    if reference is None:
        rhs = transform_field(psi.with_values(time_derivative(psi, v, p)), sup, max_clipped=math.inf).values
    else:
        mesh = psi.grid.mesh()
        rhs = np.zeros(psi.grid.shape, dtype=complex)
        for t, c in sup.terms:
            rhs += c * reference(map_points(t, mesh, psi.n_particles))
    return float(np.max(np.abs(lhs - rhs)))


def free_gaussian_dt(center, width: float, momentum=None,
                     mass: float = 1.0) -> Callable[[np.ndarray], np.ndarray]:
    """Exact ``d psi / dt = (i / 2m) laplacian psi`` of a free Gaussian at t = 0."""
    lap = gaussian_laplacian(center, width, momentum)
    return lambda pts: 0.5j / mass * lap(pts)
