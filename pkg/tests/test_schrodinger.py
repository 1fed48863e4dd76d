import math
import warnings

import numpy as np
import pytest
from scipy.linalg import expm

from superframes.errors import SimulationError, ValidationError
from superframes.frame_algebra import make_delta, superposition
from superframes.schrodinger import (EvolutionParams, Potential, check_potential_invariance,
                                     check_time_derivative_transform, commutation_residual,
                                     energy, evolve, free_gaussian_dt, kinetic_symbol)
from superframes.transforms import EuclideanTransform, planar
from superframes.wavefield import (GridSpec, MultiParticleField, WaveField, gaussian, l2_norm,
                                   transform_field)

R = 1 / math.sqrt(2)
QUARTER = superposition("O", "O'", [planar(math.pi / 2), planar(-math.pi / 2)], [R, R])


def moments(psi):
    dens = np.abs(psi.values) ** 2
    dens = dens / dens.sum()
    mesh = psi.grid.mesh()
    mean = np.array([np.sum(dens * m) for m in mesh])
    var = sum(np.sum(dens * (m - c) ** 2) for m, c in zip(mesh, mean))
    return mean, var


def dense_kinetic(grid, mass=1.0):
    # T = F^-1 diag(k^2 / 2m) F, with F the unitary DFT built column by column
    n = int(np.prod(grid.shape))
    sym = kinetic_symbol(WaveField(grid, np.zeros(grid.shape)), (mass,)).ravel()
    eye = np.eye(n).reshape((n,) + grid.shape)
    f = np.stack([np.fft.fftn(e).ravel() for e in eye], axis=1)
    return np.linalg.solve(f, sym[:, None] * f)


def test_zero_steps_is_identity():
    psi = gaussian(GridSpec.square(32, 6.0))
    assert evolve(psi, Potential.free(), EvolutionParams(1e-3, 0)) is psi


def test_free_spreading_law():
    psi = gaussian(GridSpec.square(256, 8.0), (0.0, 0.0), 1.0)
    out = evolve(psi, Potential.free(), EvolutionParams(1e-3, 1000))
    _, var = moments(out)
    # per-axis variance of |psi|^2 is s^2 / 2, two axes
    assert var == pytest.approx(2.0, rel=1e-6)
    assert out.time == pytest.approx(1.0)


def test_norm_and_energy_conservation():
    psi = gaussian(GridSpec.square(128, 8.0), (1.5, 0.0), 1.0, (0.0, 1.5))
    v = Potential.isotropic_harmonic(1.0)
    out = evolve(psi, v, EvolutionParams(1e-3, 1000))
    assert abs(l2_norm(out) - l2_norm(psi)) <= 1e-12
    e0, e1 = energy(psi, v), energy(out, v)
    assert abs(e1 - e0) / abs(e0) <= 1e-8


@pytest.mark.filterwarnings("ignore:dt \\* max:RuntimeWarning")
def test_coherent_state_follows_classical_orbit_and_revives():
    grid = GridSpec.square(128, 8.0)
    psi = gaussian(grid, (1.5, 0.0), 1.0, (0.0, 1.5))
    v = Potential.isotropic_harmonic(1.0)
    steps = 2000
    dt = 2 * math.pi / steps
    quarter = evolve(psi, v, EvolutionParams(dt, steps // 4))
    mean, _ = moments(quarter)
    assert np.allclose(mean, [0.0, 1.5], atol=1e-5)
    full = evolve(quarter, v, EvolutionParams(dt, steps - steps // 4))
    overlap = abs(np.vdot(psi.values, full.values)) * grid.cell_volume
    assert overlap >= 1 - 1e-6


def test_linearity_of_evolution():
    grid = GridSpec.square(64, 8.0)
    psi = gaussian(grid, (1.0, 0.0), 1.0, (0.5, 0.0))
    phi = gaussian(grid, (-1.0, 0.5), 1.3)
    v, p = Potential.isotropic_harmonic(0.8), EvolutionParams(1e-3, 200)
    a, b = 0.3 - 0.2j, 1.1
    lhs = evolve(a * psi + b * phi, v, p)
    rhs = a * evolve(psi, v, p) + b * evolve(phi, v, p)
    assert np.max(np.abs(lhs.values - rhs.values)) <= 1e-12


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
@pytest.mark.parametrize("v", [Potential.free(), Potential.isotropic_harmonic(1.0)])
def test_split_step_matches_dense_matrix_exponential(v):
    grid = GridSpec.square(16, 4.0)
    psi = gaussian(grid, (0.5, -0.25), 1.0, (0.25, 0.0))
    dt, steps = 1e-2, 50
    t = dense_kinetic(grid)
    vd = np.diag(v.on_grid(grid).ravel())
    step = expm(-0.5j * dt * vd) @ expm(-1j * dt * t) @ expm(-0.5j * dt * vd)
    want = np.linalg.matrix_power(step, steps) @ psi.values.ravel()
    got = evolve(psi, v, EvolutionParams(dt, steps)).values.ravel()
    assert np.max(np.abs(got - want)) <= 1e-11
    # quarter-turn permutation commutes with the dense one-step propagator
    perm = transform_field(WaveField(grid, np.arange(256.0).reshape(16, 16)),
                           make_delta(planar(math.pi / 2))).values.real.ravel().astype(int)
    p = np.eye(256)[perm]
    assert np.max(np.abs(p @ step - step @ p)) <= 1e-12


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_free_evolution_matches_exact_exponential():
    grid = GridSpec.square(16, 4.0)
    psi = gaussian(grid, (0.5, -0.25), 1.0, (0.25, 0.0))
    exact = expm(-1j * 0.5 * dense_kinetic(grid)) @ psi.values.ravel()
    got = evolve(psi, Potential.free(), EvolutionParams(1e-2, 50)).values.ravel()
    assert np.max(np.abs(got - exact)) <= 1e-11


def test_commutation_identity_and_quarter_turn():
    grid = GridSpec.square(64, 8.0)
    psi = gaussian(grid, (0.5, -0.25), 1.0, (0.5, 0.25))
    for v in (Potential.free(), Potential.isotropic_harmonic(1.0)):
        p = EvolutionParams(1e-3, 200)
        assert commutation_residual(psi, v, p, make_delta(planar(0.0))) <= 1e-13
        assert commutation_residual(psi, v, p, QUARTER) <= 1e-10


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_commutation_detects_anisotropy():
    grid = GridSpec.square(64, 8.0)
    psi = gaussian(grid, (1.0, -0.5), 1.0, (0.5, 0.25))
    v = Potential.anisotropic_harmonic([1.0, 1.5])
    assert commutation_residual(psi, v, EvolutionParams(1e-2, 200), QUARTER) > 1e-3


def test_potential_invariance():
    grid = GridSpec.square(32, 4.0)
    rot = superposition("O", "O'", [planar(0.37), planar(-2.0), planar(math.pi / 2)], [1, 1, 1])
    assert check_potential_invariance(Potential.isotropic_harmonic(1.3), rot, grid) <= 1e-12
    assert check_potential_invariance(Potential.anisotropic_harmonic([1.0, 1.5]),
                                      make_delta(planar(math.pi / 6)), grid) > 1e-3
    pair = Potential.pairwise_central([0.0, 1.0, 2.0, 8.0, 16.0], [2.0, 1.0, 0.3, 0.0, 0.0])
    shift = superposition("O", "O'", [EuclideanTransform.translation_only([0.5]),
                                      EuclideanTransform.translation_only([-1.25])], [1, 1])
    assert check_potential_invariance(pair, shift, GridSpec.square(32, 4.0), n_particles=2) <= 1e-12


def test_pairwise_central_values():
    pair = Potential.pairwise_central([0.0, 2.0], [1.0, 0.0])
    pts = np.array([[0.0, 1.0], [0.5, -1.0]])
    assert np.allclose(pair(pts, n_particles=2), [0.75, 0.0])


def test_two_particle_evolution_commutes_with_common_translation():
    grid = GridSpec.square(64, 8.0)
    x1, x2 = grid.mesh()
    psi = MultiParticleField(grid, np.exp(-(x1 - 1) ** 2 - (x2 + 1) ** 2 + 0.5j * x1), particles=2)
    # a finely tabulated smooth pair potential: coarse tables put kinks into V psi whose
    # broadband content the spectral step spreads to the box edges, where shifts clip it
    r = np.linspace(0, 24, 481)
    pair = Potential.pairwise_central(r, np.exp(-r ** 2))
    dx = grid.spacing[0]
    sup = superposition("O", "O'", [EuclideanTransform.translation_only([2 * dx]),
                                    EuclideanTransform.translation_only([-dx])], [0.6, 0.8j])
    p = EvolutionParams(1e-3, 100, (1.0, 2.0))
    assert commutation_residual(psi, pair, p, sup) <= 1e-10


def test_time_derivative_checks():
    grid = GridSpec.square(128, 8.0)
    args = ((0.5, -0.25), 1.0, (0.5, 0.25))
    psi = gaussian(grid, *args)
    v = Potential.free()
    assert check_time_derivative_transform(psi, v, EvolutionParams(1e-3, 1), QUARTER) <= 1e-8
    ref = free_gaussian_dt(*args)
    errs = [check_time_derivative_transform(psi, v, EvolutionParams(dt, 1), make_delta(planar(0.0)), ref)
            for dt in (1e-3, 2e-3, 4e-3)]
    assert 3.8 < errs[1] / errs[0] < 4.2 and 3.8 < errs[2] / errs[1] < 4.2


def test_params_validation_and_warnings():
    with pytest.raises(ValidationError):
        EvolutionParams(0.0, 10)
    with pytest.raises(ValidationError):
        EvolutionParams(1e-3, 2.5)
    with pytest.raises(ValidationError):
        EvolutionParams(1e-3, 10, (1.0, -1.0))
    with pytest.raises(ValidationError):
        Potential("quartic")
    grid = GridSpec.square(64, 8.0)
    psi = gaussian(grid, (0.0, 0.0), 1.0)
    with pytest.warns(RuntimeWarning, match="max"):
        evolve(psi, Potential.isotropic_harmonic(1.0), EvolutionParams(0.1, 1))
    with pytest.warns(RuntimeWarning, match="under-resolved"):
        evolve(gaussian(grid, (0.0, 0.0), 0.2), Potential.free(), EvolutionParams(1e-3, 1))


def test_non_finite_evolution_raises():
    grid = GridSpec.square(16, 4.0)
    x1, x2 = grid.mesh()
    psi = MultiParticleField(grid, np.exp(-x1 ** 2 - x2 ** 2), particles=2)
    bad = Potential.pairwise_central([0.0, 1.0], [math.inf, math.inf])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(SimulationError):
            evolve(psi, bad, EvolutionParams(1e-3, 2))
