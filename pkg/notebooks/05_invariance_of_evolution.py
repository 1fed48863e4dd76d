# %% [markdown]
# # Evolution commutes with the change of frame
#
# Evolve then transform, or transform then evolve: with a rotation-invariant
# potential the two agree. Quarter turns permute grid nodes, so the gap is
# rounding only. Other angles interpolate, and the gap shrinks with the grid.

# %%
import math
import warnings

from superframes import EvolutionParams, GridSpec, Potential, commutation_residual, superposition
from superframes.transforms import planar
from superframes.wavefield import gaussian

warnings.simplefilter("ignore", RuntimeWarning)
p = EvolutionParams(1e-3, 300)


def pair(angle):
    return superposition("O", "O'", [planar(angle), planar(-angle)], [2 ** -0.5, 2 ** -0.5])


for n in (64, 128, 256):
    psi = gaussian(GridSpec.square(n, 8.0), (0.5, -0.25), 1.0, (0.5, 0.25))
    print(n, commutation_residual(psi, Potential.isotropic_harmonic(1.0), p, pair(math.pi / 2)),
          commutation_residual(psi, Potential.free(), p, pair(math.pi / 6)))

# %% [markdown]
# An anisotropic trap is not invariant, and the gap stays large.

# %%
psi = gaussian(GridSpec.square(128, 8.0), (1.0, -0.5), 1.0, (0.5, 0.25))
print(commutation_residual(psi, Potential.anisotropic_harmonic([1.0, 1.5]), p, pair(math.pi / 2)))
