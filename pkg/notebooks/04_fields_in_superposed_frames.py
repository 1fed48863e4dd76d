# %% [markdown]
# # A wavefunction seen from a superposed frame
#
# The field in the new frame is the amplitude-weighted sum of the field read
# through each motion. A single occupied node becomes one node per term.

# %%
import math

import numpy as np

from superframes import GridSpec, superposition, transform_field
from superframes.transforms import EuclideanTransform, planar
from superframes.wavefield import gaussian, l2_norm, spike

grid = GridSpec.square(64, 8.0)
dx = grid.spacing[0]
shifts = superposition("O", "O'", [EuclideanTransform.translation_only([4 * dx, 0]),
                                   EuclideanTransform.translation_only([-4 * dx, 0])],
                       [2 ** -0.5, 2 ** -0.5])
out = transform_field(spike(grid, (32, 32)), shifts)
print(np.argwhere(out.values != 0), out.values[out.values != 0])

# %% [markdown]
# A displaced Gaussian viewed through two quarter turns splits into two
# copies. The norm is reported, not restored.

# %%
psi = gaussian(grid, (2.0, 0.0), 1.0)
rot = superposition("O", "O'", [planar(math.pi / 2), planar(-math.pi / 2)], [2 ** -0.5, 2 ** -0.5])
print(l2_norm(psi), l2_norm(transform_field(psi, rot)))
