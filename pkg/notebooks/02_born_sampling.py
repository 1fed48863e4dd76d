# %% [markdown]
# # Selecting a transformation
#
# An interaction picks one motion with probability |amplitude|^2. Draws come
# from a Philox stream keyed by the seed, so a seed fixes the sequence.

# %%
import math

import numpy as np

from superframes import born_probabilities, collapse, superposition
from superframes.frame_algebra import born_sample_indices
from superframes.transforms import planar

state = superposition("O", "O'", [planar(math.radians(30)), planar(math.radians(-30))], [0.6, 0.8j])
print([round(p, 12) for _, p in born_probabilities(state)])

idx = born_sample_indices(state, 100_000, seed=20231220)
print(np.bincount(idx) / idx.size)

# %%
picked = state.terms[int(idx[0])][0]
print(collapse(state, picked))
