# %% [markdown]
# # Composing superposed frames
#
# A superposition of frames is a short list of rigid motions with complex
# amplitudes. Composing two of them multiplies amplitudes pairwise and
# composes the motions.

# %%
import math

from superframes import compose, identity_deviation, reverse, superposition
from superframes.transforms import planar, spatial

th, ga = math.radians(40), math.radians(25)
a = superposition("O", "O'", [spatial(th, (0, 0, 1)), spatial(-th, (0, 0, 1))], [0.5, 0.5j])
b = superposition("O'", "O''", [spatial(ga, (1, 0, 0)), spatial(-ga, (1, 0, 0))], [0.6, 0.8])
c = compose(a, b)
for t, amp in c.terms:
    print(t, amp)

# %% [markdown]
# Four paths, four terms. When two paths end on the same motion their
# amplitudes add, and they can cancel.

# %%
r = 1 / math.sqrt(2)
quarter = superposition("O", "O'", [planar(math.pi / 2), planar(-math.pi / 2)], [r, r])
twice = compose(quarter, superposition("O'", "O''", quarter.transforms, [r, r]))
print(twice)

# %% [markdown]
# Composing with the reverse gives the identity only for a single term.

# %%
print(identity_deviation(quarter))
print(compose(quarter, reverse(quarter)))
