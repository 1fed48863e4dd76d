"""Superpositions of classical reference frames.

Finitely supported complex wavefunctionals over rigid motions, their
composition calculus and Born-rule sampling, an exact finite-group model of
the composition rule, and numerical checks that Schrodinger evolution
commutes with transformation into a superposed frame.
"""
from .errors import (ClippingError, CompositionError, DegenerateStateError, GridError,
                     GroupError, ScenarioError, SimulationError, SuperframesError,
                     SupportError, ValidationError)
from .frame_algebra import (FrameId, FrameSuperposition, born_probabilities, born_sample,
                            born_samples, collapse, compose, compose_chain, identity_deviation,
                            make_delta, probability_mass, reverse, superposition)
from .group_kernel import (FiniteGroup, GroupWavefunction, brute_force_restricted_sum,
                           builtin_group, convolve, total_sum_check, verify_identity_relation)
from .schrodinger import (EvolutionParams, Potential, check_potential_invariance,
                          check_time_derivative_transform, commutation_residual, evolve)
from .transforms import EuclideanTransform, planar, spatial
from .wavefield import (GridSpec, MultiParticleField, WaveField, check_derivative_transform,
                        check_laplacian_transform, l2_distance, l2_norm, transform_field,
                        transform_multiparticle)

__version__ = "0.1.0"
