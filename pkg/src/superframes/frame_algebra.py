"""Finitely supported wavefunctionals over rigid motions between two frames.

A :class:`FrameSuperposition` from frame ``source`` to frame ``target`` holds
complex amplitudes on a finite set of transforms, each mapping ``target``
coordinates into ``source`` coordinates. Amplitudes are stored unnormalized;
normalization happens only when probabilities are requested.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import rng as _rng
from .errors import (CompositionError, DegenerateStateError, SupportError,
                     ValidationError)
from .transforms import EQUALITY_TOL, EuclideanTransform

ZERO_AMPLITUDE = 1e-15


@dataclass(frozen=True, order=True)
class FrameId:
    label: str

    def __post_init__(self):
        if not isinstance(self.label, str) or not self.label:
            raise ValidationError("frame label must be a nonempty string")

    def __str__(self) -> str:
        return self.label


def _frame(f: FrameId | str) -> FrameId:
    return f if isinstance(f, FrameId) else FrameId(f)


def _amplitude(c) -> complex:
    c = complex(c)
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise ValidationError(f"amplitude must be finite, got {c}")
    return c


def _merge(pairs: Iterable[tuple[EuclideanTransform, complex]]) -> list[tuple[EuclideanTransform, complex]]:
    """Coherently merge equal transforms, drop vanishing amplitudes, sort canonically.

    Amplitudes are accumulated in the order the pairs arrive, so callers that
    feed pairs in canonical order get order-independent results.
    """
    merged: list[list] = []
    for t, c in pairs:
        for slot in merged:
            if slot[0].isclose(t):
                slot[1] += c
                break
        else:
            merged.append([t, c])
    terms = [(t, c) for t, c in merged if abs(c) > ZERO_AMPLITUDE]
    terms.sort(key=lambda tc: tc[0].sort_key())
    return terms


class FrameSuperposition:
    """Immutable wavefunctional: a finite set of (transform, amplitude) terms.

    Terms carrying transforms equal within the transform tolerance are added
    coherently at construction, terms with ``|c| <= 1e-15`` are dropped, and
    what remains is sorted canonically. A superposition whose amplitudes all
    vanish is rejected.
    """

    __slots__ = ("_source", "_target", "_terms")

    def __init__(self, source: FrameId | str, target: FrameId | str,
                 terms: Iterable[tuple[EuclideanTransform, complex]]):
        src, dst = _frame(source), _frame(target)
        checked = []
        for t, c in terms:
            if not isinstance(t, EuclideanTransform):
                raise ValidationError(f"expected EuclideanTransform, got {type(t).__name__}")
            checked.append((t, _amplitude(c)))
        if not checked:
            raise ValidationError("a superposition needs at least one term")
        dims = {t.dim for t, _ in checked}
        if len(dims) != 1:
            raise ValidationError(f"mixed transform dimensions {sorted(dims)}")
        merged = _merge(checked)
        if not merged:
            raise DegenerateStateError(f"all amplitudes of Psi[{src}<-{dst}] vanish")
        self._source = src
        self._target = dst
        self._terms = tuple(merged)

    @property
    def source(self) -> FrameId:
        return self._source

    @property
    def target(self) -> FrameId:
        return self._target

    @property
    def terms(self) -> tuple[tuple[EuclideanTransform, complex], ...]:
        return self._terms

    @property
    def transforms(self) -> list[EuclideanTransform]:
        return [t for t, _ in self._terms]

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([c for _, c in self._terms], dtype=complex)

    @property
    def dim(self) -> int:
        return self._terms[0][0].dim

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def amplitude_of(self, t: EuclideanTransform, tol: float = EQUALITY_TOL) -> complex:
        """Amplitude on ``t``, zero when ``t`` is outside the support."""
        for s, c in self._terms:
            if s.isclose(t, tol):
                return c
        return 0j

    def isclose(self, other: FrameSuperposition, atol: float = 1e-12,
                tol: float = EQUALITY_TOL) -> bool:
        if (self.source, self.target) != (other.source, other.target) or len(self) != len(other):
            return False
        return all(s.isclose(t, tol) and abs(a - b) <= atol
                   for (s, a), (t, b) in zip(self._terms, other._terms))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FrameSuperposition):
            return NotImplemented
        return self.isclose(other)

    __hash__ = None

    def scaled(self, factor: complex) -> FrameSuperposition:
        return FrameSuperposition(self.source, self.target,
                                  [(t, c * factor) for t, c in self._terms])

    def __add__(self, other: FrameSuperposition) -> FrameSuperposition:
        """Term-union with coherent addition on shared transforms."""
        if (self.source, self.target) != (other.source, other.target):
            raise CompositionError("can only add superpositions between the same frames")
        return FrameSuperposition(self.source, self.target, list(self._terms) + list(other._terms))

    def __repr__(self) -> str:
        body = ", ".join(f"({t!r}, {c:.6g})" for t, c in self._terms)
        return f"FrameSuperposition({self.source}<-{self.target}: {body})"


def superposition(source, target, transforms: Sequence[EuclideanTransform],
                  amplitudes: Sequence[complex]) -> FrameSuperposition:
    if len(transforms) != len(amplitudes):
        raise ValidationError("transforms and amplitudes differ in length")
    return FrameSuperposition(source, target, zip(transforms, amplitudes))


def make_delta(t: EuclideanTransform, src: FrameId | str = "O",
               dst: FrameId | str = "O'") -> FrameSuperposition:
    """Fixed transform: a single term with amplitude one."""
    if not isinstance(t, EuclideanTransform):
        t = EuclideanTransform(*t)
    return FrameSuperposition(src, dst, [(t, 1.0 + 0j)])


def compose(a: FrameSuperposition, b: FrameSuperposition) -> FrameSuperposition:
    """Compose ``a`` (O <- O') with ``b`` (O' <- O'') into O <- O''.

    Every pair contributes ``amp_a * amp_b`` on ``t_a o t_b``; distinct pairs
    landing on the same transform interfere coherently.
    """
    if a.target != b.source:
        raise CompositionError(
            f"frame chain mismatch: {a.source}<-{a.target} then {b.source}<-{b.target}")
    if a.dim != b.dim:
        raise CompositionError(f"cannot compose {a.dim}-D and {b.dim}-D superpositions")
    pairs = [(ta.then(tb), ca * cb) for ta, ca in a.terms for tb, cb in b.terms]
    return FrameSuperposition(a.source, b.target, pairs)


def compose_chain(sups: Sequence[FrameSuperposition]) -> FrameSuperposition:
    if not sups:
        raise CompositionError("empty chain")
    out = sups[0]
    for nxt in sups[1:]:
        out = compose(out, nxt)
    return out


def reverse(a: FrameSuperposition) -> FrameSuperposition:
    """Inverse transforms with conjugated amplitudes; frames swapped."""
    return FrameSuperposition(a.target, a.source,
                              [(t.inverse(), c.conjugate()) for t, c in a.terms])


def identity_deviation(a: FrameSuperposition) -> float:
    """How far ``compose(a, reverse(a))`` is from a pure identity.

    Returns the summed magnitude off the identity divided by the magnitude
    on it: 0 for single-term superpositions, ``inf`` when the identity
    amplitude vanishes.
    """
    c = compose(a, reverse(a))
    on_identity = 0.0
    off_identity = 0.0
    for t, amp in c.terms:
        if t.is_identity():
            on_identity += abs(amp)
        else:
            off_identity += abs(amp)
    if on_identity == 0.0:
        return math.inf
    return off_identity / on_identity


def born_probabilities(a: FrameSuperposition) -> list[tuple[EuclideanTransform, float]]:
    weights = np.abs(a.amplitudes) ** 2
    total = math.fsum(weights)
    if not total > 0.0:
        raise DegenerateStateError("superposition has zero total weight")
    return [(t, float(w / total)) for t, w in zip(a.transforms, weights)]


def _cumulative(a: FrameSuperposition) -> np.ndarray:
    probs = np.array([p for _, p in born_probabilities(a)])
    return np.cumsum(probs)


def born_sample_indices(a: FrameSuperposition, n: int, seed: int) -> np.ndarray:
    """Indices into ``a.terms`` of ``n`` Born-rule draws (inverse CDF on the Philox stream)."""
    if n < 0:
        raise ValidationError("sample count must be nonnegative")
    cdf = _cumulative(a)
    u = _rng.uniforms(seed, n)
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, len(cdf) - 1)


def born_sample(a: FrameSuperposition, seed: int) -> EuclideanTransform:
    """One transform selected with Born probabilities; a pure function of ``seed``."""
    return a.terms[int(born_sample_indices(a, 1, seed)[0])][0]


def born_samples(a: FrameSuperposition, n: int, seed: int) -> list[EuclideanTransform]:
    return [a.terms[i][0] for i in born_sample_indices(a, n, seed)]


def collapse(a: FrameSuperposition, selected: EuclideanTransform,
             tol: float = EQUALITY_TOL) -> FrameSuperposition:
    for t, _ in a.terms:
        if t.isclose(selected, tol):
            return make_delta(t, a.source, a.target)
    raise SupportError(f"{selected!r} is not in the support of {a!r}")


def probability_mass(a: FrameSuperposition,
                     member: Callable[[EuclideanTransform], bool]) -> float:
    """Born probability that the selected transform satisfies ``member``."""
    return math.fsum(p for t, p in born_probabilities(a) if member(t))


def global_phase(a: FrameSuperposition, phi: float) -> FrameSuperposition:
    return a.scaled(cmath.exp(1j * phi))
