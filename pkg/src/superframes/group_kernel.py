"""Exact group-algebra model of the restricted pair-sum composition rule.

On a finite group the functional integral over pairs (f, g) with f o g = h
becomes a finite sum, so the composition rule is the group-algebra
convolution. The continuum normalization constant is exactly 1 here:
counting measure needs no volume regularization.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import GroupError, ValidationError

MAX_ORDER = 64


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """Finite group given by its Cayley table ``cayley[f, g] = f o g``."""

    name: str
    cayley: np.ndarray
    labels: tuple = field(default=())

    def __post_init__(self):
        table = np.array(self.cayley, dtype=np.intp)
        n = table.shape[0] if table.ndim == 2 else 0
        if n == 0 or table.shape != (n, n):
            raise ValidationError(f"Cayley table must be square and nonempty, got {table.shape}")
        if n > MAX_ORDER:
            raise ValidationError(f"order {n} exceeds the dense-storage cap {MAX_ORDER}")
        expected = np.arange(n)
        rows_ok = np.all(np.sort(table, axis=1) == expected)
        cols_ok = np.all(np.sort(table, axis=0) == expected[:, None])
        if not (rows_ok and cols_ok):
            raise ValidationError(f"{self.name}: Cayley rows/columns are not permutations")
        # (f g) k == f (g k) for every triple
        if not np.array_equal(table[table, :], table[:, table]):
            raise ValidationError(f"{self.name}: operation is not associative")
        ident = [e for e in range(n)
                 if np.array_equal(table[e], expected) and np.array_equal(table[:, e], expected)]
        if len(ident) != 1:
            raise ValidationError(f"{self.name}: no unique two-sided identity")
        e = ident[0]
        inv = np.argmax(table == e, axis=1)
        if not np.all(table[inv, expected] == e):
            raise ValidationError(f"{self.name}: inverse table inconsistent")
        table.setflags(write=False)
        inv.setflags(write=False)
        object.__setattr__(self, "cayley", table)
        object.__setattr__(self, "_identity", e)
        object.__setattr__(self, "_inverse", inv)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(n)))

    @property
    def order(self) -> int:
        return self.cayley.shape[0]

    @property
    def identity_index(self) -> int:
        return self._identity

    @property
    def inverse(self) -> np.ndarray:
        return self._inverse

    def mul(self, f: int, g: int) -> int:
        return int(self.cayley[f, g])

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.cayley, self.cayley.T))

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, order={self.order})"


def _from_elements(name, elements, mul, key=lambda x: x, label=str) -> FiniteGroup:
    index = {key(x): i for i, x in enumerate(elements)}
    n = len(elements)
    table = np.empty((n, n), dtype=np.intp)
    for i, x in enumerate(elements):
        for j, y in enumerate(elements):
            table[i, j] = index[key(mul(x, y))]
    return FiniteGroup(name, table, tuple(label(x) for x in elements))


def cyclic(n: int) -> FiniteGroup:
    if not 1 <= n <= 16:
        raise ValidationError("cyclic groups are provided for 1 <= n <= 16")
    return _from_elements(f"C{n}", list(range(n)), lambda a, b: (a + b) % n,
                          label=lambda k: f"r{k}")


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the regular n-gon, order 2n; elements (s, k) mean s^s r^k."""
    if not 1 <= n <= 8:
        raise ValidationError("dihedral groups are provided for 1 <= n <= 8")
    elements = [(s, k) for s in (0, 1) for k in range(n)]

    def mul(x, y):
        s1, k1 = x
        s2, k2 = y
        # r^k s = s r^-k
        return ((s1 + s2) % 2, ((-k1 if s2 else k1) + k2) % n)

    return _from_elements(f"D{n}", elements, mul,
                          label=lambda e: ("s" if e[0] else "") + f"r{e[1]}")


def symmetric(n: int) -> FiniteGroup:
    if n not in (3, 4):
        raise ValidationError("symmetric groups S3 and S4 are provided")
    perms = list(itertools.permutations(range(n)))
    # (p o q)(i) = p(q(i))
    return _from_elements(f"S{n}", perms, lambda p, q: tuple(p[i] for i in q),
                          label=lambda p: "".join(map(str, p)))


def cube_rotations() -> FiniteGroup:
    """The 24 proper rotations of the cube as signed permutation matrices."""
    mats = []
    for perm in itertools.permutations(range(3)):
        for signs in itertools.product((1, -1), repeat=3):
            m = np.zeros((3, 3), dtype=int)
            for row, (col, sgn) in enumerate(zip(perm, signs)):
                m[row, col] = sgn
            if round(np.linalg.det(m)) == 1:
                mats.append(m)
    mats.sort(key=lambda m: (not np.array_equal(m, np.eye(3, dtype=int)), tuple(m.ravel())))
    return _from_elements("cube", mats, lambda a, b: a @ b, key=lambda m: tuple(m.ravel()),
                          label=lambda m: str(m.tolist()))


def catalog() -> list[str]:
    return ([f"C{n}" for n in range(1, 17)] + [f"D{n}" for n in range(1, 9)]
            + ["S3", "S4", "cube"])


@lru_cache(maxsize=None)
def builtin_group(name: str) -> FiniteGroup:
    """Look up a built-in group by name (``C4``, ``D4``, ``S3``, ``S4``, ``cube``...)."""
    key = name.strip()
    if key in ("cube", "O", "cube_rotations"):
        return cube_rotations()
    if key in ("S3", "S4"):
        return symmetric(int(key[1]))
    if len(key) > 1 and key[0] in "CD" and key[1:].isdigit():
        n = int(key[1:])
        try:
            return cyclic(n) if key[0] == "C" else dihedral(n)
        except ValidationError:
            pass
    raise GroupError(f"unknown group {name!r}; available: {', '.join(catalog())}")


class GroupWavefunction:
    """Dense complex amplitude per group element."""

    __slots__ = ("group", "amplitudes")

    def __init__(self, group: FiniteGroup, amplitudes):
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        if amps.size != group.order:
            raise ValidationError(f"expected {group.order} amplitudes, got {amps.size}")
        if not np.all(np.isfinite(amps)):
            raise ValidationError("amplitudes must be finite")
        amps.setflags(write=False)
        self.group = group
        self.amplitudes = amps

    @classmethod
    def delta(cls, group: FiniteGroup, element: int) -> GroupWavefunction:
        amps = np.zeros(group.order, dtype=complex)
        amps[element] = 1.0
        return cls(group, amps)

    @classmethod
    def uniform(cls, group: FiniteGroup, value: complex | None = None) -> GroupWavefunction:
        v = 1.0 / group.order if value is None else value
        return cls(group, np.full(group.order, v, dtype=complex))

    @classmethod
    def random(cls, group: FiniteGroup, rng: np.random.Generator,
               normalized: bool = True) -> GroupWavefunction:
        amps = rng.normal(size=group.order) + 1j * rng.normal(size=group.order)
        if normalized:
            amps /= np.linalg.norm(amps)
        return cls(group, amps)

    def __getitem__(self, element: int) -> complex:
        return complex(self.amplitudes[element])

    def __len__(self) -> int:
        return self.group.order

    def __repr__(self) -> str:
        return f"GroupWavefunction({self.group.name}, {self.amplitudes!r})"


def _same_group(a: GroupWavefunction, b: GroupWavefunction) -> FiniteGroup:
    if a.group is not b.group and not (a.group.name == b.group.name
                                       and np.array_equal(a.group.cayley, b.group.cayley)):
        raise GroupError(f"operands live on different groups ({a.group.name}, {b.group.name})")
    return a.group


def convolve(a: GroupWavefunction, b: GroupWavefunction) -> GroupWavefunction:
    """``out[h] = sum over f o g = h of a[f] b[g]``.

    Outer loop over f in increasing order; each Cayley row is a permutation
    so the inner scatter touches every h exactly once.
    """
    group = _same_group(a, b)
    out = np.zeros(group.order, dtype=complex)
    for f in range(group.order):
        out[group.cayley[f]] += a.amplitudes[f] * b.amplitudes
    return GroupWavefunction(group, out)


def brute_force_restricted_sum(a: GroupWavefunction, b: GroupWavefunction, h: int) -> complex:
    """Enumerate every ordered pair and keep those whose product is ``h``."""
    group = _same_group(a, b)
    n = group.order
    if not 0 <= h < n:
        raise GroupError(f"element {h} is not in {group.name}")
    table = group.cayley.tolist()
    fa = a.amplitudes.tolist()
    gb = b.amplitudes.tolist()
    total = 0j
    for f in range(n):
        row = table[f]
        for g in range(n):
            if row[g] == h:
                total += fa[f] * gb[g]
    return total


def reverse_group(a: GroupWavefunction) -> GroupWavefunction:
    """``a[f] -> conj(a[f^-1])``, the discrete counterpart of frame reversal."""
    return GroupWavefunction(a.group, np.conj(a.amplitudes[a.group.inverse]))


def verify_identity_relation(a: GroupWavefunction) -> float:
    """Magnitude of ``(a * reverse(a))`` at the identity, i.e. ``sum |a[f]|^2``."""
    return float(abs(convolve(a, reverse_group(a))[a.group.identity_index]))


def total_sum_check(a: GroupWavefunction, b: GroupWavefunction, tol: float = 1e-12) -> complex:
    """Sum of the convolution over all h; raises if it differs from ``sum(a) * sum(b)``.

    The tolerance is relative to ``max(1, sum|a| * sum|b|)``.
    """
    total = complex(np.sum(convolve(a, b).amplitudes))
    expected = complex(np.sum(a.amplitudes)) * complex(np.sum(b.amplitudes))
    scale = max(1.0, float(np.sum(np.abs(a.amplitudes)) * np.sum(np.abs(b.amplitudes))))
    if abs(total - expected) > tol * scale:
        raise GroupError(f"total sum {total} != product of sums {expected}")
    return total


def delta_law_violations(group: FiniteGroup) -> int:
    """Number of element pairs for which delta_f * delta_g != delta_{f o g} exactly."""
    bad = 0
    for f in range(group.order):
        for g in range(group.order):
            out = convolve(GroupWavefunction.delta(group, f), GroupWavefunction.delta(group, g))
            want = np.zeros(group.order, dtype=complex)
            want[group.mul(f, g)] = 1.0
            if not np.array_equal(out.amplitudes, want):
                bad += 1
    return bad
