import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from superframes import group_kernel as gk
from superframes.errors import GroupError, ValidationError

ORDERS = {"C1": 1, "C4": 4, "C16": 16, "D1": 2, "D4": 8, "D8": 16, "S3": 6, "S4": 24, "cube": 24}


def random_wf(group, rng, normalized=True):
    return gk.GroupWavefunction.random(group, rng, normalized=normalized)


def regular_matrix(a):
    # left regular representation: sum_f a[f] L_f with (L_f)[f o g, g] = 1
    n = a.group.order
    m = np.zeros((n, n), dtype=complex)
    for f in range(n):
        for g in range(n):
            m[a.group.mul(f, g), g] += a.amplitudes[f]
    return m


@pytest.mark.parametrize("name,order", ORDERS.items())
def test_builtin_orders(name, order):
    assert gk.builtin_group(name).order == order


def test_abelian_flags():
    assert gk.builtin_group("C4").is_abelian()
    assert gk.builtin_group("D1").is_abelian()
    for name in ("D4", "S3", "S4", "cube"):
        assert not gk.builtin_group(name).is_abelian()


def test_cube_group_is_isomorphic_class_of_s4():
    # same order and same element-order profile as S4
    def profile(g):
        counts = []
        for f in range(g.order):
            k, x = 1, f
            while x != g.identity_index:
                x = g.mul(x, f)
                k += 1
            counts.append(k)
        return sorted(counts)
    assert profile(gk.builtin_group("cube")) == profile(gk.builtin_group("S4"))


def test_unknown_group_lists_catalog():
    with pytest.raises(GroupError, match="available"):
        gk.builtin_group("Q8")
    with pytest.raises(GroupError):
        gk.builtin_group("C17")


def test_invalid_tables_rejected():
    with pytest.raises(ValidationError):
        gk.FiniteGroup("bad", np.array([[0, 1], [0, 1]]))
    # latin square that is not associative
    quasi = np.array([[0, 1, 2], [1, 0, 2], [2, 2, 0]])
    with pytest.raises(ValidationError):
        gk.FiniteGroup("quasi", quasi)
    latin = np.array([[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]])
    with pytest.raises(ValidationError):
        gk.FiniteGroup("loop", latin)


@pytest.mark.parametrize("name", ["C4", "D4", "S3", "S4", "cube", "C7", "D5"])
def test_delta_law_exact(name):
    assert gk.delta_law_violations(gk.builtin_group(name)) == 0


def test_identity_delta_is_unit(rng):
    g = gk.builtin_group("S4")
    a = random_wf(g, rng)
    e = gk.GroupWavefunction.delta(g, g.identity_index)
    assert np.array_equal(gk.convolve(e, a).amplitudes, a.amplitudes)
    assert np.array_equal(gk.convolve(a, e).amplitudes, a.amplitudes)


@pytest.mark.parametrize("name", ["C4", "D4", "S3", "S4", "cube"])
def test_convolve_matches_brute_force(name, rng):
    g = gk.builtin_group(name)
    for _ in range(100):
        a, b = random_wf(g, rng), random_wf(g, rng)
        c = gk.convolve(a, b)
        brute = np.array([gk.brute_force_restricted_sum(a, b, h) for h in range(g.order)])
        assert np.max(np.abs(c.amplitudes - brute)) <= 1e-14


@pytest.mark.parametrize("name", ["D4", "S4", "cube"])
def test_convolution_is_regular_representation_product(name, rng):
    g = gk.builtin_group(name)
    a, b = random_wf(g, rng, False), random_wf(g, rng, False)
    assert np.allclose(regular_matrix(gk.convolve(a, b)), regular_matrix(a) @ regular_matrix(b),
                       atol=1e-13)


@given(st.sampled_from(["C6", "D3", "S3", "S4"]), st.integers(0, 2 ** 32 - 1))
def test_convolution_associative(name, seed):
    g = gk.builtin_group(name)
    rng = np.random.default_rng(seed)
    a, b, c = (random_wf(g, rng, False) for _ in range(3))
    left = gk.convolve(gk.convolve(a, b), c).amplitudes
    right = gk.convolve(a, gk.convolve(b, c)).amplitudes
    assert np.max(np.abs(left - right)) <= 1e-12


def test_brute_force_examples():
    g = gk.builtin_group("S3")
    f0, g0 = 2, 4
    a, b = gk.GroupWavefunction.delta(g, f0), gk.GroupWavefunction.delta(g, g0)
    for h in range(g.order):
        assert gk.brute_force_restricted_sum(a, b, h) == (1 if h == g.mul(f0, g0) else 0)
    u = gk.GroupWavefunction.uniform(g, 1 / g.order)
    for h in range(g.order):
        assert gk.brute_force_restricted_sum(u, u, h) == pytest.approx(1 / g.order, abs=1e-15)
    # every h has exactly `order` factorizations
    for h in range(g.order):
        assert sum(g.mul(f, x) == h for f, x in itertools.product(range(g.order), repeat=2)) == g.order
    with pytest.raises(GroupError):
        gk.brute_force_restricted_sum(a, b, g.order)


def test_identity_relation(rng):
    d4 = gk.builtin_group("D4")
    assert gk.verify_identity_relation(gk.GroupWavefunction.delta(d4, 3)) == 1.0
    c2 = gk.builtin_group("C2")
    assert gk.verify_identity_relation(gk.GroupWavefunction.uniform(c2, 2 ** -0.5)) == pytest.approx(1.0)
    for _ in range(50):
        assert gk.verify_identity_relation(random_wf(d4, rng)) == pytest.approx(1.0, abs=1e-12)


def test_total_sum(rng):
    g = gk.builtin_group("S3")
    assert gk.total_sum_check(gk.GroupWavefunction.delta(g, 1), gk.GroupWavefunction.delta(g, 5)) == 1
    zero_sum = gk.GroupWavefunction(g, [1, -1, 0, 0, 0, 0])
    assert abs(gk.total_sum_check(zero_sum, random_wf(g, rng))) <= 1e-15
    for _ in range(50):
        a, b = random_wf(g, rng), random_wf(g, rng)
        total = gk.total_sum_check(a, b)
        assert abs(total - a.amplitudes.sum() * b.amplitudes.sum()) <= 1e-12


def test_group_mismatch_and_bad_amplitudes():
    with pytest.raises(GroupError):
        gk.convolve(gk.GroupWavefunction.delta(gk.builtin_group("C4"), 0),
                    gk.GroupWavefunction.delta(gk.builtin_group("S3"), 0))
    with pytest.raises(ValidationError):
        gk.GroupWavefunction(gk.builtin_group("C4"), [1, 2, 3])
    with pytest.raises(ValidationError):
        gk.GroupWavefunction(gk.builtin_group("C2"), [1, float("inf")])
