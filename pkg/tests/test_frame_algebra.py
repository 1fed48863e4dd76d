import math
from collections import defaultdict

import numpy as np
import pytest
from hypothesis import given, strategies as st

from superframes.errors import (CompositionError, DegenerateStateError, SupportError,
                                ValidationError)
from superframes.frame_algebra import (FrameSuperposition, born_probabilities, born_sample,
                                       born_sample_indices, born_samples, collapse, compose,
                                       compose_chain, global_phase, identity_deviation,
                                       make_delta, probability_mass, reverse, superposition)
from superframes.transforms import EuclideanTransform, planar, rotation_2d, spatial

from conftest import amplitudes, planar_transforms, spatial_transforms

R = 1 / math.sqrt(2)


def two_term(t1, t2, c1, c2, src="O", dst="O'"):
    return superposition(src, dst, [t1, t2], [c1, c2])


# Oracle: quarter-turn rigid motions with integer shifts, as exact tuples (k, bx, by).
_QUARTER = [np.rint(rotation_2d(k * math.pi / 2)).astype(int) for k in range(4)]


def _oracle_compose(a, b):
    out = defaultdict(complex)
    for (k1, x1, y1), c1 in a.items():
        for (k2, x2, y2), c2 in b.items():
            bx, by = _QUARTER[k1] @ (x2, y2)
            out[((k1 + k2) % 4, int(bx) + x1, int(by) + y1)] += c1 * c2
    return {k: v for k, v in out.items() if abs(v) > 1e-15}


def _to_sup(d, src, dst):
    return superposition(src, dst, [planar(k * math.pi / 2, (x, y)) for k, x, y in d], list(d.values()))


lattice_terms = st.dictionaries(
    st.tuples(st.integers(0, 3), st.integers(-2, 2), st.integers(-2, 2)),
    st.complex_numbers(min_magnitude=0.1, max_magnitude=2, allow_nan=False, allow_infinity=False),
    min_size=1, max_size=5)


@given(lattice_terms, lattice_terms)
def test_compose_matches_exact_lattice_oracle(da, db):
    got = compose(_to_sup(da, "O", "O'"), _to_sup(db, "O'", "O''"))
    want = _oracle_compose(da, db)
    if not want:
        return
    assert got.isclose(_to_sup(want, "O", "O''"), atol=1e-12)


def test_four_term_product_coefficients():
    th, ga = math.radians(40), math.radians(25)
    a = two_term(spatial(th, (0, 0, 1)), spatial(-th, (0, 0, 1)), 0.5, 0.5j)
    b = two_term(spatial(ga, (1, 0, 0)), spatial(-ga, (1, 0, 0)), 0.6, 0.8, "O'", "O''")
    c = compose(a, b)
    assert len(c) == 4
    cases = [(th, ga, 0.3), (th, -ga, 0.4), (-th, ga, 0.3j), (-th, -ga, 0.4j)]
    for s1, s2, amp in cases:
        t = spatial(s1, (0, 0, 1)) @ spatial(s2, (1, 0, 0))
        assert abs(c.amplitude_of(t) - amp) <= 1e-14
    assert c.source.label == "O" and c.target.label == "O''"


def test_colliding_pairs_add_coherently():
    a = two_term(planar(math.pi / 2), planar(-math.pi / 2), R, R)
    b = two_term(planar(math.pi / 2), planar(-math.pi / 2), R, R, "O'", "O''")
    c = compose(a, b)
    assert len(c) == 2
    assert c.amplitude_of(planar(0.0)) == pytest.approx(1.0, abs=1e-15)
    assert c.amplitude_of(planar(math.pi)) == pytest.approx(1.0, abs=1e-15)


def test_cancelling_pairs_drop_out():
    a = two_term(planar(0.0), planar(math.pi / 2), 1, 1)
    b = two_term(planar(math.pi / 2), planar(0.0), 1, -1, "O'", "O''")
    c = compose(a, b)
    # r0 r90 and r90 r0 land on r90 with amplitudes 1 and -1
    assert len(c) == 2
    assert c.amplitude_of(planar(math.pi / 2)) == 0
    assert c.amplitude_of(planar(0.0)) == -1 and c.amplitude_of(planar(math.pi)) == 1


def test_total_cancellation_raises():
    a = two_term(planar(math.pi / 2), planar(-math.pi / 2), 1, 1)
    b = two_term(planar(math.pi / 2), planar(-math.pi / 2), 1, -1, "O'", "O''")
    with pytest.raises(DegenerateStateError):
        compose(a, b)


def test_chain_mismatch_raises():
    a = make_delta(planar(0.1), "O", "O'")
    with pytest.raises(CompositionError):
        compose(a, make_delta(planar(0.1), "X", "Y"))
    with pytest.raises(CompositionError):
        compose_chain([])


def test_invalid_transform_rejected():
    with pytest.raises(ValidationError):
        make_delta((np.array([[1.0, 0.1], [0.0, 1.0]]), np.zeros(2)))


def test_construction_merges_near_duplicates_and_sorts():
    s = superposition("O", "O'", [planar(0.4), planar(0.4 + 1e-12), planar(-0.4)], [1, 1, 1])
    assert len(s) == 2
    assert s.amplitude_of(planar(0.4)) == pytest.approx(2.0)
    t = superposition("O", "O'", [planar(-0.4), planar(0.4)], [1, 2])
    assert t == superposition("O", "O'", [planar(0.4), planar(-0.4)], [2, 1])


def test_identity_element():
    s = two_term(planar(0.3, (1, 2)), planar(-0.7), 0.6, 0.8j, "O'", "O''")
    assert compose(make_delta(planar(0.0), "O", "O'"), s).isclose(
        FrameSuperposition("O", "O''", s.terms), atol=1e-15)


@given(planar_transforms(), planar_transforms())
def test_delta_composition_law(t1, t2):
    c = compose(make_delta(t1, "O", "O'"), make_delta(t2, "O'", "O''"))
    assert len(c) == 1
    assert c.terms[0][0].isclose(t1 @ t2, 1e-10)
    assert c.terms[0][1] == 1


@given(st.lists(st.tuples(planar_transforms(), amplitudes), min_size=1, max_size=3),
       st.lists(st.tuples(planar_transforms(), amplitudes), min_size=1, max_size=3),
       st.lists(st.tuples(planar_transforms(), amplitudes), min_size=1, max_size=3))
def test_associativity(ta, tb, tc):
    a = FrameSuperposition("O", "O'", ta)
    b = FrameSuperposition("O'", "O''", tb)
    c = FrameSuperposition("O''", "O'''", tc)
    try:
        left = compose(compose(a, b), c)
    except DegenerateStateError:
        return
    right = compose(a, compose(b, c))
    assert left.isclose(right, atol=1e-10)


@given(st.lists(st.tuples(spatial_transforms(), amplitudes), min_size=1, max_size=4))
def test_reverse_is_an_involution(terms):
    a = FrameSuperposition("O", "O'", terms)
    assert reverse(reverse(a)).isclose(a, atol=1e-12)


def test_reverse_examples():
    t, u = planar(0.5, (1, 0)), planar(-1.1, (0, 2))
    r = reverse(two_term(t, u, 0.6, 0.8j))
    assert r.source.label == "O'" and r.target.label == "O"
    assert r.amplitude_of(t.inverse()) == pytest.approx(0.6)
    assert r.amplitude_of(u.inverse()) == pytest.approx(-0.8j)
    ident = make_delta(planar(0.0))
    assert reverse(ident).terms[0][0].is_identity()


@given(spatial_transforms())
def test_singleton_identity_deviation_is_zero(t):
    assert identity_deviation(make_delta(t)) <= 1e-12


def test_identity_deviation_two_term():
    th = math.radians(30)
    a = two_term(planar(th), planar(-th), R, R)
    assert identity_deviation(a) == pytest.approx(1.0, abs=1e-12)
    c = compose(a, reverse(a))
    assert c.amplitude_of(planar(2 * th)) == pytest.approx(0.5)
    assert c.amplitude_of(planar(-2 * th)) == pytest.approx(0.5)


def test_identity_deviation_cross_terms_for_quarter_turns():
    a = two_term(planar(math.pi / 2), planar(math.pi), 1, 1j)
    # identity collects |1|^2 + |i|^2; r90 and r270 collect the cross terms
    assert identity_deviation(a) == pytest.approx(1.0)


def test_born_probabilities():
    th = math.radians(30)
    probs = [p for _, p in born_probabilities(two_term(planar(th), planar(-th), 1, 1))]
    assert probs == [0.5, 0.5]
    probs = dict((round(p, 12), t) for t, p in born_probabilities(two_term(planar(0.1), planar(0.2), 0.6, 0.8j)))
    assert set(probs) == {0.36, 0.64}
    assert [p for _, p in born_probabilities(make_delta(planar(1.0)))] == [1.0]


@given(st.lists(st.tuples(planar_transforms(), amplitudes), min_size=1, max_size=6),
       st.floats(0, 2 * math.pi))
def test_born_probabilities_normalized_and_phase_invariant(terms, phi):
    a = FrameSuperposition("O", "O'", terms)
    p = np.array([x for _, x in born_probabilities(a)])
    assert abs(p.sum() - 1.0) <= 1e-12
    q = np.array([x for _, x in born_probabilities(global_phase(a, phi))])
    assert np.max(np.abs(p - q)) <= 1e-12


def test_born_sampling_frequencies_and_determinism():
    th = math.radians(30)
    a = two_term(planar(th), planar(-th), 1, 1)
    idx = born_sample_indices(a, 100_000, 7)
    freq = np.bincount(idx, minlength=2) / idx.size
    assert np.all(np.abs(freq - 0.5) <= 0.005)
    assert np.array_equal(idx, born_sample_indices(a, 100_000, 7))
    b = two_term(planar(0.1), planar(0.2), 0.6, 0.8j)
    n = 100_000
    counts = np.bincount(born_sample_indices(b, n, 11), minlength=2) / n
    for (_, p), f in zip(born_probabilities(b), counts):
        assert abs(f - p) <= 3 * math.sqrt(p * (1 - p) / n)


def test_born_sample_singleton_and_prefix_consistency():
    t = planar(0.7, (1, 1))
    assert born_sample(make_delta(t), 123).isclose(t)
    a = two_term(planar(0.1), planar(0.2), 0.6, 0.8j)
    assert born_sample(a, 5).isclose(born_samples(a, 10, 5)[0])


def test_collapse():
    th = math.radians(30)
    a = two_term(planar(th), planar(-th), R, R)
    c = collapse(a, planar(th))
    assert len(c) == 1 and c.terms[0][1] == 1
    single = make_delta(planar(th))
    assert collapse(single, planar(th)) == single
    with pytest.raises(SupportError):
        collapse(a, planar(th + 1e-6))


def test_probability_mass():
    th = math.radians(30)
    a = two_term(planar(th), planar(-th), R, R)
    assert probability_mass(a, lambda t: True) == pytest.approx(1.0)
    assert probability_mass(a, lambda t: t.angle > 0) == pytest.approx(0.5)
    b = two_term(planar(0.1), planar(0.2), 0.6, 0.8j)
    assert probability_mass(b, lambda t: abs(t.angle - 0.1) < 1e-9) == pytest.approx(0.36)


def test_degenerate_states_rejected():
    with pytest.raises(DegenerateStateError):
        superposition("O", "O'", [planar(0.1)], [0.0])
    with pytest.raises(ValidationError):
        superposition("O", "O'", [planar(0.1)], [complex("nan")])
