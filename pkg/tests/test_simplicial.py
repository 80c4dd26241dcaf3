import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from connlap.errors import InvalidInputError
from connlap.geometry import preset_torus
from connlap.simplicial import (Cochain, Simplex, build_complex, closed_star, coboundary_matrix,
                                relative_orientation)


def test_single_triangle_counts():
    K = build_complex([[0, 1, 2]])
    assert K.counts == [3, 3, 1]


def test_cycle_counts():
    K = build_complex([[0, 1], [1, 2], [2, 0]])
    assert K.counts == [3, 3]
    assert K.simplices[1] == ((0, 1), (0, 2), (1, 2))


def test_two_triangles_counts():
    K = build_complex([[0, 1, 2], [0, 2, 3]])
    assert K.counts == [4, 5, 2]


@pytest.mark.parametrize("bad", [[], [[0, 0, 1]], [[0, 1, 2], [0, 1]]])
def test_build_complex_rejects(bad):
    with pytest.raises(InvalidInputError):
        build_complex(bad)


def test_numbering_is_deterministic():
    tops = [[3, 1, 2], [0, 2, 3], [1, 0, 2]]
    K1, K2 = build_complex(tops), build_complex(tops)
    assert K1.simplices == K2.simplices
    for q in range(3):
        assert all(list(s) == sorted(s) for s in K1.simplices[q])
        assert list(K1.simplices[q]) == sorted(K1.simplices[q])


def test_circle_coboundary_rows():
    K = build_complex([[0, 1], [1, 2], [2, 0]])
    d = coboundary_matrix(K, 0).toarray()
    assert np.all(np.sort(d, axis=1) == [-1, 0, 1])


def test_triangle_coboundary_row():
    K = build_complex([[0, 1, 2]])
    d = coboundary_matrix(K, 1).toarray()[0]
    assert d[K.index[1][(1, 2)]] == 1
    assert d[K.index[1][(0, 2)]] == -1
    assert d[K.index[1][(0, 1)]] == 1


def test_coboundary_out_of_range():
    K = build_complex([[0, 1, 2]])
    with pytest.raises(InvalidInputError):
        coboundary_matrix(K, 2)


@pytest.mark.parametrize("tops", [[[0, 1, 2]], [[0, 1, 2, 3], [1, 2, 3, 4]]])
def test_d_squared_zero_small(tops):
    K = build_complex(tops)
    for q in range(K.dim - 1):
        prod = coboundary_matrix(K, q + 1) @ coboundary_matrix(K, q)
        assert prod.dtype.kind == "i"
        assert prod.count_nonzero() == 0


def test_d_squared_zero_torus():
    K = preset_torus(5).complex
    assert (coboundary_matrix(K, 1) @ coboundary_matrix(K, 0)).count_nonzero() == 0


@settings(max_examples=30, deadline=None)
@given(st.lists(st.permutations(range(5)).map(lambda p: tuple(p[:3])), min_size=1, max_size=6))
def test_d_squared_zero_random_complexes(tops):
    K = build_complex(tops)
    prod = coboundary_matrix(K, 1) @ coboundary_matrix(K, 0)
    assert prod.count_nonzero() == 0
    # face closure
    for t in K.simplices[2]:
        for e in ((t[0], t[1]), (t[0], t[2]), (t[1], t[2])):
            assert e in K.index[1]


def test_closed_star_examples():
    K = build_complex([[0, 1], [1, 2]])
    assert closed_star(K, (1,)) == {(0,), (1,), (2,), (0, 1), (1, 2)}
    T = build_complex([[0, 1, 2], [0, 2, 3]])
    assert closed_star(T, (0, 1, 2)) == {(0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)}
    everything = {s for q in range(3) for s in T.simplices[q]}
    assert closed_star(T, (0,)) == everything


def test_closed_star_is_face_closed_and_rejects_missing():
    K = preset_torus(3).complex
    star = closed_star(K, (4,))
    for s in star:
        for v in s:
            if len(s) > 1:
                assert tuple(x for x in s if x != v) in star
    with pytest.raises(InvalidInputError):
        closed_star(K, (0, 100))


def test_relative_orientation_examples():
    assert relative_orientation([1, 0], [0, 1]) == -1
    assert relative_orientation([0, 1, 2], [0, 1, 2]) == 1
    assert relative_orientation([2, 0, 1], [0, 1, 2]) == 1
    with pytest.raises(InvalidInputError):
        relative_orientation([0, 0, 1], [0, 1, 2])


@given(st.permutations(range(6)))
def test_orientation_matches_inversion_parity(perm):
    inversions = sum(1 for i in range(6) for j in range(i + 1, 6) if perm[i] > perm[j])
    assert relative_orientation(perm, range(6)) == (-1) ** inversions
    assert Simplex(tuple(perm)).orientation == (-1) ** inversions


def test_cochain_evaluation_contract():
    K = build_complex([[0, 1, 2]])
    c = Cochain(1, np.array([1.0, 2.0, 3.0]))
    assert c.evaluate(K, (0, 2)) == 2.0
    assert c.evaluate(K, (2, 0)) == -2.0
    v = Cochain(1, np.arange(6.0), fiber_dim=2)
    assert np.array_equal(v.evaluate(K, (2, 1)), -np.array([4.0, 5.0]))
    with pytest.raises(InvalidInputError):
        Cochain(1, np.arange(4.0)).check(K)
