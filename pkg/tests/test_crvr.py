from itertools import combinations
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from crvrtda.crvr import (Filtration, FiltrationError, FiltrationTooLarge, build_flag_filtration, crvr_distance,
                          dumps_filtration, load_filtration, loads_filtration, save_filtration, simplex_count)
from crvrtda.netgen import BlockSpec, generate_block_network
from crvrtda.network import WeightedNetwork
from crvrtda.persistence import compute_persistence

from support import FIGURE_S1_TEXT, random_sym


def pair(w):
    return WeightedNetwork([[0, w], [w, 0]])


@pytest.mark.parametrize("w,expected", [(2.0, 0.5), (0.05, 10.0), (0.0, 10.0), (0.1, 10.0), (0.1000001, 1 / 0.1000001)])
def test_crop_rule(w, expected):
    d = crvr_distance(pair(w), 0.1)
    assert d.d[0, 1] == pytest.approx(expected, rel=1e-15)
    assert d.d[0, 0] == 0 and d.cap == 10.0


@pytest.mark.parametrize("zeta", [0.0, -1.0])
def test_zeta_must_be_positive(zeta):
    with pytest.raises(ValueError):
        crvr_distance(pair(1.0), zeta)


def test_distance_invariants_and_not_metric():
    rng = np.random.default_rng(0)
    net = WeightedNetwork(random_sym(rng, 12, 0, 10, density=0.7))
    d = crvr_distance(net, 0.1).d
    off = ~np.eye(12, dtype=bool)
    assert np.array_equal(d, d.T) and np.all(np.diag(d) == 0)
    assert np.all((d[off] > 0) & (d[off] <= 10))
    # reciprocal distances need not satisfy the triangle inequality
    tri = WeightedNetwork([[0, 1, 1], [1, 0, 0.2], [1, 0.2, 0]])
    dd = crvr_distance(tri, 0.1).d
    assert dd[1, 2] > dd[0, 1] + dd[0, 2]


def test_equilateral_triangle():
    f = build_flag_filtration(np.array([[0, 1, 1], [1, 0, 1], [1, 1, 0.0]]), 2)
    assert [(s, k, v) for s, k, v in f] == [
        ((0,), 0, 0.0), ((1,), 0, 0.0), ((2,), 0, 0.0),
        ((0, 1), 1, 1.0), ((0, 2), 1, 1.0), ((1, 2), 1, 1.0), ((0, 1, 2), 2, 1.0)]


def test_figure_s1_distances():
    d = np.array([[0, 1, 2], [1, 0, 2], [2, 2, 0.0]])
    f = build_flag_filtration(d, 2)
    vals = dict(zip(f.simplices, f.values))
    assert vals[(0, 1)] == 1 and vals[(0, 2)] == 2 and vals[(1, 2)] == 2 and vals[(0, 1, 2)] == 2


def test_count_n40_dim3():
    net = generate_block_network(BlockSpec(seed=0))
    f = build_flag_filtration(crvr_distance(net), 3)
    assert len(f) == 40 + 780 + 9880 + 91390 == simplex_count(40, 3)
    assert np.bincount(f.dims).tolist() == [40, 780, 9880, 91390]


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 9), max_dim=st.integers(0, 4), seed=st.integers(0, 2**32 - 1))
def test_order_monotonicity_and_count(n, max_dim, seed):
    rng = np.random.default_rng(seed)
    # coarse weights force many ties
    w = random_sym(rng, n, 0, 4).round(0)
    f = build_flag_filtration(crvr_distance(WeightedNetwork(w), 0.5), max_dim)
    assert len(f) == sum(comb(n, m + 1) for m in range(min(max_dim, n - 1) + 1))
    pos = {s: k for k, s in enumerate(f.simplices)}
    keys = [(v, len(s), s) for s, _, v in f]
    assert keys == sorted(keys)
    d = crvr_distance(WeightedNetwork(w), 0.5).d
    for s, k, v in f:
        assert v == max((d[a, b] for a, b in combinations(s, 2)), default=0.0)
        for face in combinations(s, len(s) - 1):
            if face:
                assert pos[face] < pos[s] and f.values[pos[face]] <= v


@pytest.mark.parametrize("c", [0.5, 3.0, 7.25])
def test_scaling_covariance(c):
    rng = np.random.default_rng(int(c * 4))
    w = random_sym(rng, 9, 0.0, 5.0, density=0.8)
    zeta = 0.2
    d1 = crvr_distance(WeightedNetwork(w), zeta).d
    d2 = crvr_distance(WeightedNetwork(w * c), zeta * c).d
    np.testing.assert_allclose(d2, d1 / c, rtol=1e-14)
    b1 = compute_persistence(build_flag_filtration(d1, 3))
    b2 = compute_persistence(build_flag_filtration(d2, 3))
    assert [iv.dim for iv in b1] == [iv.dim for iv in b2]
    for i1, i2 in zip(b1, b2):
        assert i2.birth == pytest.approx(i1.birth / c, rel=1e-12)
        assert i2.death == pytest.approx(i1.death / c, rel=1e-12)


def test_too_large():
    with pytest.raises(FiltrationTooLarge) as exc:
        build_flag_filtration(np.zeros((40, 40)), 3, max_simplices=1000)
    assert exc.value.count == 102090
    with pytest.raises(ValueError):
        build_flag_filtration(np.zeros((3, 3)), -1)


def test_text_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    f = build_flag_filtration(crvr_distance(WeightedNetwork(random_sym(rng, 6))), 3)
    text = dumps_filtration(f)
    g = loads_filtration(text, max_dim=3)
    assert g.simplices == f.simplices and np.array_equal(g.values, f.values)
    path = tmp_path / "f.txt"
    save_filtration(f, path)
    assert load_filtration(path, max_dim=3).simplices == f.simplices


def test_text_keeps_file_order():
    f = loads_filtration(FIGURE_S1_TEXT)
    assert f.simplices[3:] == [(0, 1), (0, 2), (1, 2), (0, 1, 2)] and f.max_dim == 2


@pytest.mark.parametrize("text", ["0 0\n", "x 0 0\n", "0 1 0\n", "0 1 1 0\n", "0 0 0 0\n"])
def test_text_errors(text):
    with pytest.raises(FiltrationError):
        loads_filtration(text)


def test_from_simplices_validation():
    with pytest.raises(FiltrationError):
        Filtration.from_simplices([((1, 0), 0.0)])
    with pytest.raises(FiltrationError):
        Filtration([(0,)], np.array([0.0, 1.0]), 0)
