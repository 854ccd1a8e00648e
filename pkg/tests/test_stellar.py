import json

import pytest
from hypothesis import given, strategies as st

from toricderived import stellar as S
from toricderived import weights as W
from toricderived.cech import line_bundle_ext
from toricderived.errors import ParseError, PreconditionError
from toricderived.simplicial import (SimplicialComplex, boundary_of_simplex, full_simplex,
                                     stellar_subdivide)


def test_index_maps():
    assert S.pullback_index((1, 2), [1, 2]) == (1, 2, 3)
    assert S.pushforward_index((1, 2, 3), 2) == (1, 2, 1)
    assert S.pushforward_index((0, 0, -1), 2) == (0, 0, -1)
    assert S.composite_s((1, 0), [1, 2]) == (1, 0, 0)
    assert S.composite_s((1, 1), [1, 2]) == (1, 1, 1)
    assert S.composite_s((-1, 0, 0), [1, 2, 3]) == (-1, 0, 0, -1)
    with pytest.raises(PreconditionError):
        S.pullback_index((0, 0), [1])
    with pytest.raises(PreconditionError):
        S.pushforward_index((0, 0), 0)


def test_image_examples():
    assert S.in_image_s((1, 0, 0), [1, 2])
    assert not S.in_image_s((1, 0, 1), [1, 2])
    assert not S.in_image_s((0, 0, -1), [1, 2])


weights_and_sigma = st.integers(2, 4).flatmap(
    lambda n: st.tuples(st.tuples(*[st.integers(-5, 5)] * n),
                        st.sets(st.integers(1, n), min_size=2).map(sorted)))


@given(weights_and_sigma)
def test_s_lands_in_its_image_and_has_a_left_inverse(ps):
    p, sigma = ps
    q = S.composite_s(p, sigma)
    assert S.in_image_s(q, sigma)
    assert S.section_index(q) == p


@given(weights_and_sigma, st.integers(-5, 5))
def test_image_characterization(ps, last):
    p, sigma = ps
    q = p + (last,)
    assert S.in_image_s(q, sigma) == (S.composite_s(p, sigma) == q)


@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=2, max_size=6, unique=True))
def test_s_is_injective(points):
    assert len({S.composite_s(p, [1, 2]) for p in points}) == len(points)


@pytest.mark.parametrize("base,sigma,window", [
    (full_simplex(2), [1, 2], "-2..2"),
    (full_simplex(3), [1, 2, 3], "-1..1"),
    (full_simplex(3), [2, 3], "-1..1"),
    (boundary_of_simplex(3), [1, 2], "-1..1"),
])
def test_stellar_windows(base, sigma, window):
    rep = S.verify_stellar_window(base, sigma, window)
    assert rep.ok, rep.mismatches
    assert rep.pairs == len(W.parse_window(window, base.n).points()) ** 2
    assert json.loads(json.dumps(rep.to_json()))["pass"]


def test_pulled_back_collection_on_the_blowup():
    # O(a1, a2, floor((a1+a2)/2)): Hom = k iff b >= a in the first two coordinates, no higher Ext
    tilde = stellar_subdivide(full_simplex(2), [1, 2])
    pts = W.Window.cube(-2, 2, 2).points()
    for a in pts:
        for b in pts:
            got = line_bundle_ext(tilde, S.composite_s(a, [1, 2]), S.composite_s(b, [1, 2]))
            assert dict(got) == ({0: 1} if W.leq(a, b) else {}), (a, b)


def test_outside_the_image_the_comparison_fails():
    tilde = stellar_subdivide(full_simplex(2), [1, 2])
    # O(1,1,0) is not s of anything and has a nonzero Ext^1 to O
    assert not S.in_image_s((1, 1, 0), [1, 2])
    assert line_bundle_ext(tilde, (1, 1, 0), (0, 0, 0)) == {1: 1}


@pytest.mark.parametrize("base,sigma,window", [
    (full_simplex(2), [1, 2], "-1..1"),
    (full_simplex(3), [1, 2, 3], "-1..1"),
    (boundary_of_simplex(3), [1, 2], "-1..1"),
])
def test_generation_witness(base, sigma, window):
    tilde = stellar_subdivide(base, sigma)
    assert S.generation_witness(tilde, sigma, window)


def test_generation_fails_without_enough_seeds():
    tilde = stellar_subdivide(full_simplex(2), [1, 2])
    assert not S.generation_witness(tilde, [1, 2], "-1..1", seeds=[(0, 0, 0)])


def test_koszul_closure_fills_a_missing_term():
    region = W.Window.cube(-1, 1, 2)
    have = S.koszul_closure([(0, 0), (-1, 0), (0, -1)], region, [[1, 2]])
    assert (-1, -1) in have
    assert sorted(S.koszul_twists((0, 0), [1, 2])) == [(-1, -1), (-1, 0), (0, -1), (0, 0)]


def test_move_sequence_round_trip():
    script = [{"op": "subdivide", "sigma": [1, 2]}, {"op": "weld", "vertex": 4}]
    res = S.run_move_sequence(boundary_of_simplex(3), script, "-1..1")
    assert res.ok and res.final == boundary_of_simplex(3)
    assert [s.op for s in res.steps] == ["subdivide", "weld"]
    assert all(a == b for a, b in res.correspondence)
    assert json.loads(json.dumps(res.to_json()))["pass"]


def test_weld_of_a_non_image_index_is_none():
    tilde = stellar_subdivide(full_simplex(2), [1, 2])
    res = S.run_move_sequence(tilde, [{"op": "weld", "vertex": 3}], "-1..1", verify=False)
    corr = dict(res.correspondence)
    assert corr[(1, 1, 0)] is None
    assert corr[(1, 0, 0)] == (1, 0)
    assert res.final == full_simplex(2)


@pytest.mark.parametrize("script", [
    [{"op": "flip"}],
    [{"sigma": [1, 2]}],
    ["subdivide"],
    [{"op": "subdivide", "sigma": [1]}],
    [{"op": "weld", "vertex": 2}],
    [{"op": "weld", "vertex": 3}],
])
def test_bad_scripts(script):
    with pytest.raises(ParseError):
        S.run_move_sequence(boundary_of_simplex(3), script, "-1..1", verify=False)


def test_weld_needs_a_subdivision():
    c = SimplicialComplex.from_faces(3, [[1, 2, 3]])
    with pytest.raises(ParseError, match="not a stellar subdivision"):
        S.run_move_sequence(c, [{"op": "weld", "vertex": 3}], "-1..1", verify=False)
