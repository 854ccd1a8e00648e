import json

import pytest
from hypothesis import given, strategies as st

from toricderived.errors import ParseError, PreconditionError
from toricderived.simplicial import (SimplicialComplex, boundary_of_simplex, full_simplex,
                                     load_complex, parse_stacky_fan, recognize_weld, skeleton,
                                     stacky_fan_to_complex, stellar_subdivide, validate)
from toricderived.subsets import is_subset, members, size, submasks, to_mask


def masks(*faces):
    return {to_mask(f) for f in faces}


def test_validate_removes_dominated_faces():
    rep = validate({"n": 2, "maximal_faces": [[1, 2], [2]]})
    assert set(rep.complex.maximal) == masks([1, 2])
    assert rep.removed == [[2]]
    assert rep.violations == []


def test_validate_full_simplex():
    rep = validate({"n": 3, "maximal_faces": [[1, 2, 3]]})
    assert len(rep.complex.maximal) == 1 and not rep.violations


def test_validate_out_of_range():
    with pytest.raises(ParseError) as e:
        validate({"n": 3, "maximal_faces": [[1, 4]]})
    assert e.value.reason == "element out of range"
    assert e.value.context == "maximal_faces[0]"


@pytest.mark.parametrize("bad", [{"n": 0, "maximal_faces": []}, {"n": -2}, {"maximal_faces": []},
                                 {"n": 2, "maximal_faces": [[1, "x"]]}, {"n": 2, "maximal_faces": 3},
                                 [1, 2]])
def test_validate_malformed(bad):
    with pytest.raises(ParseError):
        validate(bad)


def test_empty_face_list_is_the_torus():
    c = validate({"n": 2, "maximal_faces": []}).complex
    assert c.maximal == (0,)
    assert c.is_face([]) and not c.is_face([1])
    assert c.faces() == [0]


def test_duplicates_merge():
    c = validate({"n": 3, "maximal_faces": [[1, 2], [2, 1], [3]]}).complex
    assert sorted(c.maximal) == sorted(masks([1, 2], [3]))


def test_is_face_examples():
    assert full_simplex(2).is_face([1, 2])
    assert not boundary_of_simplex(3).is_face([1, 2, 3])
    for c in (full_simplex(3), boundary_of_simplex(3), skeleton(3, 1)):
        assert c.is_face([])


def test_star_examples():
    tri = boundary_of_simplex(3)
    assert set(tri.star([1])) == masks([1], [1, 2], [1, 3])
    assert set(tri.star([])) == set(tri.faces())
    assert full_simplex(2).star([1, 2]) == [to_mask([1, 2])]
    assert tri.star([1, 2, 3]) == []


def test_subdivide_plane_at_origin():
    c = stellar_subdivide(full_simplex(2), [1, 2])
    assert c.n == 3
    assert set(c.maximal) == masks([1, 3], [2, 3])


def test_subdivide_triangle():
    c = stellar_subdivide(boundary_of_simplex(3), [1, 2])
    assert c.n == 4
    assert set(c.maximal) == masks([1, 4], [2, 4], [1, 3], [2, 3])
    assert c.reduced_euler_characteristic() == boundary_of_simplex(3).reduced_euler_characteristic()


def test_subdivide_preconditions():
    with pytest.raises(PreconditionError):
        stellar_subdivide(full_simplex(2), [1])
    with pytest.raises(PreconditionError):
        stellar_subdivide(boundary_of_simplex(3), [1, 2, 3])


def test_equality_ignores_order():
    a = SimplicialComplex(3, (to_mask([1, 2]), to_mask([3])))
    b = SimplicialComplex(3, (to_mask([3]), to_mask([1, 2])))
    assert a == b and hash(a) == hash(b)


def test_json_round_trip(tmp_path):
    c = boundary_of_simplex(3)
    path = tmp_path / "c.json"
    path.write_text(json.dumps(c.to_json()))
    assert load_complex(str(path)) == c


def test_load_reports_file_context(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"n": 3, "maximal_faces": [[1, 7]]}')
    with pytest.raises(ParseError) as e:
        load_complex(str(path))
    assert str(path) in str(e.value) and "maximal_faces[0]" in str(e.value)
    path.write_text('{"n": 3,\n "maximal_faces": [[1, 2],,]}')
    with pytest.raises(ParseError) as e:
        load_complex(str(path))
    assert "line 2" in str(e.value)


# -- stacky fans ------------------------------------------------------------------

P2_FAN = {"rank": 2, "rays": [[1, 0], [0, 1], [-1, -1]],
          "fan": {"n": 3, "maximal_faces": [[1, 2], [1, 3], [2, 3]]}}


def test_p2_fan():
    rep = stacky_fan_to_complex(parse_stacky_fan(P2_FAN), geometric=True)
    assert rep.complex == boundary_of_simplex(3)
    assert rep.kernel_rank == 1
    assert rep.ray_matrix == [[1, 0], [0, 1], [-1, -1]]


def test_affine_fan_has_trivial_group():
    data = {"rank": 3, "rays": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
            "fan": {"n": 3, "maximal_faces": [[1, 2, 3]]}}
    assert stacky_fan_to_complex(parse_stacky_fan(data), geometric=True).kernel_rank == 0


def test_p2_minus_points_fan():
    data = dict(P2_FAN, fan={"n": 3, "maximal_faces": [[1], [2], [3]]})
    rep = stacky_fan_to_complex(parse_stacky_fan(data))
    assert rep.complex == skeleton(3, 1)
    assert rep.kernel_rank == 1


def test_fan_violations():
    zero = dict(P2_FAN, rays=[[1, 0], [0, 0], [-1, -1]])
    with pytest.raises(ParseError, match="zero"):
        stacky_fan_to_complex(parse_stacky_fan(zero))
    missing = dict(P2_FAN, fan={"n": 3, "maximal_faces": [[1, 2]]})
    with pytest.raises(ParseError, match="not a face"):
        stacky_fan_to_complex(parse_stacky_fan(missing))
    stacky = dict(P2_FAN, rays=[[2, 0], [0, 1], [-1, -1]])
    stacky_fan_to_complex(parse_stacky_fan(stacky))  # combinatorial mode accepts it
    with pytest.raises(ParseError, match="saturated"):
        stacky_fan_to_complex(parse_stacky_fan(stacky), geometric=True)
    with pytest.raises(ParseError):
        parse_stacky_fan(dict(P2_FAN, rays=[[1, 0], [0, 1]]))


def test_load_complex_accepts_fans(tmp_path):
    path = tmp_path / "fan.json"
    path.write_text(json.dumps(P2_FAN))
    assert load_complex(str(path)) == boundary_of_simplex(3)


# -- welds ---------------------------------------------------------------------------

@pytest.mark.parametrize("base,sigma", [(full_simplex(2), [1, 2]), (boundary_of_simplex(3), [1, 2]),
                                        (full_simplex(3), [1, 2, 3]), (full_simplex(3), [2, 3])])
def test_recognize_weld_inverts_subdivision(base, sigma):
    found = recognize_weld(stellar_subdivide(base, sigma))
    assert found is not None
    b, s = found
    assert stellar_subdivide(b, s) == stellar_subdivide(base, sigma)


def test_recognize_weld_rejects_non_subdivisions():
    assert recognize_weld(full_simplex(3)) is None
    assert recognize_weld(skeleton(3, 1)) is None


# -- properties ------------------------------------------------------------------------

@st.composite
def complexes(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    faces = draw(st.lists(st.integers(0, (1 << n) - 1), min_size=0, max_size=6))
    return SimplicialComplex.from_faces(n, [members(f) for f in faces])


@st.composite
def complex_and_face(draw):
    c = draw(complexes())
    candidates = [f for f in c.faces() if size(f) >= 2]
    if not candidates:
        c = SimplicialComplex.from_faces(c.n + 1, [members(m) for m in c.maximal] + [[1, c.n + 1]])
        candidates = [f for f in c.faces() if size(f) >= 2]
    return c, draw(st.sampled_from(candidates))


@given(complex_and_face())
def test_subdivision_preserves_euler_characteristic(cs):
    c, sigma = cs
    t = stellar_subdivide(c, sigma)
    assert t.reduced_euler_characteristic() == c.reduced_euler_characteristic()


@given(complex_and_face())
def test_subdivision_output_is_a_valid_complex_without_sigma(cs):
    c, sigma = cs
    t = stellar_subdivide(c, sigma)
    assert not t.is_face(sigma)
    assert validate(t.to_json()).violations == []
    faces = set(t.faces())
    for f in faces:
        assert all(g in faces for g in submasks(f))
    # membership rule for the new complex, face by face
    v = 1 << c.n
    for f in submasks((1 << (c.n + 1)) - 1):
        base = f & ~v
        if f & v:
            want = c.is_face(base) and c.is_face(base | sigma) and not is_subset(sigma, f)
        else:
            want = c.is_face(f) and not is_subset(sigma, f)
        assert t.is_face(f) == want


@given(complex_and_face())
def test_weld_recovers_a_base(cs):
    c, sigma = cs
    t = stellar_subdivide(c, sigma)
    b, s = recognize_weld(t)
    assert stellar_subdivide(b, s) == t


@given(complexes())
def test_is_face_matches_star(c):
    for f in submasks((1 << c.n) - 1):
        assert c.is_face(f) == bool(c.star(f))
