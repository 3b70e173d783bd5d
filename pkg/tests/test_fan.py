import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from klyachko._matrix import rank
from klyachko.errors import NotAFace, PreconditionError, UnsupportedDimension, ValidationError
from klyachko.fan import (
    Cone,
    Fan,
    affine_plane,
    affine_space,
    dual_of,
    faces,
    is_complete,
    is_face,
    is_smooth,
    orbit_star,
    product_p1_p1,
    projective_plane,
    projective_space,
    semigroup_leq,
    separating_character,
)

from ._support import facet_normals, laplace_det, prim, random_smooth_complete_fan


def single_cone(*rays):
    dim = len(rays[0])
    return Fan(dim, tuple(rays), (Cone(tuple(range(len(rays)))),))


def gens(fan, c):
    return set(fan.dual_cone(c).generators)


def test_dual_examples():
    f = affine_plane()
    assert gens(f, Cone.of(0, 1)) == {(1, 0), (0, 1)}
    f = single_cone((1, 0), (1, 2))
    assert gens(f, Cone.of(0, 1)) == {(0, 1), (2, -1)}
    assert gens(f, Cone.of(0)) == {(1, 0), (0, 1), (0, -1)}


def test_dual_of_zero_cone_is_everything():
    d = affine_plane().dual_cone(Cone())
    assert d.rays == () and len(d.lineality) == 2


def test_faces_examples():
    f = affine_plane()
    assert faces(f, Cone()) == [Cone()]
    assert len(faces(f, Cone.of(0, 1))) == 4
    assert len(faces(affine_space(3), Cone.of(0, 1, 2))) == 8


def test_faces_of_square_cone():
    f = single_cone((1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1))
    fs = faces(f, Cone.of(0, 1, 2, 3))
    # 0, four rays, four 2-faces (adjacent pairs), the cone
    assert len(fs) == 10
    assert Cone.of(0, 2) not in fs and Cone.of(0, 1) in fs


def brute_force_faces(fan, c, bound=3):
    """Subsets of rays cut out by some m of the dual cone, found by search."""
    found = set()
    for m in itertools.product(range(-bound, bound + 1), repeat=fan.dim):
        vals = [sum(a * b for a, b in zip(m, fan.rays[i])) for i in c.rays]
        if all(v >= 0 for v in vals):
            found.add(Cone(tuple(i for i, v in zip(c.rays, vals) if v == 0)))
    return found


@pytest.mark.parametrize(
    "fan",
    [
        affine_space(3),
        single_cone((1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1)),
        single_cone((1, 0, 0), (0, 1, 0), (1, 1, 2)),
        single_cone((1, 0), (1, 3)),
    ],
)
def test_faces_match_brute_force(fan):
    c = fan.max_cones[0]
    assert set(faces(fan, c)) == brute_force_faces(fan, c)


def test_face_duality_correspondence():
    fan = projective_space(3)
    for sigma in fan.max_cones:
        dual = fan.dual_cone(sigma)
        for tau in faces(fan, sigma):
            perp = [g for g in dual.rays if all(sum(a * b for a, b in zip(g, fan.rays[i])) == 0 for i in tau.rays)]
            # the face of the dual cut out by tau has complementary dimension
            assert (rank(perp) if perp else 0) == fan.dim - len(tau.rays)


def test_double_dual_involution_random():
    rng = random.Random(5)
    for _ in range(60):
        while True:
            u, v = (rng.randint(-6, 6), rng.randint(-6, 6)), (rng.randint(-6, 6), rng.randint(-6, 6))
            if u[0] * v[1] - u[1] * v[0] > 0:
                break
        u, v = prim(u), prim(v)
        d = dual_of([u, v], 2)
        back = dual_of(list(d.rays), 2)
        assert set(back.rays) == {u, v}
        assert set(d.rays) == facet_normals([u, v])


def test_dual_matches_facet_oracle_3d():
    rng = random.Random(11)
    done = 0
    while done < 30:
        vs = [tuple(rng.randint(-3, 3) for _ in range(3)) for _ in range(3)]
        if laplace_det([list(v) for v in vs]) == 0:
            continue
        vs = [prim(v) for v in vs]
        assert set(dual_of(vs, 3).rays) == facet_normals(vs)
        done += 1


def test_smooth_and_complete():
    assert is_smooth(projective_plane()) and is_complete(projective_plane())
    assert not is_smooth(single_cone((1, 0), (1, 2)))
    assert is_smooth(affine_plane()) and not is_complete(affine_plane())
    with pytest.raises(UnsupportedDimension):
        is_complete(projective_space(3))


def test_random_blowups_are_smooth_complete():
    rng = random.Random(2)
    for _ in range(20):
        f = random_smooth_complete_fan(rng)
        assert is_smooth(f) and is_complete(f)


def test_orbit_star():
    f = projective_plane()
    assert set(orbit_star(f, Cone())) == set(f.cones)
    assert set(orbit_star(f, Cone.of(0))) == {Cone.of(0), Cone.of(0, 1), Cone.of(0, 2)}
    assert orbit_star(f, Cone.of(1, 2)) == [Cone.of(1, 2)]
    with pytest.raises(PreconditionError):
        orbit_star(f, Cone.of(0, 1, 2))


def test_semigroup_leq_examples():
    f = affine_plane()
    q = Cone.of(0, 1)
    assert semigroup_leq(f, q, (0, 0), (1, 2)) == (True, False)
    assert not semigroup_leq(f, q, (1, 0), (0, 0)).less_or_equal
    assert semigroup_leq(f, Cone.of(0), (0, 5), (0, -5)) == (True, True)


def test_separating_character_examples():
    f = affine_plane()
    q = Cone.of(0, 1)
    assert separating_character(f, Cone.of(0), q) == (0, 1)
    assert separating_character(f, Cone(), q) == (1, 1)
    assert separating_character(f, q, q) == (0, 0)
    with pytest.raises(NotAFace):
        separating_character(projective_plane(), Cone.of(2), Cone.of(0, 1))


def test_separating_character_on_p3():
    f = projective_space(3)
    for sigma in f.max_cones:
        for tau in faces(f, sigma):
            m = separating_character(f, tau, sigma)
            for i in sigma.rays:
                v = sum(a * b for a, b in zip(m, f.rays[i]))
                assert (v == 0) if i in tau.rays else (v > 0)


def test_fan_validation():
    with pytest.raises(ValidationError):
        Fan(2, ((2, 0), (0, 1)), (Cone.of(0, 1),))  # not primitive
    with pytest.raises(ValidationError):
        Fan(2, ((1, 0), (0, 1)), (Cone.of(0, 5),))
    with pytest.raises(ValidationError):
        Fan(2, ((1, 0), (0, 1), (1, 1)), (Cone.of(0, 1), Cone.of(1, 2)))  # overlap
    with pytest.raises(ValidationError):
        Fan(2, ((1, 0), (-1, 0)), (Cone.of(0, 1),))  # not pointed
    with pytest.raises(UnsupportedDimension):
        Fan(5, tuple(tuple(int(i == j) for j in range(5)) for i in range(5)), (Cone(tuple(range(5))),))


def test_is_face():
    f = projective_plane()
    assert is_face(f, Cone.of(0), Cone.of(0, 1))
    assert not is_face(f, Cone.of(2), Cone.of(0, 1))


# -- preorder axioms -------------------------------------------------------

chars = st.tuples(st.integers(-4, 4), st.integers(-4, 4))


@settings(max_examples=200, deadline=None)
@given(chars, chars, chars, st.sampled_from([Cone(), Cone.of(0), Cone.of(1), Cone.of(0, 1)]))
def test_preorder_axioms(m, m2, m3, sigma):
    f = projective_plane()
    leq = lambda a, b, c=sigma: semigroup_leq(f, c, a, b).less_or_equal  # noqa: E731
    assert leq(m, m)
    if leq(m, m2) and leq(m2, m3):
        assert leq(m, m3)
    # directedness: push m + m2 deep into the interior of the dual cone
    top = separating_character(f, Cone(), sigma)
    upper = tuple(a + b + 20 * t for a, b, t in zip(m, m2, top))
    assert leq(m, upper) and leq(m2, upper)
    both = leq(m, m2) and leq(m2, m)
    assert both == semigroup_leq(f, sigma, m, m2).equivalent
    for tau in faces(f, sigma):
        if leq(m, m2):
            assert semigroup_leq(f, tau, m, m2).less_or_equal
    if len(sigma.rays) == 2 and both:
        assert m == m2
