import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from klyachko.errors import DimensionError, PreconditionError
from klyachko.fan import Cone, Fan, affine_plane, hirzebruch, product_p1_p1, projective_plane
from klyachko.lattice import (
    LatticePoint,
    chow_presentation,
    check_snf,
    pairing,
    smith_normal_form,
)

from ._support import gcd_of_minors, laplace_det


def test_pairing_examples():
    assert pairing(LatticePoint((1, 0), "M"), LatticePoint((0, 1), "N")) == 0
    assert pairing((0, 0), (7, -3)) == 0
    assert pairing(LatticePoint((2, 3), "M"), LatticePoint((-1, -1))) == -5


def test_pairing_rejects_mismatch():
    with pytest.raises(DimensionError):
        pairing((1, 2), (1, 2, 3))
    with pytest.raises(DimensionError):
        pairing(LatticePoint((1, 0), "N"), LatticePoint((1, 0), "N"))


def test_lattice_point_rejects_floats():
    with pytest.raises(TypeError):
        LatticePoint((1.5, 0))


def test_snf_identity():
    snf = smith_normal_form([[1, 0], [0, 1]])
    assert snf.diag == ((1, 0), (0, 1))
    assert snf.left == ((1, 0), (0, 1)) and snf.right == ((1, 0), (0, 1))


def test_snf_diag_2_3():
    assert smith_normal_form([[2, 0], [0, 3]]).diag == ((1, 0), (0, 6))


def test_snf_p2_ray_matrix():
    snf = smith_normal_form([[1, 0], [0, 1], [-1, -1]])
    assert snf.diag == ((1, 0), (0, 1), (0, 0))
    assert check_snf([[1, 0], [0, 1], [-1, -1]], snf)


def test_snf_empty_and_zero():
    assert smith_normal_form([], ncols=3).invariants == ()
    assert smith_normal_form([[0, 0], [0, 0]]).invariants == ()


def test_snf_deterministic():
    m = [[4, 6, 2], [3, -9, 12], [5, 5, 5]]
    assert smith_normal_form(m) == smith_normal_form(m)


matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-5, 5), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_snf_properties(mat):
    snf = smith_normal_form(mat)
    assert check_snf(mat, snf)
    prod = 1
    for k, d in enumerate(snf.invariants, start=1):
        prod *= d
        if k <= 3:  # Laplace is slow beyond this
            assert prod == gcd_of_minors(mat, k)


def test_chow_p2():
    pres = chow_presentation(projective_plane())
    assert pres.free_rank == 1 and pres.invariant_factors == ()
    assert {abs(c[0]) for c in pres.class_of} == {1}
    assert len({c for c in pres.class_of}) == 1
    assert pres.describe() == "Z"


def test_chow_affine_plane():
    pres = chow_presentation(affine_plane())
    assert pres.describe() == "0" and pres.class_of == ((), ())


@pytest.mark.parametrize("fan", [product_p1_p1(), hirzebruch(1), hirzebruch(2)])
def test_chow_rank_two(fan):
    pres = chow_presentation(fan)
    assert pres.free_rank == 2 and pres.invariant_factors == ()


def test_chow_torsion():
    # the rays span a sublattice of index 2
    fan = Fan(2, ((1, 0), (1, 2)), (Cone.of(0, 1),))
    pres = chow_presentation(fan)
    assert pres.free_rank == 0 and pres.invariant_factors == (2,)


def test_chow_classes_generate_and_exactness():
    for fan in (projective_plane(), product_p1_p1(), hirzebruch(3)):
        pres = chow_presentation(fan)
        for col in zip(*fan.rays):
            assert pres.is_zero(pres.project(col))
        # classes of D_rho generate: the projection matrix has unimodular maximal minors gcd
        proj = [list(r) for r in pres.projection]
        assert gcd_of_minors(proj, len(proj)) == 1


def test_chow_requires_spanning_rays():
    fan = Fan(2, ((1, 0),), (Cone.of(0),))
    with pytest.raises(PreconditionError):
        chow_presentation(fan)


def test_laplace_oracle_agrees_with_bareiss():
    from klyachko._matrix import det

    for m in itertools.product(range(-2, 3), repeat=4):
        mat = [list(m[:2]), list(m[2:])]
        assert det(mat) == laplace_det(mat)
