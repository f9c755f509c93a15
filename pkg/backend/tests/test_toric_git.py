import random
from fractions import Fraction

import pytest

from src.errors import AssignmentError, DimensionMismatch, InvalidInput, UnsupportedActionError
from src.exact import IntMatrix
from src.polyhedral import fan_isomorphisms, product_fan, projective_space_fan
from src.toric_git import (
    Direction,
    FanMorphism,
    Side,
    WeightedAction,
    blowup_ray,
    build_morphisms,
    build_quotient,
    check_factorization,
    cobordism_membership,
    exceptional_locus,
    git_quotient_cone,
    limit_exists,
    quotient_fan,
)


def conifold():
    return build_quotient(WeightedAction.atiyah(1, 1))


def test_atiyah_weights():
    a = WeightedAction.atiyah(2, 1)
    assert a.point_weights == (1, 1, 1, -1, -1)
    assert (a.m, a.l, a.N) == (2, 1, 5)
    assert a.is_cobordism()
    with pytest.raises(DimensionMismatch):
        WeightedAction(1, 1, (1,))


def test_act_is_exact():
    a = WeightedAction.atiyah(1, 1)
    assert a.act(2, (1, 1, 1, 1)) == (2, 2, Fraction(1, 2), Fraction(1, 2))
    with pytest.raises(InvalidInput):
        a.act(0, (1, 1, 1, 1))


def test_limit_exists():
    a = WeightedAction.atiyah(1, 1)
    v = (1, 0, 0, 0)
    assert not limit_exists(a, v, Direction.TOWARD_INFINITY)
    assert limit_exists(a, v, Direction.TOWARD_ZERO)
    assert limit_exists(a, (0, 0, 0, 0), "toward-zero")
    assert limit_exists(a, (0, 0, 0, 0), "toward-infinity")
    with pytest.raises(DimensionMismatch):
        limit_exists(a, (1, 0), Direction.TOWARD_ZERO)


def test_cobordism_membership_examples():
    a = WeightedAction.atiyah(1, 1)
    assert cobordism_membership(a, (1, 1, 1, 1)).to_dict() == {"in_minus": True, "in_plus": True}
    assert cobordism_membership(a, (1, 1, 0, 0)).to_dict() == {"in_minus": True, "in_plus": False}
    assert cobordism_membership(a, (0, 0, 0, 0)).to_dict() == {"in_minus": False, "in_plus": False}


@pytest.mark.parametrize("m,l", [(1, 1), (2, 1), (1, 3), (4, 4)])
def test_membership_matches_block_support(m, l):
    a = WeightedAction.atiyah(m, l)
    rng = random.Random(m * 10 + l)
    for _ in range(1000):
        v = [Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(a.N)]
        if rng.random() < 0.3:
            for i in a.minus_block:
                v[i] = 0
        if rng.random() < 0.3:
            for i in a.plus_block:
                v[i] = 0
        member = cobordism_membership(a, v)
        assert member.in_minus == any(v[i] for i in a.minus_block)
        assert member.in_plus == any(v[i] for i in a.plus_block)


def test_git_quotient_cone_of_conifold():
    a = WeightedAction.atiyah(1, 1)
    git = git_quotient_cone(a)
    assert git.cone.lattice_rank == 3
    assert len(git.cone.rays) == 4
    assert len(git.hilbert) == 4
    assert sorted(git.monomial_names(a)) == ["y0*x0", "y0*x1", "y1*x0", "y1*x1"]


@pytest.mark.parametrize("m,l", [(0, 0), (2, 0), (1, 1), (1, 2), (2, 2), (3, 1)])
def test_hilbert_basis_counts_segre_monomials(m, l):
    a = WeightedAction.atiyah(m, l)
    git = git_quotient_cone(a)
    assert len(git.hilbert) == (m + 1) * (l + 1)
    for exps in git.monomials:
        assert sum(e * w for e, w in zip(exps, a.point_weights)) == 0
        assert sum(exps[i] for i in a.minus_block) == 1
        assert sum(exps[i] for i in a.plus_block) == 1


def test_one_sided_weights_are_rejected():
    with pytest.raises(UnsupportedActionError):
        git_quotient_cone(WeightedAction(2, 0, (1, 1)))
    with pytest.raises(UnsupportedActionError):
        quotient_fan(WeightedAction(2, 2, (2, 1, -1, -1)), Side.MINUS)


def test_conifold_quotient_fans():
    q = conifold()
    for side in Side:
        F = q.fan(side)
        assert len(F.maximal) == 2
        assert F.is_smooth() and F.is_valid()
        assert F.refines(q.git_fan)
    assert set(q.fan_minus.maximal) != set(q.fan_plus.maximal)


def test_one_sided_quotient_fan():
    a = WeightedAction.atiyah(1, 0)
    assert len(quotient_fan(a, Side.PLUS).maximal) == 1
    assert quotient_fan(a, Side.PLUS).is_smooth()
    assert len(quotient_fan(a, "minus").maximal) == 2


@pytest.mark.parametrize("m,l", [(1, 1), (2, 1), (1, 3), (2, 2)])
def test_blowup_refines_both_sides(m, l):
    q = build_quotient(WeightedAction.atiyah(m, l))
    W = q.blowup_fan
    images = q.ray_images
    minus = tuple(map(sum, zip(*(images[i] for i in q.action.minus_block))))
    plus = tuple(map(sum, zip(*(images[i] for i in q.action.plus_block))))
    assert minus == plus == blowup_ray(q)
    assert W.refines(q.fan_minus) and W.refines(q.fan_plus)
    assert W.is_smooth() and q.fan_minus.is_smooth() and q.fan_plus.is_smooth()
    rng = random.Random(m + 7 * l)
    for _ in range(100):
        v = tuple(rng.randint(-3, 3) for _ in range(q.quotient_lattice_rank))
        inside = q.git_cone.contains(v)
        assert W.contains(v) == inside
        assert q.fan_minus.contains(v) == inside
        assert q.fan_plus.contains(v) == inside


@pytest.mark.parametrize("m,l", [(1, 1), (2, 1)])
def test_exceptional_divisor_is_product(m, l):
    q = build_quotient(WeightedAction.atiyah(m, l))
    W = q.blowup_fan
    star, _ = W.star({W.rays.index(blowup_ray(q))})
    model = product_fan(projective_space_fan(m), projective_space_fan(l))
    assert next(fan_isomorphisms(star, model), None) is not None


def test_trivial_blowup_for_rank_one_quotient():
    q = build_quotient(WeightedAction.atiyah(0, 0))
    assert q.blowup_fan == q.git_fan


def test_morphisms_of_conifold():
    q = conifold()
    maps = build_morphisms(q)
    for c in q.blowup_fan.maximal:
        assert maps.b_minus.cone_assignment[c] in q.fan_minus.maximal
        assert maps.b_plus.cone_assignment[c] in q.fan_plus.maximal
    apex = q.git_fan.maximal[0]
    for c in q.fan_minus.maximal:
        assert maps.s_minus.cone_assignment[c] == apex
    for side in Side:
        assert check_factorization(maps.b(side), maps.s(side), maps.beta) == []


def test_assignment_failure_names_the_cone():
    q = conifold()
    with pytest.raises(AssignmentError) as info:
        FanMorphism.build("crossed", IntMatrix.identity(3), q.fan_minus, q.fan_plus)
    assert info.value.to_dict()["reason"] == "assignment_failed"
    assert "cone" in info.value.to_dict()


def test_exceptional_loci_of_conifold():
    q = conifold()
    maps = build_morphisms(q)
    locus = exceptional_locus(maps.s_minus)
    assert len(locus.cones) == 1
    assert locus.codimension == 2
    assert locus.orbit_dimensions == [1]
    (tau,) = locus.cones
    assert sorted(q.fan_minus.rays[i] for i in tau) == sorted(q.ray_images[i] for i in q.action.plus_block)

    divisor = exceptional_locus(maps.b_minus)
    assert divisor.codimension == 1
    assert frozenset([q.blowup_fan.rays.index(blowup_ray(q))]) in divisor.cones


def test_identity_has_empty_exceptional_locus():
    F = conifold().fan_minus
    identity = FanMorphism.build("id", IntMatrix.identity(3), F, F)
    locus = exceptional_locus(identity)
    assert locus.is_empty and locus.codimension is None


@pytest.mark.parametrize("m,l", [(1, 1), (2, 3), (3, 1)])
def test_small_contraction_codimensions(m, l):
    q = build_quotient(WeightedAction.atiyah(m, l))
    maps = build_morphisms(q)
    assert exceptional_locus(maps.s_minus).codimension == l + 1
    assert exceptional_locus(maps.s_plus).codimension == m + 1
