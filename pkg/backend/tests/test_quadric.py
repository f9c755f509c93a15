import random
from fractions import Fraction

import pytest

from src.errors import CapExceededError, DimensionMismatch, InvalidInput
from src.quadric import (
    ProjPoint,
    QuadricModel,
    bb_limits,
    cone_membership,
    fixed_locus_patterns,
    homothety_commutes,
    incidence_check,
    incidence_pairing,
    mukai_witness,
    on_quadric,
    random_point_on_quadric,
)


def test_points_on_the_quadric():
    M = QuadricModel(1)
    assert on_quadric(M, (1, 1, 1, -1))
    assert not on_quadric(M, (1, 0, 1, 0))
    with pytest.raises(DimensionMismatch):
        on_quadric(M, (1, 1, 1))


def test_projective_points_are_normalized():
    assert ProjPoint.of((0, 2, 4)).coords == (0, 1, 2)
    assert ProjPoint.of((Fraction(1, 2), 1)) == ProjPoint.of((1, 2))
    with pytest.raises(InvalidInput):
        ProjPoint.of((0, 0))


def test_limits_of_a_general_point():
    M = QuadricModel(1)
    limits = bb_limits(M, (1, 1, 1, -1))
    assert not limits.fixed
    assert limits.sink == ProjPoint.of((1, 1, 0, 0))
    assert limits.source == ProjPoint.of((0, 0, 1, -1))
    for q in (limits.sink, limits.source):
        again = bb_limits(M, q)
        assert again.fixed and again.sink == q and again.source == q
    with pytest.raises(InvalidInput):
        bb_limits(M, (1, 0, 1, 0))


def test_incidence():
    M = QuadricModel(1)
    assert incidence_check(M, (1, 1, 1, -1))
    assert not incidence_check(M, (1, 0, 1, 0))
    with pytest.raises(InvalidInput):
        incidence_check(M, (1, 1, 0, 0))


def test_cone_membership():
    M = QuadricModel(1)
    assert cone_membership(M, (1, 1, 1, -1)).to_dict() == {"in_minus": True, "in_plus": True}
    assert cone_membership(M, (1, 1, 0, 0)).to_dict() == {"in_minus": True, "in_plus": False}
    assert cone_membership(M, (0, 0, 0, 0)).to_dict() == {"in_minus": False, "in_plus": False}
    with pytest.raises(InvalidInput):
        cone_membership(M, (1, 0, 1, 0))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_form_identities(n):
    M = QuadricModel(n)
    rng = random.Random(n)
    for _ in range(50):
        v = tuple(Fraction(rng.randint(-5, 5), rng.randint(1, 5)) for _ in range(M.size))
        t = Fraction(rng.randint(1, 6), rng.randint(1, 6)) * rng.choice([-1, 1])
        assert incidence_pairing(M, v) == M.form(v)
        assert M.form(M.act(t, v)) == t * M.form(v)
        assert homothety_commutes(M, v, t, 3)
        assert on_quadric(M, random_point_on_quadric(M, rng))


def test_fixed_locus_patterns():
    summary = fixed_locus_patterns(QuadricModel(1))
    assert summary.patterns == 15
    assert summary.fixed_patterns == 6
    assert summary.consistent


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_mukai_witness(n):
    cert = mukai_witness(n, samples=100, seed=7)
    assert cert.passed, cert.failures
    data = cert.to_dict()
    assert data["model"] == f"P(T_P^{n})"
    assert data["bandwidth"] == 1
    assert data["drum"]["ambient_dimension"] == 2 * n + 2
    assert data["dimensions"]["codimension"] == n
    assert data["dimensions"]["exceptional_divisor"] == 2 * n - 1


def test_mukai_witness_with_many_samples():
    cert = mukai_witness(5, samples=1000, seed=7)
    assert cert.passed
    assert cert.samples_passed == 1000


def test_mukai_witness_is_deterministic():
    assert mukai_witness(2, samples=20, seed=11).to_dict() == mukai_witness(2, samples=20, seed=11).to_dict()


def test_small_only_from_n_two():
    low = mukai_witness(1, samples=5, seed=0)
    assert not low.dimensions["small"]
    assert low.notes
    assert mukai_witness(2, samples=5, seed=0).dimensions["small"]


def test_mukai_witness_input_errors():
    with pytest.raises(InvalidInput):
        mukai_witness(0, samples=5, seed=0)
    with pytest.raises(InvalidInput):
        mukai_witness(2, samples=0, seed=0)
    with pytest.raises(InvalidInput):
        mukai_witness(2, samples=5, seed=-1)
    with pytest.raises(InvalidInput):
        mukai_witness(2, samples=5, seed=2 ** 64)
    with pytest.raises(CapExceededError):
        mukai_witness(4, samples=5, seed=0, max_n=3)


def test_fixed_loci_lie_on_the_quadric():
    M = QuadricModel(2)
    assert on_quadric(M, (3, -1, 2, 0, 0, 0))
    assert on_quadric(M, (0, 0, 0, 1, 5, -2))


@pytest.mark.parametrize("n", range(1, 6))
def test_fixed_points_are_supported_in_one_block(n):
    summary = fixed_locus_patterns(QuadricModel(n))
    assert summary.consistent
    assert summary.fixed_patterns == 2 * (2 ** (n + 1) - 1)
