import pytest

from src.drum import (
    DiagonalAction,
    DrumKind,
    DrumTriple,
    ambient_dimension,
    bandwidth_of_drum,
    drum_action,
    drum_dimension,
    segre_drum,
    smoothness_check,
)
from src.errors import InvalidInput, UnsupportedDrumError


def test_product_triple():
    t = DrumTriple.product(1, 1)
    assert (t.h0_minus, t.h0_plus) == (2, 2)
    assert ambient_dimension(t) == 4
    assert drum_dimension(t) == 3
    assert t.name == "P^1 x P^1"


def test_flag_triple():
    t = DrumTriple.flag(2)
    assert t.dim_y == 3
    assert ambient_dimension(t) == 6
    assert drum_dimension(t) == 4
    assert t.to_dict()["y"] == "P(T_P^2)"


def test_higher_degree_sections():
    t = DrumTriple.product(2, 1, a=2)
    assert t.h0_minus == 6 and t.h0_plus == 2


def test_bad_triples():
    with pytest.raises(InvalidInput):
        DrumTriple.product(-1, 1)
    with pytest.raises(InvalidInput):
        DrumTriple.flag(0)
    with pytest.raises(InvalidInput):
        DrumTriple.product(1, 1, a=0)
    with pytest.raises(UnsupportedDrumError):
        DrumKind.parse("grassmannian")
    assert DrumKind.parse("flag") is DrumKind.FLAG


@pytest.mark.parametrize("m,l", [(1, 1), (1, 2), (2, 3), (0, 2)])
def test_product_smoothness(m, l):
    check = smoothness_check(DrumTriple.product(m, l))
    assert check.passed, check.notes


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_flag_smoothness(n):
    check = smoothness_check(DrumTriple.flag(n))
    assert check.passed, check.notes
    assert check.degrees == (1, 1)


def test_fiber_degree_fails_for_higher_degree():
    check = smoothness_check(DrumTriple.product(1, 1, a=2))
    assert check.nef_cone and check.projective_bundles
    assert not check.fiber_degree
    assert check.degrees == (2, 1)
    flag = smoothness_check(DrumTriple.flag(2, b=3))
    assert not flag.passed and flag.degrees == (1, 3)


@pytest.mark.parametrize("t", [DrumTriple.product(2, 3), DrumTriple.flag(3)])
def test_bandwidth_is_one(t):
    assert bandwidth_of_drum(t).bandwidth == 1
    assert bandwidth_of_drum(t.swapped()).bandwidth == 1
    assert drum_action(t).is_equalized()


def test_swapped_triple():
    t = DrumTriple.product(1, 3, a=2)
    s = t.swapped()
    assert s.params == (3, 1)
    assert (s.h0_minus, s.h0_plus) == (t.h0_plus, t.h0_minus)
    assert s.swapped() == t


def test_segre_drum_fills_projective_space():
    cert = segre_drum(1, 1)
    assert cert.passed
    assert cert.x == "P^3"
    assert cert.fills_ambient


def test_segre_drum_sink_and_source():
    data = segre_drum(2, 3).to_dict()
    assert data["x"] == "P^6"
    assert data["sink"] == "P^2" and data["source"] == "P^3"
    assert data["mu"] == {"mu_sink": 0, "mu_source": 1, "bandwidth": 1}
    assert data["passed"]


def test_segre_drum_of_points():
    cert = segre_drum(0, 0)
    assert cert.x == "P^1"
    assert cert.passed


def test_diagonal_action():
    action = DiagonalAction((1, 1, 0, 0))
    assert action.fixed_components() == [(0, 1), (2, 3)]
    assert action.component_dimensions() == [1, 1]
    assert action.limit((1, 2, 3, 4)) == (1, 2, 0, 0)
    assert action.limit((1, 2, 3, 4), toward_infinity=False) == (0, 0, 3, 4)
    assert action.is_fixed((0, 0, 3, 4))
    assert action.isotropy_order((0, 0, 3, 4)) == 0
    assert action.isotropy_order((1, 0, 3, 0)) == 1


def test_non_equalized_action():
    action = DiagonalAction((2, 0, 0))
    assert action.isotropy_order((1, 1, 0)) == 2
    assert not action.is_equalized()
    assert action.mu_data().bandwidth == 2
    assert action.mu(1) == 2
    with pytest.raises(InvalidInput):
        action.limit((0, 0, 0))


def test_degenerate_triples():
    t = DrumTriple.product(1, 0)
    assert t.h0_plus == 1
    assert ambient_dimension(t) == t.h0_minus + 1 == 3
    assert drum_dimension(DrumTriple.product(0, 0)) == 1


@pytest.mark.parametrize("t", [DrumTriple.product(1, 2), DrumTriple.product(3, 3), DrumTriple.flag(2), DrumTriple.flag(4)])
def test_drum_fits_in_its_ambient(t):
    if t.kind is DrumKind.PRODUCT:
        assert drum_dimension(t) + 1 == ambient_dimension(t)
    else:
        assert drum_dimension(t) + 1 < ambient_dimension(t)
