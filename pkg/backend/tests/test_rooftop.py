import pytest

from src.errors import CapExceededError, InvalidInput
from src.exact import IntMatrix
from src.polyhedral import product_fan, projective_space_fan
from src.rooftop import (
    RooftopWitness,
    check_condition_divisor,
    check_condition_fiber,
    check_condition_small,
    check_witness,
    identify_projective_space,
    model_name,
    product_model,
    verify_atiyah,
)
from src.toric_git import FanMorphism


@pytest.mark.parametrize("m", range(1, 5))
@pytest.mark.parametrize("l", range(1, 5))
def test_atiyah_family_is_a_rooftop_flip(m, l):
    report = verify_atiyah(m, l)
    assert report.passed, report.summary()
    assert report.model == model_name(m, l)
    assert report.quotient["hilbert_basis_size"] == (m + 1) * (l + 1)
    assert report.quotient["fan_minus_cones"] == m + 1
    assert report.quotient["fan_plus_cones"] == l + 1
    assert report.quotient["all_smooth"]


def test_conifold_report():
    report = verify_atiyah(1, 1)
    assert report.model == "P^1 x P^1"
    small = report.condition_small.evidence
    assert small["minus"]["codimension"] == small["plus"]["codimension"] == 2
    assert small["minus"]["fiber"] == small["plus"]["fiber"] == "P^1"
    assert report.quotient["blowup_cones"] == 4
    assert report.quotient["git_cone_rays"] == 4


def test_exceptional_loci_of_unbalanced_flip():
    small = verify_atiyah(2, 3).condition_small.evidence
    assert small["minus"]["codimension"] == 4
    assert small["plus"]["codimension"] == 3
    assert small["minus"]["fiber"] == "P^2"
    assert small["plus"]["fiber"] == "P^3"
    assert small["minus"]["z0_is_point"] and small["plus"]["z0_is_point"]


def test_divisor_fibers():
    divisor = verify_atiyah(1, 2).condition_divisor.evidence
    assert divisor["minus"]["fiber"] == "P^2"
    assert divisor["plus"]["fiber"] == "P^1"
    assert divisor["minus"]["factorization"] and divisor["plus"]["factorization"]


@pytest.mark.parametrize("m,l", [(1, 2), (2, 3), (1, 4)])
def test_reports_are_symmetric(m, l):
    assert verify_atiyah(m, l).summary() == verify_atiyah(l, m).swapped().summary()


def test_certificates_are_lattice_maps():
    report = verify_atiyah(1, 2)
    fiber = report.condition_fiber.certificates
    A = IntMatrix.from_rows(fiber["model_isomorphism"], 3)
    assert abs(A.det()) == 1
    assert set(report.condition_divisor.certificates) == {"minus", "plus"}
    assert report.condition_divisor.certificates["minus"]["divisor_ray"] == \
        report.condition_divisor.certificates["plus"]["divisor_ray"]


def test_identity_contraction_is_not_a_divisor():
    w = RooftopWitness.atiyah(1, 1)
    identity = FanMorphism.build("b_minus", IntMatrix.identity(3), w.W_minus, w.W_minus)
    broken = w.with_changes(W=w.W_minus, b_minus=identity, beta=w.s_minus)
    verdict = check_condition_divisor(broken)
    assert not verdict.passed
    assert not verdict.evidence["minus"]["divisor"]
    assert not check_condition_fiber(broken).passed


def test_wrong_composite_breaks_factorization():
    w = RooftopWitness.atiyah(1, 1)
    verdict = check_condition_divisor(w.with_changes(beta=w.b_minus))
    assert not verdict.passed
    assert not verdict.evidence["minus"]["factorization"]
    assert not verdict.evidence["plus"]["factorization"]
    assert check_condition_small(w.with_changes(beta=w.b_minus)).passed


def test_wrong_model_is_rejected():
    w = RooftopWitness.atiyah(1, 1).with_changes(**product_model(1, 2))
    report = check_witness(w, 1, 1)
    assert not report.passed
    assert report.model == "P^1 x P^2"
    assert report.condition_small.evidence["plus"]["problems"]
    assert not report.condition_fiber.evidence["matched"]


def test_identify_projective_space():
    assert identify_projective_space(projective_space_fan(3)) == "P^3"
    assert identify_projective_space(product_fan(projective_space_fan(1), projective_space_fan(1))) is None


@pytest.mark.parametrize("m,l", [(0, 1), (1, 0), (-1, 2)])
def test_degenerate_sizes_are_rejected(m, l):
    with pytest.raises(InvalidInput):
        verify_atiyah(m, l)


def test_non_integer_sizes_are_rejected():
    with pytest.raises(InvalidInput):
        verify_atiyah(True, 1)
    with pytest.raises(InvalidInput):
        verify_atiyah(1.5, 1)


def test_size_cap():
    with pytest.raises(CapExceededError):
        verify_atiyah(3, 1, max_size=2)


def test_divisorial_contraction_is_not_small():
    w = RooftopWitness.atiyah(1, 1)
    verdict = check_condition_small(w.with_changes(s_minus=w.beta))
    assert not verdict.passed
    assert verdict.evidence["minus"]["codimension"] == 1
    assert verdict.evidence["plus"]["problems"] == []


def test_miswired_witness_is_reported_not_raised():
    w = RooftopWitness.atiyah(1, 1)
    identity = FanMorphism.build("b_minus", IntMatrix.identity(3), w.W_minus, w.W_minus)
    report = check_witness(w.with_changes(W=w.W_minus, b_minus=identity, beta=w.s_minus), 1, 1)
    assert not report.passed
    assert report.condition_small.passed
    assert "b_plus does not start at W" in report.condition_divisor.evidence["plus"]["problems"]
    assert "plus: b_plus does not start at W" in report.condition_fiber.evidence["problems"]


def test_contraction_with_wrong_source_is_reported():
    w = RooftopWitness.atiyah(1, 2)
    verdict = check_condition_small(w.with_changes(s_plus=w.s_minus))
    assert not verdict.passed
    assert "s_minus does not start at W_plus" in verdict.evidence["plus"]["problems"]


def test_default_size_cap(monkeypatch):
    monkeypatch.delenv("ROOFTOP_MAX_SIZE", raising=False)
    with pytest.raises(CapExceededError):
        verify_atiyah(6, 1)
