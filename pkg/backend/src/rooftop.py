"""Verifier for rooftop flips on toric data, and the driver for the ±1 weight family.

A witness bundles the fans W, W-, W+, the cone W0, the morphisms
b: W -> W-/W+, s: W-/W+ -> W0 and beta = s o b, and a model fan for the
fiber over the apex together with its two projections. The three checks
are independent and each returns a Verdict with side-keyed evidence.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

from .config import get_settings
from .errors import CapExceededError, InvalidInput
from .exact import IntMatrix, right_inverse
from .polyhedral import (
    Cone,
    ConeIndex,
    Fan,
    check_fibration,
    fan_isomorphisms,
    product_fan,
    projective_space_fan,
    verify_fan_isomorphism,
)
from .toric_git import (
    FanMorphism,
    Side,
    WeightedAction,
    build_morphisms,
    build_quotient,
    check_factorization,
    exceptional_locus,
    git_quotient_cone,
)

logger = logging.getLogger(__name__)

SIDES = (Side.MINUS, Side.PLUS)


def projective_name(k: int) -> str:
    return f"P^{k}"


def model_name(m: int, l: int) -> str:
    return f"{projective_name(m)} x {projective_name(l)}"


def identify_projective_space(F: Fan) -> Optional[str]:
    """'P^k' when F is unimodularly isomorphic to the fan of projective k-space."""
    if len(F.rays) != F.lattice_rank + 1 and F.lattice_rank:
        return None
    candidate = projective_space_fan(F.lattice_rank)
    if next(fan_isomorphisms(F, candidate), None) is None:
        return None
    return projective_name(F.lattice_rank)


@dataclass(frozen=True)
class RooftopWitness:
    W: Fan
    W_minus: Fan
    W_plus: Fan
    W0: Cone
    b_minus: FanMorphism
    b_plus: FanMorphism
    s_minus: FanMorphism
    s_plus: FanMorphism
    beta: FanMorphism
    model_fan: Fan
    lambda_minus: Fan
    lambda_plus: Fan
    model_projections: Tuple[IntMatrix, IntMatrix]
    model_factors: Tuple[int, int]

    @classmethod
    def atiyah(cls, m: int, l: int) -> "RooftopWitness":
        q = build_quotient(WeightedAction.atiyah(m, l))
        maps = build_morphisms(q)
        return cls(
            W=q.blowup_fan,
            W_minus=q.fan_minus,
            W_plus=q.fan_plus,
            W0=q.git_cone,
            b_minus=maps.b_minus,
            b_plus=maps.b_plus,
            s_minus=maps.s_minus,
            s_plus=maps.s_plus,
            beta=maps.beta,
            **product_model(m, l),
        )

    def with_changes(self, **changes) -> "RooftopWitness":
        return replace(self, **changes)

    def b(self, side: Side) -> FanMorphism:
        return self.b_minus if side is Side.MINUS else self.b_plus

    def s(self, side: Side) -> FanMorphism:
        return self.s_minus if side is Side.MINUS else self.s_plus

    def fan(self, side: Side) -> Fan:
        return self.W_minus if side is Side.MINUS else self.W_plus

    def lambda_fan(self, side: Side) -> Fan:
        return self.lambda_minus if side is Side.MINUS else self.lambda_plus

    def projection(self, side: Side) -> IntMatrix:
        return self.model_projections[0] if side is Side.MINUS else self.model_projections[1]

    @property
    def model(self) -> str:
        return model_name(*self.model_factors)


def product_model(m: int, l: int) -> dict:
    """Fan of P^m x P^l with its projections onto the two factors."""
    total = m + l
    p_minus = IntMatrix.from_rows([[int(i == j) for j in range(total)] for i in range(m)], total)
    p_plus = IntMatrix.from_rows([[int(m + i == j) for j in range(total)] for i in range(l)], total)
    return {
        "model_fan": product_fan(projective_space_fan(m), projective_space_fan(l)),
        "lambda_minus": projective_space_fan(m),
        "lambda_plus": projective_space_fan(l),
        "model_projections": (p_minus, p_plus),
        "model_factors": (m, l),
    }


@dataclass
class Verdict:
    name: str
    passed: bool
    evidence: Dict[str, dict]
    certificates: Dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "evidence": self.evidence,
            "certificates": self.certificates,
        }

    def swapped(self) -> "Verdict":
        flip = {"minus": "plus", "plus": "minus"}
        return Verdict(
            self.name,
            self.passed,
            {flip.get(k, k): v for k, v in self.evidence.items()},
            {flip.get(k, k): v for k, v in self.certificates.items()},
        )


# -- shared pieces ------------------------------------------------------------------------

def _wiring_problems(w: RooftopWitness, side: Side, include_b: bool = True) -> List[str]:
    """Morphisms of one side whose source or target is not the fan the witness names."""
    b, s = w.b(side), w.s(side)
    apex = Fan.single(w.W0)
    side_fan = f"W_{side.value}"
    expected = [
        (s.source, w.fan(side), f"{s.name} does not start at {side_fan}"),
        (s.target, apex, f"{s.name} does not land in W0"),
    ]
    if include_b:
        expected += [
            (b.source, w.W, f"{b.name} does not start at W"),
            (b.target, w.fan(side), f"{b.name} does not land in {side_fan}"),
            (w.beta.source, w.W, f"{w.beta.name} does not start at W"),
            (w.beta.target, apex, f"{w.beta.name} does not land in W0"),
        ]
    return [message for actual, wanted, message in expected if actual != wanted]


def _exceptional_cone(s: FanMorphism) -> Tuple[Optional[ConeIndex], dict]:
    locus = exceptional_locus(s)
    info = {
        "codimension": locus.codimension,
        "exceptional_cones": len(locus.cones),
        "orbit_dimensions": locus.orbit_dimensions,
    }
    if len(locus.cones) != 1:
        return None, info
    return locus.cones[0], info


@dataclass
class DivisorData:
    rho: int
    tau: ConeIndex
    star_rho: Fan
    star_tau: Fan
    phi: IntMatrix


def _divisor_data(w: RooftopWitness, side: Side) -> Tuple[Optional[DivisorData], List[str]]:
    """Locate the exceptional ray over Z_side and the induced map of star fans."""
    wiring = _wiring_problems(w, side)
    if wiring:
        return None, wiring
    b, s = w.b(side), w.s(side)
    tau, _ = _exceptional_cone(s)
    if tau is None:
        return None, ["the small contraction has no single exceptional cone"]
    hits = [i for i in range(len(b.source.rays)) if tau <= b.image_cone(frozenset([i]))]
    if len(hits) != 1:
        return None, [f"{len(hits)} rays of W map onto the exceptional locus; a divisor needs exactly one"]
    rho = hits[0]
    for c in b.source.maximal:
        if tau <= b.image_cone(c - {rho}):
            return None, [f"cone {sorted(c - {rho})} avoids the ray but still maps onto the exceptional locus"]
    star_rho, q_rho = b.source.star({rho})
    star_tau, q_tau = s.source.star(tau)
    phi = q_tau @ b.lattice_map @ right_inverse(q_rho)
    if phi @ q_rho != q_tau @ b.lattice_map:
        return None, ["the projection does not descend to the star fans"]
    return DivisorData(rho, tau, star_rho, star_tau, phi), []


# -- the three conditions -----------------------------------------------------------------

def check_condition_small(w: RooftopWitness) -> Verdict:
    """s- and s+ are small, with exceptional loci over the apex isomorphic to the model bases."""
    evidence, certificates = {}, {}
    passed = True
    for side in SIDES:
        s = w.s(side)
        tau, info = _exceptional_cone(s)
        problems = _wiring_problems(w, side, include_b=False)
        fiber = None
        z0_is_point = False
        if info["codimension"] is None:
            problems.append("no exceptional locus")
        elif info["codimension"] < 2:
            problems.append(f"exceptional locus has codimension {info['codimension']}")
        if tau is None:
            problems.append(f"{info['exceptional_cones']} minimal exceptional cones, expected one")
        else:
            image = s.image_cone(tau)
            host = s.target.cone(image)
            z0_is_point = host.is_full_dimensional
            if not z0_is_point:
                problems.append("the exceptional locus does not map to the apex")
            star, _ = s.source.star(tau)
            iso = next(fan_isomorphisms(star, w.lambda_fan(side)), None)
            if iso is None:
                problems.append("the fiber over the apex is not the model base")
            else:
                fiber = identify_projective_space(star) or "model base"
                certificates[side.value] = {
                    "exceptional_cone": [list(r) for r in s.source.cone(tau).rays],
                    "isomorphism": iso.tolist(),
                }
        evidence[side.value] = {
            "codimension": info["codimension"],
            "exceptional_dimension": info["orbit_dimensions"][0] if tau is not None else None,
            "z0_is_point": z0_is_point,
            "fiber": fiber,
            "problems": problems,
        }
        passed = passed and not problems
    return Verdict("small", passed, evidence, certificates)


def check_condition_divisor(w: RooftopWitness) -> Verdict:
    """Z = b^-1(Z_side) is a divisor and b restricted to it is a projective bundle."""
    evidence, certificates = {}, {}
    passed = True
    for side in SIDES:
        data, problems = _divisor_data(w, side)
        fiber_name = None
        if data is not None:
            fib = check_fibration(data.star_rho, data.star_tau, data.phi)
            problems.extend(fib.problems)
            if fib.passed:
                fiber_name = identify_projective_space(fib.fiber)
                if fiber_name is None:
                    problems.append("the fiber of the bundle is not a projective space")
            certificates[side.value] = {
                "divisor_ray": list(w.b(side).source.rays[data.rho]),
                "star_map": data.phi.tolist(),
            }
        factorization = check_factorization(w.b(side), w.s(side), w.beta)
        problems.extend(factorization)
        evidence[side.value] = {
            "divisor": data is not None,
            "fiber": fiber_name,
            "factorization": not factorization,
            "problems": problems,
        }
        passed = passed and not problems
    return Verdict("divisor", passed, evidence, certificates)


def check_condition_fiber(w: RooftopWitness) -> Verdict:
    """The fiber over the apex is the model, with b-/b+ matching the model projections."""
    data = {}
    problems = []
    for side in SIDES:
        d, issues = _divisor_data(w, side)
        problems.extend(f"{side.value}: {p}" for p in issues)
        data[side] = d
    if not problems and data[Side.MINUS].rho != data[Side.PLUS].rho:
        problems.append("the two contractions have different exceptional divisors")
    searched = 0
    found = None
    if not problems:
        star_rho = data[Side.MINUS].star_rho
        sections = {side: right_inverse(data[side].phi) for side in SIDES}
        for A in fan_isomorphisms(star_rho, w.model_fan):
            searched += 1
            bases = {}
            for side in SIDES:
                p, phi = w.projection(side), data[side].phi
                if p.ncols != A.nrows:
                    break
                B = p @ A @ sections[side]
                if B @ phi != p @ A or not verify_fan_isomorphism(data[side].star_tau, w.lambda_fan(side), B):
                    break
                bases[side] = B
            if len(bases) == len(SIDES):
                found = (A, bases)
                break
        if found is None:
            problems.append(f"no isomorphism with {w.model} matches both projections ({searched} tried)")
    evidence = {
        "model": w.model,
        "matched": found is not None,
        "problems": problems,
    }
    certificates = {}
    if found is not None:
        A, bases = found
        certificates = {
            "model_isomorphism": A.tolist(),
            "minus": {"base_isomorphism": bases[Side.MINUS].tolist()},
            "plus": {"base_isomorphism": bases[Side.PLUS].tolist()},
        }
    logger.debug("fiber condition: %d isomorphisms searched", searched)
    return Verdict("fiber", not problems, evidence, certificates)


# -- reports -------------------------------------------------------------------------------

@dataclass
class FlipReport:
    m: int
    l: int
    model_factors: Tuple[int, int]
    condition_small: Verdict
    condition_divisor: Verdict
    condition_fiber: Verdict
    quotient: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.condition_small.passed and self.condition_divisor.passed and self.condition_fiber.passed

    @property
    def model(self) -> str:
        return model_name(*self.model_factors)

    def conditions(self) -> List[Verdict]:
        return [self.condition_small, self.condition_divisor, self.condition_fiber]

    def summary(self) -> dict:
        """Coordinate-free digest: verdicts and evidence without lattice certificates."""
        return {
            "model": self.model,
            "passed": self.passed,
            "conditions": {v.name: {"passed": v.passed, "evidence": v.evidence} for v in self.conditions()},
        }

    def swapped(self) -> "FlipReport":
        """The same report with the roles of the two sides exchanged."""
        fiber = self.condition_fiber.swapped()
        fiber.evidence = dict(fiber.evidence, model=model_name(self.model_factors[1], self.model_factors[0]))
        return FlipReport(
            m=self.l,
            l=self.m,
            model_factors=(self.model_factors[1], self.model_factors[0]),
            condition_small=self.condition_small.swapped(),
            condition_divisor=self.condition_divisor.swapped(),
            condition_fiber=fiber,
            quotient={
                {"fan_minus_cones": "fan_plus_cones", "fan_plus_cones": "fan_minus_cones"}.get(k, k): v
                for k, v in self.quotient.items()
            },
        )

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "l": self.l,
            "model": self.model,
            "passed": self.passed,
            "conditions": [v.to_dict() for v in self.conditions()],
            "quotient": self.quotient,
        }


def check_witness(w: RooftopWitness, m: int, l: int, quotient: Optional[dict] = None) -> FlipReport:
    return FlipReport(
        m=m,
        l=l,
        model_factors=w.model_factors,
        condition_small=check_condition_small(w),
        condition_divisor=check_condition_divisor(w),
        condition_fiber=check_condition_fiber(w),
        quotient=quotient or {},
    )


def _quotient_summary(w: RooftopWitness, m: int, l: int) -> dict:
    git = git_quotient_cone(WeightedAction.atiyah(m, l))
    return {
        "hilbert_basis_size": len(git.hilbert),
        "git_cone_rays": len(w.W0.rays),
        "fan_minus_cones": len(w.W_minus.maximal),
        "fan_plus_cones": len(w.W_plus.maximal),
        "blowup_cones": len(w.W.maximal),
        "all_smooth": w.W.is_smooth() and w.W_minus.is_smooth() and w.W_plus.is_smooth(),
    }


def verify_atiyah(m: int, l: int, max_size: Optional[int] = None) -> FlipReport:
    """Check that the ±1 weight action on C^(m+l+2) gives a rooftop flip modeled by P^m x P^l."""
    if isinstance(m, bool) or isinstance(l, bool) or not isinstance(m, int) or not isinstance(l, int):
        raise InvalidInput("m and l must be integers")
    if m < 1 or l < 1:
        raise InvalidInput(f"m={m}, l={l}: both sides need positive dimension for a flip")
    cap = get_settings().max_size if max_size is None else max_size
    if m > cap or l > cap:
        raise CapExceededError(f"m={m}, l={l} exceeds the size cap {cap}")
    w = RooftopWitness.atiyah(m, l)
    report = check_witness(w, m, l, _quotient_summary(w, m, l))
    logger.info("atiyah m=%d l=%d: %s", m, l, "pass" if report.passed else "fail")
    return report
