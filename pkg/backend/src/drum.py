"""Drum bookkeeping: sections, dimensions, smoothness criteria and bandwidth.

A drum is built from a variety Y with two projective-bundle contractions
Y -> Y- and Y -> Y+ and line bundles L-, L+ pulled back from the two
bases. Two kinds of Y are modeled: products of projective spaces and the
flag variety P(T_{P^n}) of point-hyperplane pairs.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from math import comb, gcd
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import InvalidInput, UnsupportedDrumError
from .exact import IntMatrix, integer_kernel
from .polyhedral import (
    Cone,
    check_fibration,
    divisor_classes,
    dual_cone,
    fan_isomorphisms,
    intersection_number,
    nef_cone,
    product_fan,
    projective_space_fan,
    walls,
)

logger = logging.getLogger(__name__)


class DrumKind(str, Enum):
    PRODUCT = "product"
    FLAG = "flag"

    @classmethod
    def parse(cls, name: str) -> "DrumKind":
        try:
            return cls(name)
        except ValueError:
            raise UnsupportedDrumError(f"unknown drum kind {name!r}; expected one of "
                                       f"{', '.join(k.value for k in cls)}") from None


def _count(value, what: str, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise InvalidInput(f"{what} must be an integer >= {minimum}, got {value!r}")
    return value


@dataclass(frozen=True)
class DrumTriple:
    kind: DrumKind
    params: Tuple[int, ...]
    dim_y: int
    h0_minus: int
    h0_plus: int
    fiber_degrees: Tuple[int, int]

    @classmethod
    def product(cls, m: int, l: int, a: int = 1, b: int = 1) -> "DrumTriple":
        """Y = P^m x P^l with L- = O(a, 0) and L+ = O(0, b)."""
        m, l = _count(m, "m"), _count(l, "l")
        a, b = _count(a, "a", 1), _count(b, "b", 1)
        return cls(DrumKind.PRODUCT, (m, l), m + l, comb(m + a, a), comb(l + b, b), (a, b))

    @classmethod
    def flag(cls, n: int, a: int = 1, b: int = 1) -> "DrumTriple":
        """Y = P(T_{P^n}) inside P^n x P^n, with L± the pullbacks of O(a), O(b)."""
        n = _count(n, "n", 1)
        a, b = _count(a, "a", 1), _count(b, "b", 1)
        return cls(DrumKind.FLAG, (n,), 2 * n - 1, comb(n + a, a), comb(n + b, b), (a, b))

    def swapped(self) -> "DrumTriple":
        return DrumTriple(
            self.kind,
            tuple(reversed(self.params)),
            self.dim_y,
            self.h0_plus,
            self.h0_minus,
            (self.fiber_degrees[1], self.fiber_degrees[0]),
        )

    @property
    def name(self) -> str:
        if self.kind is DrumKind.PRODUCT:
            return f"P^{self.params[0]} x P^{self.params[1]}"
        return f"P(T_P^{self.params[0]})"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "y": self.name,
            "dim_y": self.dim_y,
            "h0_minus": self.h0_minus,
            "h0_plus": self.h0_plus,
            "fiber_degrees": list(self.fiber_degrees),
        }


def ambient_dimension(t: DrumTriple) -> int:
    """Number of homogeneous coordinates of the drum's ambient projective space."""
    return t.h0_minus + t.h0_plus


def drum_dimension(t: DrumTriple) -> int:
    return t.dim_y + 1


# -- smoothness ----------------------------------------------------------------------------

@dataclass
class SmoothnessCheck:
    nef_cone: bool
    projective_bundles: bool
    fiber_degree: bool
    degrees: Tuple[int, int]
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.nef_cone and self.projective_bundles and self.fiber_degree

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "nef_cone": self.nef_cone,
            "projective_bundles": self.projective_bundles,
            "fiber_degree": self.fiber_degree,
            "degrees": list(self.degrees),
            "notes": list(self.notes),
        }


def _same_cone(a: Cone, b: Cone) -> bool:
    return a.contains_cone(b) and b.contains_cone(a)


def _block_projection(rows: range, total: int) -> IntMatrix:
    return IntMatrix.from_rows([[int(i == j) for j in range(total)] for i in rows], total)


def _product_smoothness(t: DrumTriple) -> SmoothnessCheck:
    m, l = t.params
    a, b = t.fiber_degrees
    if min(m, l) == 0:
        return SmoothnessCheck(True, True, True, (a, b), ["one factor is a point: Y is its own base and the fibers are points"])
    Y = product_fan(projective_space_fan(m), projective_space_fan(l))
    notes = []
    first = [i for i, r in enumerate(Y.rays) if not any(r[m:])]
    second = [i for i in range(len(Y.rays)) if i not in first]

    classes, pic_rank = divisor_classes(Y)
    L_minus = tuple(a * x for x in classes[first[0]])
    L_plus = tuple(b * x for x in classes[second[0]])
    nef_ok = _same_cone(nef_cone(Y), Cone.from_generators([L_minus, L_plus], pic_rank))
    if not nef_ok:
        notes.append("the nef cone is not spanned by L- and L+")

    bundles_ok = True
    for base_dim, fiber_dim, rows in ((m, l, range(m)), (l, m, range(m, m + l))):
        fib = check_fibration(Y, projective_space_fan(base_dim), _block_projection(rows, m + l))
        if not fib.passed:
            notes.extend(fib.problems)
            bundles_ok = False
        elif next(fan_isomorphisms(fib.fiber, projective_space_fan(fiber_dim)), None) is None:
            notes.append(f"fiber over P^{base_dim} is not P^{fiber_dim}")
            bundles_ok = False

    degrees: Dict[str, Optional[int]] = {"minus": None, "plus": None}
    for wall, c1, c2 in walls(Y):
        (i,) = c1 - wall
        (j,) = c2 - wall
        if i in first and j in first and degrees["minus"] is None:
            coeffs = [a if k == first[0] else 0 for k in range(len(Y.rays))]
            degrees["minus"] = intersection_number(Y, coeffs, wall)
        elif i in second and j in second and degrees["plus"] is None:
            coeffs = [b if k == second[0] else 0 for k in range(len(Y.rays))]
            degrees["plus"] = intersection_number(Y, coeffs, wall)
    found = (degrees["minus"], degrees["plus"])
    degree_ok = found == (1, 1)
    if not degree_ok:
        notes.append(f"L- and L+ have degrees {found[0]} and {found[1]} on lines of the fibers")
    return SmoothnessCheck(nef_ok, bundles_ok, degree_ok, found, notes)


def _flag_smoothness(t: DrumTriple) -> SmoothnessCheck:
    """Criteria for P(T_P^n) read off the incidence model.

    The curve classes and the linear fibers are fixed by the incidence
    variety, so the nef-cone and bundle verdicts are asserted from that
    model for every (a, b); only the fiber degrees depend on the triple.
    """
    (n,) = t.params
    a, b = t.fiber_degrees
    if n == 1:
        return SmoothnessCheck(True, True, True, (a, b), ["P(T_P^1) is P^1 with point fibers; the criteria hold vacuously"])
    notes = []
    # Pic is spanned by the two hyperplane pullbacks; a line in a fiber of p+
    # has class (1, 0), a line in a fiber of p- has class (0, 1).
    curves = [(1, 0), (0, 1)]
    L_minus, L_plus = (a, 0), (0, b)
    nef_ok = _same_cone(dual_cone(Cone.from_generators(curves, 2)), Cone.from_generators([L_minus, L_plus], 2))

    samples = [tuple(int(i == j) for j in range(n + 1)) for i in range(n + 1)] + [(1,) * (n + 1)]
    bundles_ok = True
    for p in samples:
        fiber = integer_kernel(IntMatrix.from_rows([p], n + 1))
        if len(fiber) != n or any(sum(x * y for x, y in zip(h, p)) for h in fiber):
            notes.append(f"incidence fiber over {list(p)} is not a P^{n - 1}")
            bundles_ok = False

    found = (
        sum(x * y for x, y in zip(L_minus, curves[0])),
        sum(x * y for x, y in zip(L_plus, curves[1])),
    )
    degree_ok = found == (1, 1)
    if not degree_ok:
        notes.append(f"L- and L+ have degrees {found[0]} and {found[1]} on lines of the fibers")
    return SmoothnessCheck(nef_ok, bundles_ok, degree_ok, found, notes)


def smoothness_check(t: DrumTriple) -> SmoothnessCheck:
    """Nef cone spanned by L±, both contractions projective bundles, degree one on fiber lines.

    Product triples are checked on their fans. Flag triples assert the first
    two criteria from the incidence model and check the degrees.
    """
    if t.kind is DrumKind.PRODUCT:
        return _product_smoothness(t)
    if t.kind is DrumKind.FLAG:
        return _flag_smoothness(t)
    raise UnsupportedDrumError(f"no smoothness criteria for {t.kind!r}")


# -- C*-actions and bandwidth --------------------------------------------------------------

@dataclass(frozen=True)
class MuData:
    mu_sink: int
    mu_source: int
    bandwidth: int

    def to_dict(self) -> dict:
        return {"mu_sink": self.mu_sink, "mu_source": self.mu_source, "bandwidth": self.bandwidth}


@dataclass(frozen=True)
class DiagonalAction:
    """t.[x_0 : ... : x_k] = [t^w_0 x_0 : ... : t^w_k x_k] on projective space."""

    weights: Tuple[int, ...]

    def __post_init__(self):
        if not self.weights:
            raise InvalidInput("an action on projective space needs at least one coordinate")

    @property
    def distinct_weights(self) -> List[int]:
        return sorted(set(self.weights), reverse=True)

    def fixed_components(self) -> List[Tuple[int, ...]]:
        """Coordinate blocks of equal weight, from the sink to the source."""
        return [tuple(i for i, w in enumerate(self.weights) if w == v) for v in self.distinct_weights]

    @property
    def sink(self) -> Tuple[int, ...]:
        return self.fixed_components()[0]

    @property
    def source(self) -> Tuple[int, ...]:
        return self.fixed_components()[-1]

    def component_dimensions(self) -> List[int]:
        return [len(c) - 1 for c in self.fixed_components()]

    def mu(self, component: int) -> int:
        return self.distinct_weights[0] - self.distinct_weights[component]

    def mu_data(self) -> MuData:
        span = self.distinct_weights[0] - self.distinct_weights[-1]
        return MuData(0, span, span)

    def _support(self, point: Sequence) -> List[int]:
        if len(point) != len(self.weights):
            raise InvalidInput(f"point with {len(point)} coordinates for an action on {len(self.weights)}")
        support = [i for i, x in enumerate(point) if x != 0]
        if not support:
            raise InvalidInput("the zero vector is not a projective point")
        return support

    def is_fixed(self, point: Sequence) -> bool:
        return len({self.weights[i] for i in self._support(point)}) == 1

    def limit(self, point: Sequence, toward_infinity: bool = True) -> Tuple:
        """Limit of t.point: keep the coordinates of extreme weight on the support."""
        support = self._support(point)
        pick = max if toward_infinity else min
        w = pick(self.weights[i] for i in support)
        return tuple(x if self.weights[i] == w else 0 for i, x in enumerate(point))

    def isotropy_order(self, point: Sequence) -> int:
        """Order of the stabilizer of a point; 0 when the point is fixed."""
        support = self._support(point)
        w0 = self.weights[support[0]]
        g = 0
        for i in support[1:]:
            g = gcd(g, self.weights[i] - w0)
        return g

    def is_equalized(self) -> bool:
        """Every non-fixed point has trivial stabilizer."""
        return self.distinct_weights[0] - self.distinct_weights[-1] <= 1


def drum_action(t: DrumTriple) -> DiagonalAction:
    """Weight 1 on the sections of L-, weight 0 on those of L+."""
    return DiagonalAction((1,) * t.h0_minus + (0,) * t.h0_plus)


def bandwidth_of_drum(t: DrumTriple) -> MuData:
    data = drum_action(t).mu_data()
    logger.debug("%s drum: bandwidth %d", t.name, data.bandwidth)
    return data


# -- Segre drums ---------------------------------------------------------------------------

@dataclass
class SegreCertificate:
    m: int
    l: int
    ambient_dimension: int
    drum_dimension: int
    sink_dimension: int
    source_dimension: int
    mu: MuData
    smoothness: SmoothnessCheck

    @property
    def fills_ambient(self) -> bool:
        return self.ambient_dimension == self.drum_dimension + 1

    @property
    def passed(self) -> bool:
        return (
            self.fills_ambient
            and self.sink_dimension == self.m
            and self.source_dimension == self.l
            and self.mu.bandwidth == 1
            and self.smoothness.passed
        )

    @property
    def x(self) -> str:
        return f"P^{self.ambient_dimension - 1}"

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "l": self.l,
            "x": self.x,
            "ambient_dimension": self.ambient_dimension,
            "drum_dimension": self.drum_dimension,
            "sink": f"P^{self.sink_dimension}",
            "source": f"P^{self.source_dimension}",
            "mu": self.mu.to_dict(),
            "smoothness": self.smoothness.to_dict(),
            "passed": self.passed,
        }


def segre_drum(m: int, l: int) -> SegreCertificate:
    """The drum over P^m x P^l with O(1,0), O(0,1) is all of P^(m+l+1)."""
    t = DrumTriple.product(m, l)
    action = drum_action(t)
    dims = action.component_dimensions()
    return SegreCertificate(
        m=m,
        l=l,
        ambient_dimension=ambient_dimension(t),
        drum_dimension=drum_dimension(t),
        sink_dimension=dims[0],
        source_dimension=dims[-1],
        mu=bandwidth_of_drum(t),
        smoothness=smoothness_check(t),
    )
