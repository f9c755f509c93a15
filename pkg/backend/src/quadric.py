"""The quadric Q^2n in P^(2n+1) with its bandwidth-one C*-action, in exact arithmetic.

Coordinates are (x_0..x_n, y_0..y_n) with q = sum x_i y_i. The action
scales the x-block by t and fixes the y-block, so the fixed locus is
Y- = {y = 0} and Y+ = {x = 0}, each a P^n. Limits of general points pair
a point of P^n with a hyperplane through it, which is how the fiber
P(T_{P^n}) over the vertex shows up.
"""
import itertools
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .config import get_settings
from .drum import DiagonalAction, DrumTriple, ambient_dimension, bandwidth_of_drum, smoothness_check
from .errors import CapExceededError, DimensionMismatch, InvalidInput
from .toric_git import Membership, WeightedAction, cobordism_membership

logger = logging.getLogger(__name__)

MAX_SEED = 2 ** 64 - 1


@dataclass(frozen=True)
class QuadricModel:
    n: int

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise InvalidInput(f"n must be a positive integer, got {self.n!r}")

    @property
    def size(self) -> int:
        return 2 * self.n + 2

    @property
    def weights(self) -> Tuple[int, ...]:
        return (1,) * (self.n + 1) + (0,) * (self.n + 1)

    @property
    def x_block(self) -> range:
        return range(self.n + 1)

    @property
    def y_block(self) -> range:
        return range(self.n + 1, self.size)

    def _check(self, v: Sequence) -> None:
        if len(v) != self.size:
            raise DimensionMismatch(f"{len(v)} coordinates for a quadric in P^{self.size - 1}")

    def form(self, v: Sequence) -> Fraction:
        self._check(v)
        return sum((Fraction(v[i]) * Fraction(v[self.n + 1 + i]) for i in self.x_block), Fraction(0))

    def act(self, t, v: Sequence) -> Tuple[Fraction, ...]:
        self._check(v)
        t = Fraction(t)
        if t == 0:
            raise InvalidInput("the torus parameter must be nonzero")
        return tuple(Fraction(x) * t ** w for x, w in zip(v, self.weights))

    def cone_action(self) -> WeightedAction:
        """The lift to the affine cone: weight +1 on the x-block and -1 on the y-block."""
        return WeightedAction.atiyah(self.n, self.n)


@dataclass(frozen=True)
class ProjPoint:
    coords: Tuple[Fraction, ...]

    @classmethod
    def of(cls, coords: Sequence) -> "ProjPoint":
        values = [Fraction(c) for c in coords]
        lead = next((c for c in values if c != 0), None)
        if lead is None:
            raise InvalidInput("the zero vector is not a projective point")
        return cls(tuple(c / lead for c in values))

    def __len__(self) -> int:
        return len(self.coords)

    def __str__(self) -> str:
        return "[" + ":".join(str(c) for c in self.coords) + "]"


def _coords(p) -> Tuple[Fraction, ...]:
    return p.coords if isinstance(p, ProjPoint) else tuple(Fraction(c) for c in p)


def on_quadric(M: QuadricModel, p) -> bool:
    return M.form(_coords(p)) == 0


def _block_vanishes(M: QuadricModel, coords: Sequence, block: range) -> bool:
    return all(coords[i] == 0 for i in block)


def _keep(M: QuadricModel, coords: Sequence, block: range) -> ProjPoint:
    return ProjPoint.of([c if i in block else 0 for i, c in enumerate(coords)])


@dataclass(frozen=True)
class BBLimits:
    sink: ProjPoint
    source: ProjPoint
    fixed: bool


def bb_limits(M: QuadricModel, p) -> BBLimits:
    """Limits of t.p for t -> infinity (sink) and t -> 0 (source)."""
    point = p if isinstance(p, ProjPoint) else ProjPoint.of(p)
    M._check(point.coords)
    if not on_quadric(M, point):
        raise InvalidInput(f"{point} is not on the quadric")
    if _block_vanishes(M, point.coords, M.x_block) or _block_vanishes(M, point.coords, M.y_block):
        return BBLimits(point, point, True)
    return BBLimits(_keep(M, point.coords, M.x_block), _keep(M, point.coords, M.y_block), False)


def incidence_pairing(M: QuadricModel, p) -> Fraction:
    """Pairing of the x-block with the y-block read as a functional; equals q(p)."""
    c = _coords(p)
    M._check(c)
    return sum((c[i] * c[M.n + 1 + i] for i in M.x_block), Fraction(0))


def incidence_check(M: QuadricModel, p) -> bool:
    """Whether the sink limit lies on the hyperplane given by the source limit."""
    c = _coords(p)
    M._check(c)
    if _block_vanishes(M, c, M.x_block) or _block_vanishes(M, c, M.y_block):
        raise InvalidInput("incidence needs both coordinate blocks to be nonzero")
    sink = _keep(M, c, M.x_block).coords
    source = _keep(M, c, M.y_block).coords
    return sum((sink[i] * source[M.n + 1 + i] for i in M.x_block), Fraction(0)) == 0


def cone_membership(M: QuadricModel, v: Sequence) -> Membership:
    """Membership of an affine point of the cone over Q in the two semistable loci."""
    M._check(v)
    if M.form(v) != 0:
        raise InvalidInput(f"{list(v)} is not on the affine cone over the quadric")
    return cobordism_membership(M.cone_action(), v)


def random_point_on_quadric(M: QuadricModel, rng: random.Random, bound: int = 5) -> ProjPoint:
    """Random rational point with both blocks nonzero; the last y-coordinate solves q = 0."""
    while True:
        x = [Fraction(rng.randint(-bound, bound), rng.randint(1, bound)) for _ in M.x_block]
        if x[-1] == 0:
            x[-1] = Fraction(rng.randint(1, bound))
        y = [Fraction(rng.randint(-bound, bound), rng.randint(1, bound)) for _ in range(M.n)]
        last = -sum((a * b for a, b in zip(x, y)), Fraction(0)) / x[-1]
        y.append(last)
        if any(y):
            return ProjPoint.of(x + y)


@dataclass
class FixedLocusSummary:
    patterns: int
    fixed_patterns: int
    consistent: bool

    def to_dict(self) -> dict:
        return {"patterns": self.patterns, "fixed_patterns": self.fixed_patterns, "consistent": self.consistent}


def fixed_locus_patterns(M: QuadricModel) -> FixedLocusSummary:
    """Check over every support pattern that fixed points are exactly those supported in one block.

    A point with support S is fixed iff t^w_i is the same character for all
    i in S, that is iff the weights are constant on S.
    """
    x, y = set(M.x_block), set(M.y_block)
    total = fixed = 0
    consistent = True
    for k in range(1, M.size + 1):
        for support in itertools.combinations(range(M.size), k):
            total += 1
            is_fixed = len({M.weights[i] for i in support}) == 1
            in_block = set(support) <= x or set(support) <= y
            fixed += is_fixed
            consistent = consistent and is_fixed == in_block
    return FixedLocusSummary(total, fixed, consistent)


def homothety_commutes(M: QuadricModel, v: Sequence, t, s) -> bool:
    """The C*-action commutes with scaling every coordinate by s."""
    s = Fraction(s)
    scaled = tuple(Fraction(c) * s for c in v)
    return M.act(t, scaled) == tuple(c * s for c in M.act(t, v))


def _random_scalar(rng: random.Random) -> Fraction:
    num = 0
    while num == 0:
        num = rng.randint(-7, 7)
    return Fraction(num, rng.randint(1, 7))


def _sample_problems(M: QuadricModel, p: ProjPoint, rng: random.Random) -> List[str]:
    problems = []
    limits = bb_limits(M, p)
    if limits.fixed:
        return [f"{p}: general sample is fixed"]
    if not _block_vanishes(M, limits.sink.coords, M.y_block):
        problems.append(f"{p}: sink limit {limits.sink} is not in Y-")
    if not _block_vanishes(M, limits.source.coords, M.x_block):
        problems.append(f"{p}: source limit {limits.source} is not in Y+")
    for q in (limits.sink, limits.source):
        if not bb_limits(M, q).fixed:
            problems.append(f"{p}: limit {q} is not fixed")
    if not incidence_check(M, p):
        problems.append(f"{p}: limit pair is not incident")
    if incidence_pairing(M, p) != M.form(p.coords):
        problems.append(f"{p}: pairing differs from the quadratic form")
    membership = cone_membership(M, p.coords)
    if not (membership.in_minus and membership.in_plus):
        problems.append(f"{p}: general point outside one of the semistable loci")
    sink_membership = cone_membership(M, limits.sink.coords)
    if not sink_membership.in_minus or sink_membership.in_plus:
        problems.append(f"{limits.sink}: point of Y- not classified as unstable for the plus side only")
    t, s = _random_scalar(rng), _random_scalar(rng)
    if M.form(M.act(t, p.coords)) != t * M.form(p.coords):
        problems.append(f"{p}: the form is not scaled by the action")
    if not homothety_commutes(M, p.coords, t, s):
        problems.append(f"{p}: the action does not commute with homotheties")
    return problems


@dataclass
class MukaiCertificate:
    n: int
    samples: int
    seed: int
    fixed_locus: FixedLocusSummary
    bandwidth: int
    drum: dict
    samples_passed: int
    failures: List[str]
    dimensions: dict
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (
            self.fixed_locus.consistent
            and self.bandwidth == 1
            and self.drum["passed"]
            and self.samples_passed == self.samples
        )

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "model": f"P(T_P^{self.n})",
            "samples": self.samples,
            "seed": self.seed,
            "fixed_locus": self.fixed_locus.to_dict(),
            "bandwidth": self.bandwidth,
            "drum": self.drum,
            "samples_passed": self.samples_passed,
            "failures": self.failures,
            "dimensions": self.dimensions,
            "notes": self.notes,
            "passed": self.passed,
        }


def mukai_witness(n: int, samples: Optional[int] = None, seed: Optional[int] = None,
                  max_n: Optional[int] = None) -> MukaiCertificate:
    """Orbit-level evidence that the quadric drum over P(T_{P^n}) gives a rooftop flip."""
    settings = get_settings()
    M = QuadricModel(n)
    cap = settings.quadric_max_n if max_n is None else max_n
    if n > cap:
        raise CapExceededError(f"n={n} exceeds the size cap {cap}")
    samples = settings.default_samples if samples is None else samples
    seed = settings.default_seed if seed is None else seed
    if isinstance(samples, bool) or not isinstance(samples, int) or samples < 1:
        raise InvalidInput(f"samples must be a positive integer, got {samples!r}")
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed <= MAX_SEED:
        raise InvalidInput(f"seed must be an unsigned 64-bit integer, got {seed!r}")

    fixed = fixed_locus_patterns(M)
    bandwidth = DiagonalAction(M.weights).mu_data().bandwidth
    triple = DrumTriple.flag(n)
    smooth = smoothness_check(triple)
    drum = {
        "y": triple.name,
        "ambient_dimension": ambient_dimension(triple),
        "bandwidth": bandwidth_of_drum(triple).bandwidth,
        "smoothness": smooth.to_dict(),
        "passed": smooth.passed and ambient_dimension(triple) == M.size,
    }

    rng = random.Random(seed)
    failures: List[str] = []
    passed = 0
    for _ in range(samples):
        problems = _sample_problems(M, random_point_on_quadric(M, rng), rng)
        if problems:
            failures.extend(problems)
        else:
            passed += 1
    logger.info("quadric n=%d: %d/%d samples passed", n, passed, samples)

    notes = []
    if n < 2:
        notes.append("Y- and Y+ have codimension 1 in the quotients, so the map is not small for n = 1")
    dimensions = {
        "y_minus": n,
        "y_plus": n,
        "quotient": 2 * n,
        "codimension": n,
        "small": n >= 2,
        "exceptional_divisor": 2 * n - 1,
    }
    return MukaiCertificate(n, samples, seed, fixed, bandwidth, drum, passed, failures[:20], dimensions, notes)
