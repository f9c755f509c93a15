"""One-parameter diagonal torus actions on affine space and their toric quotients.

Point weights describe how t scales the affine coordinates of a point:
t.v = (t^w_0 v_0, ..., t^w_{N-1} v_{N-1}). In the cobordism case the first
block carries weight +1 and the second block weight -1.

Two cones describe the quotient. The invariant-exponent cone lives in
ker(w), written in the HNF basis K of that kernel. Its dual lives in
Z^N / Zw, and the quotient map is K itself (rows of K annihilate w), so
the image of e_i is the i-th column of K. The fans of B-/C*, B+/C* and
of the blow-up all live on that second side.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import AssignmentError, DegenerateConeError, DimensionMismatch, InvalidInput, UnsupportedActionError
from .exact import IntMatrix, LatticeVector, integer_kernel, primitive
from .polyhedral import Cone, ConeIndex, Fan, hilbert_basis, star_subdivision

logger = logging.getLogger(__name__)


class Direction(str, Enum):
    TOWARD_ZERO = "toward-zero"
    TOWARD_INFINITY = "toward-infinity"


class Side(str, Enum):
    MINUS = "minus"
    PLUS = "plus"

    @property
    def other(self) -> "Side":
        return Side.PLUS if self is Side.MINUS else Side.MINUS


@dataclass(frozen=True)
class WeightedAction:
    n_minus: int
    n_plus: int
    point_weights: Tuple[int, ...]

    def __post_init__(self):
        if self.n_minus < 0 or self.n_plus < 0:
            raise InvalidInput("block sizes must be nonnegative")
        if len(self.point_weights) != self.n_minus + self.n_plus:
            raise DimensionMismatch(
                f"{len(self.point_weights)} weights for {self.n_minus} + {self.n_plus} coordinates"
            )

    @classmethod
    def atiyah(cls, m: int, l: int) -> "WeightedAction":
        """Weight +1 on the m+1 coordinates of the first block, -1 on the l+1 of the second."""
        if m < 0 or l < 0:
            raise InvalidInput("m and l must be nonnegative")
        return cls(m + 1, l + 1, (1,) * (m + 1) + (-1,) * (l + 1))

    @property
    def N(self) -> int:
        return self.n_minus + self.n_plus

    @property
    def m(self) -> int:
        return self.n_minus - 1

    @property
    def l(self) -> int:
        return self.n_plus - 1

    @property
    def minus_block(self) -> range:
        return range(self.n_minus)

    @property
    def plus_block(self) -> range:
        return range(self.n_minus, self.N)

    def is_cobordism(self) -> bool:
        return (
            self.n_minus > 0
            and self.n_plus > 0
            and self.point_weights == (1,) * self.n_minus + (-1,) * self.n_plus
        )

    def act(self, t, v: Sequence) -> Tuple[Fraction, ...]:
        t = Fraction(t)
        if t == 0:
            raise InvalidInput("the torus parameter must be nonzero")
        self._check_point(v)
        return tuple(Fraction(x) * t ** w for x, w in zip(v, self.point_weights))

    def _check_point(self, v: Sequence) -> None:
        if len(v) != self.N:
            raise DimensionMismatch(f"point with {len(v)} coordinates for an action on {self.N}")


def limit_exists(a: WeightedAction, v: Sequence, direction: Direction) -> bool:
    """Whether lim t.v exists as t tends to 0 or to infinity.

    Toward zero, a coordinate with negative weight blows up unless it
    vanishes; toward infinity the same holds for positive weights.
    """
    a._check_point(v)
    direction = Direction(direction)
    if direction is Direction.TOWARD_ZERO:
        return all(Fraction(x) == 0 for x, w in zip(v, a.point_weights) if w < 0)
    return all(Fraction(x) == 0 for x, w in zip(v, a.point_weights) if w > 0)


@dataclass(frozen=True)
class Membership:
    in_minus: bool
    in_plus: bool

    def to_dict(self) -> dict:
        return {"in_minus": self.in_minus, "in_plus": self.in_plus}


def cobordism_membership(a: WeightedAction, v: Sequence) -> Membership:
    """B- is where the limit at infinity fails, B+ where the limit at zero fails."""
    return Membership(
        in_minus=not limit_exists(a, v, Direction.TOWARD_INFINITY),
        in_plus=not limit_exists(a, v, Direction.TOWARD_ZERO),
    )


def quotient_matrix(a: WeightedAction) -> IntMatrix:
    """HNF basis of ker(w) as rows; as a map it realises Z^N -> Z^N / Zw."""
    if not any(a.point_weights):
        raise UnsupportedActionError("the trivial action has no quotient lattice")
    return IntMatrix.from_rows(integer_kernel(IntMatrix.from_rows([a.point_weights], a.N)), a.N)


@dataclass(frozen=True)
class GitQuotient:
    cone: Cone
    hilbert: Tuple[LatticeVector, ...]
    monomials: Tuple[LatticeVector, ...]
    quotient_map: IntMatrix

    def monomial_names(self, a: WeightedAction) -> List[str]:
        names = [f"y{i}" for i in a.minus_block] + [f"x{j}" for j in range(a.n_plus)]
        out = []
        for exps in self.monomials:
            parts = []
            for name, e in zip(names, exps):
                if e == 1:
                    parts.append(name)
                elif e:
                    parts.append(f"{name}^{e}")
            out.append("*".join(parts))
        return out

    def to_dict(self) -> dict:
        return {
            "cone": self.cone.to_dict(),
            "hilbert_basis": [list(h) for h in self.hilbert],
            "monomials": [list(e) for e in self.monomials],
        }


def git_quotient_cone(a: WeightedAction) -> GitQuotient:
    """Cone of invariant exponents ker(w) ∩ orthant and the Hilbert basis of its monoid."""
    if not (any(w > 0 for w in a.point_weights) and any(w < 0 for w in a.point_weights)):
        raise UnsupportedActionError("weights of one sign only: the quotient is a point")
    K = quotient_matrix(a)
    cone = Cone.from_inequalities(K.columns(), K.nrows)
    hb = tuple(hilbert_basis(cone))
    monomials = tuple(tuple(sum(c[k] * K.rows[k][i] for k in range(K.nrows)) for i in range(a.N)) for c in hb)
    logger.info("invariant monoid of %s has %d generators", a.point_weights, len(hb))
    return GitQuotient(cone, hb, monomials, K)


def _require_cobordism(a: WeightedAction) -> None:
    if not a.is_cobordism():
        raise UnsupportedActionError(
            f"quotient fans are built for weights +1/-1 on two nonempty blocks, got {a.point_weights}"
        )


def quotient_fan(a: WeightedAction, side: Side) -> Fan:
    """Fan of B-/C* or B+/C*: images of coordinate cones missing one index of that side's block."""
    _require_cobordism(a)
    side = Side(side)
    K = quotient_matrix(a)
    images = K.columns()
    block = a.minus_block if side is Side.MINUS else a.plus_block
    cones = [[images[k] for k in range(a.N) if k != i] for i in block]
    return Fan.from_cones(K.nrows, cones)


@dataclass(frozen=True)
class QuotientData:
    action: WeightedAction
    quotient_map: IntMatrix
    git_cone: Cone
    quotient_lattice_rank: int
    fan_minus: Fan
    fan_plus: Fan

    @property
    def ray_images(self) -> Tuple[LatticeVector, ...]:
        return self.quotient_map.columns()

    @cached_property
    def blowup_fan(self) -> Fan:
        return blowup_fan(self)

    def fan(self, side: Side) -> Fan:
        return self.fan_minus if Side(side) is Side.MINUS else self.fan_plus

    @cached_property
    def git_fan(self) -> Fan:
        return Fan.single(self.git_cone)


def build_quotient(a: WeightedAction) -> QuotientData:
    _require_cobordism(a)
    K = quotient_matrix(a)
    git_cone = Cone.from_generators(K.columns(), K.nrows)
    return QuotientData(
        action=a,
        quotient_map=K,
        git_cone=git_cone,
        quotient_lattice_rank=K.nrows,
        fan_minus=quotient_fan(a, Side.MINUS),
        fan_plus=quotient_fan(a, Side.PLUS),
    )


def blowup_ray(q: QuotientData) -> LatticeVector:
    """Image of the sum of one block's basis vectors; both blocks give the same vector."""
    images = q.ray_images
    dim = q.quotient_lattice_rank
    minus = tuple(sum(images[i][k] for i in q.action.minus_block) for k in range(dim))
    plus = tuple(sum(images[i][k] for i in q.action.plus_block) for k in range(dim))
    if minus != plus:
        raise DegenerateConeError(f"block sums differ in the quotient lattice: {minus} vs {plus}")
    return primitive(minus)


def blowup_fan(q: QuotientData) -> Fan:
    if not (q.git_cone.is_pointed and q.git_cone.is_full_dimensional):
        raise DegenerateConeError("the quotient cone must be pointed and full-dimensional")
    return star_subdivision(q.git_fan, blowup_ray(q))


# -- fan morphisms -------------------------------------------------------------------------

@dataclass(frozen=True)
class FanMorphism:
    name: str
    lattice_map: IntMatrix
    source: Fan
    target: Fan
    cone_assignment: Dict[ConeIndex, ConeIndex] = field(hash=False)

    @classmethod
    def build(cls, name: str, lattice_map: IntMatrix, source: Fan, target: Fan) -> "FanMorphism":
        if lattice_map.shape != (target.lattice_rank, source.lattice_rank):
            raise DimensionMismatch(f"{name}: map of shape {lattice_map.shape} between ranks "
                                    f"{source.lattice_rank} and {target.lattice_rank}")
        morphism = cls(name, lattice_map, source, target, {})
        assignment = {c: morphism._minimal_target_cone(c) for c in source.maximal}
        morphism = cls(name, lattice_map, source, target, assignment)
        morphism.certify()
        return morphism

    def _minimal_target_cone(self, cone: ConeIndex) -> ConeIndex:
        if not cone:
            return frozenset()
        hosts = set.intersection(*(set(self._hosts[i]) for i in cone))
        if not hosts:
            raise AssignmentError(f"{self.name}: image of cone {sorted(cone)} lies in no cone of the target", cone=cone)
        t = self.target.maximal[min(hosts)]
        interior = tuple(sum(col) for col in zip(*(self._images[i] for i in cone)))
        local = sorted(t)
        return frozenset(local[i] for i in self.target.cone(t).minimal_face(interior))

    @cached_property
    def _images(self) -> Tuple[LatticeVector, ...]:
        return tuple(self.lattice_map.apply(r) for r in self.source.rays)

    @cached_property
    def _hosts(self) -> Tuple[Tuple[int, ...], ...]:
        """For each source ray, the positions of the target maximal cones containing its image."""
        cones = self.target.maximal_cones()
        return tuple(tuple(k for k, c in enumerate(cones) if c.contains(v)) for v in self._images)

    def image_cone(self, cone: ConeIndex) -> ConeIndex:
        """Smallest target cone containing the image of the cone's relative interior."""
        cone = frozenset(cone)
        if cone in self.cone_assignment:
            return self.cone_assignment[cone]
        return self._minimal_target_cone(cone)

    def certify(self) -> None:
        for c in self.source.maximal:
            t = self.cone_assignment.get(c)
            if t is None:
                raise AssignmentError(f"{self.name}: cone {sorted(c)} has no assignment", cone=c)
            if not self.target.is_cone(t):
                raise AssignmentError(f"{self.name}: {sorted(t)} is not a cone of the target", cone=c)
            host = self.target.cone(t)
            for i in c:
                if not host.contains(self.lattice_map.apply(self.source.rays[i])):
                    raise AssignmentError(f"{self.name}: cone {sorted(c)} is not mapped into {sorted(t)}", cone=c)

    def is_cone_of_target(self, cone: ConeIndex) -> bool:
        """Whether the image of the cone is itself a cone of the target fan."""
        images = []
        for i in sorted(cone):
            v = self._images[i]
            if not any(v):
                return False
            images.append(primitive(v))
        hit = self.image_cone(cone)
        return sorted(images) == sorted(self.target.rays[j] for j in hit)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lattice_map": self.lattice_map.tolist(),
            "cone_assignment": [
                {"source": sorted(c), "target": sorted(self.cone_assignment[c])} for c in self.source.maximal
            ],
        }


@dataclass(frozen=True)
class ExceptionalLocus:
    """Inclusion-minimal source cones whose orbits the morphism does not map isomorphically.

    A cone of dimension k corresponds to an orbit closure of codimension k.
    """

    cones: Tuple[ConeIndex, ...]
    lattice_rank: int
    rays: Tuple[Tuple[LatticeVector, ...], ...]

    @property
    def is_empty(self) -> bool:
        return not self.cones

    @property
    def cone_dimensions(self) -> List[int]:
        return [len(c) for c in self.cones]

    @property
    def orbit_dimensions(self) -> List[int]:
        return [self.lattice_rank - len(c) for c in self.cones]

    @property
    def codimension(self) -> Optional[int]:
        return min(self.cone_dimensions) if self.cones else None

    def to_dict(self) -> dict:
        return {
            "cones": [sorted(c) for c in self.cones],
            "rays": [[list(r) for r in rays] for rays in self.rays],
            "orbit_dimensions": self.orbit_dimensions,
            "codimension": self.codimension,
        }


def exceptional_locus(f: FanMorphism) -> ExceptionalLocus:
    """Minimal source cones that are not cones of the target.

    Cones are visited by dimension, growing only the ones that map onto
    target cones, so supersets of an exceptional cone are never visited.
    """
    minimal: List[ConeIndex] = []
    level = [frozenset()]
    seen = set(level)
    while level:
        following = []
        for c in level:
            for i in range(len(f.source.rays)):
                if i in c:
                    continue
                grown = c | {i}
                if grown in seen:
                    continue
                seen.add(grown)
                if any(e <= grown for e in minimal) or not f.source.is_cone(grown):
                    continue
                if f.is_cone_of_target(grown):
                    following.append(grown)
                else:
                    minimal.append(grown)
        level = following
    minimal.sort(key=lambda s: (len(s), sorted(s)))
    rays = tuple(tuple(f.source.rays[i] for i in sorted(c)) for c in minimal)
    return ExceptionalLocus(tuple(minimal), f.source.lattice_rank, rays)


@dataclass(frozen=True)
class Morphisms:
    b_minus: FanMorphism
    b_plus: FanMorphism
    s_minus: FanMorphism
    s_plus: FanMorphism
    beta: FanMorphism

    def b(self, side: Side) -> FanMorphism:
        return self.b_minus if Side(side) is Side.MINUS else self.b_plus

    def s(self, side: Side) -> FanMorphism:
        return self.s_minus if Side(side) is Side.MINUS else self.s_plus


def build_morphisms(q: QuotientData) -> Morphisms:
    identity = IntMatrix.identity(q.quotient_lattice_rank)
    W, git = q.blowup_fan, q.git_fan
    return Morphisms(
        b_minus=FanMorphism.build("b_minus", identity, W, q.fan_minus),
        b_plus=FanMorphism.build("b_plus", identity, W, q.fan_plus),
        s_minus=FanMorphism.build("s_minus", identity, q.fan_minus, git),
        s_plus=FanMorphism.build("s_plus", identity, q.fan_plus, git),
        beta=FanMorphism.build("beta", identity, W, git),
    )


def check_factorization(b: FanMorphism, s: FanMorphism, beta: FanMorphism) -> List[str]:
    """Problems with s o b = beta; checked on lattice maps, maximal cones and rays."""
    problems = []
    if b.target != s.source:
        problems.append(f"{b.name} does not land in the source of {s.name}")
    if b.source != beta.source or s.target != beta.target:
        problems.append(f"{beta.name} does not share endpoints with {s.name} o {b.name}")
    if problems:
        return problems
    if s.lattice_map @ b.lattice_map != beta.lattice_map:
        problems.append(f"lattice maps of {s.name} o {b.name} and {beta.name} differ")
    checked = list(b.source.maximal) + [frozenset([i]) for i in range(len(b.source.rays))]
    for c in checked:
        try:
            composed = s.image_cone(b.image_cone(c))
            direct = beta.image_cone(c)
        except AssignmentError as exc:
            problems.append(str(exc))
            continue
        if composed != direct:
            problems.append(
                f"cone {sorted(c)}: {s.name} o {b.name} gives {sorted(composed)}, {beta.name} gives {sorted(direct)}"
            )
    return problems
