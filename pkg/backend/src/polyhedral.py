"""Rational polyhedral cones and fans over an integer lattice.

Cones keep their extremal rays in canonical (lexicographic) order and
compute the dual description lazily with the double description method.
Fans index their rays once and store maximal cones as frozensets of ray
indices, which is what every downstream comparison works with.
"""
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from .errors import DimensionMismatch, InvalidInput, NotPointedError, OutsideSupportError
from .exact import (
    IntMatrix,
    LatticeVector,
    dot,
    integer_kernel,
    integral,
    inverse_rational,
    is_primitive,
    is_unimodular,
    primitive,
    quotient_map,
    rank,
    right_inverse,
    smith_normal_form,
    solve_rational,
)

logger = logging.getLogger(__name__)

ConeIndex = FrozenSet[int]


def _neg(v: Sequence[int]) -> LatticeVector:
    return tuple(-x for x in v)


def _add(u: Sequence[int], v: Sequence[int]) -> LatticeVector:
    return tuple(a + b for a, b in zip(u, v))


def _sub(u: Sequence[int], v: Sequence[int]) -> LatticeVector:
    return tuple(a - b for a, b in zip(u, v))


def double_description(inequalities: Iterable[Sequence[int]], dim: int) -> Tuple[List[LatticeVector], List[LatticeVector]]:
    """Generators (rays, lines) of {x in Q^dim : <a, x> >= 0 for every a}.

    Starts from the whole space spanned by lines and adds one constraint at a
    time. A line not orthogonal to the constraint becomes the pivot; otherwise
    pairs of rays on opposite sides are combined when they are adjacent, i.e.
    the processed constraints active on both have rank dim - #lines - 2.
    """
    lines = [tuple(int(i == j) for j in range(dim)) for i in range(dim)]
    rays: List[LatticeVector] = []
    processed: List[LatticeVector] = []
    for a in inequalities:
        a = tuple(int(x) for x in a)
        if len(a) != dim:
            raise DimensionMismatch(f"constraint of length {len(a)} in dimension {dim}")
        if not any(a):
            continue
        pivot = next((k for k, L in enumerate(lines) if dot(a, L) != 0), None)
        if pivot is not None:
            L = lines.pop(pivot)
            aL = dot(a, L)
            if aL < 0:
                L, aL = _neg(L), -aL
            lines = [primitive(tuple(aL * x - dot(a, M) * y for x, y in zip(M, L))) if dot(a, M) else M for M in lines]
            rays = [primitive(tuple(aL * x - dot(a, R) * y for x, y in zip(R, L))) if dot(a, R) else R for R in rays]
            rays.append(L)
        else:
            values = [dot(a, R) for R in rays]
            pos = [R for R, v in zip(rays, values) if v > 0]
            neg = [R for R, v in zip(rays, values) if v < 0]
            keep = [R for R, v in zip(rays, values) if v >= 0]
            needed = dim - len(lines) - 2
            zero_sets = {R: frozenset(i for i, c in enumerate(processed) if dot(c, R) == 0) for R in pos + neg}
            fresh = set()
            for p in pos:
                for q in neg:
                    common = zero_sets[p] & zero_sets[q]
                    if len(common) < needed:
                        continue
                    if rank([processed[i] for i in common]) != needed:
                        continue
                    ap, aq = dot(a, p), dot(a, q)
                    fresh.add(primitive(tuple(ap * y - aq * x for x, y in zip(p, q))))
            rays = keep + sorted(fresh - set(keep))
        processed.append(a)
    return sorted(set(rays)), lines


def _saturated_span_basis(vectors: Sequence[Sequence[int]], dim: int) -> Tuple[LatticeVector, ...]:
    """HNF basis of span(vectors) ∩ Z^dim."""
    vectors = [v for v in vectors if any(v)]
    if not vectors:
        return ()
    annihilator = integer_kernel(IntMatrix.from_rows(vectors, dim))
    if not annihilator:
        return tuple(tuple(int(i == j) for j in range(dim)) for i in range(dim))
    return integer_kernel(IntMatrix.from_rows(annihilator, dim))


@dataclass(frozen=True)
class Cone:
    """Rational polyhedral cone cone(rays) + span(lines).

    Pointed cones (no lines) are the ones the monoid operations accept; for
    those `rays` is the canonical sorted list of primitive extremal rays.
    Non-pointed cones appear as duals of lower-dimensional cones.
    """

    lattice_rank: int
    rays: Tuple[LatticeVector, ...]
    lines: Tuple[LatticeVector, ...] = ()

    def __post_init__(self):
        for v in self.rays + self.lines:
            if len(v) != self.lattice_rank:
                raise DimensionMismatch(f"vector {v} does not live in rank {self.lattice_rank}")

    @classmethod
    def from_generators(cls, generators: Iterable[Sequence[int]], lattice_rank: Optional[int] = None) -> "Cone":
        gens = [tuple(int(x) for x in g) for g in generators]
        if lattice_rank is None:
            if not gens:
                raise InvalidInput("lattice rank is required for a cone without generators")
            lattice_rank = len(gens[0])
        if any(len(g) != lattice_rank for g in gens):
            raise DimensionMismatch(f"generators must have length {lattice_rank}")
        gens = [primitive(g) for g in gens if any(g)]
        if not gens:
            return cls(lattice_rank, ())
        facets, equations = double_description(gens, lattice_rank)
        rays, lines = double_description(facets + equations + [_neg(e) for e in equations], lattice_rank)
        if lines:
            lines = list(_saturated_span_basis(lines, lattice_rank))
        cone = cls(lattice_rank, tuple(sorted(rays)), tuple(lines))
        cone.__dict__["_hrep"] = (tuple(sorted(facets)), tuple(equations))
        return cone

    @classmethod
    def from_inequalities(
        cls,
        inequalities: Iterable[Sequence[int]],
        lattice_rank: int,
        equations: Iterable[Sequence[int]] = (),
    ) -> "Cone":
        equations = [tuple(e) for e in equations]
        rays, lines = double_description(list(inequalities) + equations + [_neg(e) for e in equations], lattice_rank)
        return cls.from_generators(rays + lines + [_neg(L) for L in lines], lattice_rank)

    @cached_property
    def _hrep(self) -> Tuple[Tuple[LatticeVector, ...], Tuple[LatticeVector, ...]]:
        facets, equations = double_description(
            list(self.rays) + list(self.lines) + [_neg(L) for L in self.lines], self.lattice_rank
        )
        return tuple(sorted(facets)), tuple(equations)

    @property
    def facet_normals(self) -> Tuple[LatticeVector, ...]:
        return self._hrep[0]

    @property
    def equations(self) -> Tuple[LatticeVector, ...]:
        return self._hrep[1]

    @property
    def generators(self) -> Tuple[LatticeVector, ...]:
        return tuple(sorted(self.rays + self.lines + tuple(_neg(L) for L in self.lines)))

    @cached_property
    def dim(self) -> int:
        return rank(list(self.rays) + list(self.lines))

    @property
    def is_pointed(self) -> bool:
        return not self.lines

    @property
    def is_full_dimensional(self) -> bool:
        return self.dim == self.lattice_rank

    def contains(self, v: Sequence) -> bool:
        if len(v) != self.lattice_rank:
            raise DimensionMismatch(f"point of length {len(v)} against a cone of rank {self.lattice_rank}")
        return all(dot(n, v) >= 0 for n in self.facet_normals) and all(dot(e, v) == 0 for e in self.equations)

    def contains_cone(self, other: "Cone") -> bool:
        return all(self.contains(g) for g in other.generators)

    def intersection(self, other: "Cone") -> "Cone":
        if other.lattice_rank != self.lattice_rank:
            raise DimensionMismatch("cones live in lattices of different rank")
        return Cone.from_inequalities(
            self.facet_normals + other.facet_normals,
            self.lattice_rank,
            equations=self.equations + other.equations,
        )

    def _require_pointed(self, what: str) -> None:
        if not self.is_pointed:
            raise NotPointedError(f"{what} needs a pointed cone")

    def is_simplicial(self) -> bool:
        self._require_pointed("is_simplicial")
        return len(self.rays) == self.dim

    def is_smooth(self) -> bool:
        if not self.is_simplicial():
            return False
        if not self.rays:
            return True
        D, _, _ = smith_normal_form(IntMatrix.from_rows(self.rays, self.lattice_rank))
        return all(D.rows[i][i] == 1 for i in range(len(self.rays)))

    def facet_indices(self) -> List[ConeIndex]:
        """Each facet as the set of indices of the rays it contains."""
        self._require_pointed("facet_indices")
        seen = []
        for n in self.facet_normals:
            f = frozenset(i for i, r in enumerate(self.rays) if dot(n, r) == 0)
            if f not in seen:
                seen.append(f)
        return seen

    def face_indices(self) -> FrozenSet[ConeIndex]:
        """All faces, as ray-index sets; the empty set is the apex."""
        self._require_pointed("face_indices")
        everything = frozenset(range(len(self.rays)))
        if len(self.rays) == self.dim:
            return frozenset(
                frozenset(c) for k in range(len(self.rays) + 1) for c in itertools.combinations(range(len(self.rays)), k)
            )
        facets = self.facet_indices()
        faces = {everything}
        frontier = [everything]
        while frontier:
            f = frontier.pop()
            for F in facets:
                g = f & F
                if g not in faces:
                    faces.add(g)
                    frontier.append(g)
        return frozenset(faces)

    def faces(self) -> List["Cone"]:
        return [self.face(idx) for idx in sorted(self.face_indices(), key=lambda s: (len(s), sorted(s)))]

    def face(self, idx: Iterable[int]) -> "Cone":
        return Cone(self.lattice_rank, tuple(self.rays[i] for i in sorted(idx)))

    def minimal_face(self, point: Sequence) -> ConeIndex:
        """Ray indices of the face containing `point` in its relative interior."""
        if not self.contains(point):
            raise OutsideSupportError(f"{tuple(point)} is not in the cone")
        tight = [n for n in self.facet_normals if dot(n, point) == 0]
        return frozenset(i for i, r in enumerate(self.rays) if all(dot(n, r) == 0 for n in tight))

    def to_dict(self) -> dict:
        return {
            "lattice_rank": self.lattice_rank,
            "rays": [list(r) for r in self.rays],
            "lines": [list(L) for L in self.lines],
            "facet_normals": [list(n) for n in self.facet_normals],
            "equations": [list(e) for e in self.equations],
            "dim": self.dim,
        }


def dual_cone(C: Cone) -> Cone:
    """{u : <u, v> >= 0 for all v in C}."""
    return Cone.from_generators(C.facet_normals + C.equations + tuple(_neg(e) for e in C.equations), C.lattice_rank)


def cone_contains(C: Cone, v: Sequence) -> bool:
    return C.contains(v)


def is_simplicial(C: Cone) -> bool:
    return C.is_simplicial()


def is_smooth(C: Cone) -> bool:
    return C.is_smooth()


# -- triangulation and Hilbert bases --------------------------------------------------

def triangulate(C: Cone) -> List[Tuple[LatticeVector, ...]]:
    """Pulling triangulation of a pointed cone without new rays.

    The first ray in canonical order is pulled; every facet missing it is
    triangulated recursively and coned over it.
    """
    C._require_pointed("triangulate")
    memo: Dict[Tuple[LatticeVector, ...], List[Tuple[LatticeVector, ...]]] = {}

    def pull(rays: Tuple[LatticeVector, ...]) -> List[Tuple[LatticeVector, ...]]:
        if rays in memo:
            return memo[rays]
        cone = Cone(C.lattice_rank, rays)
        if len(rays) == cone.dim:
            out = [rays]
        else:
            apex = rays[0]
            out = []
            for facet in cone.facet_indices():
                if 0 in facet:
                    continue
                for simplex in pull(tuple(rays[i] for i in sorted(facet))):
                    out.append(tuple(sorted((apex,) + simplex)))
        memo[rays] = out
        return out

    return sorted(pull(C.rays))


def parallelepiped_points(simplex: Sequence[LatticeVector]) -> List[LatticeVector]:
    """Lattice points sum(λ_i a_i) with 0 <= λ_i < 1 of a full-dimensional simplicial cone.

    Cosets of the row lattice of A are read off the Smith form U A V = D:
    the points k V^-1 with 0 <= k_i < d_i represent Z^d / Z^d A.
    """
    d = len(simplex)
    A = IntMatrix.from_rows(simplex, d)
    D, _, V = smith_normal_form(A)
    diag = [D.rows[i][i] for i in range(d)]
    V_inv = integral(inverse_rational(V.rows))
    A_inv = inverse_rational(A.rows)
    points = []
    for k in itertools.product(*(range(x) for x in diag)):
        x = tuple(sum(k[i] * V_inv.rows[i][j] for i in range(d)) for j in range(d))
        lam = [sum(Fraction(x[i]) * A_inv[i][j] for i in range(d)) for j in range(d)]
        frac = [l - (l.numerator // l.denominator) for l in lam]
        p = tuple(sum(frac[i] * simplex[i][j] for i in range(d)) for j in range(d))
        if any(c.denominator != 1 for c in p):
            raise ArithmeticError("parallelepiped point is not integral")
        points.append(tuple(int(c) for c in p))
    return points


def _hilbert_basis_full(C: Cone) -> List[LatticeVector]:
    grading = tuple(sum(col) for col in zip(*C.facet_normals))
    candidates = set(C.rays)
    for simplex in triangulate(C):
        candidates.update(p for p in parallelepiped_points(simplex) if any(p))
    ordered = sorted(candidates, key=lambda v: (dot(grading, v), v))
    irreducible: List[LatticeVector] = []
    for x in ordered:
        dx = dot(grading, x)
        if any(dot(grading, y) < dx and C.contains(_sub(x, y)) for y in irreducible):
            continue
        irreducible.append(x)
    logger.debug("hilbert basis: %d candidates, %d irreducible", len(candidates), len(irreducible))
    return irreducible


def hilbert_basis(C: Cone) -> List[LatticeVector]:
    """Minimal generating set of the monoid C ∩ Z^d, lexicographically sorted."""
    C._require_pointed("hilbert_basis")
    if not C.rays:
        return []
    if C.is_full_dimensional:
        return sorted(_hilbert_basis_full(C))
    basis = _saturated_span_basis(C.rays, C.lattice_rank)
    k = len(basis)
    coords = []
    for r in C.rays:
        c = solve_rational(basis, r)
        coords.append(tuple(int(x) for x in c))
    inner = Cone.from_generators(coords, k)
    lifted = [tuple(sum(c[i] * basis[i][j] for i in range(k)) for j in range(C.lattice_rank)) for c in _hilbert_basis_full(inner)]
    return sorted(lifted)


# -- fans -----------------------------------------------------------------------------

ConeLike = Union[Cone, Iterable[Sequence[int]]]


def _sort_cones(cones: Iterable[ConeIndex]) -> Tuple[ConeIndex, ...]:
    return tuple(sorted(set(cones), key=lambda s: sorted(s)))


@dataclass(frozen=True)
class Fan:
    lattice_rank: int
    rays: Tuple[LatticeVector, ...]
    maximal: Tuple[ConeIndex, ...]
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        for r in self.rays:
            if len(r) != self.lattice_rank:
                raise DimensionMismatch(f"ray {r} does not live in rank {self.lattice_rank}")
        for c in self.maximal:
            if any(i < 0 or i >= len(self.rays) for i in c):
                raise InvalidInput(f"cone {sorted(c)} refers to a missing ray")

    @classmethod
    def from_cones(cls, lattice_rank: int, cones: Iterable[ConeLike]) -> "Fan":
        cone_objs = []
        for c in cones:
            c = c if isinstance(c, Cone) else Cone.from_generators(list(c), lattice_rank)
            if c.lattice_rank != lattice_rank:
                raise DimensionMismatch("cone and fan live in different lattices")
            if not c.is_pointed:
                raise NotPointedError("fans are made of pointed cones")
            cone_objs.append(c)
        rays = tuple(sorted({r for c in cone_objs for r in c.rays}))
        index = {r: i for i, r in enumerate(rays)}
        sets = {frozenset(index[r] for r in c.rays) for c in cone_objs}
        if not sets:
            sets = {frozenset()}
        maximal = [s for s in sets if not any(s < t for t in sets)]
        return cls(lattice_rank, rays, _sort_cones(maximal))

    @classmethod
    def single(cls, cone: Cone) -> "Fan":
        return cls.from_cones(cone.lattice_rank, [cone])

    def cone(self, idx: Iterable[int]) -> Cone:
        key = frozenset(idx)
        cached = self._cache.get(key)
        if cached is None:
            cached = Cone(self.lattice_rank, tuple(self.rays[i] for i in sorted(key)))
            self._cache[key] = cached
        return cached

    def maximal_cones(self) -> List[Cone]:
        return [self.cone(c) for c in self.maximal]

    def cones(self) -> List[ConeIndex]:
        """Face closure of the maximal cones, sorted by dimension then indices."""
        key = "__all__"
        if key not in self._cache:
            out = set()
            for c in self.maximal:
                local = sorted(c)
                for f in self.cone(c).face_indices():
                    out.add(frozenset(local[i] for i in f))
            self._cache[key] = sorted(out, key=lambda s: (len(s), sorted(s)))
        return self._cache[key]

    def is_cone(self, idx: Iterable[int]) -> bool:
        idx = frozenset(idx)
        host = next((c for c in self.maximal if idx <= c), None)
        if host is None:
            return False
        cone = self.cone(host)
        if cone.is_simplicial():
            return True
        local = {g: i for i, g in enumerate(sorted(host))}
        return frozenset(local[i] for i in idx) in cone.face_indices()

    def index_of(self, rays: Iterable[Sequence[int]]) -> ConeIndex:
        lookup = {r: i for i, r in enumerate(self.rays)}
        try:
            return frozenset(lookup[tuple(r)] for r in rays)
        except KeyError as exc:
            raise InvalidInput(f"{exc.args[0]} is not a ray of the fan") from None

    def contains(self, v: Sequence) -> bool:
        return any(c.contains(v) for c in self.maximal_cones())

    def is_smooth(self) -> bool:
        return all(c.is_smooth() for c in self.maximal_cones())

    def is_simplicial(self) -> bool:
        return all(c.is_simplicial() for c in self.maximal_cones())

    def check(self) -> List[str]:
        """Problems found; an empty list certifies a valid fan."""
        problems = []
        used = set()
        for c in self.maximal:
            used |= c
            cone = self.cone(c)
            extremal = Cone.from_generators(cone.rays, self.lattice_rank)
            if not extremal.is_pointed:
                problems.append(f"cone {sorted(c)} is not pointed")
                continue
            if extremal.rays != tuple(sorted(cone.rays)):
                problems.append(f"cone {sorted(c)} has non-extremal generators")
        if used != set(range(len(self.rays))):
            problems.append(f"rays {sorted(set(range(len(self.rays))) - used)} lie in no cone")
        if problems:
            return problems
        for a, b in itertools.combinations(self.maximal, 2):
            common = a & b
            meet = self.cone(a).intersection(self.cone(b))
            if meet.rays != tuple(sorted(self.cone(common).rays)):
                problems.append(f"cones {sorted(a)} and {sorted(b)} meet in {[list(r) for r in meet.rays]}")
                continue
            for side in (a, b):
                local = {g: i for i, g in enumerate(sorted(side))}
                if frozenset(local[i] for i in common) not in self.cone(side).face_indices():
                    problems.append(f"{sorted(common)} is not a face of {sorted(side)}")
        return problems

    def is_valid(self) -> bool:
        return not self.check()

    def star(self, tau: Iterable[int]) -> Tuple["Fan", IntMatrix]:
        """Quotient fan of the cones containing tau, with the projection used."""
        tau = frozenset(tau)
        if not self.is_cone(tau):
            raise InvalidInput(f"{sorted(tau)} is not a cone of the fan")
        Q = quotient_map([self.rays[i] for i in tau], self.lattice_rank)
        images = []
        for c in self.maximal:
            if tau <= c:
                images.append([primitive(Q.apply(self.rays[i])) for i in sorted(c - tau)])
        return Fan.from_cones(Q.nrows, images), Q

    def refines(self, other: "Fan") -> bool:
        """Every cone lies in a cone of `other` and the supports agree."""
        if other.lattice_rank != self.lattice_rank:
            return False
        placement: Dict[ConeIndex, List[Cone]] = {c: [] for c in other.maximal}
        for c in self.maximal_cones():
            host = next((t for t in other.maximal if other.cone(t).contains_cone(c)), None)
            if host is None:
                return False
            placement[host].append(c)
        return all(_covers(other.cone(t), pieces) for t, pieces in placement.items())

    def to_dict(self) -> dict:
        return {
            "lattice_rank": self.lattice_rank,
            "rays": [list(r) for r in self.rays],
            "maximal_cones": [sorted(c) for c in self.maximal],
        }


def _covers(host: Cone, pieces: List[Cone]) -> bool:
    """Whether full-dimensional pieces inside `host` fill it.

    Each facet of a piece off the boundary of the host must be shared by
    exactly two pieces; lower-dimensional hosts only need one piece.
    """
    if not pieces:
        return False
    if not host.is_full_dimensional:
        return True
    if any(not p.is_full_dimensional for p in pieces):
        return False
    counts: Dict[FrozenSet[LatticeVector], int] = {}
    for p in pieces:
        for f in p.facet_indices():
            rays = frozenset(p.rays[i] for i in f)
            counts[rays] = counts.get(rays, 0) + 1
    for rays, n in counts.items():
        on_boundary = any(all(dot(normal, r) == 0 for r in rays) for normal in host.facet_normals)
        if on_boundary:
            if n != 1:
                return False
        elif n != 2:
            return False
    return True


def star_subdivision(F: Fan, r: Sequence[int]) -> Fan:
    """Insert the ray r: every cone containing r is coned over its facets missing r."""
    r = tuple(int(x) for x in r)
    if len(r) != F.lattice_rank:
        raise DimensionMismatch(f"ray of length {len(r)} against a fan of rank {F.lattice_rank}")
    if not is_primitive(r):
        raise InvalidInput(f"{r} is not primitive")
    if r in F.rays:
        return F
    if not F.contains(r):
        raise OutsideSupportError(f"{r} is outside the support of the fan")
    cones: List[List[LatticeVector]] = []
    for idx in F.maximal:
        cone = F.cone(idx)
        if not cone.contains(r):
            cones.append(list(cone.rays))
            continue
        for facet in cone.facet_indices():
            face = cone.face(facet)
            if face.contains(r):
                continue
            cones.append(list(face.rays) + [r])
    logger.debug("star subdivision at %s: %d -> %d maximal cones", r, len(F.maximal), len(cones))
    return Fan.from_cones(F.lattice_rank, cones)


def projective_space_fan(n: int) -> Fan:
    if n < 0:
        raise InvalidInput("projective space of negative dimension")
    if n == 0:
        return Fan(0, (), (frozenset(),))
    rays = [tuple(int(i == j) for j in range(n)) for i in range(n)] + [tuple(-1 for _ in range(n))]
    return Fan.from_cones(n, [[r for j, r in enumerate(rays) if j != i] for i in range(n + 1)])


def product_fan(F: Fan, G: Fan) -> Fan:
    zf, zg = (0,) * F.lattice_rank, (0,) * G.lattice_rank
    cones = []
    for a in F.maximal:
        for b in G.maximal:
            cones.append([F.rays[i] + zg for i in sorted(a)] + [zf + G.rays[j] for j in sorted(b)])
    return Fan.from_cones(F.lattice_rank + G.lattice_rank, cones)


# -- isomorphisms -----------------------------------------------------------------------

def primitive_collections(F: Fan) -> List[ConeIndex]:
    """Minimal sets of rays that span no cone of the fan."""
    faces = set(F.cones())
    out = []
    for k in range(2, len(F.rays) + 1):
        for combo in itertools.combinations(range(len(F.rays)), k):
            s = frozenset(combo)
            if s in faces:
                continue
            if all(s - {i} in faces for i in s):
                out.append(s)
    return out


def verify_fan_isomorphism(source: Fan, target: Fan, A: IntMatrix) -> bool:
    """Check that A is unimodular, carries rays onto rays and cones onto cones."""
    if source.lattice_rank != target.lattice_rank or A.shape != (target.lattice_rank, source.lattice_rank):
        return False
    if A.nrows and not is_unimodular(A):
        return False
    lookup = {r: i for i, r in enumerate(target.rays)}
    perm = {}
    for i, r in enumerate(source.rays):
        j = lookup.get(A.apply(r))
        if j is None:
            return False
        perm[i] = j
    if len(set(perm.values())) != len(target.rays):
        return False
    image = {frozenset(perm[i] for i in c) for c in source.maximal}
    return image == set(target.maximal)


def fan_isomorphisms(source: Fan, target: Fan) -> Iterator[IntMatrix]:
    """Unimodular lattice maps carrying `source` onto `target`, each re-verified.

    Backtracks over ray bijections, pruning on ray signatures, on
    primitive-collection and cone incidence of partial assignments, and on
    linear consistency once assigned rays determine the image of a ray.
    """
    if (
        source.lattice_rank != target.lattice_rank
        or len(source.rays) != len(target.rays)
        or len(source.maximal) != len(target.maximal)
    ):
        return
    d = source.lattice_rank
    if d == 0:
        yield IntMatrix.zeros(0, 0)
        return
    if rank(source.rays) != d or rank(target.rays) != d:
        raise InvalidInput("isomorphism search needs fans whose rays span the lattice")

    pc_s, pc_t = primitive_collections(source), primitive_collections(target)

    def signatures(F: Fan, pcs: List[ConeIndex]) -> List[tuple]:
        return [
            (
                sum(1 for c in F.maximal if i in c),
                tuple(sorted(len(c) for c in F.maximal if i in c)),
                tuple(sorted(len(p) for p in pcs if i in p)),
            )
            for i in range(len(F.rays))
        ]

    sig_s, sig_t = signatures(source, pc_s), signatures(target, pc_t)
    if sorted(sig_s) != sorted(sig_t):
        return
    n = len(source.rays)

    def incidence_ok(assign: Dict[int, int], i: int) -> bool:
        for pool_s, pool_t in ((pc_s, pc_t), (source.maximal, target.maximal)):
            for P in pool_s:
                if i not in P:
                    continue
                image = frozenset(assign[k] for k in P if k in assign)
                if not any(image <= Q and len(Q) == len(P) for Q in pool_t):
                    return False
        return True

    def search(assign: Dict[int, int], basis: List[LatticeVector], images: List[LatticeVector]):
        i = len(assign)
        if i == n:
            B_inv = inverse_rational([list(col) for col in zip(*basis)])
            S = [list(col) for col in zip(*images)]
            rows = [[sum(S[a][k] * B_inv[k][b] for k in range(d)) for b in range(d)] for a in range(d)]
            if any(x.denominator != 1 for row in rows for x in row):
                return
            A = IntMatrix.from_rows([[int(x) for x in row] for row in rows], d)
            if verify_fan_isomorphism(source, target, A):
                yield A
            return
        r = source.rays[i]
        coeffs = solve_rational(basis, r) if basis else None
        used = set(assign.values())
        for j in range(n):
            if j in used or sig_t[j] != sig_s[i]:
                continue
            s = target.rays[j]
            if coeffs is not None:
                predicted = tuple(sum(c * img[k] for c, img in zip(coeffs, images)) for k in range(d))
                if predicted != s:
                    continue
            assign[i] = j
            if incidence_ok(assign, i):
                if coeffs is None:
                    yield from search(assign, basis + [r], images + [s])
                else:
                    yield from search(assign, basis, images)
            del assign[i]

    yield from search({}, [], [])


# -- fibrations and intersection numbers -----------------------------------------------------

@dataclass
class FibrationCheck:
    passed: bool
    fiber: Optional[Fan]
    problems: List[str]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "fiber": self.fiber.to_dict() if self.fiber is not None else None,
            "problems": list(self.problems),
        }


def check_fibration(total: Fan, base: Fan, A: IntMatrix) -> FibrationCheck:
    """Whether A: total -> base splits every maximal cone as fiber cone + lifted base cone.

    The fiber fan is made of the cones inside ker A, written in an HNF basis
    of the kernel. Every other ray must map exactly onto a ray of the base.
    """
    problems: List[str] = []
    if A.shape != (base.lattice_rank, total.lattice_rank):
        return FibrationCheck(False, None, [f"map of shape {A.shape} does not fit the fans"])
    try:
        right_inverse(A)
    except InvalidInput:
        return FibrationCheck(False, None, ["lattice map is not surjective"])
    kernel = integer_kernel(A) if A.nrows else tuple(
        tuple(int(i == j) for j in range(total.lattice_rank)) for i in range(total.lattice_rank)
    )
    base_lookup = {r: i for i, r in enumerate(base.rays)}
    vertical = set()
    horizontal: Dict[int, int] = {}
    for i, r in enumerate(total.rays):
        image = A.apply(r)
        if not any(image):
            vertical.add(i)
        elif image in base_lookup:
            horizontal[i] = base_lookup[image]
        else:
            problems.append(f"ray {list(r)} maps to {list(image)}, which is not a ray of the base")
    if problems:
        return FibrationCheck(False, None, problems)

    def kernel_coords(r):
        c = solve_rational(kernel, r)
        return tuple(int(x) for x in c)

    fiber_cones = []
    pairs = set()
    for c in total.maximal:
        up = c & vertical
        down = c - vertical
        base_idx = frozenset(horizontal[i] for i in down)
        if len(base_idx) != len(down) or base_idx not in set(base.maximal):
            problems.append(f"cone {sorted(c)} does not lie over a maximal cone of the base")
            continue
        fiber_cones.append(frozenset(up))
        pairs.add((frozenset(up), base_idx))
    if problems:
        return FibrationCheck(False, None, problems)
    fiber = Fan.from_cones(len(kernel), [[kernel_coords(total.rays[i]) for i in sorted(up)] for up in fiber_cones])
    if len(set(fiber_cones)) != len(fiber.maximal):
        problems.append("fiber cones are not maximal in the fiber fan")
    if len(pairs) != len(total.maximal) or len(total.maximal) != len(fiber.maximal) * len(base.maximal):
        problems.append(
            f"{len(total.maximal)} maximal cones, expected {len(fiber.maximal)} x {len(base.maximal)}"
        )
    return FibrationCheck(not problems, fiber, problems)


def divisor_classes(F: Fan) -> Tuple[Tuple[LatticeVector, ...], int]:
    """Classes of the torus-invariant prime divisors in Pic of a smooth complete fan.

    The linear relations among the rays give the curve lattice; pairing a
    divisor with the saturated relation basis gives its class.
    """
    n = len(F.rays)
    M = IntMatrix.from_rows(list(zip(*F.rays)), n)
    relations = integer_kernel(M)
    return tuple(tuple(rel[i] for rel in relations) for i in range(n)), len(relations)


def nef_cone(F: Fan) -> Cone:
    """Intersection over maximal cones of cone([D_ρ] : ρ not in σ)."""
    classes, pic_rank = divisor_classes(F)
    result = None
    for c in F.maximal:
        piece = Cone.from_generators([classes[i] for i in range(len(F.rays)) if i not in c], pic_rank)
        result = piece if result is None else result.intersection(piece)
    return result


def intersection_number(F: Fan, coefficients: Sequence[int], wall: Iterable[int]):
    """Degree of the divisor sum(c_i D_i) on the curve of a wall of a smooth complete fan."""
    wall = frozenset(wall)
    if len(coefficients) != len(F.rays):
        raise DimensionMismatch("one coefficient per ray is required")
    sides = [c for c in F.maximal if wall < c and len(c) == len(wall) + 1]
    if len(wall) != F.lattice_rank - 1 or len(sides) != 2:
        raise InvalidInput(f"{sorted(wall)} is not a wall between two maximal cones")
    (i,) = sides[0] - wall
    (j,) = sides[1] - wall
    members = sorted(wall)
    target = _neg(_add(F.rays[i], F.rays[j]))
    coeffs = solve_rational([F.rays[k] for k in members], target)
    if coeffs is None:
        raise InvalidInput("wall relation has no solution; is the fan smooth?")
    degrees = {i: Fraction(1), j: Fraction(1)}
    degrees.update(zip(members, coeffs))
    value = sum(coefficients[k] * v for k, v in degrees.items())
    return int(value) if value.denominator == 1 else value


def walls(F: Fan) -> List[Tuple[ConeIndex, ConeIndex, ConeIndex]]:
    """(wall, cone, cone) for every codimension-one cone shared by two maximal cones."""
    out = []
    for a, b in itertools.combinations(F.maximal, 2):
        common = a & b
        if len(common) == F.lattice_rank - 1 and len(a) == len(b) == F.lattice_rank:
            out.append((common, a, b))
    return out
