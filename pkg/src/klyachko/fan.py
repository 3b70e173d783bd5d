"""Rational polyhedral cones and fans.

Cones are stored as sorted tuples of indices into the ray table of a
:class:`Fan`. Dual cones are computed exactly: by rotating ray normals in
dimension 2 and by the double description method in dimensions 1, 3 and 4.
"""
from __future__ import annotations

import functools
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from ._matrix import content, dot, inverse, matvec, minors_gcd, primitive, rank, rref
from .errors import DimensionError, NotAFace, PreconditionError, UnsupportedDimension, ValidationError

log = logging.getLogger(__name__)

MAX_DIM = 4

Vector = tuple[int, ...]


@dataclass(frozen=True, order=True)
class Cone:
    """A cone of a fan, given by the indices of its rays (empty = zero cone)."""

    rays: tuple[int, ...] = ()

    def __post_init__(self):
        rays = tuple(sorted(int(i) for i in self.rays))
        if len(set(rays)) != len(rays):
            raise ValidationError(f"repeated ray index in cone {rays}")
        object.__setattr__(self, "rays", rays)

    @classmethod
    def of(cls, *indices: int) -> "Cone":
        return cls(tuple(indices))

    @property
    def dim(self) -> int:
        """Number of rays; equals the dimension for simplicial cones."""
        return len(self.rays)

    def __len__(self):
        return len(self.rays)

    def __iter__(self):
        return iter(self.rays)

    def __contains__(self, index):
        return index in self.rays

    def is_subcone_of(self, other: "Cone") -> bool:
        return set(self.rays) <= set(other.rays)

    def __str__(self):
        return "{" + ",".join(map(str, self.rays)) + "}"


# --------------------------------------------------------------------------
# cone duality


def _orthogonal_projection(vec, basis):
    """Project ``vec`` onto the orthogonal complement of span(basis)."""
    if not basis:
        return [Fraction(x) for x in vec]
    gram = [[Fraction(dot(u, v)) for v in basis] for u in basis]
    coeffs = matvec(inverse(gram), [dot(u, vec) for u in basis])
    return [Fraction(x) - sum(c * u[i] for c, u in zip(coeffs, basis)) for i, x in enumerate(vec)]


def _canonical(lineality, rays):
    lin = [primitive(row) for row in rref(lineality)[0]] if lineality else []
    out = {primitive(_orthogonal_projection(r, lin)) for r in rays}
    return tuple(lin), tuple(sorted(out))


def double_description(inequalities: Sequence[Sequence[int]], dim: int):
    """Generators of ``{x : <a, x> >= 0 for all a}`` by the double description method.

    Returns ``(lineality, rays)``: a basis of the lineality space and the
    primitive extreme rays of the cone modulo lineality, each ray projected
    onto the orthogonal complement of the lineality space.
    """
    lin = [[int(i == j) for j in range(dim)] for i in range(dim)]
    rays: list[list[int]] = []
    processed: list[Sequence[int]] = []
    for a in inequalities:
        if len(a) != dim:
            raise DimensionError(f"inequality {tuple(a)} does not have length {dim}")
        if not any(a):
            continue
        vals = [dot(a, v) for v in lin]
        k = next((i for i, x in enumerate(vals) if x != 0), None)
        if k is not None:
            l0, v0 = lin.pop(k), vals.pop(k)
            if v0 < 0:
                l0, v0 = [-x for x in l0], -v0
            lin = [list(primitive([v0 * x - v * y for x, y in zip(l, l0)])) for l, v in zip(lin, vals)]
            rays = [list(primitive([v0 * x - dot(a, r) * y for x, y in zip(r, l0)])) for r in rays]
            rays.append(l0)
        else:
            pos = [r for r in rays if dot(a, r) > 0]
            neg = [r for r in rays if dot(a, r) < 0]
            new = [r for r in rays if dot(a, r) >= 0]
            target = dim - len(lin) - 2
            for p in pos:
                for q in neg:
                    tight = [b for b in processed if dot(b, p) == 0 and dot(b, q) == 0]
                    if (rank(tight) if tight else 0) != target:
                        continue
                    ap, aq = dot(a, p), dot(a, q)
                    new.append(list(primitive([ap * y - aq * x for x, y in zip(p, q)])))
            seen = set()
            rays = []
            for r in new:
                if tuple(r) not in seen:
                    seen.add(tuple(r))
                    rays.append(r)
        processed.append(a)
    return _canonical(lin, rays)


def _rot(v):
    return (-v[1], v[0])


def _dual_2d(gens: Sequence[Vector]):
    """Dual of a pointed plane cone spanned by at most two vectors."""
    if not gens:
        return _canonical([[1, 0], [0, 1]], [])
    if len(gens) == 1:
        g = gens[0]
        return _canonical([list(_rot(g))], [list(g)])
    a, b = gens
    if a[0] * b[1] - a[1] * b[0] == 0:
        raise ValidationError(f"vectors {a} and {b} do not span a pointed 2-dimensional cone")
    na = _rot(a) if dot(_rot(a), b) > 0 else tuple(-x for x in _rot(a))
    nb = _rot(b) if dot(_rot(b), a) > 0 else tuple(-x for x in _rot(b))
    return _canonical([], [list(na), list(nb)])


def cone_dual(gens: Sequence[Sequence[int]], dim: int):
    """``(lineality, rays)`` of the dual of the cone generated by ``gens``."""
    if dim > MAX_DIM:
        raise UnsupportedDimension(f"dual cones are only computed up to dimension {MAX_DIM}")
    gens = [tuple(int(x) for x in g) for g in gens if any(g)]
    if dim == 2 and len(gens) <= 2 and (len(gens) < 2 or rank(gens) == 2):
        return _dual_2d(gens)
    return double_description(gens, dim)


@dataclass(frozen=True)
class DualCone:
    """Both descriptions of a dual cone.

    ``inequalities`` are vectors ``n`` of N with ``<m, n> >= 0`` on the cone;
    ``rays`` and ``lineality`` generate it: every element is a nonnegative
    combination of ``rays`` plus an element of ``span(lineality)``.
    """

    inequalities: tuple[Vector, ...]
    rays: tuple[Vector, ...]
    lineality: tuple[Vector, ...]

    @property
    def generators(self) -> tuple[Vector, ...]:
        """Minimal generators as a cone: the rays, then +/- each lineality vector."""
        out = list(self.rays)
        for v in self.lineality:
            out.append(v)
            out.append(tuple(-x for x in v))
        return tuple(out)

    def contains(self, m: Sequence[int]) -> bool:
        return all(dot(m, n) >= 0 for n in self.inequalities)


def dual_of(gens: Sequence[Sequence[int]], dim: int) -> DualCone:
    """Dual of the cone generated by ``gens`` (no fan needed)."""
    lin, rays = cone_dual(gens, dim)
    return DualCone(tuple(tuple(g) for g in gens), rays, lin)


# --------------------------------------------------------------------------
# fans


def cyclic_order(vectors: Sequence[Sequence[int]]) -> list[int]:
    """Indices of plane vectors sorted counterclockwise starting at angle 0."""

    def half(v):
        return 0 if v[1] > 0 or (v[1] == 0 and v[0] > 0) else 1

    def cmp(i, j):
        a, b = vectors[i], vectors[j]
        if half(a) != half(b):
            return half(a) - half(b)
        cross = a[0] * b[1] - a[1] * b[0]
        return -1 if cross > 0 else (1 if cross < 0 else 0)

    return sorted(range(len(vectors)), key=functools.cmp_to_key(cmp))


@dataclass(frozen=True)
class Fan:
    """A fan: primitive rays in N plus the list of maximal cones.

    Construction validates primitivity, distinctness, strong convexity and
    minimality of every maximal cone and, for ``dim <= 3``, that any two
    maximal cones meet in a common face.
    """

    dim: int
    rays: tuple[Vector, ...]
    max_cones: tuple[Cone, ...]

    def __post_init__(self):
        rays = tuple(tuple(int(x) for x in r) for r in self.rays)
        cones = tuple(c if isinstance(c, Cone) else Cone(tuple(c)) for c in self.max_cones)
        object.__setattr__(self, "rays", rays)
        object.__setattr__(self, "max_cones", cones)
        self._validate()

    def _validate(self):
        d = self.dim
        if d < 1:
            raise ValidationError("fan dimension must be positive")
        if d > MAX_DIM:
            raise UnsupportedDimension(f"fans of dimension {d} > {MAX_DIM} are not supported")
        for i, r in enumerate(self.rays):
            if len(r) != d:
                raise ValidationError(f"ray {i} = {r} does not have length {d}")
            if content(r) != 1:
                raise ValidationError(f"ray {i} = {r} is not primitive")
        if len(set(self.rays)) != len(self.rays):
            raise ValidationError("rays are not pairwise distinct")
        used = set()
        for k, c in enumerate(self.max_cones):
            for i in c.rays:
                if not 0 <= i < len(self.rays):
                    raise ValidationError(f"cone {k} references ray {i}, fan has {len(self.rays)} rays")
            used.update(c.rays)
        for i in range(len(self.rays)):
            if i not in used:
                raise ValidationError(f"ray {i} belongs to no maximal cone")
        if len(set(self.max_cones)) != len(self.max_cones):
            raise ValidationError("repeated maximal cone")
        for k, c in enumerate(self.max_cones):
            for l, c2 in enumerate(self.max_cones):
                if k != l and c.is_subcone_of(c2):
                    raise ValidationError(f"cone {k} {c} is contained in cone {l} {c2}")
        for k, c in enumerate(self.max_cones):
            gens = [self.rays[i] for i in c.rays]
            dual = dual_of(gens, d)
            lin2, rays2 = cone_dual(dual.generators, d)
            if lin2:
                raise ValidationError(f"cone {k} {c} is not strongly convex")
            if set(rays2) != set(gens):
                raise ValidationError(f"rays of cone {k} {c} are not its minimal generators")
        if d <= 3:
            for (k, a), (l, b) in itertools.combinations(enumerate(self.max_cones), 2):
                self._check_meet(k, a, l, b)
        else:
            log.warning("fan of dimension %d: face-intersection property not verified", d)

    def _check_meet(self, k, a, l, b):
        common = Cone(tuple(set(a.rays) & set(b.rays)))
        if common not in self.faces(a) or common not in self.faces(b):
            raise ValidationError(f"cones {k} and {l} share rays {common} that are not a common face")
        ineqs = list(self.dual_cone(a).generators) + list(self.dual_cone(b).generators)
        lin, rays = double_description(ineqs, self.dim)
        target = self.dual_cone(common)
        if lin or any(dot(g, x) < 0 for x in rays for g in target.generators):
            raise ValidationError(f"cones {k} and {l} do not intersect in a common face")

    # -- derived data ----------------------------------------------------

    @property
    def nrays(self) -> int:
        return len(self.rays)

    def ray(self, i: int) -> Vector:
        return self.rays[i]

    @functools.cached_property
    def cones(self) -> tuple[Cone, ...]:
        """Every cone of the fan, ordered by (number of rays, indices)."""
        out = set()
        for c in self.max_cones:
            out.update(self.faces(c))
        return tuple(sorted(out, key=lambda c: (len(c), c.rays)))

    def __contains__(self, cone) -> bool:
        return Cone(tuple(cone)) in self.cones if not isinstance(cone, Cone) else cone in self.cones

    def require(self, cone) -> Cone:
        cone = cone if isinstance(cone, Cone) else Cone(tuple(cone))
        if cone not in self.cones:
            raise PreconditionError(f"cone {cone} is not a cone of the fan")
        return cone

    def dual_cone(self, c: Cone) -> DualCone:
        return _dual_cached(self, c)

    def faces(self, c: Cone) -> list[Cone]:
        return _faces_cached(self, c)

    def two_cones(self) -> list[Cone]:
        return [c for c in self.cones if len(c) == 2]

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "rays": [list(r) for r in self.rays],
            "max_cones": [list(c.rays) for c in self.max_cones],
        }


@functools.lru_cache(maxsize=4096)
def _dual_cached(fan: Fan, c: Cone) -> DualCone:
    for i in c.rays:
        if not 0 <= i < fan.nrays:
            raise ValidationError(f"ray index {i} out of range")
    return dual_of([fan.rays[i] for i in c.rays], fan.dim)


@functools.lru_cache(maxsize=4096)
def _faces_cached(fan: Fan, c: Cone) -> list[Cone]:
    dual = fan.dual_cone(c)
    zero_sets = set()
    for g in dual.generators:
        zero_sets.add(frozenset(i for i in c.rays if dot(g, fan.rays[i]) == 0))
    faces = {frozenset(c.rays)}
    frontier = set(zero_sets)
    while frontier:
        faces |= frontier
        frontier = {a & b for a in faces for b in zero_sets} - faces
    return sorted((Cone(tuple(f)) for f in faces), key=lambda x: (len(x), x.rays))


# --------------------------------------------------------------------------
# operations


def dual_cone(fan: Fan, c: Cone) -> DualCone:
    return fan.dual_cone(c)


def faces(fan: Fan, c: Cone) -> list[Cone]:
    """All faces of ``c``, from the zero cone up to ``c`` itself."""
    return fan.faces(c)


def is_face(fan: Fan, tau: Cone, sigma: Cone) -> bool:
    return tau in fan.faces(sigma)


class Comparison(NamedTuple):
    less_or_equal: bool
    equivalent: bool


def _check_char(fan: Fan, m):
    m = tuple(m)
    if len(m) != fan.dim:
        raise DimensionError(f"character {m} does not have length {fan.dim}")
    return m


def semigroup_leq(fan: Fan, c: Cone, m, m_prime) -> Comparison:
    """Compare ``m <=_c m'``, i.e. whether ``m' - m`` lies in the semigroup of ``c``."""
    m, m_prime = _check_char(fan, m), _check_char(fan, m_prime)
    diff = [b - a for a, b in zip(m, m_prime)]
    vals = [dot(diff, fan.rays[i]) for i in c.rays]
    return Comparison(all(v >= 0 for v in vals), all(v == 0 for v in vals))


def separating_character(fan: Fan, tau: Cone, sigma: Cone) -> Vector:
    """The character ``m_tau``: sum of the minimal generators of the dual of
    ``sigma`` that are orthogonal to ``tau``."""
    if not is_face(fan, tau, sigma):
        raise NotAFace(f"{tau} is not a face of {sigma}")
    dual = fan.dual_cone(sigma)
    chosen = [g for g in dual.rays if all(dot(g, fan.rays[i]) == 0 for i in tau.rays)]
    m = tuple(sum(col) for col in zip(*chosen)) if chosen else (0,) * fan.dim
    for i in sigma.rays:
        v = dot(m, fan.rays[i])
        assert v == 0 if i in tau else v > 0
    _verify_localization(fan, tau, sigma, m)
    return m


def _verify_localization(fan, tau, sigma, m):
    """Every generator of tau's dual becomes a sigma-character after adding k * m_tau."""
    sdual = fan.dual_cone(sigma)
    for h in fan.dual_cone(tau).generators:
        k = 0
        for i in sigma.rays:
            v, w = dot(h, fan.rays[i]), dot(m, fan.rays[i])
            if v < 0:
                assert w > 0
                k = max(k, -(v // w))
        shifted = [x + k * y for x, y in zip(h, m)]
        assert sdual.contains(shifted)


def is_smooth(fan: Fan) -> bool:
    """Every maximal cone is generated by part of a Z-basis of N."""
    for c in fan.max_cones:
        mat = [list(fan.rays[i]) for i in c.rays]
        if not mat:
            continue
        if rank(mat) != len(mat) or minors_gcd(mat, len(mat)) != 1:
            return False
    return True


def is_complete(fan: Fan) -> bool:
    """Whether the support of the fan is all of N_R (dimension 1 and 2 only)."""
    if fan.dim == 1:
        return set(fan.rays) == {(1,), (-1,)}
    if fan.dim != 2:
        raise UnsupportedDimension("completeness is only decided for fans of dimension <= 2")
    n = fan.nrays
    if n < 3:
        return False
    order = cyclic_order(fan.rays)
    maxes = set(fan.max_cones)
    for a, b in zip(order, order[1:] + order[:1]):
        u, v = fan.rays[a], fan.rays[b]
        if u[0] * v[1] - u[1] * v[0] <= 0:
            return False
        if Cone.of(a, b) not in maxes:
            return False
    return True


def orbit_star(fan: Fan, tau: Cone) -> list[Cone]:
    """Cones ``sigma >= tau``; their orbits make up the orbit closure V(tau)."""
    tau = fan.require(tau)
    return [c for c in fan.cones if tau.is_subcone_of(c)]


def cone_dimension(fan: Fan, c: Cone) -> int:
    return rank([fan.rays[i] for i in c.rays]) if c.rays else 0


def semigroup_basis(fan: Fan, c: Cone) -> tuple[list[Vector], list[Vector]]:
    """For a smooth cone: ``(positive, lattice)`` with the semigroup of ``c``
    equal to ``N * positive + Z * lattice``.

    ``positive[k]`` pairs to 1 with the k-th ray of ``c`` and 0 with the others.
    """
    from .lattice import smith_normal_form

    rows = [list(fan.rays[i]) for i in c.rays]
    d, k = fan.dim, len(rows)
    if not rows:
        basis_n = [[int(i == j) for j in range(d)] for i in range(d)]
    else:
        snf = smith_normal_form(rows, ncols=d)
        if snf.invariants != (1,) * k:
            raise PreconditionError(f"cone {c} is not smooth")
        right_inv = inverse(snf.right)
        basis_n = rows + [[int(x) for x in right_inv[i]] for i in range(k, d)]
    dual = inverse(basis_n)  # columns are the dual basis
    dual_vecs = [tuple(int(dual[r][j]) for r in range(d)) for j in range(d)]
    return dual_vecs[:k], dual_vecs[k:]


# --------------------------------------------------------------------------
# standard fans


def projective_plane() -> Fan:
    return Fan(2, ((1, 0), (0, 1), (-1, -1)), (Cone.of(0, 1), Cone.of(1, 2), Cone.of(0, 2)))


def projective_line() -> Fan:
    return Fan(1, ((1,), (-1,)), (Cone.of(0), Cone.of(1)))


def product_p1_p1() -> Fan:
    return hirzebruch(0)


def hirzebruch(a: int) -> Fan:
    rays = ((1, 0), (0, 1), (-1, a), (0, -1))
    return Fan(2, rays, (Cone.of(0, 1), Cone.of(1, 2), Cone.of(2, 3), Cone.of(0, 3)))


def affine_space(d: int = 2) -> Fan:
    rays = tuple(tuple(int(i == j) for j in range(d)) for i in range(d))
    return Fan(d, rays, (Cone(tuple(range(d))),))


def affine_plane() -> Fan:
    return affine_space(2)


def projective_space(d: int) -> Fan:
    rays = [tuple(int(i == j) for j in range(d)) for i in range(d)] + [tuple([-1] * d)]
    cones = [Cone(tuple(s)) for s in itertools.combinations(range(d + 1), d)]
    return Fan(d, tuple(rays), tuple(cones))
