"""Subspace arithmetic over Q, filtrations, multifiltrations and sigma-families.

A reflexive equivariant sheaf is encoded by :class:`KlyachkoData` (one full
filtration of ``Q^r`` per ray); a torsion free sheaf on a smooth affine piece
by a :class:`Multifiltration`; anything else is only ever looked at through a
finite :class:`FamilyWindow` of degrees.
"""
from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence

from ._matrix import dot, nullspace, rank, rref
from .errors import DimensionError, Inconclusive, NotAFace, PreconditionError, ValidationError
from .fan import Cone, Fan, double_description, is_face, semigroup_basis

DEFAULT_CLOSURE_LIMIT = 4096


# --------------------------------------------------------------------------
# subspaces


def _frac_row(row) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) for x in row)


@dataclass(frozen=True)
class Subspace:
    """A subspace of ``Q^ambient_dim`` stored by its reduced row echelon basis.

    Equal subspaces compare (and hash) equal.
    """

    ambient_dim: int
    basis: tuple[tuple[Fraction, ...], ...] = ()

    @classmethod
    def span(cls, rows: Iterable[Sequence], ambient_dim: int | None = None) -> "Subspace":
        rows = [_frac_row(r) for r in rows]
        if ambient_dim is None:
            if not rows:
                raise DimensionError("ambient dimension of an empty span is unknown")
            ambient_dim = len(rows[0])
        for r in rows:
            if len(r) != ambient_dim:
                raise DimensionError(f"vector of length {len(r)} in Q^{ambient_dim}")
        red, _ = rref(rows, ambient_dim)
        return cls(ambient_dim, tuple(tuple(r) for r in red))

    @classmethod
    def zero(cls, r: int) -> "Subspace":
        return cls(r, ())

    @classmethod
    def full(cls, r: int) -> "Subspace":
        return cls(r, tuple(tuple(Fraction(int(i == j)) for j in range(r)) for i in range(r)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def is_zero(self) -> bool:
        return not self.basis

    @property
    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(j for j, x in enumerate(row) if x != 0) for row in self.basis)

    def _check(self, other: "Subspace"):
        if self.ambient_dim != other.ambient_dim:
            raise DimensionError(f"subspaces of Q^{self.ambient_dim} and Q^{other.ambient_dim}")

    def contains(self, vec: Sequence) -> bool:
        if len(vec) != self.ambient_dim:
            raise DimensionError(f"vector of length {len(vec)} in Q^{self.ambient_dim}")
        return Subspace.span(list(self.basis) + [vec], self.ambient_dim).dim == self.dim

    def __le__(self, other: "Subspace") -> bool:
        self._check(other)
        return self.join(other) == other

    def __lt__(self, other: "Subspace") -> bool:
        return self <= other and self != other

    def join(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace.span(self.basis + other.basis, self.ambient_dim)

    def meet(self, other: "Subspace") -> "Subspace":
        self._check(other)
        r = self.ambient_dim
        if self.is_full:
            return other
        if other.is_full:
            return self
        ann = nullspace(self.basis, r) + nullspace(other.basis, r)
        return Subspace.span(nullspace(ann, r), r)

    def coordinates(self, vec: Sequence) -> tuple[Fraction, ...]:
        """Coordinates of ``vec`` (which must lie in the subspace) in the RREF basis."""
        coords = tuple(Fraction(vec[p]) for p in self.pivots)
        recon = [sum(c * row[j] for c, row in zip(coords, self.basis)) for j in range(self.ambient_dim)]
        if recon != [Fraction(x) for x in vec]:
            raise ValueError("vector does not lie in the subspace")
        return coords

    def complement_in(self, bigger: "Subspace") -> "Subspace":
        """Canonical complement of ``self`` inside ``bigger``: greedily chosen
        RREF basis vectors of ``bigger``."""
        current = self
        chosen = []
        for row in bigger.basis:
            nxt = current.join(Subspace(self.ambient_dim, (row,)))
            if nxt.dim > current.dim:
                chosen.append(row)
                current = nxt
        return Subspace.span(chosen, self.ambient_dim)

    def __str__(self):
        if self.is_zero:
            return "0"
        if self.is_full:
            return f"Q^{self.ambient_dim}"
        return "span(" + ", ".join("(" + ",".join(str(x) for x in row) + ")" for row in self.basis) + ")"


def subspace_canonicalize(rows: Sequence[Sequence], ambient_dim: int | None = None) -> Subspace:
    return Subspace.span(rows, ambient_dim)


def meet(u: Subspace, v: Subspace) -> Subspace:
    return u.meet(v)


def join(u: Subspace, v: Subspace) -> Subspace:
    return u.join(v)


def join_all(spaces: Iterable[Subspace], ambient_dim: int) -> Subspace:
    rows = [row for s in spaces for row in s.basis]
    return Subspace.span(rows, ambient_dim) if rows else Subspace.zero(ambient_dim)


def meet_all(spaces: Iterable[Subspace], ambient_dim: int) -> Subspace:
    out = Subspace.full(ambient_dim)
    for s in spaces:
        out = out.meet(s)
    return out


# --------------------------------------------------------------------------
# filtrations


@dataclass(frozen=True)
class Filtration:
    """Increasing step filtration ``E(i)`` of ``Q^ambient_dim``.

    ``jumps`` lists ``(i, E(i))`` at every index where the space grows.
    """

    ambient_dim: int
    jumps: tuple[tuple[int, Subspace], ...] = ()

    def __post_init__(self):
        jumps = tuple((int(i), s) for i, s in self.jumps)
        object.__setattr__(self, "jumps", jumps)
        prev_i, prev_s = None, Subspace.zero(self.ambient_dim)
        for i, s in jumps:
            if s.ambient_dim != self.ambient_dim:
                raise DimensionError(f"jump space in Q^{s.ambient_dim}, filtration of Q^{self.ambient_dim}")
            if prev_i is not None and i <= prev_i:
                raise ValidationError(f"jump indices not strictly increasing at {i}")
            if not prev_s < s:
                raise ValidationError(f"jump space at index {i} does not strictly contain the previous one")
            prev_i, prev_s = i, s

    @classmethod
    def from_generators(cls, ambient_dim: int, steps: Iterable[tuple[int, object]]) -> "Filtration":
        """Filtration whose ``E(i)`` is the sum of all given spaces with index <= i.

        Each space may be a :class:`Subspace` or a list of spanning rows.
        """
        items = []
        for i, s in steps:
            if not isinstance(s, Subspace):
                s = Subspace.span(s, ambient_dim) if len(s) else Subspace.zero(ambient_dim)
            items.append((int(i), s))
        items.sort(key=lambda t: t[0])
        jumps = []
        current = Subspace.zero(ambient_dim)
        for i, s in items:
            nxt = current.join(s)
            if nxt == current:
                continue
            if jumps and jumps[-1][0] == i:
                jumps[-1] = (i, nxt)
            else:
                jumps.append((i, nxt))
            current = nxt
        return cls(ambient_dim, tuple(jumps))

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.jumps)

    @property
    def is_full(self) -> bool:
        return bool(self.jumps) and self.jumps[-1][1].is_full if self.ambient_dim else True

    def __call__(self, i: int) -> Subspace:
        return eval_filtration(self, i)

    def shifted(self, offset: int) -> "Filtration":
        return Filtration(self.ambient_dim, tuple((i + offset, s) for i, s in self.jumps))


def eval_filtration(f: Filtration, i: int) -> Subspace:
    """``E(i)``: the last jump space with index <= i, or 0 below the first jump."""
    k = bisect.bisect_right(f.indices, i)
    return f.jumps[k - 1][1] if k else Subspace.zero(f.ambient_dim)


@dataclass(frozen=True)
class KlyachkoData:
    """One full filtration of ``Q^rank`` per ray, indexed like the fan's rays."""

    rank: int
    filtrations: tuple[Filtration, ...]

    def __post_init__(self):
        object.__setattr__(self, "filtrations", tuple(self.filtrations))
        for k, f in enumerate(self.filtrations):
            if f.ambient_dim != self.rank:
                raise ValidationError(f"filtration of ray {k} lives in Q^{f.ambient_dim}, rank is {self.rank}")
            if not f.is_full:
                raise ValidationError(f"filtration of ray {k} is not full")

    @property
    def per_ray(self) -> dict[int, Filtration]:
        return dict(enumerate(self.filtrations))

    def shifted(self, offsets: Sequence[int]) -> "KlyachkoData":
        """Shift the jump indices of ray ``k`` by ``offsets[k]``."""
        if len(offsets) != len(self.filtrations):
            raise DimensionError("one offset per ray required")
        return KlyachkoData(self.rank, tuple(f.shifted(o) for f, o in zip(self.filtrations, offsets)))

    def check_fan(self, fan: Fan):
        if len(self.filtrations) != fan.nrays:
            raise ValidationError(f"data has {len(self.filtrations)} filtrations, fan has {fan.nrays} rays")


def sigma_component(fan: Fan, data: KlyachkoData, sigma: Cone, m: Sequence[int]) -> Subspace:
    """``E^sigma_m``: intersection over the rays of sigma of ``E^rho(<m, n(rho)>)``."""
    data.check_fan(fan)
    if len(m) != fan.dim:
        raise DimensionError(f"character {tuple(m)} does not have length {fan.dim}")
    return meet_all((eval_filtration(data.filtrations[i], dot(m, fan.rays[i])) for i in sigma.rays), data.rank)


def box_points(box: Sequence[tuple[int, int]]):
    return itertools.product(*(range(lo, hi + 1) for lo, hi in box))


def global_sections(fan: Fan, data: KlyachkoData, box: Sequence[tuple[int, int]]) -> dict[tuple[int, ...], Subspace]:
    """Nonzero graded pieces of the global sections inside ``box``."""
    data.check_fan(fan)
    if len(box) != fan.dim:
        raise DimensionError(f"box has {len(box)} coordinates, fan has dimension {fan.dim}")
    everything = Cone(tuple(range(fan.nrays)))
    out = {}
    for m in box_points(box):
        s = sigma_component(fan, data, everything, m)
        if not s.is_zero:
            out[m] = s
    return out


def sections_box(fan: Fan, data: KlyachkoData):
    """A box containing every degree with nonzero global sections.

    The nonzero degrees lie in the polytope ``<m, n(rho)> >= first jump of rho``;
    the box is the integer hull of its vertices. Returns ``None`` if the
    polytope is empty; raises if it is unbounded.
    """
    data.check_fan(fan)
    lin, rays = double_description(fan.rays, fan.dim)
    if lin or rays:
        raise PreconditionError("fan is not complete: sections may be infinite, pass an explicit box")
    bounds = [f.indices[0] if f.indices else 0 for f in data.filtrations]
    vertices = []
    for subset in itertools.combinations(range(fan.nrays), fan.dim):
        mat = [list(fan.rays[i]) for i in subset]
        if rank(mat) < fan.dim:
            continue
        aug = [row + [bounds[i]] for row, i in zip(mat, subset)]
        red, _ = rref(aug, fan.dim + 1)
        v = [row[-1] for row in red]
        if all(dot(v, fan.rays[i]) >= bounds[i] for i in range(fan.nrays)):
            vertices.append(v)
    if not vertices:
        return None
    lo = [min(v[k] for v in vertices) for k in range(fan.dim)]
    hi = [max(v[k] for v in vertices) for k in range(fan.dim)]
    import math

    return tuple((math.ceil(a), math.floor(b)) for a, b in zip(lo, hi))


# --------------------------------------------------------------------------
# multifiltrations


def _leq(a: Sequence[int], b: Sequence[int]) -> bool:
    return all(x <= y for x, y in zip(a, b))


@dataclass(frozen=True)
class Multifiltration:
    """``E(i) = sum of generator spaces whose index vector is <= i``.

    Index vectors are ordered like ``cone.rays``. Generators at the same
    index are merged; order is lexicographic in the index.
    """

    cone: Cone
    ambient_dim: int
    jump_gens: tuple[tuple[tuple[int, ...], Subspace], ...] = ()

    def __post_init__(self):
        merged: dict[tuple[int, ...], Subspace] = {}
        k = len(self.cone.rays)
        for idx, s in self.jump_gens:
            idx = tuple(int(x) for x in idx)
            if len(idx) != k:
                raise DimensionError(f"index vector {idx} has length {len(idx)}, cone has {k} rays")
            if s.ambient_dim != self.ambient_dim:
                raise DimensionError(f"generator in Q^{s.ambient_dim}, multifiltration of Q^{self.ambient_dim}")
            merged[idx] = merged[idx].join(s) if idx in merged else s
        object.__setattr__(self, "jump_gens", tuple(sorted(merged.items())))

    def __call__(self, index: Sequence[int]) -> Subspace:
        return join_all((s for i, s in self.jump_gens if _leq(i, index)), self.ambient_dim)

    def index_of(self, fan: Fan, m: Sequence[int]) -> tuple[int, ...]:
        return tuple(dot(m, fan.rays[i]) for i in self.cone.rays)

    def at_character(self, fan: Fan, m: Sequence[int]) -> Subspace:
        return self(self.index_of(fan, m))

    def minimized(self) -> "Multifiltration":
        """Same multifiltration with each generator replaced by the actual
        value at its index and redundant generators dropped."""
        out = []
        for idx, _ in self.jump_gens:
            below = join_all((s for j, s in out if _leq(j, idx) and j != idx), self.ambient_dim)
            val = self(idx)
            if val != below:
                out.append((idx, val))
        return Multifiltration(self.cone, self.ambient_dim, tuple(out))


def multifiltration_from_data(fan: Fan, data: KlyachkoData, sigma: Cone) -> Multifiltration:
    """The multifiltration ``E^sigma(i) = cap_rho E^rho(i_rho)`` of a smooth cone."""
    data.check_fan(fan)
    _require_smooth(fan, sigma)
    per_ray = [data.filtrations[i] for i in sigma.rays]
    gens = []
    for combo in itertools.product(*(f.jumps for f in per_ray)):
        idx = tuple(i for i, _ in combo)
        gens.append((idx, meet_all((s for _, s in combo), data.rank)))
    if not sigma.rays:
        gens = [((), Subspace.full(data.rank))]
    return Multifiltration(sigma, data.rank, tuple(gens))


def _require_smooth(fan: Fan, sigma: Cone):
    semigroup_basis(fan, sigma)  # raises PreconditionError if not smooth


@dataclass
class Report:
    """Named pass/fail checks plus free-form notes."""

    checks: dict[str, bool] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    details: dict[str, object] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def failed(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v]


def validate_multifiltration(mf: Multifiltration) -> Report:
    rep = Report()
    rep.checks["finite"] = True
    rep.checks["monotone"] = True
    rep.checks["bounded_below"] = True
    limit = direct_limit(mf)
    rep.checks["exhaustive"] = limit.is_full
    if not limit.is_full:
        rep.notes.append(f"generators span a subspace of dimension {limit.dim} < {mf.ambient_dim}")
    for idx, s in mf.jump_gens:
        below = join_all((t for j, t in mf.jump_gens if _leq(j, idx) and j != idx), mf.ambient_dim)
        if s <= below:
            rep.notes.append(f"generator at {idx} is redundant")
        elif not below <= s:
            rep.notes.append(f"generator at {idx} does not contain the generators below it; E{idx} is their sum")
    return rep


def restrict_to_face(fan: Fan, mf: Multifiltration, tau: Cone) -> Multifiltration:
    """Restrict to a face: the coordinates of dropped rays are sent to infinity
    (their largest jump index), i.e. simply forgotten."""
    if not is_face(fan, tau, mf.cone):
        raise NotAFace(f"{tau} is not a face of {mf.cone}")
    keep = [k for k, i in enumerate(mf.cone.rays) if i in tau.rays]
    gens = tuple((tuple(idx[k] for k in keep), s) for idx, s in mf.jump_gens)
    return Multifiltration(tau, mf.ambient_dim, gens)


def direct_limit(mf: Multifiltration) -> Subspace:
    return join_all((s for _, s in mf.jump_gens), mf.ambient_dim)


# --------------------------------------------------------------------------
# finite windows of sigma-families


def _inclusion_matrix(small: Subspace, big: Subspace) -> tuple[tuple[Fraction, ...], ...]:
    cols = [big.coordinates(v) for v in small.basis]
    return tuple(tuple(col[r] for col in cols) for r in range(big.dim))


def _mul(b, a, k, j, i):
    """(k x j) @ (j x i) for matrices stored as row tuples (possibly empty)."""
    return tuple(tuple(sum((b[r][t] * a[t][c] for t in range(j)), Fraction(0)) for c in range(i)) for r in range(k))


def _identity(n):
    return tuple(tuple(Fraction(int(r == c)) for c in range(n)) for r in range(n))


@dataclass(frozen=True)
class FamilyWindow:
    """A sigma-family restricted to the degrees of a box.

    ``steps`` generate the semigroup of the cone (a step and its negative
    both appear for directions orthogonal to the cone). ``maps[(m, k)]`` is
    the matrix of ``chi_{m, m + steps[k]}`` in the RREF bases of the two
    spaces, with one row per target basis vector.
    """

    cone: Cone
    lower: tuple[int, ...]
    upper: tuple[int, ...]
    spaces: Mapping[tuple[int, ...], Subspace]
    steps: tuple[tuple[int, ...], ...]
    maps: Mapping[tuple[tuple[int, ...], int], tuple]

    def __post_init__(self):
        bad = self.composition_failures()
        if bad:
            raise ValidationError(f"composition law fails at {bad[0]}")

    def in_box(self, m) -> bool:
        return all(lo <= x <= hi for x, lo, hi in zip(m, self.lower, self.upper))

    def dim(self, m) -> int:
        return self.spaces[m].dim

    def composition_failures(self) -> list:
        out = []
        add = lambda m, g: tuple(x + y for x, y in zip(m, g))  # noqa: E731
        for m in self.spaces:
            for a, b in itertools.combinations(range(len(self.steps)), 2):
                ga, gb = self.steps[a], self.steps[b]
                if all(x == -y for x, y in zip(ga, gb)):
                    ma = add(m, ga)
                    if self.in_box(ma):
                        d = self.dim(m)
                        for first, second in ((a, b), (b, a)):
                            mid = add(m, self.steps[first])
                            if not self.in_box(mid):
                                continue
                            comp = _mul(self.maps[(mid, second)], self.maps[(m, first)], d, self.dim(mid), d)
                            if comp != _identity(d):
                                out.append((m, first, second))
                    continue
                ma, mb, mab = add(m, ga), add(m, gb), add(add(m, ga), gb)
                if not (self.in_box(ma) and self.in_box(mb) and self.in_box(mab)):
                    continue
                d0, da, db, dab = self.dim(m), self.dim(ma), self.dim(mb), self.dim(mab)
                left = _mul(self.maps[(ma, b)], self.maps[(m, a)], dab, da, d0)
                right = _mul(self.maps[(mb, a)], self.maps[(m, b)], dab, db, d0)
                if left != right:
                    out.append((m, a, b))
        return out


def window_steps(fan: Fan, sigma: Cone) -> tuple[tuple[int, ...], ...]:
    positive, lattice = semigroup_basis(fan, sigma)
    steps = list(positive)
    for v in lattice:
        steps.append(v)
        steps.append(tuple(-x for x in v))
    return tuple(steps)


def _box(box, dim):
    box = tuple((int(lo), int(hi)) for lo, hi in box)
    if len(box) != dim:
        raise DimensionError(f"box has {len(box)} coordinates, expected {dim}")
    return box


def make_window(fan: Fan, sigma: Cone, box, space_of, map_of) -> FamilyWindow:
    """Assemble a window from callbacks ``space_of(m)`` and
    ``map_of(m, m2, E_m, E_m2)`` returning a matrix."""
    box = _box(box, fan.dim)
    steps = window_steps(fan, sigma)
    spaces = {m: space_of(m) for m in box_points(box)}
    lower = tuple(lo for lo, _ in box)
    upper = tuple(hi for _, hi in box)
    maps = {}
    for m, s in spaces.items():
        for k, g in enumerate(steps):
            m2 = tuple(x + y for x, y in zip(m, g))
            if m2 in spaces:
                maps[(m, k)] = map_of(m, m2, s, spaces[m2])
    return FamilyWindow(sigma, lower, upper, spaces, steps, maps)


def window_from_multifiltration(fan: Fan, mf: Multifiltration, box) -> FamilyWindow:
    """Window of the sigma-family of a torsion free sheaf; maps are inclusions."""
    _require_smooth(fan, mf.cone)
    return make_window(
        fan,
        mf.cone,
        box,
        lambda m: mf.at_character(fan, m),
        lambda m, m2, s, t: _inclusion_matrix(s, t),
    )


def orbit_closure_window(fan: Fan, sigma: Cone, box) -> FamilyWindow:
    """Window of the structure sheaf of the closed orbit of ``U_sigma``:
    ``Q`` in the degrees orthogonal to sigma, zero maps leaving them."""
    one, zero = Subspace.full(1), Subspace.zero(1)

    def space(m):
        return one if all(dot(m, fan.rays[i]) == 0 for i in sigma.rays) else zero

    def mapping(m, m2, s, t):
        if s.dim and t.dim:
            return ((Fraction(1),),)
        return tuple(() for _ in range(t.dim))

    return make_window(fan, sigma, box, space, mapping)


def check_torsion_free(w: FamilyWindow) -> bool:
    """Every map of the window is injective."""
    for (m, _), mat in w.maps.items():
        d = w.dim(m)
        if d and (not mat or rank(mat) < d):
            return False
    return True


# --------------------------------------------------------------------------
# Klyachko compatibility


class Compatibility(NamedTuple):
    compatible: bool
    decomposition: dict | None


def _lattice_closure(spaces: list[Subspace], limit: int):
    elems = set(spaces)
    if len(elems) > limit:
        raise Inconclusive(f"subspace lattice closure exceeds {limit} elements")
    meets: dict = {}
    joins: dict = {}
    frontier = set(elems)
    while frontier:
        new = set()
        for a in frontier:
            for b in list(elems):
                for table, op in ((meets, Subspace.meet), (joins, Subspace.join)):
                    key = frozenset((a, b))
                    if key not in table:
                        table[key] = op(a, b)
                    c = table[key]
                    if c not in elems and c not in new:
                        new.add(c)
                        if len(elems) + len(new) > limit:
                            raise Inconclusive(f"subspace lattice closure exceeds {limit} elements")
        elems |= new
        frontier = new
    return elems, meets, joins


def is_distributive(spaces: list[Subspace], limit: int = DEFAULT_CLOSURE_LIMIT) -> bool:
    """Whether the meet/join closure of ``spaces`` is a distributive lattice."""
    elems, meets, joins = _lattice_closure(spaces, limit)

    def op(table, fn, a, b):
        key = frozenset((a, b))
        if key not in table:
            table[key] = fn(a, b)
        return table[key]

    elems = sorted(elems, key=lambda s: (s.dim, s.basis))
    for a in elems:
        for b in elems:
            for c in elems:
                lhs = op(meets, Subspace.meet, a, op(joins, Subspace.join, b, c))
                rhs = op(joins, Subspace.join, op(meets, Subspace.meet, a, b), op(meets, Subspace.meet, a, c))
                if lhs != rhs:
                    return False
    return True


def _decompose(filtrations: list[Filtration], r: int):
    grid = [f.indices for f in filtrations]
    pieces: dict[tuple[int, ...], Subspace] = {}
    for idx in itertools.product(*grid):
        inside = meet_all((eval_filtration(f, i) for f, i in zip(filtrations, idx)), r)
        below = join_all((s for j, s in pieces.items() if _leq(j, idx)), r)
        piece = below.meet(inside).complement_in(inside)
        if not piece.is_zero:
            pieces[idx] = piece
    if sum(s.dim for s in pieces.values()) != r:
        return None
    if join_all(pieces.values(), r).dim != r:
        return None
    for k, f in enumerate(filtrations):
        for i in f.indices:
            total = join_all((s for idx, s in pieces.items() if idx[k] <= i), r)
            if total != eval_filtration(f, i):
                return None
    return pieces


def check_compatibility(
    fan: Fan, data: KlyachkoData, sigma: Cone, limit: int = DEFAULT_CLOSURE_LIMIT
) -> Compatibility:
    """Decide whether the filtrations of the rays of ``sigma`` admit a common
    eigenspace decomposition ``E = sum E_m`` with ``E^rho(i) = sum_{<m,n_rho> <= i} E_m``.

    Keys of the returned decomposition are index vectors over ``sigma``'s rays
    (the values of ``<m, n(rho)>``); on a smooth cone every index vector is
    realized by a character.
    """
    data.check_fan(fan)
    _require_smooth(fan, sigma)
    filts = [data.filtrations[i] for i in sigma.rays]
    r = data.rank
    if not filts:
        return Compatibility(True, {(): Subspace.full(r)} if r else {})
    if len(filts) >= 3:
        spaces = [Subspace.zero(r), Subspace.full(r)] + [s for f in filts for _, s in f.jumps]
        if not is_distributive(spaces, limit):
            return Compatibility(False, None)
    pieces = _decompose(filts, r)
    if pieces is None:
        if len(filts) <= 2:
            raise AssertionError("two filtrations always admit a common splitting")
        return Compatibility(False, None)
    return Compatibility(True, pieces)
