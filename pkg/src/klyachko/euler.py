"""Euler-type resolutions of rank-2 equivariant bundles on smooth complete
toric surfaces:

    0 -> O^(n-2) --A--> sum_rho O(i^rho D_rho) -> E -> 0

The coefficient matrix ``A'`` is a kernel basis of ``Q^rays -> E^0``,
``e_rho -> v_rho``, where ``v_rho`` spans the line of ray rho.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

from ._matrix import det, nullspace, primitive, rank, rref, transpose
from .coxring import Monomial, MonomialMatrix, fitting_pair_support, pair_minor
from .errors import (
    DimensionError,
    GenericityViolation,
    NotSmoothComplete,
    RankDefect,
    SplitCase,
    ValidationError,
)
from .families import Filtration, KlyachkoData, Report, Subspace
from .fan import Fan, is_complete, is_smooth

Triple = tuple[int, int, Subspace]


def _line(vec) -> Subspace:
    s = Subspace.span([vec], 2)
    if s.dim != 1:
        raise ValidationError(f"{tuple(vec)} does not span a line")
    return s


@dataclass(frozen=True)
class Rank2Bundle:
    """Per ray a triple ``(i1, i2, L)``: the filtration of ``Q^2`` is 0 below
    ``i1``, the line ``L`` on ``[i1, i2)`` and everything from ``i2`` on."""

    triples: tuple[Triple, ...]

    def __post_init__(self):
        out = []
        for k, t in enumerate(self.triples):
            i1, i2, line = t
            if not isinstance(line, Subspace):
                line = _line(line)
            if line.ambient_dim != 2 or line.dim != 1:
                raise ValidationError(f"ray {k}: third entry must be a line in Q^2")
            if int(i1) > int(i2):
                raise ValidationError(f"ray {k}: i1 = {i1} exceeds i2 = {i2}")
            out.append((int(i1), int(i2), line))
        object.__setattr__(self, "triples", tuple(out))

    @classmethod
    def from_rows(cls, triples: Sequence[tuple[int, int, Sequence]]) -> "Rank2Bundle":
        return cls(tuple((i1, i2, _line(row)) for i1, i2, row in triples))

    @classmethod
    def from_klyachko(cls, data: KlyachkoData) -> "Rank2Bundle":
        if data.rank != 2:
            raise DimensionError(f"rank-2 data expected, got rank {data.rank}")
        out = []
        for k, f in enumerate(data.filtrations):
            if len(f.jumps) == 1:
                raise SplitCase(f"ray {k} jumps straight from 0 to Q^2 at {f.jumps[0][0]}")
            (i1, line), (i2, _) = f.jumps
            out.append((i1, i2, line))
        return cls(tuple(out))

    def to_klyachko(self) -> KlyachkoData:
        full = Subspace.full(2)
        filts = []
        for i1, i2, line in self.triples:
            jumps = ((i1, full),) if i1 == i2 else ((i1, line), (i2, full))
            filts.append(Filtration(2, jumps))
        return KlyachkoData(2, tuple(filts))

    def shifted(self, offsets: Sequence[int]) -> "Rank2Bundle":
        """Twist: ray rho's indices move by ``offsets[rho]``."""
        if len(offsets) != len(self.triples):
            raise DimensionError("one offset per ray required")
        return Rank2Bundle(tuple((a + o, b + o, l) for (a, b, l), o in zip(self.triples, offsets)))

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple(b - a for a, b, _ in self.triples)

    @property
    def lines(self) -> tuple[Subspace, ...]:
        return tuple(l for _, _, l in self.triples)


def normalize_twist(b: Rank2Bundle) -> tuple[tuple[int, ...], Rank2Bundle]:
    """Twist so that every ``i2`` becomes 0; returns ``(twist, normalized)``."""
    twist = tuple(-i2 for _, i2, _ in b.triples)
    return twist, b.shifted(twist)


@dataclass(frozen=True)
class EulerResolution:
    twist: tuple[int, ...]
    exponents: tuple[int, ...]
    coeff_matrix: tuple[tuple[int, ...], ...]
    monomial_matrix: MonomialMatrix
    report: Report = field(default_factory=Report, compare=False)


def _check_surface(fan: Fan):
    if fan.dim != 2:
        raise NotSmoothComplete(f"fan has dimension {fan.dim}, a surface fan is required")
    if fan.nrays < 3:
        raise NotSmoothComplete("a complete surface fan needs at least three rays")
    if not is_smooth(fan):
        raise NotSmoothComplete("fan is not smooth")
    if not is_complete(fan):
        raise NotSmoothComplete("fan is not complete")


def _spanning_vectors(b: Rank2Bundle) -> list[tuple[Fraction, ...]]:
    return [line.basis[0] for line in b.lines]


def kernel_basis(vectors: Sequence[Sequence]) -> tuple[tuple[int, ...], ...]:
    """Canonical integer basis of ``{a : sum a_rho v_rho = 0}`` as an
    ``n x k`` matrix: RREF rows, each scaled to a primitive integer vector."""
    n = len(vectors)
    mat = transpose(vectors, n)
    basis = nullspace(mat, n)
    if not basis:
        return tuple(() for _ in range(n))
    red, _ = rref(basis, n)
    cols = [primitive(row) for row in red]
    return tuple(tuple(c[r] for c in cols) for r in range(n))


def _monomial_matrix(coeffs, exponents) -> MonomialMatrix:
    n = len(coeffs)
    k = len(coeffs[0]) if n else 0
    monos = tuple(tuple(Monomial.var(n, r, exponents[r]) for _ in range(k)) for r in range(n))
    fr = tuple(tuple(Fraction(x) for x in row) for row in coeffs)
    return MonomialMatrix(fr, monos)


def build_euler_resolution(fan: Fan, b: Rank2Bundle) -> EulerResolution:
    _check_surface(fan)
    n = fan.nrays
    if len(b.triples) != n:
        raise ValidationError(f"bundle has {len(b.triples)} triples, fan has {n} rays")
    twist, nb = normalize_twist(b)
    exps = nb.exponents
    split = [k for k, e in enumerate(exps) if e == 0]
    if split:
        raise SplitCase(f"i1 = i2 on ray(s) {split}; the filtration splits")
    for c in fan.two_cones():
        p, q = c.rays
        if nb.lines[p] == nb.lines[q]:
            raise GenericityViolation(f"adjacent rays {p} and {q} carry the same line {nb.lines[p]}")
    coeffs = kernel_basis(_spanning_vectors(nb))
    if any(len(row) != n - 2 for row in coeffs) or rank(coeffs) != n - 2:
        raise RankDefect(f"kernel has dimension {len(coeffs[0]) if coeffs else 0}, expected {n - 2}")
    support = fitting_pair_support(fan, coeffs)
    if not support.bundle_condition:
        raise GenericityViolation("an adjacent-pair minor of the coefficient matrix vanishes")
    res = EulerResolution(twist, exps, coeffs, _monomial_matrix(coeffs, exps))
    return replace(res, report=verify_resolution(fan, b, res))


def quotient_vectors(coeffs: Sequence[Sequence]) -> list[tuple[Fraction, ...]]:
    """Images of the unit vectors in ``Q^n / colspan(coeffs)``, in the
    coordinates given by the RREF basis of the left kernel."""
    n = len(coeffs)
    k = len(coeffs[0]) if n else 0
    left = nullspace(transpose(coeffs, n), n) if k else [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    red, _ = rref(left, n)
    return [tuple(row[r] for row in red) for r in range(n)]


def cokernel_filtrations(fan: Fan, res: EulerResolution) -> Rank2Bundle:
    """Quotient filtrations ``G(i) / F(i)`` of the resolution's middle term."""
    n = fan.nrays
    if len(res.coeff_matrix) != n:
        raise DimensionError(f"coefficient matrix has {len(res.coeff_matrix)} rows, fan has {n} rays")
    images = quotient_vectors(res.coeff_matrix)
    if any(len(v) != 2 for v in images):
        raise RankDefect("cokernel of the coefficient matrix is not two-dimensional")
    out = []
    for k, v in enumerate(images):
        assert any(v), f"unit vector {k} dies in the cokernel"
        out.append((-res.exponents[k], 0, _line(v)))
    return Rank2Bundle(tuple(out))


def _cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


def solve_line_map(sources: Sequence[Sequence], lines: Sequence[Subspace]):
    """Some ``g`` in GL2(Q) with ``g(sources[k])`` spanning ``lines[k]`` for all k, or None.

    ``g`` is fixed by two independent matches plus one further ray for the
    relative scale; the remaining rays are then checked.
    """
    n = len(sources)
    pair = next(((p, q) for p in range(n) for q in range(p + 1, n) if _cross(sources[p], sources[q]) != 0), None)
    if pair is None:
        return None
    p, q = pair
    bp, bq = lines[p].basis[0], lines[q].basis[0]
    if _cross(bp, bq) == 0:
        return None
    sp, sq = sources[p], sources[q]
    dpq = _cross(sp, sq)
    mu = Fraction(1)
    for r in range(n):
        # sources[r] = a * sp + c * sq
        a = Fraction(_cross(sources[r], sq), dpq)
        c = Fraction(_cross(sp, sources[r]), dpq)
        if a and c:
            br = lines[r].basis[0]
            denom = c * _cross(bq, br)
            if denom == 0:
                return None
            mu = -a * _cross(bp, br) / denom
            if mu == 0:
                return None
            break
    # g sp = bp, g sq = mu * bq, i.e. g = T S^-1
    t = [[bp[0], mu * bq[0]], [bp[1], mu * bq[1]]]
    s_inv = [[Fraction(sq[1], dpq), Fraction(-sq[0], dpq)], [Fraction(-sp[1], dpq), Fraction(sp[0], dpq)]]
    g = tuple(tuple(sum(t[i][k] * s_inv[k][j] for k in range(2)) for j in range(2)) for i in range(2))
    for v, line in zip(sources, lines):
        w = [g[0][0] * v[0] + g[0][1] * v[1], g[1][0] * v[0] + g[1][1] * v[1]]
        if not any(w) or not line.contains(w):
            return None
    return g


def verify_resolution(fan: Fan, b: Rank2Bundle, res: EulerResolution) -> Report:
    """Independent checks of a resolution against the bundle it should present."""
    rep = Report()
    n = fan.nrays
    coeffs = res.coeff_matrix
    shape_ok = len(coeffs) == n and all(len(row) == n - 2 for row in coeffs) and len(b.triples) == n
    rep.checks["shape"] = shape_ok
    if not shape_ok:
        for key in ("rank", "adjacent_minors", "kernel", "degrees", "round_trip"):
            rep.checks[key] = False
        return rep
    rep.checks["rank"] = rank(coeffs) == n - 2 if n > 2 else True
    minors = {}
    for c in fan.two_cones():
        p, q = c.rays
        minors[f"{p},{q}"] = pair_minor(coeffs, p, q)
    rep.details["adjacent_minors"] = minors
    rep.checks["adjacent_minors"] = all(v != 0 for v in minors.values())

    twist, nb = normalize_twist(b)
    vs = _spanning_vectors(nb)
    rep.checks["kernel"] = all(
        sum(vs[r][a] * coeffs[r][j] for r in range(n)) == 0 for a in range(2) for j in range(n - 2)
    )

    mm = res.monomial_matrix
    deg_ok = mm.shape == (n, n - 2) and tuple(res.exponents) == nb.exponents
    for r in range(n):
        for j in range(n - 2):
            if not deg_ok:
                break
            want = tuple(res.exponents[r] if k == r else 0 for k in range(n))
            deg_ok = mm.coeffs[r][j] == coeffs[r][j] and (
                mm.coeffs[r][j] == 0 or mm.monomials[r][j].exponents == want
            )
    rep.checks["degrees"] = deg_ok

    try:
        cok = cokernel_filtrations(fan, res)
    except (RankDefect, AssertionError, ValidationError) as exc:
        rep.checks["round_trip"] = False
        rep.notes.append(f"cokernel: {exc}")
        return rep
    same_indices = all(c[:2] == t[:2] for c, t in zip(cok.triples, nb.triples))
    g = solve_line_map(quotient_vectors(coeffs), nb.lines)
    rep.checks["round_trip"] = same_indices and g is not None
    if g is not None:
        rep.details["basis_change"] = g
        assert det(g) != 0
    return rep
