"""Fine-graded combinatorics of the homogeneous coordinate ring
``S = Q[x_rho : rho a ray]``.

Everything here is indexed by ray position in the fan's ray table.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from ._matrix import det, dot
from .errors import DimensionError, PreconditionError
from .families import FamilyWindow, Filtration, KlyachkoData, Subspace, make_window
from .fan import Cone, Fan
from .lattice import ChowPresentation, chow_presentation


@dataclass(frozen=True, order=True)
class Monomial:
    """``prod x_rho^exponents[rho]`` with nonnegative exponents."""

    exponents: tuple[int, ...]

    def __post_init__(self):
        exps = tuple(int(e) for e in self.exponents)
        if any(e < 0 for e in exps):
            raise ValueError(f"negative exponent in {exps}")
        object.__setattr__(self, "exponents", exps)

    @classmethod
    def one(cls, n: int) -> "Monomial":
        return cls((0,) * n)

    @classmethod
    def var(cls, n: int, i: int, power: int = 1) -> "Monomial":
        return cls(tuple(power if k == i else 0 for k in range(n)))

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def divides(self, other: "Monomial") -> bool:
        return all(a <= b for a, b in zip(self.exponents, other.exponents))

    @property
    def degree(self) -> tuple[int, ...]:
        """The fine degree in ``Z^rays``."""
        return self.exponents

    def __str__(self):
        parts = [f"x{i}" if e == 1 else f"x{i}^{e}" for i, e in enumerate(self.exponents) if e]
        return "*".join(parts) if parts else "1"


def sigma_hat_monomial(fan: Fan, sigma: Cone) -> Monomial:
    """Product of the variables of the rays not in sigma."""
    return Monomial(tuple(0 if i in sigma.rays else 1 for i in range(fan.nrays)))


def minimal_generators(monomials: Sequence[Monomial]) -> list[Monomial]:
    """Drop monomials divisible by another one; keeps first-seen order."""
    out: list[Monomial] = []
    for m in monomials:
        if m in out:
            continue
        if any(g.divides(m) for g in monomials if g != m):
            continue
        out.append(m)
    return out


def irrelevant_ideal(fan: Fan) -> list[Monomial]:
    return minimal_generators([sigma_hat_monomial(fan, c) for c in fan.max_cones])


@functools.lru_cache(maxsize=256)
def _chow(fan: Fan) -> ChowPresentation:
    return chow_presentation(fan)


def fine_degree_class(fan: Fan, degree: Sequence[int]) -> tuple[int, ...]:
    """Image of a fine degree under ``Z^rays -> A``."""
    return _chow(fan).project(tuple(degree))


def character_degree(fan: Fan, m: Sequence[int]) -> tuple[int, ...]:
    """``j(m) = (<m, n(rho)>)_rho``."""
    if len(m) != fan.dim:
        raise DimensionError(f"character {tuple(m)} does not have length {fan.dim}")
    return tuple(dot(m, r) for r in fan.rays)


def linebundle_filtrations(fan: Fan, shift: Sequence[int]) -> KlyachkoData:
    """Filtrations of ``O(sum shift_rho D_rho)``: ray rho jumps from 0 to Q at ``-shift_rho``."""
    if len(shift) != fan.nrays:
        raise DimensionError(f"shift has length {len(shift)}, fan has {fan.nrays} rays")
    q = Subspace.full(1)
    return KlyachkoData(1, tuple(Filtration(1, ((-int(n), q),)) for n in shift))


def cox_module_window(
    fan: Fan, ideal: Sequence[Monomial], shift: Sequence[int], sigma: Cone, box
) -> FamilyWindow:
    """Window of the sigma-family of the shifted monomial ideal ``I(shift)``.

    After inverting ``x^sigma_hat`` only the exponents of the rays of sigma
    matter: ``E_m = Q`` iff some generator ``g`` has ``g_rho <= (j(m) + shift)_rho``
    for every ray rho of sigma.
    """
    fan.require(sigma)
    if len(shift) != fan.nrays:
        raise DimensionError(f"shift has length {len(shift)}, fan has {fan.nrays} rays")
    one, zero = Subspace.full(1), Subspace.zero(1)

    def space(m):
        deg = [a + b for a, b in zip(character_degree(fan, m), shift)]
        hit = any(all(g.exponents[i] <= deg[i] for i in sigma.rays) for g in ideal)
        return one if hit else zero

    def mapping(m, m2, s, t):
        if s.dim and t.dim:
            return ((Fraction(1),),)
        return tuple(() for _ in range(t.dim))

    return make_window(fan, sigma, box, space, mapping)


def orbit_ideal(fan: Fan, sigma: Cone) -> list[Monomial]:
    """Generators ``x_rho, rho in sigma(1)`` of the ideal of the orbit closure V(sigma)."""
    return [Monomial.var(fan.nrays, i) for i in sigma.rays]


class FittingSupport(NamedTuple):
    pairs: frozenset
    bundle_condition: bool


def pair_minor(coeffs: Sequence[Sequence], phi: int, psi: int):
    """Determinant of the square submatrix omitting rows ``phi`` and ``psi``."""
    return det([list(row) for k, row in enumerate(coeffs) if k not in (phi, psi)])


def fitting_pair_support(fan: Fan, coeffs: Sequence[Sequence]) -> FittingSupport:
    """Ray pairs whose complementary maximal minor of ``coeffs`` is nonzero.

    ``bundle_condition`` holds iff every pair of rays spanning a 2-cone is
    among them, i.e. the Fitting ideal contains a power of the irrelevant ideal.
    """
    n = fan.nrays
    if n < 3:
        raise PreconditionError("need at least three rays")
    if len(coeffs) != n or any(len(row) != n - 2 for row in coeffs):
        raise DimensionError(f"coefficient matrix must be {n} x {n - 2}")
    pairs = frozenset(
        (phi, psi) for phi, psi in itertools.combinations(range(n), 2) if pair_minor(coeffs, phi, psi) != 0
    )
    adjacent = [c.rays for c in fan.two_cones()]
    return FittingSupport(pairs, bool(adjacent) and all(tuple(a) in pairs for a in adjacent))


def pair_monomial(exponents: Sequence[int], phi: int, psi: int) -> Monomial:
    """``x^{phi psi}``: product of ``x_rho^{i_rho}`` over rays other than phi, psi."""
    return Monomial(tuple(0 if k in (phi, psi) else e for k, e in enumerate(exponents)))


def fitting_ideal(coeffs: Sequence[Sequence], exponents: Sequence[int]) -> list[Monomial]:
    """Minimal monomial generators of the ideal of maximal minors of the
    monomial matrix ``(coeffs[rho][i] * x_rho^exponents[rho])``."""
    n = len(coeffs)
    gens = [
        pair_monomial(exponents, phi, psi)
        for phi, psi in itertools.combinations(range(n), 2)
        if pair_minor(coeffs, phi, psi) != 0
    ]
    return minimal_generators(gens)


@dataclass(frozen=True)
class MonomialMatrix:
    """Matrix with entries ``coeff * monomial``; a zero coefficient means a zero entry."""

    coeffs: tuple[tuple[Fraction, ...], ...]
    monomials: tuple[tuple[Monomial, ...], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.coeffs), len(self.coeffs[0]) if self.coeffs else 0

    def entry(self, i: int, j: int) -> tuple[Fraction, Monomial] | None:
        c = self.coeffs[i][j]
        return None if c == 0 else (c, self.monomials[i][j])

    def entry_str(self, i: int, j: int) -> str:
        e = self.entry(i, j)
        if e is None:
            return "0"
        c, mono = e
        if str(mono) == "1":
            return str(c)
        if c == 1:
            return str(mono)
        if c == -1:
            return "-" + str(mono)
        return f"{c}*{mono}"
