"""Integer lattices M and N, the pairing between them, Smith normal form and
the presentation of the Chow group ``A`` as the cokernel of ``M -> Z^rays``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from ._matrix import det, identity, matmul, transpose
from .errors import DimensionError, PreconditionError

__all__ = [
    "LatticePoint",
    "pairing",
    "SnfDecomposition",
    "smith_normal_form",
    "ChowPresentation",
    "chow_presentation",
]


@dataclass(frozen=True)
class LatticePoint:
    """An integer vector tagged as living in ``M`` (characters) or ``N``."""

    coords: tuple[int, ...]
    side: str = "N"

    def __post_init__(self):
        if self.side not in ("M", "N"):
            raise ValueError(f"side must be 'M' or 'N', got {self.side!r}")
        coords = tuple(self.coords)
        if any(not isinstance(x, int) or isinstance(x, bool) for x in coords):
            raise TypeError("lattice coordinates must be integers")
        object.__setattr__(self, "coords", coords)

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]


def _coords(x) -> tuple[int, ...]:
    return x.coords if isinstance(x, LatticePoint) else tuple(x)


def pairing(m, n) -> int:
    """The natural pairing <m, n> between M and N."""
    if isinstance(m, LatticePoint) and m.side != "M":
        raise DimensionError("first argument of the pairing must be a character (M)")
    if isinstance(n, LatticePoint) and n.side != "N":
        raise DimensionError("second argument of the pairing must lie in N")
    a, b = _coords(m), _coords(n)
    if len(a) != len(b):
        raise DimensionError(f"cannot pair vectors of length {len(a)} and {len(b)}")
    return sum(x * y for x, y in zip(a, b))


@dataclass(frozen=True)
class SnfDecomposition:
    """``left @ input @ right == diag`` with unimodular ``left`` and ``right``."""

    left: tuple[tuple[int, ...], ...]
    diag: tuple[tuple[int, ...], ...]
    right: tuple[tuple[int, ...], ...]

    @property
    def invariants(self) -> tuple[int, ...]:
        """Nonzero diagonal entries d_1 | d_2 | ..."""
        k = min(len(self.diag), len(self.right))
        return tuple(self.diag[i][i] for i in range(k) if self.diag[i][i] != 0)

    @property
    def rank(self) -> int:
        return len(self.invariants)


def smith_normal_form(mat: Sequence[Sequence[int]], ncols: int | None = None) -> SnfDecomposition:
    """Smith normal form with a fixed pivot rule.

    The pivot is always the nonzero entry of smallest absolute value in the
    remaining submatrix, ties broken by row-major position. ``ncols`` is only
    needed for matrices with zero rows.
    """
    a = [[int(x) for x in row] for row in mat]
    m = len(a)
    n = len(a[0]) if m else (ncols or 0)
    if any(len(row) != n for row in a):
        raise DimensionError("ragged matrix")
    u = identity(m)
    v = identity(n)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):
        for row in a:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] != 0 and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        p = a[t][t]
        clean = True
        for i in range(t + 1, m):
            if a[i][t]:
                add_row(i, t, -(a[i][t] // p))
                clean = clean and a[i][t] == 0
        for j in range(t + 1, n):
            if a[t][j]:
                add_col(j, t, -(a[t][j] // p))
                clean = clean and a[t][j] == 0
        if not clean:
            continue
        bad = next(
            (i for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % p),
            None,
        )
        if bad is not None:
            add_row(t, bad, 1)
            continue
        if p < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    freeze = lambda mm: tuple(tuple(r) for r in mm)  # noqa: E731
    return SnfDecomposition(left=freeze(u), diag=freeze(a), right=freeze(v))


def _hermite_rows(rows: list[list[int]]) -> list[list[int]]:
    """Row-style Hermite form of a full-row-rank integer matrix (unimodular row ops)."""
    rows = [list(r) for r in rows]
    ncols = len(rows[0]) if rows else 0
    r = 0
    for c in range(ncols):
        if r == len(rows):
            break
        while True:
            nz = [i for i in range(r, len(rows)) if rows[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: (abs(rows[i][c]), i))
            rows[r], rows[piv] = rows[piv], rows[r]
            done = True
            for i in range(r + 1, len(rows)):
                if rows[i][c]:
                    q = rows[i][c] // rows[r][c]
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
                    done = done and rows[i][c] == 0
            if done:
                break
        if rows[r][c] == 0:
            continue
        if rows[r][c] < 0:
            rows[r] = [-x for x in rows[r]]
        for i in range(r):
            q = rows[i][c] // rows[r][c]
            if q:
                rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
        r += 1
    return rows


@dataclass(frozen=True)
class ChowPresentation:
    """``A = Z^free_rank + sum Z/d_i`` as the cokernel of the ray matrix.

    ``projection`` has one row per free coordinate followed by one row per
    invariant factor; applying it to a vector of ``Z^rays`` (and reducing the
    torsion rows modulo their factor) gives the class in ``A``.
    """

    ray_matrix: tuple[tuple[int, ...], ...]
    free_rank: int
    invariant_factors: tuple[int, ...]
    projection: tuple[tuple[int, ...], ...]
    class_of: tuple[tuple[int, ...], ...]

    def project(self, vector: Sequence[int]) -> tuple[int, ...]:
        if len(vector) != len(self.ray_matrix):
            raise DimensionError(
                f"fine degree has length {len(vector)}, fan has {len(self.ray_matrix)} rays"
            )
        out = []
        for k, row in enumerate(self.projection):
            val = sum(x * y for x, y in zip(row, vector))
            if k >= self.free_rank:
                val %= self.invariant_factors[k - self.free_rank]
            out.append(val)
        return tuple(out)

    def is_zero(self, cls: Sequence[int]) -> bool:
        return all(x == 0 for x in cls)

    def describe(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts += [f"Z/{d}" for d in self.invariant_factors]
        return " + ".join(parts) if parts else "0"


def chow_presentation(fan) -> ChowPresentation:
    """Cokernel of ``M -> Z^rays, m -> (<m, n(rho)>)``, presented via SNF."""
    rays = [list(r) for r in fan.rays]
    nrays, dim = len(rays), fan.dim
    snf = smith_normal_form(rays, ncols=dim)
    rk = snf.rank
    if rk < dim:
        raise PreconditionError(
            f"rays span a sublattice of rank {rk} < {dim}; the fan lies in a proper subspace"
        )
    factors = snf.invariants
    free_rows = [list(snf.left[i]) for i in range(rk, nrays)]
    free_rows = _hermite_rows(free_rows)
    torsion = []
    tor_rows = []
    for i, d in enumerate(factors):
        if d > 1:
            torsion.append(d)
            tor_rows.append([x % d for x in snf.left[i]])
    projection = tuple(tuple(r) for r in free_rows + tor_rows)
    pres = ChowPresentation(
        ray_matrix=tuple(tuple(r) for r in rays),
        free_rank=nrays - rk,
        invariant_factors=tuple(torsion),
        projection=projection,
        class_of=(),
    )
    classes = tuple(pres.project([int(i == k) for i in range(nrays)]) for k in range(nrays))
    pres = replace(pres, class_of=classes)
    # exactness: the image of every basis vector of M is zero in A
    for col in transpose(rays, dim):
        assert pres.is_zero(pres.project(col)), "M -> Z^rays -> A is not zero"
    return pres


def unimodular(mat) -> bool:
    return abs(det([list(r) for r in mat])) == 1


def check_snf(mat, snf: SnfDecomposition) -> bool:
    """True iff ``snf`` is a valid Smith decomposition of ``mat``."""
    m = len(mat)
    n = len(snf.right)
    if m and n and matmul(matmul(snf.left, mat), snf.right) != [list(r) for r in snf.diag]:
        return False
    if not (unimodular(snf.left) and unimodular(snf.right)):
        return False
    for i in range(m):
        for j in range(n):
            if i != j and snf.diag[i][j] != 0:
                return False
    d = [snf.diag[i][i] for i in range(min(m, n))]
    if any(x < 0 for x in d):
        return False
    for x, y in zip(d, d[1:]):
        if x == 0 and y != 0:
            return False
        if x != 0 and y % x:
            return False
    return True
