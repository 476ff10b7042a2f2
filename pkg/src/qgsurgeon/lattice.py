"""Exact integer lattice tools: determinant, rank, Smith normal form, torsion.

Matrices are lists of rows of Python ints, so every computation is exact at
any size.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .tsing import chain_gram

__all__ = [
    "LatticeError",
    "SNFCheckError",
    "AbelianGroupShape",
    "GramLattice",
    "determinant",
    "rank",
    "rank_lower_bound",
    "smith_normal_form",
    "invariant_factors",
    "discriminant_group",
    "quotient_torsion",
    "matmul",
    "read_matrix",
]

Matrix = list[list[int]]


class LatticeError(ValueError):
    pass


class SNFCheckError(AssertionError):
    """A Smith normal form failed its own U*M*V = D / unimodularity check."""


def _copy(m: Sequence[Sequence[int]]) -> Matrix:
    rows = [list(map(int, r)) for r in m]
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise LatticeError("ragged matrix")
    return rows


def _shape(m: Matrix) -> tuple[int, int]:
    return len(m), (len(m[0]) if m else 0)


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    cols = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in a]


def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _bareiss(m: Matrix) -> tuple[int, int]:
    """Fraction-free elimination; returns (rank, signed last pivot).

    For a square nonsingular input the second value is the determinant.
    """
    a = _copy(m)
    rows, cols = _shape(a)
    sign, prev, r = 1, 1, 0
    for c in range(cols):
        if r == rows:
            break
        piv = next((i for i in range(r, rows) if a[i][c]), None)
        if piv is None:
            continue
        if piv != r:
            a[r], a[piv] = a[piv], a[r]
            sign = -sign
        for i in range(r + 1, rows):
            for j in range(c + 1, cols):
                a[i][j] = (a[i][j] * a[r][c] - a[i][c] * a[r][j]) // prev
            a[i][c] = 0
        prev = a[r][c]
        r += 1
    return r, sign * prev


def determinant(m: Sequence[Sequence[int]]) -> int:
    a = _copy(m)
    n, k = _shape(a)
    if n != k:
        raise LatticeError(f"determinant of a {n}x{k} matrix")
    if n == 0:
        return 1
    r, last = _bareiss(a)
    return last if r == n else 0


def rank(m: Sequence[Sequence[int]]) -> int:
    a = _copy(m)
    if not a or not a[0]:
        return 0
    return _bareiss(a)[0]


def rank_lower_bound(m: Sequence[Sequence[int]]) -> int:
    """Rank over Q of an intersection matrix.

    When the rows are classes of curves, this bounds the rank of the lattice
    they span (the Picard number, for a surface) from below.
    """
    return rank(m)


def smith_normal_form(m: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(U, D, V)`` with ``U M V = D``, U and V unimodular.

    D is diagonal with nonnegative entries ``d_1 | d_2 | ...``.  Pivots are
    the smallest nonzero absolute value in the active block, ties broken by
    lowest row then lowest column.  The result is checked before returning.
    """
    d = _copy(m)
    rows, cols = _shape(d)
    u = _identity(rows)
    v = _identity(cols)

    def swap_rows(i: int, j: int) -> None:
        if i != j:
            d[i], d[j] = d[j], d[i]
            u[i], u[j] = u[j], u[i]

    def swap_cols(i: int, j: int) -> None:
        if i != j:
            for row in d:
                row[i], row[j] = row[j], row[i]
            for row in v:
                row[i], row[j] = row[j], row[i]

    def add_row(dst: int, src: int, k: int) -> None:  # row dst += k * row src
        d[dst] = [x + k * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(dst: int, src: int, k: int) -> None:  # col dst += k * col src
        for row in d:
            row[dst] += k * row[src]
        for row in v:
            row[dst] += k * row[src]

    for t in range(min(rows, cols)):
        while True:
            best = None
            for i in range(t, rows):
                for j in range(t, cols):
                    x = abs(d[i][j])
                    if x and (best is None or x < best[0]):
                        best = (x, i, j)
            if best is None:
                break
            _, pi, pj = best
            swap_rows(t, pi)
            swap_cols(t, pj)
            p = d[t][t]
            dirty = False
            for i in range(t + 1, rows):
                if d[i][t]:
                    add_row(i, t, -(d[i][t] // p))
                    dirty = dirty or d[i][t] != 0
            for j in range(t + 1, cols):
                if d[t][j]:
                    add_col(j, t, -(d[t][j] // p))
                    dirty = dirty or d[t][j] != 0
            if dirty:
                continue
            # pivot must divide the rest of the block
            bad = next(
                (i for i in range(t + 1, rows) for j in range(t + 1, cols) if d[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if t < rows and t < cols and d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]

    _self_check(m, u, d, v)
    return u, d, v


def _self_check(m, u: Matrix, d: Matrix, v: Matrix) -> None:
    rows, cols = _shape(d)
    if rows and cols and matmul(matmul(u, _copy(m)), v) != d:
        raise SNFCheckError("U*M*V != D")
    if abs(determinant(u)) != 1 or abs(determinant(v)) != 1:
        raise SNFCheckError("transform is not unimodular")
    diag = []
    for i in range(rows):
        for j in range(cols):
            if i != j and d[i][j]:
                raise SNFCheckError("D is not diagonal")
        if i < cols:
            diag.append(d[i][i])
    nz = [x for x in diag if x]
    if any(x < 0 for x in diag) or diag[: len(nz)] != nz:
        raise SNFCheckError("D diagonal is not nonnegative with zeros last")
    if any(b % a for a, b in zip(nz, nz[1:])):
        raise SNFCheckError("D diagonal is not a divisibility chain")


def invariant_factors(m: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero diagonal entries of the Smith normal form."""
    _, d, _ = smith_normal_form(m)
    rows, cols = _shape(d)
    return [d[i][i] for i in range(min(rows, cols)) if d[i][i]]


@dataclass(frozen=True)
class AbelianGroupShape:
    rank: int = 0
    torsion: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.rank < 0:
            raise LatticeError("negative rank")
        if any(t < 2 for t in self.torsion):
            raise LatticeError(f"torsion factors must exceed 1: {self.torsion}")
        if any(b % a for a, b in zip(self.torsion, self.torsion[1:])):
            raise LatticeError(f"torsion factors must form a divisibility chain: {self.torsion}")

    @property
    def order(self) -> int:
        """Order of the torsion part."""
        out = 1
        for t in self.torsion:
            out *= t
        return out

    @property
    def is_cyclic(self) -> bool:
        return self.rank == 0 and len(self.torsion) <= 1

    def __str__(self) -> str:
        parts = ["Z"] * (self.rank > 0)
        if self.rank > 1:
            parts = [f"Z^{self.rank}"]
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"

    def as_dict(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}


@dataclass(frozen=True)
class GramLattice:
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        m = self.matrix
        if any(len(r) != len(m) for r in m):
            raise LatticeError("Gram matrix must be square")
        if any(m[i][j] != m[j][i] for i in range(len(m)) for j in range(i)):
            raise LatticeError("Gram matrix must be symmetric")

    @classmethod
    def of(cls, m: Sequence[Sequence[int]]) -> "GramLattice":
        return cls(tuple(tuple(int(x) for x in r) for r in m))

    @classmethod
    def of_chain(cls, weights: Sequence[int]) -> "GramLattice":
        return cls.of(chain_gram(weights))

    @property
    def rows(self) -> Matrix:
        return [list(r) for r in self.matrix]

    def determinant(self) -> int:
        return determinant(self.rows)


def _shape_from_diagonal(diag: Sequence[int], ambient_rank: int) -> AbelianGroupShape:
    nz = [x for x in diag if x]
    return AbelianGroupShape(
        rank=ambient_rank - len(nz),
        torsion=tuple(x for x in nz if x > 1),
    )


def discriminant_group(lat: GramLattice | Sequence[Sequence[int]]) -> AbelianGroupShape:
    """Cokernel of the Gram map Z^r -> Z^r; finite for a nondegenerate lattice."""
    if not isinstance(lat, GramLattice):
        lat = GramLattice.of(lat)
    m = lat.rows
    if not m:
        return AbelianGroupShape()
    if determinant(m) == 0:
        raise LatticeError("degenerate Gram matrix has an infinite discriminant group")
    return _shape_from_diagonal(invariant_factors(m), len(m))


def quotient_torsion(basis_rank: int, sub: Sequence[Sequence[int]]) -> AbelianGroupShape:
    """Shape of ``Z^basis_rank / span(sub)``."""
    for vec in sub:
        if len(vec) != basis_rank:
            raise LatticeError(f"vector {list(vec)} does not have length {basis_rank}")
    if not sub:
        return AbelianGroupShape(rank=basis_rank)
    return _shape_from_diagonal(invariant_factors(sub), basis_rank)


def read_matrix(text: str) -> Matrix:
    """Parse ``rows cols`` followed by row-major integers."""
    tokens = text.split()
    try:
        nums = [int(t) for t in tokens]
    except ValueError as exc:
        raise LatticeError(f"matrix file: {exc}") from None
    if len(nums) < 2:
        raise LatticeError("matrix file needs a 'rows cols' header")
    rows, cols = nums[0], nums[1]
    if rows < 0 or cols < 0:
        raise LatticeError("negative matrix dimension")
    body = nums[2:]
    if len(body) != rows * cols:
        raise LatticeError(f"expected {rows * cols} entries, found {len(body)}")
    return [body[i * cols:(i + 1) * cols] for i in range(rows)]
