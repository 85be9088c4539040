"""Square contingency tables with equal margins and the 2x2 swap moves on them.

A table is an n x n matrix of non-negative integers whose row sums and column
sums all equal a common margin r.  The elementary moves add 1 to two cells and
subtract 1 from two cells arranged in a rectangle, which preserves all margins.
Entries are plain Python integers, so arithmetic is exact at any size.

Index convention: moves, supports and error messages use 1-based indices (the
same convention as the file formats); internal array access is 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import NamedTuple, Sequence

from .errors import (
    ColumnSumMismatchError,
    InvalidDimensionError,
    InvalidMoveError,
    NegativeEntryError,
    RowSumMismatchError,
)

Entries = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class ContingencyTable:
    """Validated n x n table with all row and column sums equal to r.

    Instances are immutable and hashable; the row-major entry tuple is the
    canonical serialization order used for vertex indexing everywhere.
    """

    n: int
    r: int
    entries: Entries

    def __getitem__(self, pos: tuple[int, int]) -> int:
        """Entry at 0-based (row, col)."""
        return self.entries[pos[0]][pos[1]]

    def row_major(self) -> tuple[int, ...]:
        """Flat entry vector in canonical (row-major) order."""
        return tuple(x for row in self.entries for x in row)

    def rows(self) -> list[list[int]]:
        """Entries as nested lists (mutable copy, e.g. for JSON output)."""
        return [list(row) for row in self.entries]

    def transpose(self) -> "ContingencyTable":
        return ContingencyTable(
            self.n, self.r, tuple(zip(*self.entries))
        )

    def permute(self, row_perm: Sequence[int], col_perm: Sequence[int]) -> "ContingencyTable":
        """Relabel rows and columns: new[i][j] = old[row_perm[i]][col_perm[j]] (0-based)."""
        ent = tuple(
            tuple(self.entries[row_perm[i]][col_perm[j]] for j in range(self.n))
            for i in range(self.n)
        )
        return ContingencyTable(self.n, self.r, ent)

    def is_permutation_pattern(self) -> bool:
        """True when the only positive entries equal r (an r-scaled permutation matrix)."""
        return all(x in (0, self.r) for row in self.entries for x in row)

    def __str__(self) -> str:
        return "\n".join(" ".join(str(x) for x in row) for row in self.entries)


def validate_table(n: int, r: int, entries: Sequence[Sequence[int]]) -> ContingencyTable:
    """Check shape, non-negativity and both margin constraints; return the table.

    Raises NegativeEntryError, RowSumMismatchError or ColumnSumMismatchError
    with 1-based positions.
    """
    if n < 1:
        raise InvalidDimensionError(f"table dimension must be >= 1, got {n}")
    if r < 0:
        raise InvalidDimensionError(f"margin must be >= 0, got {r}")
    if len(entries) != n or any(len(row) != n for row in entries):
        raise InvalidDimensionError(f"expected an {n}x{n} array of entries")
    for i, row in enumerate(entries):
        for j, x in enumerate(row):
            if not isinstance(x, int) or isinstance(x, bool):
                raise InvalidDimensionError(
                    f"entry at row {i + 1}, column {j + 1} is not an integer: {x!r}"
                )
            if x < 0:
                raise NegativeEntryError(i + 1, j + 1, x)
    for i, row in enumerate(entries):
        s = sum(row)
        if s != r:
            raise RowSumMismatchError(i + 1, s, r)
    for j in range(n):
        s = sum(entries[i][j] for i in range(n))
        if s != r:
            raise ColumnSumMismatchError(j + 1, s, r)
    return ContingencyTable(n, r, tuple(tuple(row) for row in entries))


def scaled_permutation(n: int, r: int, perm: Sequence[int]) -> ContingencyTable:
    """Table with entry r at (i, perm[i]) (0-based) and zeros elsewhere."""
    ent = tuple(
        tuple(r if j == perm[i] else 0 for j in range(n)) for i in range(n)
    )
    return validate_table(n, r, ent)


def support(t: ContingencyTable) -> frozenset[tuple[int, int]]:
    """Positions of strictly positive entries, as 1-based (row, col) pairs."""
    return frozenset(
        (i + 1, j + 1)
        for i in range(t.n)
        for j in range(t.n)
        if t.entries[i][j] > 0
    )


@dataclass(frozen=True, order=True)
class MarkovMove:
    """Signed rectangle swap on rows i1 < i2 and columns j1 < j2 (1-based).

    As a matrix the move is sign * (E(i1,j1) + E(i2,j2) - E(i1,j2) - E(i2,j1)).
    Field order gives the canonical sort: lexicographic on (i1, j1, i2, j2)
    with sign -1 before +1.
    """

    i1: int
    j1: int
    i2: int
    j2: int
    sign: int

    def __post_init__(self) -> None:
        if not (1 <= self.i1 < self.i2 and 1 <= self.j1 < self.j2):
            raise InvalidMoveError(
                f"need 1 <= i1 < i2 and 1 <= j1 < j2, got {self!r}"
            )
        if self.sign not in (-1, 1):
            raise InvalidMoveError(f"sign must be -1 or +1, got {self.sign}")

    def negate(self) -> "MarkovMove":
        return MarkovMove(self.i1, self.j1, self.i2, self.j2, -self.sign)

    def added_cells(self) -> tuple[tuple[int, int], tuple[int, int]]:
        """0-based cells the move adds 1 to."""
        if self.sign == 1:
            return (self.i1 - 1, self.j1 - 1), (self.i2 - 1, self.j2 - 1)
        return (self.i1 - 1, self.j2 - 1), (self.i2 - 1, self.j1 - 1)

    def subtracted_cells(self) -> tuple[tuple[int, int], tuple[int, int]]:
        """0-based cells the move subtracts 1 from."""
        if self.sign == 1:
            return (self.i1 - 1, self.j2 - 1), (self.i2 - 1, self.j1 - 1)
        return (self.i1 - 1, self.j1 - 1), (self.i2 - 1, self.j2 - 1)

    def as_matrix(self, n: int) -> list[list[int]]:
        if self.i2 > n or self.j2 > n:
            raise InvalidMoveError(f"{self!r} does not fit in an {n}x{n} table")
        m = [[0] * n for _ in range(n)]
        for (i, j) in self.added_cells():
            m[i][j] = 1
        for (i, j) in self.subtracted_cells():
            m[i][j] = -1
        return m


def move_from_difference(u: ContingencyTable, v: ContingencyTable) -> MarkovMove | None:
    """The unique basis move m with v = u + m, or None when v - u is not a move."""
    diff = [
        (i, j, v.entries[i][j] - u.entries[i][j])
        for i in range(u.n)
        for j in range(u.n)
        if v.entries[i][j] != u.entries[i][j]
    ]
    if len(diff) != 4 or sorted(d for _, _, d in diff) != [-1, -1, 1, 1]:
        return None
    rows = sorted({i for i, _, _ in diff})
    cols = sorted({j for _, j, _ in diff})
    if len(rows) != 2 or len(cols) != 2:
        return None
    delta = {(i, j): d for i, j, d in diff}
    sign = delta[(rows[0], cols[0])]
    if delta[(rows[1], cols[1])] != sign or delta[(rows[0], cols[1])] != -sign:
        return None
    return MarkovMove(rows[0] + 1, cols[0] + 1, rows[1] + 1, cols[1] + 1, sign)


def enumerate_basis_moves(n: int) -> list[MarkovMove]:
    """All 2*C(n,2)^2 moves for n x n tables, in canonical order."""
    if n < 2:
        raise InvalidDimensionError(f"moves require n >= 2, got {n}")
    out = []
    for i1 in range(1, n):
        for j1 in range(1, n):
            for i2 in range(i1 + 1, n + 1):
                for j2 in range(j1 + 1, n + 1):
                    out.append(MarkovMove(i1, j1, i2, j2, -1))
                    out.append(MarkovMove(i1, j1, i2, j2, 1))
    return out


def is_valid_move(t: ContingencyTable, m: MarkovMove) -> bool:
    """True when both cells the move subtracts from are positive in t."""
    (a, b), (c, d) = m.subtracted_cells()
    return t.entries[a][b] >= 1 and t.entries[c][d] >= 1


def apply_move(t: ContingencyTable, m: MarkovMove) -> ContingencyTable:
    """Apply a valid move; the result stays in the same fiber.

    apply_move(apply_move(t, m), m.negate()) == t.
    """
    if not is_valid_move(t, m):
        raise InvalidMoveError(f"move {m!r} subtracts from a zero entry of the table")
    rows = [list(row) for row in t.entries]
    for (i, j) in m.added_cells():
        rows[i][j] += 1
        # margins fixed at r make overflow impossible; guard against misuse
        assert rows[i][j] <= t.r, "entry exceeded the margin, input table was invalid"
    for (i, j) in m.subtracted_cells():
        rows[i][j] -= 1
    return ContingencyTable(t.n, t.r, tuple(tuple(row) for row in rows))


def valid_moves(t: ContingencyTable) -> list[MarkovMove]:
    """Moves applicable at t, in canonical order."""
    if t.n < 2:
        return []
    return [m for m in enumerate_basis_moves(t.n) if is_valid_move(t, m)]


def degree(t: ContingencyTable) -> int:
    """Number of moves applicable at t (the vertex degree in the fiber graph).

    Counted by direct validity checks over the whole basis; the support-pair
    formula is implemented separately so the two can be cross-checked.
    """
    return sum(1 for m in enumerate_basis_moves(t.n) if is_valid_move(t, m)) if t.n >= 2 else 0


def degree_by_support_pairs(t: ContingencyTable) -> int:
    """Degree via counting unordered positive-entry pairs in distinct rows and columns."""
    pos = [(i, j) for i in range(t.n) for j in range(t.n) if t.entries[i][j] > 0]
    count = 0
    for a in range(len(pos)):
        for b in range(a + 1, len(pos)):
            if pos[a][0] != pos[b][0] and pos[a][1] != pos[b][1]:
                count += 1
    return count


def min_degree_value(n: int) -> int:
    """Minimum degree of the fiber graph: C(n,2), attained at r-scaled permutations."""
    if n < 1:
        raise InvalidDimensionError(f"need n >= 1, got {n}")
    return comb(n, 2)


class MaxDegreeBound(NamedTuple):
    value: int
    attained: bool  # True when a 0/1 vertex exists (n >= r); else an upper bound only


def max_degree_value(n: int, r: int) -> MaxDegreeBound:
    """Maximum-degree formula n*r*(n*r - 2r + 1)/2.

    The value is the exact maximum (attained at tables whose positive entries
    are all ones) when n >= r; for n < r no such table exists and the formula
    is only an upper bound, signalled by attained=False.
    """
    if n < 1 or r < 1:
        raise InvalidDimensionError(f"need n >= 1 and r >= 1, got ({n}, {r})")
    value = n * r * (n * r - 2 * r + 1) // 2
    return MaxDegreeBound(value, attained=n >= r)
