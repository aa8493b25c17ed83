"""Exact sparse linear algebra over the rationals.

Everything downstream (homology, model construction, normal forms) reduces to
rank / kernel / solve questions for sparse matrices with ``fractions.Fraction``
entries, so this module is deliberately small and boring: plain Gauss-Jordan
elimination to reduced row echelon form, with pivots chosen to keep entry
sizes down.  RREF is unique, which is what makes every downstream canonical
form reproducible run-to-run.

No floats anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

Scalar = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def frac(value) -> Fraction:
    """Coerce ints, strings like ``-3/7``, and Fractions to a Fraction."""
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


def parse_scalar(text: str) -> Fraction:
    return Fraction(text.strip())


def format_scalar(value: Fraction) -> str:
    return str(value)


def _entry_size(value: Fraction) -> int:
    # Bit size of a rational; used for pivot selection only.
    return value.numerator.bit_length() + value.denominator.bit_length()


def dense(vec: Mapping[int, Fraction], length: int) -> list[Fraction]:
    """Expand a sparse vector (index -> scalar) to a dense list."""
    out = [ZERO] * length
    for i, v in vec.items():
        out[i] = v
    return out


class SparseMatrix:
    """Immutable sparse matrix over Q.

    ``entries`` maps ``(row, col)`` to a nonzero Fraction; zeros are never
    stored.  The reduced echelon form is computed lazily and cached, since
    rank, kernel and solve all read off the same elimination.
    """

    __slots__ = ("rows", "cols", "entries", "_rref")

    def __init__(self, rows: int, cols: int,
                 entries: Optional[Mapping[tuple[int, int], Fraction]] = None):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        self.rows = rows
        self.cols = cols
        clean: dict[tuple[int, int], Fraction] = {}
        if entries:
            for (i, j), value in entries.items():
                if not (0 <= i < rows and 0 <= j < cols):
                    raise ValueError(f"entry ({i},{j}) outside {rows}x{cols} matrix")
                value = frac(value)
                if value != 0:
                    clean[(i, j)] = value
        self.entries = clean
        self._rref: Optional[tuple[list[dict[int, Fraction]], tuple[int, ...]]] = None

    # ------------------------------------------------------------------ build

    @classmethod
    def from_rows(cls, data: Sequence[Sequence]) -> "SparseMatrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        entries = {}
        for i, row in enumerate(data):
            if len(row) != cols:
                raise ValueError("ragged row data")
            for j, value in enumerate(row):
                value = frac(value)
                if value != 0:
                    entries[(i, j)] = value
        return cls(rows, cols, entries)

    @classmethod
    def from_columns(cls, columns: Sequence[Mapping[int, Fraction]],
                     rows: int) -> "SparseMatrix":
        """Assemble a matrix whose j-th column is the sparse vector columns[j]."""
        entries = {}
        for j, col in enumerate(columns):
            for i, value in col.items():
                if value != 0:
                    entries[(i, j)] = frac(value)
        return cls(rows, len(columns), entries)

    # ------------------------------------------------------------------ basics

    def get(self, i: int, j: int) -> Fraction:
        return self.entries.get((i, j), ZERO)

    def to_rows(self) -> list[list[Fraction]]:
        data = [[ZERO] * self.cols for _ in range(self.rows)]
        for (i, j), value in self.entries.items():
            data[i][j] = value
        return data

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows,
                            {(j, i): v for (i, j), v in self.entries.items()})

    def mul_vec(self, vec: Mapping[int, Fraction]) -> dict[int, Fraction]:
        """Matrix times sparse column vector, returned sparse."""
        out: dict[int, Fraction] = {}
        for (i, j), value in self.entries.items():
            x = vec.get(j, ZERO)
            if x:
                acc = out.get(i, ZERO) + value * x
                if acc:
                    out[i] = acc
                else:
                    out.pop(i, None)
        return out

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"SparseMatrix({self.rows}x{self.cols}, {len(self.entries)} nonzero)"

    # ------------------------------------------------------------- elimination

    def _row_dicts(self) -> list[dict[int, Fraction]]:
        rows: list[dict[int, Fraction]] = [dict() for _ in range(self.rows)]
        for (i, j), value in self.entries.items():
            rows[i][j] = value
        return rows

    @staticmethod
    def _eliminate(rows: list[dict[int, Fraction]], ncols: int,
                   pivot_cols_limit: int) -> tuple[list[dict[int, Fraction]], tuple[int, ...]]:
        """Gauss-Jordan on row dicts; pivots only in columns < pivot_cols_limit.

        Mutates and returns ``rows`` together with the pivot column tuple.
        Pivot row choice: smallest entry (by bit size) in the current column,
        ties broken by row order.  The resulting RREF is unique regardless.
        """
        pivots: list[int] = []
        r = 0
        nrows = len(rows)
        for col in range(pivot_cols_limit):
            best = -1
            best_size = None
            for i in range(r, nrows):
                value = rows[i].get(col)
                if value:
                    size = _entry_size(value)
                    if best_size is None or size < best_size:
                        best, best_size = i, size
            if best < 0:
                continue
            rows[r], rows[best] = rows[best], rows[r]
            pivot_row = rows[r]
            inv = ONE / pivot_row[col]
            if inv != 1:
                for j in list(pivot_row):
                    pivot_row[j] *= inv
            for i in range(nrows):
                if i == r:
                    continue
                factor = rows[i].get(col)
                if not factor:
                    continue
                target = rows[i]
                for j, value in pivot_row.items():
                    acc = target.get(j, ZERO) - factor * value
                    if acc:
                        target[j] = acc
                    else:
                        target.pop(j, None)
            pivots.append(col)
            r += 1
            if r == nrows:
                break
        return rows, tuple(pivots)

    def rref(self) -> tuple[list[dict[int, Fraction]], tuple[int, ...]]:
        """Reduced row echelon form as (row dicts, pivot columns).  Cached."""
        if self._rref is None:
            rows, pivots = self._eliminate(self._row_dicts(), self.cols, self.cols)
            self._rref = (rows, pivots)
        return self._rref

    # ----------------------------------------------------------------- queries

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel_basis(self) -> list[dict[int, Fraction]]:
        """Canonical null-space basis from the RREF parametrization.

        One basis vector per free column f, with entry 1 at f and, for each
        pivot row, minus the RREF coefficient at f in that row's pivot column.
        """
        rows, pivots = self.rref()
        pivot_set = set(pivots)
        basis = []
        for f in range(self.cols):
            if f in pivot_set:
                continue
            vec: dict[int, Fraction] = {f: ONE}
            for r, p in enumerate(pivots):
                coeff = rows[r].get(f)
                if coeff:
                    vec[p] = -coeff
            basis.append(vec)
        return basis

    def solve(self, b) -> Optional[dict[int, Fraction]]:
        """Canonical particular solution of M x = b, or None if inconsistent.

        ``b`` may be a dense sequence of length ``rows`` or a sparse mapping
        row -> scalar.  Free variables are set to zero, so the answer is the
        unique echelon-parametrization representative.
        """
        if isinstance(b, Mapping):
            b_sparse = {i: frac(v) for i, v in b.items() if v}
            for i in b_sparse:
                if not 0 <= i < self.rows:
                    raise ValueError("right-hand side index out of range")
        else:
            if len(b) != self.rows:
                raise ValueError(f"right-hand side length {len(b)} != rows {self.rows}")
            b_sparse = {i: frac(v) for i, v in enumerate(b) if frac(v)}
        rows = self._row_dicts()
        aug = self.cols
        for i, value in b_sparse.items():
            rows[i][aug] = value
        rows, pivots = self._eliminate(rows, self.cols + 1, self.cols)
        for i in range(len(pivots), self.rows):
            if rows[i].get(aug):
                return None
        solution: dict[int, Fraction] = {}
        for r, p in enumerate(pivots):
            value = rows[r].get(aug)
            if value:
                solution[p] = value
        return solution


def stack_columns(blocks: Iterable[Mapping[int, Fraction]], rows: int) -> SparseMatrix:
    """Convenience alias used by callers assembling solve systems column-wise."""
    return SparseMatrix.from_columns(list(blocks), rows)


def quotient_representatives(cycles: Sequence[Mapping[int, Fraction]],
                             boundaries: Sequence[Mapping[int, Fraction]],
                             length: int) -> list[dict[int, Fraction]]:
    """Canonical echelon basis of span(cycles)/span(boundaries).

    Reduces each cycle vector against the echelon form of the boundary span,
    then echelonizes the survivors.  Both steps are RREF-based, so the result
    depends only on the spans and the coordinate order.
    """
    boundary_rows, _ = SparseMatrix(
        len(boundaries), length,
        {(i, j): frac(c) for i, row in enumerate(boundaries)
         for j, c in row.items() if c}).rref()
    pivot_rows: dict[int, Mapping[int, Fraction]] = {}
    for row in boundary_rows:
        if row:
            pivot_rows[min(row)] = row
    reduced = []
    for vec in cycles:
        v = {i: frac(c) for i, c in vec.items() if c}
        for pivot in sorted(pivot_rows):
            coeff = v.get(pivot)
            if coeff:
                for j, value in pivot_rows[pivot].items():
                    total = v.get(j, ZERO) - coeff * value
                    if total:
                        v[j] = total
                    else:
                        v.pop(j, None)
        if v:
            reduced.append(v)
    rep_rows, _ = SparseMatrix(len(reduced), length,
                               {(i, j): c for i, row in enumerate(reduced)
                                for j, c in row.items()}).rref()
    return [row for row in rep_rows if row]
