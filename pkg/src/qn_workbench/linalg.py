"""Exact field arithmetic and sparse linear algebra.

Two coefficient fields are provided: the rationals (Python ints and
``fractions.Fraction``) and prime fields GF(p) (ints reduced mod p).  Vectors
are plain dicts mapping an arbitrary comparable key to a nonzero scalar, which
lets callers index coordinates by words or (generator, word) pairs directly.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Hashable, Iterable, Mapping


class RationalField:
    name = "rational"
    characteristic = 0

    def reduce(self, x):
        if isinstance(x, Fraction) and x.denominator == 1:
            return x.numerator
        return x

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        if x == 1 or x == -1:
            return int(x)
        return self.reduce(Fraction(1) / x)

    def convert(self, x):
        if isinstance(x, str):
            x = Fraction(x)
        return self.reduce(x)

    def display(self, x):
        return x

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")


class PrimeField:
    def __init__(self, p: int):
        if p < 2 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.characteristic = p
        self.name = f"fp:{p}"

    def reduce(self, x):
        return x % self.p

    def inv(self, x):
        x %= self.p
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, -1, self.p)

    def convert(self, x):
        if isinstance(x, str):
            x = Fraction(x)
        if isinstance(x, Fraction):
            return x.numerator * self.inv(x.denominator) % self.p
        return x % self.p

    def display(self, x):
        """Symmetric representative, so that -1 prints as -1."""
        return x - self.p if x > self.p // 2 else x

    def __repr__(self):
        return f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))


QQ = RationalField()


@lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    return PrimeField(p)


def parse_field(text: str):
    """Parse ``rational`` or ``fp:P``."""
    text = text.strip().lower()
    if text in ("rational", "qq", "q"):
        return QQ
    if text.startswith("fp:"):
        return GF(int(text[3:]))
    raise ValueError(f"unknown field {text!r}; expected 'rational' or 'fp:P'")


class SparseMatrix:
    """Immutable sparse matrix in triplet form."""

    def __init__(self, n_rows: int, n_cols: int, entries=(), field=QQ):
        self.n_rows = n_rows
        self.n_cols = n_cols
        self.field = field
        items = entries.items() if isinstance(entries, Mapping) else (
            ((r, c), v) for r, c, v in entries)
        data = {}
        for (r, c), v in items:
            if not (0 <= r < n_rows and 0 <= c < n_cols):
                raise IndexError(f"entry ({r}, {c}) outside {n_rows}x{n_cols}")
            if (r, c) in data:
                raise ValueError(f"duplicate entry at ({r}, {c})")
            v = field.convert(v)
            if v:
                data[r, c] = v
        self._entries = data

    @classmethod
    def from_rows(cls, rows: Iterable[Mapping[int, object]], n_cols: int, field=QQ):
        rows = list(rows)
        entries = {(i, j): v for i, row in enumerate(rows) for j, v in row.items()}
        return cls(len(rows), n_cols, entries, field)

    @classmethod
    def identity(cls, n: int, field=QQ):
        return cls(n, n, {(i, i): 1 for i in range(n)}, field)

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int, field=QQ):
        return cls(n_rows, n_cols, {}, field)

    @property
    def entries(self):
        return dict(self._entries)

    @property
    def nnz(self):
        return len(self._entries)

    def transpose(self) -> SparseMatrix:
        return SparseMatrix(self.n_cols, self.n_rows,
                            {(c, r): v for (r, c), v in self._entries.items()}, self.field)

    def rows(self) -> list[dict]:
        out = [dict() for _ in range(self.n_rows)]
        for (r, c), v in self._entries.items():
            out[r][c] = v
        return out

    def apply(self, x: Mapping[int, object]) -> dict:
        F = self.field
        y = {}
        for (r, c), v in self._entries.items():
            if c in x:
                y[r] = y.get(r, 0) + v * x[c]
        return {r: v for r, v in ((r, F.reduce(v)) for r, v in y.items()) if v}

    def __repr__(self):
        return f"SparseMatrix({self.n_rows}x{self.n_cols}, nnz={self.nnz}, {self.field!r})"


class Echelon:
    """Incrementally maintained row echelon form of a set of sparse vectors.

    Each stored row is normalized so that its largest key (the pivot) has
    coefficient 1.  Keys must be mutually comparable.
    """

    def __init__(self, field=QQ):
        self.field = field
        self._rows: dict[Hashable, dict] = {}

    def __len__(self):
        return len(self._rows)

    @property
    def rank(self) -> int:
        return len(self._rows)

    @property
    def pivots(self):
        return self._rows.keys()

    def reduce(self, vec: Mapping) -> dict:
        F = self.field
        rows = self._rows
        v = {k: c for k, c in vec.items() if c}
        while v:
            k = max(v)
            row = rows.get(k)
            if row is None:
                break
            c = v[k]
            for key, a in row.items():
                x = F.reduce(v.get(key, 0) - c * a)
                if x:
                    v[key] = x
                else:
                    del v[key]
        return v

    def add(self, vec: Mapping) -> bool:
        """Insert ``vec``; returns True iff it was independent of the rows so far."""
        v = self.reduce(vec)
        if not v:
            return False
        k = max(v)
        inv = self.field.inv(v[k])
        if inv != 1:
            F = self.field
            v = {key: F.reduce(c * inv) for key, c in v.items()}
        self._rows[k] = v
        return True

    def rows(self) -> dict:
        return self._rows


def _reduced_rows(rows: Iterable[Mapping], field) -> dict:
    """Fully reduced row echelon form keyed by pivot column."""
    ech = Echelon(field)
    for r in rows:
        ech.add(r)
    reduced = {}
    F = field
    for k in sorted(ech.rows()):
        row = dict(ech.rows()[k])
        for j in [j for j in row if j != k and j in reduced]:
            c = row.get(j)
            if not c:
                continue
            for key, a in reduced[j].items():
                x = F.reduce(row.get(key, 0) - c * a)
                if x:
                    row[key] = x
                else:
                    row.pop(key, None)
        reduced[k] = row
    return reduced


def mat_rank(m: SparseMatrix) -> int:
    ech = Echelon(m.field)
    rows = m.rows() if m.n_rows <= m.n_cols else m.transpose().rows()
    for r in rows:
        ech.add(r)
    return ech.rank


def kernel_basis(m: SparseMatrix) -> list[dict]:
    """Basis of {x : m x = 0}, one sparse vector per free column."""
    reduced = _reduced_rows(m.rows(), m.field)
    F = m.field
    basis = []
    for f in range(m.n_cols):
        if f in reduced:
            continue
        x = {f: 1}
        for k, row in reduced.items():
            c = row.get(f)
            if c:
                x[k] = F.reduce(-c)
        basis.append(x)
    return basis


def rank_of_vectors(vectors: Iterable[Mapping], field=QQ) -> int:
    ech = Echelon(field)
    for v in vectors:
        ech.add(v)
    return ech.rank
