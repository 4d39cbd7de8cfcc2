"""Exact ground fields: the rationals or a small prime field."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class Field:
    """``p == 0`` means the rationals, otherwise the prime field of order p."""

    p: int = 0

    def __post_init__(self):
        if self.p:
            if self.p < 2 or self.p >= 2**16 or any(self.p % d == 0 for d in range(2, int(self.p**0.5) + 1)):
                raise ValueError(f"characteristic must be a prime below 2^16, got {self.p}")

    def __call__(self, x):
        if self.p == 0:
            return Fraction(x)
        if isinstance(x, Fraction):
            return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
        return int(x) % self.p

    def norm(self, x):
        return x % self.p if self.p else x

    def inv(self, x):
        if not x:
            raise ZeroDivisionError("inverse of zero")
        if self.p:
            return pow(int(x), -1, self.p)
        return 1 / Fraction(x)

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def show(self, c) -> str:
        if self.p:
            return str(int(c))
        c = Fraction(c)
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"

    def __str__(self):
        return f"GF({self.p})" if self.p else "Q"


QQ = Field(0)


def nullspace(rows, ncols, field):
    """Basis of the right kernel of a matrix given as a list of row lists."""
    pivots = rref(rows, ncols, field)
    pivot_cols = {c for c, _ in pivots}
    basis = []
    for free in range(ncols):
        if free in pivot_cols:
            continue
        v = [field.zero] * ncols
        v[free] = field.one
        for c, row in pivots:
            v[c] = field.norm(-row[free])
        basis.append(v)
    return basis


def rref(rows, ncols, field):
    """Reduced row echelon form; returns ``[(pivot_col, row)]`` with unit pivots."""
    rows = [list(r) for r in rows if any(r)]
    pivots = []
    r = 0
    for c in range(ncols):
        k = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if k is None:
            continue
        rows[r], rows[k] = rows[k], rows[r]
        inv = field.inv(rows[r][c])
        rows[r] = [field.norm(x * inv) for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [field.norm(a - f * b) for a, b in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    for i in range(r):
        c = next(j for j, x in enumerate(rows[i]) if x)
        pivots.append((c, rows[i]))
    return pivots


def solve(columns, target, field):
    """Find coefficients ``c`` with ``sum(c[k] * columns[k]) == target``, or None.

    Vectors are dicts keyed by arbitrary hashable coordinates.
    """
    keys = sorted({k for col in columns for k in col} | set(target), key=repr)
    n = len(columns)
    rows = [[col.get(k, field.zero) for col in columns] + [target.get(k, field.zero)] for k in keys]
    pivots = rref(rows, n + 1, field)
    if any(c == n for c, _ in pivots):
        return None
    sol = [field.zero] * n
    for c, row in pivots:
        sol[c] = row[n]
    return sol
