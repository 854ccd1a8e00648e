"""Exact scalar fields and dense linear algebra over them.

Two modes are supported: the rationals (``QQ``, backed by
:class:`fractions.Fraction`) and prime fields ``GF(q)`` whose elements are
plain Python ints in ``range(q)``.  All matrices are lists of rows.
"""
from __future__ import annotations

from fractions import Fraction

DEFAULT_PRIME = 32003


class Field:
    name = "field"

    def __call__(self, x):
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def reduce(self, x):
        return x

    def __repr__(self):
        return self.name

    def __eq__(self, other):
        return isinstance(other, Field) and self.name == other.name

    def __hash__(self):
        return hash(self.name)

    # -- linear algebra -------------------------------------------------

    def rref(self, rows, ncols):
        """Reduced row echelon form.  Returns (rows, pivot_columns)."""
        red = self.reduce
        a = [[self(x) for x in r] for r in rows]
        pivots = []
        r = 0
        m = len(a)
        for c in range(ncols):
            piv = None
            for i in range(r, m):
                if a[i][c] != 0:
                    piv = i
                    break
            if piv is None:
                continue
            a[r], a[piv] = a[piv], a[r]
            inv = self.inv(a[r][c])
            row = a[r]
            if inv != 1:
                row = [red(x * inv) for x in row]
                a[r] = row
            for i in range(m):
                if i != r:
                    f = a[i][c]
                    if f != 0:
                        ai = a[i]
                        a[i] = [red(x - f * y) if y != 0 else x for x, y in zip(ai, row)]
            pivots.append(c)
            r += 1
            if r == m:
                break
        return a[:r], pivots

    def rank(self, rows, ncols=None):
        if not rows:
            return 0
        if ncols is None:
            ncols = len(rows[0])
        if ncols == 0:
            return 0
        red = self.reduce
        a = [[self(x) for x in r] for r in rows]
        rank = 0
        m = len(a)
        for c in range(ncols):
            piv = None
            for i in range(rank, m):
                if a[i][c] != 0:
                    piv = i
                    break
            if piv is None:
                continue
            a[rank], a[piv] = a[piv], a[rank]
            row = a[rank]
            inv = self.inv(row[c])
            for i in range(rank + 1, m):
                f = a[i][c]
                if f != 0:
                    f = red(f * inv)
                    a[i] = [red(x - f * y) if y != 0 else x for x, y in zip(a[i], row)]
            rank += 1
            if rank == m:
                break
        return rank

    def kernel(self, rows, ncols):
        """Basis of {x : A x = 0}, one vector per free column, in column order."""
        reduced, pivots = self.rref(rows, ncols)
        pivset = set(pivots)
        basis = []
        for free in range(ncols):
            if free in pivset:
                continue
            v = [self(0)] * ncols
            v[free] = self(1)
            for row, pc in zip(reduced, pivots):
                if row[free] != 0:
                    v[pc] = self.reduce(-row[free])
            basis.append(v)
        return basis

    def solve(self, rows, ncols, rhs):
        """Reduced-echelon particular solution of A x = rhs (free variables 0), or None."""
        aug = [list(r) + [b] for r, b in zip(rows, rhs)]
        reduced, pivots = self.rref(aug, ncols + 1)
        if pivots and pivots[-1] == ncols:
            return None
        x = [self(0)] * ncols
        for row, pc in zip(reduced, pivots):
            x[pc] = row[ncols]
        return x

    def in_span(self, vectors, v):
        """True iff v is a linear combination of the given vectors."""
        if all(self(x) == 0 for x in v):
            return True
        if not vectors:
            return False
        cols = len(v)
        base = self.rank(vectors, cols)
        return self.rank(list(vectors) + [list(v)], cols) == base


class RationalField(Field):
    name = "QQ"

    def __call__(self, x):
        return x if isinstance(x, Fraction) else Fraction(x)

    def inv(self, x):
        return 1 / x


class PrimeField(Field):
    def __init__(self, q=DEFAULT_PRIME):
        if q < 2 or any(q % d == 0 for d in range(2, int(q ** 0.5) + 1)):
            raise ValueError(f"{q} is not prime")
        self.q = q
        self.name = f"GF({q})"

    def __call__(self, x):
        if isinstance(x, Fraction):
            return x.numerator * pow(x.denominator, -1, self.q) % self.q
        return x % self.q

    def reduce(self, x):
        return x % self.q

    def inv(self, x):
        if x % self.q == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(x, -1, self.q)


QQ = RationalField()
GF = PrimeField


def get_field(spec=None):
    """Parse a field spec: None/'q'/'32003' -> GF(32003), 'Q'/'QQ' -> rationals."""
    if spec is None or isinstance(spec, Field):
        return spec or PrimeField()
    s = str(spec).strip()
    if s in ("Q", "QQ"):
        return QQ
    if s in ("q", "F", "GF"):
        return PrimeField()
    if s.lower().startswith("gf(") and s.endswith(")"):
        s = s[3:-1]
    return PrimeField(int(s))
