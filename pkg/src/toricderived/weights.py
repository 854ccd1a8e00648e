"""The grading lattice Z^n: weights, characteristic vectors, reindexing.

Weights are plain tuples of ints.  Twist convention: M(p)_q = M_{p+q}, so
the free module S(-p) has its generator in degree p.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from .subsets import is_subset, members, size, to_mask
from .errors import PreconditionError


def weight(entries) -> tuple[int, ...]:
    return tuple(int(x) for x in entries)


def zero(n: int) -> tuple[int, ...]:
    return (0,) * n


def chi(S, n: int) -> tuple[int, ...]:
    S = to_mask(S)
    return tuple((S >> i) & 1 for i in range(n))


def eps(i: int, n: int) -> tuple[int, ...]:
    return tuple(1 if k == i - 1 else 0 for k in range(n))


def add(p, q):
    return tuple(a + b for a, b in zip(p, q))


def sub(p, q):
    return tuple(a - b for a, b in zip(p, q))


def neg(p):
    return tuple(-a for a in p)


def leq(p, q) -> bool:
    return all(a <= b for a, b in zip(p, q))


def supp(p) -> int:
    m = 0
    for i, x in enumerate(p):
        if x:
            m |= 1 << i
    return m


def shift_amount(p) -> int:
    return sum(p)


@dataclass(frozen=True, order=False)
class SheafIndex:
    """(I, p) naming O_{I,p}, the sheaf of k[z]/<z_i, i in I>(-p)."""

    I: int
    p: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "I", to_mask(self.I))
        object.__setattr__(self, "p", weight(self.p))

    @property
    def n(self):
        return len(self.p)

    def normalized(self) -> bool:
        return is_subset(supp(self.p), self.I)

    def lex_key(self):
        """Sort key: lexicographic in p (coordinate 1 most significant), then |I|."""
        return (self.p, size(self.I))

    def __repr__(self):
        return f"O_{{{','.join(map(str, members(self.I)))}}},{self.p}"


@dataclass(frozen=True)
class ObjectIndex:
    a: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", weight(self.a))

    def lex_key(self):
        return self.a


def reindex_to_object(s: SheafIndex) -> tuple[int, ...]:
    if not s.normalized():
        raise PreconditionError("reindexing needs supp(p) inside I")
    out = []
    for i, x in enumerate(s.p):
        if x < 0 or not (s.I >> i) & 1:
            out.append(x)
        else:
            out.append(x + 1)
    return tuple(out)


def reindex_to_sheaf(a) -> SheafIndex:
    a = weight(a.a if isinstance(a, ObjectIndex) else a)
    return SheafIndex(supp(a), tuple(x if x <= 0 else x - 1 for x in a))


# -- windows ------------------------------------------------------------------

@dataclass(frozen=True)
class Window:
    """Closed box prod_i [lo_i, hi_i] in Z^n."""

    bounds: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for lo, hi in self.bounds:
            if lo > hi:
                raise ValueError(f"empty window range {lo}..{hi}")

    @classmethod
    def cube(cls, lo: int, hi: int, n: int) -> "Window":
        return cls(((lo, hi),) * n)

    @property
    def n(self):
        return len(self.bounds)

    def points(self):
        return list(itertools.product(*(range(lo, hi + 1) for lo, hi in self.bounds)))

    def __contains__(self, p):
        return len(p) == self.n and all(lo <= x <= hi for x, (lo, hi) in zip(p, self.bounds))

    def resized(self, n: int) -> "Window":
        """Same box for a different ambient rank: extra coordinates reuse the hull."""
        if n <= self.n:
            return Window(self.bounds[:n])
        lo = min(b[0] for b in self.bounds)
        hi = max(b[1] for b in self.bounds)
        return Window(self.bounds + ((lo, hi),) * (n - self.n))

    def padded(self, m: int) -> "Window":
        return Window(tuple((lo - m, hi + m) for lo, hi in self.bounds))

    def interior(self, m: int = 1) -> "Window":
        return Window(tuple((lo, hi - m) for lo, hi in self.bounds))

    def to_json(self):
        return [list(b) for b in self.bounds]


_RANGE = re.compile(r"^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$")


def parse_window(text, n: int | None = None) -> Window:
    """Parse ``lo..hi`` (broadcast to n coordinates) or ``lo..hi,lo..hi,...``."""
    if isinstance(text, Window):
        return text if n is None or text.n == n else text.resized(n)
    if isinstance(text, (list, tuple)):
        if text and isinstance(text[0], int):
            bounds = ((int(text[0]), int(text[1])),)
        else:
            bounds = tuple((int(lo), int(hi)) for lo, hi in text)
    else:
        parts = str(text).split(",")
        bounds = []
        for part in parts:
            m = _RANGE.match(part)
            if not m:
                raise ValueError(f"bad window range {part!r}; expected lo..hi")
            bounds.append((int(m.group(1)), int(m.group(2))))
        bounds = tuple(bounds)
    if n is not None:
        if len(bounds) == 1:
            bounds = bounds * n
        elif len(bounds) != n:
            raise ValueError(f"window has {len(bounds)} ranges, expected 1 or {n}")
    return Window(bounds)
