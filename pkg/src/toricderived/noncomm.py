"""Twisted Z^n quivers: Theta-cocycles, Yang-Baxter, and normalization.

Generators Y^i_p : p -> p + e_i satisfy
    Y^i_{p+e_j} Y^j_p = Theta^{ij}_p Y^j_{p+e_i} Y^i_p.
Rescaling X^s_p = a^s_p Y^s_p with the recurrence for a makes all X commute.
Words are written in time order: a word (i1, i2, ...) from p first steps
along e_{i1}, then along e_{i2}, and so on.
"""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .errors import BoundaryError, ParseError, PreconditionError
from .fields import get_field
from . import weights as W


@dataclass
class ThetaCocycle:
    """Theta^{ij}_p for i < j and p in the window; Theta^{ji} = 1/Theta^{ij}."""

    n: int
    window: W.Window
    field: object
    values: dict = dc_field(default_factory=dict)   # (i, j, p) -> scalar, i < j
    constant: dict | None = None                    # (i, j) -> scalar, i < j

    def __call__(self, i, j, p):
        F = self.field
        if i == j:
            return F(1)
        if i > j:
            return F.inv(self(j, i, p))
        if p not in self.window:
            raise BoundaryError(f"Theta^{{{i}{j}}} needed at {p}, outside the window")
        if self.constant is not None:
            return self.constant[(i, j)]
        key = (i, j, tuple(p))
        if key not in self.values:
            raise BoundaryError(f"Theta^{{{i}{j}}}_{p} is not defined")
        return self.values[key]

    @classmethod
    def trivial(cls, n, window, field=None):
        F = get_field(field)
        return cls.from_constant([[1] * n for _ in range(n)], window, F)

    @classmethod
    def from_constant(cls, theta, window, field=None):
        """Constant mode; ``theta`` must be multiplicatively skew (theta^{ji} = 1/theta^{ij})."""
        F = get_field(field)
        n = len(theta)
        window = W.parse_window(window, n)
        const = {}
        for i in range(1, n + 1):
            if F(theta[i - 1][i - 1]) != 1:
                raise PreconditionError("theta^{ii} must be 1")
            for j in range(i + 1, n + 1):
                a, b = F(theta[i - 1][j - 1]), F(theta[j - 1][i - 1])
                if a == 0 or F.reduce(a * b) != 1:
                    raise PreconditionError(f"theta^{{{i}{j}}} theta^{{{j}{i}}} must be 1")
                const[(i, j)] = a
        return cls(n, window, F, {}, const)

    def explicit(self):
        """Same cocycle with every value stored (constant mode expanded)."""
        vals = {}
        for p in self.window.points():
            for i in range(1, self.n + 1):
                for j in range(i + 1, self.n + 1):
                    vals[(i, j, p)] = self(i, j, p)
        return ThetaCocycle(self.n, self.window, self.field, vals, None)

    def with_value(self, i, j, p, value):
        t = self.explicit()
        t.values[(i, j, tuple(p))] = self.field(value)
        return t


def skew_matrix(upper: dict, n: int, field=None):
    """Full skew matrix from {(i, j): theta^{ij}} with i < j."""
    F = get_field(field)
    m = [[F(1)] * n for _ in range(n)]
    for (i, j), v in upper.items():
        m[i - 1][j - 1] = F(v)
        m[j - 1][i - 1] = F.inv(F(v))
    return m


def _rand_unit(F, rng):
    if getattr(F, "q", None):
        return rng.randrange(1, F.q)
    return Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 9))


def coboundary_perturbation(theta: ThetaCocycle, c) -> ThetaCocycle:
    """Theta^{ij}_p * c^i_{p+e_j} c^j_p / (c^j_{p+e_i} c^i_p).

    This is the cocycle seen by the rescaled generators c^i_p Y^i_p, so it
    satisfies the Yang-Baxter relation whenever theta does.  ``c`` maps
    (i, p) to a unit and must cover the window shifted by every e_i.
    """
    F = theta.field
    n = theta.n
    vals = {}
    for p in theta.window.points():
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                pi, pj = W.add(p, W.eps(i, n)), W.add(p, W.eps(j, n))
                num = F.reduce(c[(i, pj)] * c[(j, p)])
                den = F.reduce(c[(j, pi)] * c[(i, p)])
                vals[(i, j, p)] = F.reduce(theta(i, j, p) * num * F.inv(den))
    return ThetaCocycle(n, theta.window, F, vals, None)


def random_unit_field(n, window, field=None, rng=None):
    F = get_field(field)
    rng = rng or random.Random(0)
    box = W.Window(tuple((lo, hi + 1) for lo, hi in window.bounds))
    return {(i, p): _rand_unit(F, rng) for p in box.points() for i in range(1, n + 1)}


def random_constant(n, window, field=None, rng=None) -> ThetaCocycle:
    F = get_field(field)
    rng = rng or random.Random(0)
    upper = {(i, j): _rand_unit(F, rng) for i in range(1, n + 1) for j in range(i + 1, n + 1)}
    return ThetaCocycle.from_constant(skew_matrix(upper, n, F), window, F)


def random_yb_theta(n, window, field=None, rng=None) -> ThetaCocycle:
    """A random coboundary perturbation of a random constant theta."""
    F = get_field(field)
    rng = rng or random.Random(0)
    window = W.parse_window(window, n)
    base = random_constant(n, window, F, rng)
    return coboundary_perturbation(base, random_unit_field(n, window, F, rng))


# -- checks -------------------------------------------------------------------

@dataclass
class CheckResult:
    ok: bool
    checked: int = 0
    violation: tuple | None = None

    def __bool__(self):
        return self.ok

    def to_json(self):
        v = None
        if self.violation is not None:
            v = [list(x) if isinstance(x, tuple) else x for x in self.violation]
        return {"pass": self.ok, "checked": self.checked, "violation": v}


def _applicable(window, p, steps):
    return all(W.add(p, s) in window for s in steps)


def yb_check(theta: ThetaCocycle) -> CheckResult:
    """Theta^{jk}_{p+e_i} Theta^{ik}_p Theta^{ij}_{p+e_k} = Theta^{ij}_p Theta^{ik}_{p+e_j} Theta^{jk}_p."""
    n, F, win = theta.n, theta.field, theta.window
    zero = W.zero(n)
    count = 0
    for i, j, k in itertools.combinations(range(1, n + 1), 3):
        ei, ej, ek = W.eps(i, n), W.eps(j, n), W.eps(k, n)
        for p in win.points():
            if not _applicable(win, p, (zero, ei, ej, ek)):
                continue
            count += 1
            lhs = F.reduce(theta(j, k, W.add(p, ei)) * theta(i, k, p) * theta(i, j, W.add(p, ek)))
            rhs = F.reduce(theta(i, j, p) * theta(i, k, W.add(p, ej)) * theta(j, k, p))
            if lhs != rhs:
                return CheckResult(False, count, (i, j, k, p))
    return CheckResult(True, count)


@dataclass
class Normalization:
    n: int
    window: W.Window
    field: object
    a: dict  # (s, p) -> scalar

    def __call__(self, s, p):
        key = (s, tuple(p))
        if key not in self.a:
            raise BoundaryError(f"a^{s}_{p} lies outside the window")
        return self.a[key]


def normalize(theta: ThetaCocycle) -> Normalization:
    """a^s_p = 1 on p(1) = ... = p(s-1) = 0; otherwise step the first nonzero
    coordinate r < s toward 0: a^s_p = Theta^{rs}_{p-e_r} a^s_{p-e_r} when p(r) > 0
    and a^s_p = (Theta^{rs}_p)^{-1} a^s_{p+e_r} when p(r) < 0."""
    n, F, win = theta.n, theta.field, theta.window
    memo = {}

    def a(s, p):
        key = (s, p)
        if key in memo:
            return memo[key]
        chain = []
        cur = p
        while True:
            if (s, cur) in memo:
                val = memo[(s, cur)]
                break
            r = next((t for t in range(1, s) if cur[t - 1] != 0), None)
            if r is None:
                val = F(1)
                memo[(s, cur)] = val
                break
            if cur not in win:
                raise BoundaryError(f"window too small to reach the base hyperplane from {p}")
            er = W.eps(r, n)
            if cur[r - 1] > 0:
                nxt = W.sub(cur, er)
                factor = theta(r, s, nxt)
            else:
                nxt = W.add(cur, er)
                factor = F.inv(theta(r, s, cur))
            chain.append((cur, factor))
            cur = nxt
        for pt, factor in reversed(chain):
            val = F.reduce(factor * val)
            memo[(s, pt)] = val
        return memo[key]

    out = {}
    for p in win.points():
        for s in range(1, n + 1):
            out[(s, p)] = a(s, p)
    return Normalization(n, win, F, out)


def effective_theta(theta: ThetaCocycle, norm: Normalization, i, j, p):
    """Twisting constant of the rescaled generators X at (i, j, p)."""
    F = theta.field
    n = theta.n
    pi, pj = W.add(p, W.eps(i, n)), W.add(p, W.eps(j, n))
    num = F.reduce(theta(i, j, p) * norm(i, pj) * norm(j, p))
    den = F.reduce(norm(j, pi) * norm(i, p))
    return F.reduce(num * F.inv(den))


def verify_commutation(theta: ThetaCocycle, norm: Normalization) -> CheckResult:
    """Theta^{jk}_p a^j_{p+e_k} a^k_p = a^k_{p+e_j} a^j_p, i.e. X^j X^k = X^k X^j."""
    n, F, win = theta.n, theta.field, theta.window
    zero = W.zero(n)
    count = 0
    for j, k in itertools.combinations(range(1, n + 1), 2):
        ej, ek = W.eps(j, n), W.eps(k, n)
        for p in win.points():
            if not _applicable(win, p, (zero, ej, ek)):
                continue
            count += 1
            lhs = F.reduce(theta(j, k, p) * norm(j, W.add(p, ek)) * norm(k, p))
            rhs = F.reduce(norm(k, W.add(p, ej)) * norm(j, p))
            if lhs != rhs:
                return CheckResult(False, count, (j, k, p))
    return CheckResult(True, count)


def check_base_normalization(norm: Normalization) -> CheckResult:
    """a^1 = 1 everywhere and a^s_p = 1 when p(1) = ... = p(s-1) = 0."""
    F = norm.field
    count = 0
    for (s, p), v in sorted(norm.a.items()):
        if all(x == 0 for x in p[: s - 1]):
            count += 1
            if v != F(1):
                return CheckResult(False, count, (s, p))
    return CheckResult(True, count)


def check_recurrences(theta: ThetaCocycle, norm: Normalization) -> CheckResult:
    """Every clause a^s_p = Theta^{rs}_{p-e_r} a^s_{p-e_r} with p(1..r-1) = 0, r < s."""
    n, F, win = theta.n, theta.field, theta.window
    count = 0
    for p in win.points():
        for s in range(2, n + 1):
            for r in range(1, s):
                if any(p[t] != 0 for t in range(r - 1)):
                    break
                q = W.sub(p, W.eps(r, n))
                if q not in win:
                    continue
                count += 1
                if norm(s, p) != F.reduce(theta(r, s, q) * norm(s, q)):
                    return CheckResult(False, count, (r, s, p))
    return CheckResult(True, count)


# -- composition tables -------------------------------------------------------

def canonical_word(p, q):
    """Steps from p to q sorted by generator index (e_1 steps first)."""
    return tuple(i + 1 for i in range(len(p)) for _ in range(q[i] - p[i]))


def sort_word(start, word, twist, field):
    """Bring a word into canonical order; returns the accumulated scalar.

    ``twist(i, j, p)`` for i < j is the constant c in
    (step j at p, then step i) = c * (step i at p, then step j).
    """
    F = field
    w = list(word)
    coeff = F(1)
    n = len(start)
    changed = True
    while changed:
        changed = False
        pos = list(start)
        for k in range(len(w) - 1):
            if w[k] > w[k + 1]:
                j, i = w[k], w[k + 1]
                coeff = F.reduce(coeff * twist(i, j, tuple(pos)))
                w[k], w[k + 1] = i, j
                changed = True
            pos[w[k] - 1] += 1
    return coeff


def composition_table(n, window, twist, field):
    """c(p, q, r) with B_{q,r} o B_{p,q} = c B_{p,r} over all p <= q <= r in the window."""
    F = get_field(field)
    pts = window.points()
    table = {}
    for p in pts:
        ups = [q for q in pts if W.leq(p, q)]
        for q in ups:
            for r in ups:
                if not W.leq(q, r):
                    continue
                word = canonical_word(p, q) + canonical_word(q, r)
                table[(p, q, r)] = sort_word(p, word, twist, F)
    return table


def normalized_table(theta: ThetaCocycle, norm: Normalization):
    return composition_table(theta.n, theta.window.interior(1),
                             lambda i, j, p: effective_theta(theta, norm, i, j, p), theta.field)


def commutative_table(n, window, field=None):
    F = get_field(field)
    return composition_table(n, window, lambda i, j, p: F(1), F)


# -- JSON input ---------------------------------------------------------------

def _scalar(x, F):
    if isinstance(x, str):
        return F(Fraction(x))
    return F(x)


def load_theta(data, window=None, field=None) -> ThetaCocycle:
    """``{"n": n, "constant": [[...]]}`` or ``{"n": n, "values": [{"i","j","p","value"}]}``."""
    if not isinstance(data, dict):
        with open(data) as fh:
            data = json.load(fh)
    F = get_field(field or data.get("field"))
    n = data.get("n")
    if not isinstance(n, int) or n < 1:
        raise ParseError("theta file needs a positive integer 'n'")
    win = W.parse_window(window if window is not None else data.get("window", "-2..2"), n)
    if "constant" in data:
        mat = [[_scalar(x, F) for x in row] for row in data["constant"]]
        if len(mat) != n or any(len(r) != n for r in mat):
            raise ParseError("constant theta must be an n x n matrix")
        return ThetaCocycle.from_constant(mat, win, F)
    if "values" in data:
        vals = {}
        for k, e in enumerate(data["values"]):
            try:
                i, j, p, v = int(e["i"]), int(e["j"]), tuple(e["p"]), _scalar(e["value"], F)
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"bad entry: {exc}", f"values[{k}]") from exc
            if i > j:
                i, j, v = j, i, F.inv(v)
            vals[(i, j, p)] = v
        return ThetaCocycle(n, win, F, vals, None)
    raise ParseError("theta file needs 'constant' or 'values'")
