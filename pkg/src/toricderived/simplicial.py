"""Simplicial complexes on [n], stellar subdivisions and stacky fan ingestion."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .subsets import full, is_subset, members, size, submasks, to_mask
from .errors import ParseError, PreconditionError


@dataclass(frozen=True, eq=False)
class SimplicialComplex:
    """Downward closed family of subsets of [n], stored by its maximal faces.

    ``maximal`` keeps the normalized input order; it fixes the order of the
    Cech cover.  Equality ignores that order.
    """

    n: int
    maximal: tuple[int, ...]

    def __post_init__(self):
        if self.n <= 0:
            raise ParseError("ground set size must be positive")
        top = full(self.n)
        for m in self.maximal:
            if m & ~top:
                raise ParseError("element out of range")

    @classmethod
    def from_faces(cls, n, faces):
        """Build from any generating family of faces (dominated ones are dropped)."""
        return validate({"n": n, "maximal_faces": [list(members(to_mask(f))) for f in faces]}).complex

    def __eq__(self, other):
        return (isinstance(other, SimplicialComplex) and self.n == other.n
                and frozenset(self.maximal) == frozenset(other.maximal))

    def __hash__(self):
        return hash((self.n, frozenset(self.maximal)))

    def __repr__(self):
        faces = ",".join("{" + ",".join(map(str, members(m))) + "}" for m in self.maximal)
        return f"SimplicialComplex(n={self.n}, maximal=[{faces}])"

    def is_face(self, I) -> bool:
        I = to_mask(I)
        return any(is_subset(I, m) for m in self.maximal)

    def faces(self) -> list[int]:
        out = set()
        for m in self.maximal:
            out.update(submasks(m))
        return sorted(out, key=lambda f: (size(f), members(f)))

    def star(self, I) -> list[int]:
        I = to_mask(I)
        return [f for f in self.faces() if is_subset(I, f)]

    def reduced_euler_characteristic(self) -> int:
        return sum((-1) ** (size(f) - 1) for f in self.faces() if f)

    def stellar_subdivide(self, sigma) -> "SimplicialComplex":
        return stellar_subdivide(self, sigma)

    def to_json(self) -> dict:
        return {"n": self.n, "maximal_faces": [list(members(m)) for m in self.maximal]}


@dataclass
class ValidationReport:
    complex: SimplicialComplex
    removed: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


def validate(data) -> ValidationReport:
    """Parse and normalize ``{"n": int, "maximal_faces": [[...], ...]}``.

    Dominated faces are dropped (and listed in ``removed``), duplicates are
    merged, and an empty face list means the complex {emptyset}.
    """
    if isinstance(data, SimplicialComplex):
        data = data.to_json()
    if not isinstance(data, dict) or "n" not in data:
        raise ParseError("expected an object with keys 'n' and 'maximal_faces'")
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n <= 0:
        raise ParseError("n must be a positive integer")
    raw = data.get("maximal_faces", [])
    if not isinstance(raw, list):
        raise ParseError("maximal_faces must be a list")
    masks = []
    for k, face in enumerate(raw):
        if not isinstance(face, (list, tuple)):
            raise ParseError("each face must be a list of integers", f"maximal_faces[{k}]")
        for i in face:
            if not isinstance(i, int) or isinstance(i, bool):
                raise ParseError("face elements must be integers", f"maximal_faces[{k}]")
            if not 1 <= i <= n:
                raise ParseError("element out of range", f"maximal_faces[{k}]")
        masks.append(to_mask(face))
    kept, removed = [], []
    for k, m in enumerate(masks):
        dominated = any((is_subset(m, o) and m != o) or (m == o and j < k)
                        for j, o in enumerate(masks) if j != k)
        if dominated:
            removed.append(list(members(m)))
        else:
            kept.append(m)
    if not kept:
        kept = [0]
    c = SimplicialComplex(n, tuple(kept))
    violations = []
    for a, b in itertools.combinations(c.maximal, 2):
        if is_subset(a, b) or is_subset(b, a):
            violations.append("maximal faces are nested")
    return ValidationReport(c, removed, violations)


def load_complex(path_or_obj) -> SimplicialComplex:
    if isinstance(path_or_obj, SimplicialComplex):
        return path_or_obj
    if isinstance(path_or_obj, dict):
        return validate(path_or_obj).complex
    with open(path_or_obj) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON at line {e.lineno}: {e.msg}", str(path_or_obj)) from e
    try:
        if isinstance(data, dict) and "fan" in data and "rays" in data:
            return stacky_fan_to_complex(parse_stacky_fan(data)).complex
        return validate(data).complex
    except ParseError as e:
        raise ParseError(e.reason, str(path_or_obj) + (f" {e.context}" if e.context else "")) from e


def is_face(c: SimplicialComplex, I) -> bool:
    return c.is_face(I)


def star(c: SimplicialComplex, I) -> list[int]:
    return c.star(I)


def full_simplex(n: int) -> SimplicialComplex:
    return SimplicialComplex(n, (full(n),))


def boundary_of_simplex(k: int) -> SimplicialComplex:
    """All proper subsets of [k]; for k = 3 this is the boundary of the triangle."""
    top = full(k)
    if k == 1:
        return SimplicialComplex(1, (0,))
    return SimplicialComplex(k, tuple(top & ~(1 << i) for i in range(k)))


def skeleton(n: int, d: int) -> SimplicialComplex:
    """All subsets of [n] of size at most d (d = 1: the singletons)."""
    if d == 0:
        return SimplicialComplex(n, (0,))
    return SimplicialComplex(n, tuple(to_mask(c) for c in itertools.combinations(range(1, n + 1), d)))


def stellar_subdivide(c: SimplicialComplex, sigma) -> SimplicialComplex:
    """Subdivide at the face sigma, adding the vertex n+1."""
    sigma = to_mask(sigma)
    if size(sigma) < 2:
        raise PreconditionError("sigma must have at least two elements")
    if not c.is_face(sigma):
        raise PreconditionError("sigma is not a face")
    v = 1 << c.n
    faces = set(c.faces())
    new = []
    for F in faces:
        if is_subset(sigma, F):
            continue
        new.append(F)
        if (F | sigma) in faces:
            new.append(F | v)
    new_set = set(new)
    maximal = [F for F in new_set if not any(F != G and is_subset(F, G) for G in new_set)]
    maximal.sort(key=lambda f: members(f))
    return SimplicialComplex(c.n + 1, tuple(maximal))


def recognize_weld(c: SimplicialComplex):
    """Find (base, sigma) with stellar_subdivide(base, sigma) == c, new vertex = n.

    Candidates sigma range over non-faces inside the neighbourhood of the
    last vertex; the first match in a fixed order wins.  Returns None if the
    last vertex is not a subdivision vertex.
    """
    if c.n < 3:
        return None
    v = 1 << (c.n - 1)
    base_n = c.n - 1
    faces = c.faces()
    link = [F & ~v for F in faces if F & v]
    if not link:
        return None
    nbhd = 0
    for F in link:
        nbhd |= F
    rest = [F for F in faces if not F & v]
    candidates = sorted((s for s in submasks(nbhd) if size(s) >= 2 and not c.is_face(s)),
                        key=lambda s: (size(s), members(s)))
    for sigma in candidates:
        gens = rest + [F | sigma for F in link]
        try:
            base = SimplicialComplex.from_faces(base_n, gens)
        except ParseError:
            continue
        if not base.is_face(sigma):
            continue
        if stellar_subdivide(base, sigma) == c:
            return base, sigma
    return None


# -- stacky fans ------------------------------------------------------------

@dataclass(frozen=True)
class StackyFan:
    rank: int
    rays: tuple[tuple[int, ...], ...]
    fan: SimplicialComplex


def parse_stacky_fan(data) -> StackyFan:
    if not isinstance(data, dict) or not {"rank", "rays", "fan"} <= set(data):
        raise ParseError("stacky fan needs keys 'rank', 'rays', 'fan'")
    rank = data["rank"]
    if not isinstance(rank, int) or rank <= 0:
        raise ParseError("rank must be a positive integer")
    rays = data["rays"]
    if not isinstance(rays, list):
        raise ParseError("rays must be a list")
    for k, v in enumerate(rays):
        if not isinstance(v, list) or len(v) != rank or not all(isinstance(x, int) for x in v):
            raise ParseError(f"ray must be a list of {rank} integers", f"rays[{k}]")
    fan = validate(data["fan"]).complex
    if fan.n != len(rays):
        raise ParseError("fan ground set size must equal the number of rays")
    return StackyFan(rank, tuple(tuple(v) for v in rays), fan)


def _rank_q(rows, ncols):
    from .fields import QQ
    return QQ.rank(rows, ncols) if rows else 0


def _det(m):
    a = [[Fraction(x) for x in r] for r in m]
    k = len(a)
    det = Fraction(1)
    for c in range(k):
        piv = next((i for i in range(c, k) if a[i][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for i in range(c + 1, k):
            f = a[i][c] / a[c][c]
            a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return int(det)


@dataclass
class FanReport:
    complex: SimplicialComplex
    ray_matrix: list
    kernel_rank: int
    violations: list


def stacky_fan_to_complex(f: StackyFan, geometric: bool = False) -> FanReport:
    """The simplicial complex of the fan plus the rank of G_Sigma.

    With ``geometric`` the rays of every maximal cone must be linearly
    independent and span a saturated sublattice (gcd of maximal minors 1).
    """
    violations = []
    for i, v in enumerate(f.rays, 1):
        if not any(v):
            violations.append(f"ray {i} is zero")
        if not f.fan.is_face([i]):
            violations.append(f"ray {i} is not a face of the fan")
    if geometric:
        for m in f.fan.maximal:
            idx = members(m)
            rows = [f.rays[i - 1] for i in idx]
            minors = [_det([[r[c] for c in cols] for r in rows])
                      for cols in itertools.combinations(range(f.rank), len(rows))] if rows else [1]
            g = 0
            for x in minors:
                g = gcd(g, x)
            if g == 0:
                violations.append(f"rays of cone {list(idx)} are dependent")
            elif g != 1:
                violations.append(f"rays of cone {list(idx)} do not span a saturated subgroup")
    if violations:
        raise ParseError("; ".join(violations))
    matrix = [list(v) for v in f.rays]
    kernel_rank = len(matrix) - _rank_q(matrix, f.rank)
    return FanReport(f.fan, matrix, kernel_rank, violations)
