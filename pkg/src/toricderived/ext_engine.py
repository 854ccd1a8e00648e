"""Closed-form Ext dimensions and the composition algebra of the collections.

Objects O_{I,p} with supp(p) in I, shifted by sum(p), form a strong full
exceptional collection on U_Sigma once restricted to I in Sigma.  Morphisms
are 0- or 1-dimensional and are named by :class:`MorphismSymbol`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field

from .errors import CompositionError, PreconditionError
from .homalg import ExtTable
from .simplicial import SimplicialComplex
from .subsets import fmt, is_subset, members, size, to_mask
from . import weights as W


def distinguished_S(I, p, J, q):
    """The subset S with (q-p)|_{I u J} = chi_S and S <= I <= S u J, or None.

    The complement condition (q-p <= 0 off I u J) is not part of this test.
    """
    I, J = to_mask(I), to_mask(J)
    d = W.sub(q, p)
    U = I | J
    S = 0
    for i, x in enumerate(d):
        if (U >> i) & 1:
            if x == 1:
                S |= 1 << i
            elif x != 0:
                return None
    if is_subset(S, I) and is_subset(I, S | J):
        return S
    return None


def ext_dims_affine(I, p, J, q) -> ExtTable:
    I, J = to_mask(I), to_mask(J)
    p, q = W.weight(p), W.weight(q)
    if len(p) != len(q):
        raise PreconditionError("weights must share n")
    U = I | J
    d = W.sub(q, p)
    if any(x > 0 for i, x in enumerate(d) if not (U >> i) & 1):
        return ExtTable()
    S = distinguished_S(I, p, J, q)
    if S is None:
        return ExtTable()
    return ExtTable({size(S): 1})


def ext_dims(sigma: SimplicialComplex, I, p, J, q) -> ExtTable:
    """Ext on U_Sigma between collection-normalized sheaves O_{I,p}, O_{J,q}."""
    I, J = to_mask(I), to_mask(J)
    p, q = W.weight(p), W.weight(q)
    if not (is_subset(W.supp(p), I) and is_subset(W.supp(q), J)):
        raise PreconditionError(
            "ext_dims needs supp(p) in I and supp(q) in J; use cech.ext_oracle_U for general weights")
    if not (sigma.is_face(I) and sigma.is_face(J) and sigma.is_face(I | J)):
        return ExtTable()
    return ext_dims_affine(I, p, J, q)


def hom_predicate_objects(sigma: SimplicialComplex, a, b) -> int:
    a, b = W.weight(a), W.weight(b)
    for x, y in zip(a, b):
        if not (y - x in (0, 1) or (y, x) == (1, -1)):
            return 0
    return 1 if sigma.is_face(W.supp(a) | W.supp(b)) else 0


# -- morphism symbols -----------------------------------------------------------

@dataclass(frozen=True)
class MorphismSymbol:
    """phi_{I,p;S,J} : O_{I,p} -> O_{J,p+chi_S}[|S|], needs S <= I <= S u J."""

    I: int
    p: tuple
    S: int
    J: int

    def __post_init__(self):
        object.__setattr__(self, "I", to_mask(self.I))
        object.__setattr__(self, "S", to_mask(self.S))
        object.__setattr__(self, "J", to_mask(self.J))
        object.__setattr__(self, "p", W.weight(self.p))
        if not (is_subset(self.S, self.I) and is_subset(self.I, self.S | self.J)):
            raise PreconditionError("symbol needs S <= I <= S u J")

    @property
    def q(self):
        return W.add(self.p, W.chi(self.S, len(self.p)))

    @property
    def degree(self):
        return size(self.S)

    @property
    def source(self):
        return W.SheafIndex(self.I, self.p)

    @property
    def target(self):
        return W.SheafIndex(self.J, self.q)

    def is_indecomposable(self):
        return size(self.S) + size(self.J & ~self.I) == 1

    def __repr__(self):
        return f"phi[{fmt(self.I)},{self.p};{fmt(self.S)},{fmt(self.J)}]"


def identity_symbol(I, p) -> MorphismSymbol:
    return MorphismSymbol(I, p, 0, I)


def symbol_between(sigma: SimplicialComplex | None, src: W.SheafIndex, tgt: W.SheafIndex):
    """The distinguished symbol src -> tgt if that Ext space is nonzero, else None."""
    if sigma is None:
        table = ext_dims_affine(src.I, src.p, tgt.I, tgt.p)
    else:
        table = ext_dims(sigma, src.I, src.p, tgt.I, tgt.p)
    if not table:
        return None
    S = distinguished_S(src.I, src.p, tgt.I, tgt.p)
    return MorphismSymbol(src.I, src.p, S, tgt.I)


def compose(sigma: SimplicialComplex | None, f: MorphismSymbol, g: MorphismSymbol):
    """g o f as a symbol, or None when the composite vanishes (sigma None = affine)."""
    if f is None or g is None:
        return None
    if f.J != g.I or f.q != g.p:
        raise CompositionError(f"cannot compose {f} with {g}: target and source differ")
    T = g.S
    if not (is_subset(T, f.I & f.J) and not (f.S & T)):
        return None
    if sigma is not None and not sigma.is_face(f.I | g.J):
        return None
    return MorphismSymbol(f.I, f.p, f.S | T, g.J)


# -- window verification ----------------------------------------------------------

def collection_objects(sigma: SimplicialComplex, window: W.Window):
    """E_a for a in the window with supp(a) in Sigma, lexicographically ordered."""
    return sorted(a for a in window.points() if sigma.is_face(W.supp(a)))


@dataclass
class CollectionReport:
    objects: int = 0
    pairs_checked: int = 0
    compositions_checked: int = 0
    associativity_checked: int = 0
    oracle_checked: int = 0
    violations: list = dc_field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def to_json(self):
        return {"pass": self.ok, "objects": self.objects, "pairs_checked": self.pairs_checked,
                "compositions_checked": self.compositions_checked,
                "associativity_checked": self.associativity_checked,
                "oracle_checked": self.oracle_checked,
                "violations": [str(v) for v in self.violations]}


def object_symbol(sigma, a, b):
    """Distinguished morphism E_a -> E_b, or None."""
    return symbol_between(sigma, W.reindex_to_sheaf(a), W.reindex_to_sheaf(b))


def verify_collection_window(sigma: SimplicialComplex, window, oracle=None,
                             associativity=True, max_violations=50) -> CollectionReport:
    """Check exceptionality, End = k, strongness and the composition law.

    ``oracle`` optionally is a callable (sigma, I, p, J, q) -> ExtTable used
    to cross-check every pair (e.g. cech.ext_oracle_U).
    """
    window = W.parse_window(window, sigma.n)
    objs = collection_objects(sigma, window)
    rep = CollectionReport(objects=len(objs))
    viol = rep.violations

    def bad(msg):
        if len(viol) < max_violations:
            viol.append(msg)

    sheaf = {a: W.reindex_to_sheaf(a) for a in objs}
    shift = {a: W.shift_amount(sheaf[a].p) for a in objs}
    hom = {}
    for i, a in enumerate(objs):
        sa = sheaf[a]
        for j, b in enumerate(objs):
            sb = sheaf[b]
            tab = ext_dims(sigma, sa.I, sa.p, sb.I, sb.p)
            rep.pairs_checked += 1
            pred = hom_predicate_objects(sigma, a, b)
            if oracle is not None:
                rep.oracle_checked += 1
                if oracle(sigma, sa.I, sa.p, sb.I, sb.p) != tab:
                    bad(f"oracle disagrees on {a} -> {b}")
            if tab:
                deg, = tab
                if tab[deg] != 1:
                    bad(f"Ext({a},{b}) has dimension {tab[deg]}")
                if deg != shift[b] - shift[a]:
                    bad(f"Ext({a},{b}) sits in degree {deg}, not the shift difference")
            if pred != (1 if tab else 0):
                bad(f"hom predicate {pred} disagrees with ext table {tab} on {a} -> {b}")
            if i == j and tab != {0: 1}:
                bad(f"End(E_{a}) = {tab}")
            if j < i and tab:
                bad(f"backward morphism E_{a} -> E_{b}")
            if tab:
                hom[(a, b)] = object_symbol(sigma, a, b)
    out = {}
    for (a, b), f in hom.items():
        out.setdefault(a, []).append((b, f))
    for a in objs:
        for b, f in out.get(a, ()):
            for c, g in out.get(b, ()):
                rep.compositions_checked += 1
                h = compose(sigma, f, g)
                want = hom.get((a, c))
                if h != want:
                    bad(f"composition {a}->{b}->{c} gives {h}, expected {want}")
                elif h is not None and h.degree != f.degree + g.degree:
                    bad(f"degree not additive on {a}->{b}->{c}")
                if associativity:
                    for d, k in out.get(c, ()):
                        rep.associativity_checked += 1
                        left = compose(sigma, compose(sigma, f, g), k)
                        right = compose(sigma, f, compose(sigma, g, k))
                        if left != right:
                            bad(f"associativity fails on {a}->{b}->{c}->{d}")
    return rep


# -- quiver export ----------------------------------------------------------------

def indecomposable_arrows(sigma: SimplicialComplex, window):
    """Arrows E_a -> E_b (a != b) whose symbol has |S u (J - I)| = 1."""
    window = W.parse_window(window, sigma.n)
    objs = collection_objects(sigma, window)
    arrows = []
    for a in objs:
        for b in objs:
            if a == b or not hom_predicate_objects(sigma, a, b):
                continue
            f = object_symbol(sigma, a, b)
            if f is not None and f.is_indecomposable():
                arrows.append((a, b, f))
    return objs, arrows


def path_closure(sigma: SimplicialComplex, window):
    """Pairs (a, b) reachable by chains of indecomposable arrows with nonzero composite."""
    objs, arrows = indecomposable_arrows(sigma, window)
    out = {}
    for a, b, f in arrows:
        out.setdefault(a, []).append((b, f))
    reach = set()
    for a in objs:
        reach.add((a, a))
        frontier = [(a, identity_symbol(*_sheaf_pair(a)))]
        seen = {a}
        while frontier:
            nxt = []
            for x, h in frontier:
                for y, f in out.get(x, ()):
                    c = compose(sigma, h, f)
                    if c is not None and y not in seen:
                        seen.add(y)
                        reach.add((a, y))
                        nxt.append((y, c))
            frontier = nxt
    return reach


def _sheaf_pair(a):
    s = W.reindex_to_sheaf(a)
    return s.I, s.p


def export_quiver(sigma: SimplicialComplex, window, fmt_: str = "json") -> str:
    objs, arrows = indecomposable_arrows(sigma, window)
    if fmt_ == "json":
        data = {"objects": [list(a) for a in objs],
                "arrows": [{"src": list(a), "dst": list(b), "S": list(members(f.S))}
                           for a, b, f in arrows]}
        return json.dumps(data, sort_keys=True, indent=1) + "\n"
    if fmt_ == "dot":
        def node(a):
            return '"' + ",".join(map(str, a)) + '"'
        lines = ["digraph quiver {"]
        for a in objs:
            lines.append(f"  {node(a)};")
        for a, b, f in arrows:
            style = "dashed" if f.S else "solid"
            lines.append(f"  {node(a)} -> {node(b)} [style={style}, label=\"{fmt(f.S)}\"];")
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt_!r}")
