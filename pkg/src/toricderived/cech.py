"""Cech cohomology on U_Sigma and the Cech-Koszul hyper-Ext oracle.

U_Sigma is covered by the charts U_sigma for maximal faces sigma, with
U_sigma n U_tau = U_{sigma n tau}.  On U_tau the coordinates z_k, k not in
tau, are inverted, so every degree-zero piece met here is 0 or 1
dimensional and every map between two nonzero pieces is a scalar.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache

from .errors import VerificationError
from .fields import get_field
from .homalg import ExtTable, _hom_template
from .simplicial import SimplicialComplex, boundary_of_simplex, skeleton
from .subsets import is_subset, members, size, to_mask
from . import weights as W


def sections_dim(sigma: SimplicialComplex, tau, I, p) -> int:
    """dim of the degree-zero piece of (S/<z_I>)[z_k^-1, k not in tau](-p)."""
    tau, I = to_mask(tau), to_mask(I)
    if not is_subset(I, tau):
        return 0
    for i, x in enumerate(p):
        if (I >> i) & 1:
            if x != 0:
                return 0
        elif (tau >> i) & 1 and x > 0:
            return 0
    return 1


def _cover_subsets(k: int):
    """Nonempty subsets of range(k) as sorted index tuples, by size then lex."""
    out = []
    for m in range(1, 1 << k):
        out.append(tuple(j for j in range(k) if (m >> j) & 1))
    out.sort(key=lambda t: (len(t), t))
    return out


@dataclass(frozen=True)
class CechComplex:
    """Degree-zero Cech complex of O_{I,p} over an ordered cover.

    ``cells[j]`` lists (cover index tuple T, tau_T) in Cech degree j and
    ``dims[j]`` the matching 0/1 section dimensions.
    """

    cover: tuple
    cells: dict
    dims: dict
    diffs: dict

    def cohomology(self, field=None) -> ExtTable:
        field = get_field(field)
        ranks = {}
        for j, mat in self.diffs.items():
            ranks[j] = field.rank(mat, len(mat[0])) if mat and mat[0] else 0
        return ExtTable({j: sum(self.dims[j]) - ranks.get(j, 0) - ranks.get(j - 1, 0)
                         for j in self.dims})

    def d_squared_zero(self) -> bool:
        for j in self.diffs:
            if j + 1 in self.diffs:
                a, b = self.diffs[j + 1], self.diffs[j]
                if a and b and b[0]:
                    for r in a:
                        for c in range(len(b[0])):
                            if sum(r[k] * b[k][c] for k in range(len(b))):
                                return False
        return True


def cech_complex(sigma: SimplicialComplex, I, p, cover=None) -> CechComplex:
    cover = tuple(cover if cover is not None else sigma.maximal)
    subsets = _cover_subsets(len(cover))
    cells = {}
    for T in subsets:
        tau = -1
        for j in T:
            tau &= cover[j]
        cells.setdefault(len(T) - 1, []).append((T, tau & ((1 << sigma.n) - 1)))
    dims = {j: [sections_dim(sigma, tau, I, p) for _, tau in cs] for j, cs in cells.items()}
    diffs = {}
    for j in cells:
        if j + 1 not in cells:
            continue
        src = [T for T, _ in cells[j]]
        index = {T: a for a, T in enumerate(src)}
        live_src = [a for a, d in enumerate(dims[j]) if d]
        live_tgt = [a for a, d in enumerate(dims[j + 1]) if d]
        col = {a: b for b, a in enumerate(live_src)}
        mat = [[0] * len(live_src) for _ in live_tgt]
        for r, a in enumerate(live_tgt):
            T2 = cells[j + 1][a][0]
            for pos, x in enumerate(T2):
                T = T2[:pos] + T2[pos + 1:]
                b = index[T]
                if b in col:
                    mat[r][col[b]] += (-1) ** pos
        diffs[j] = mat
    return CechComplex(cover, cells, dims, diffs)


def cohomology_sheaf(sigma: SimplicialComplex, I, p, field=None, cover=None) -> ExtTable:
    """H^*([U_Sigma/T], O^Sigma_{I,p}) by the Cech complex of the maximal-face cover."""
    return cech_complex(sigma, I, W.weight(p), cover).cohomology(field)


def line_bundle_cohomology(sigma, a, field=None) -> ExtTable:
    """H^*(O(a)); O(a) is O_{emptyset,-a}."""
    return cohomology_sheaf(sigma, 0, W.neg(a), field)


# -- hyper-Ext via the Cech-Koszul double complex --------------------------------

@dataclass(frozen=True)
class _Template:
    n: int
    cells: tuple        # per total degree: tuple of (base twist, tau)
    entries: dict       # total degree k -> list of (tgt, src, scalar), d : k -> k+1


@lru_cache(maxsize=None)
def _double_complex(cover: tuple, n: int, I: int, J: int) -> _Template:
    hom = _hom_template(I, J, n)
    subsets = _cover_subsets(len(cover))
    taus = []
    full = (1 << n) - 1
    for T in subsets:
        tau = full
        for j in T:
            tau &= cover[j]
        taus.append(tau)
    sub_index = {T: a for a, T in enumerate(subsets)}
    # cell (k, g, a): Koszul degree k, generator g, cover subset a; total k + |T| - 1
    cells = {}
    where = {}
    for k in sorted(hom.terms):
        for g, t in enumerate(hom.terms[k]):
            for a, T in enumerate(subsets):
                tot = k + len(T) - 1
                lst = cells.setdefault(tot, [])
                where[(k, g, a)] = (tot, len(lst))
                lst.append((t, taus[a]))
    entries = {}
    for k, d in hom.diffs.items():
        for (t, s), e in d.items():
            x = sum(c for c, _ in e)
            if not x:
                continue
            for a in range(len(subsets)):
                tot, src = where[(k, s, a)]
                _, tgt = where[(k + 1, t, a)]
                entries.setdefault(tot, []).append((tgt, src, x))
    for k in hom.terms:
        sign = -1 if k % 2 else 1
        for g in range(len(hom.terms[k])):
            for a2, T2 in enumerate(subsets):
                if len(T2) < 2:
                    continue
                tot2, tgt = where[(k, g, a2)]
                for pos in range(len(T2)):
                    T = T2[:pos] + T2[pos + 1:]
                    tot, src = where[(k, g, sub_index[T])]
                    entries.setdefault(tot, []).append((tgt, src, sign * (-1) ** pos))
    return _Template(n, {k: tuple(v) for k, v in cells.items()}, entries)


def _alive(base, tau, w) -> bool:
    # sections of S(-(base - w)) on U_tau in degree zero: base - w <= 0 on tau
    i = 0
    while tau:
        if tau & 1 and base[i] - w[i] > 0:
            return False
        tau >>= 1
        i += 1
    return True


_U_CACHE: dict = {}


def ext_oracle_U(sigma: SimplicialComplex, I, p, J, q, field=None) -> ExtTable:
    """Ext^*_{[U_Sigma/T]}(O^Sigma_{I,p}, O^Sigma_{J,q}) by hyper-Cech cohomology of
    the Hom complex K_I^dual(p) (x) K_J(-q)."""
    field = get_field(field)
    I, J = to_mask(I), to_mask(J)
    p, q = W.weight(p), W.weight(q)
    n = sigma.n
    cover = tuple(sigma.maximal)
    tpl = _double_complex(cover, n, I, J)
    w = W.sub(p, q)
    masks = []
    for k in sorted(tpl.cells):
        m = 0
        for j, (base, tau) in enumerate(tpl.cells[k]):
            if _alive(base, tau, w):
                m |= 1 << j
        masks.append((k, m))
    key = (cover, n, I, J, tuple(masks), field.name)
    hit = _U_CACHE.get(key)
    if hit is None:
        hit = _U_CACHE[key] = _total_cohomology(tpl, dict(masks), field)
    return ExtTable(hit)


def _total_cohomology(tpl: _Template, masks: dict, field) -> ExtTable:
    ranks = {}
    for k, ents in tpl.entries.items():
        ms, mt = masks.get(k, 0), masks.get(k + 1, 0)
        if not ms or not mt:
            continue
        cols = {j: b for b, j in enumerate(_bits(ms))}
        rows = {j: a for a, j in enumerate(_bits(mt))}
        mat = [[0] * len(cols) for _ in rows]
        for t, s, x in ents:
            if t in rows and s in cols:
                mat[rows[t]][cols[s]] += x
        ranks[k] = field.rank(mat, len(cols))
    return ExtTable({k: bin(m).count("1") - ranks.get(k, 0) - ranks.get(k - 1, 0)
                     for k, m in masks.items()})


def _bits(m):
    out, j = [], 0
    while m:
        if m & 1:
            out.append(j)
        m >>= 1
        j += 1
    return out


def line_bundle_ext(sigma: SimplicialComplex, a, b, field=None) -> ExtTable:
    """Ext^*(O(a), O(b)) on U_Sigma, where O(a) = O_{emptyset,-a}."""
    return ext_oracle_U(sigma, 0, W.neg(a), 0, W.neg(b), field)


def decomposition_terms(sigma: SimplicialComplex, I, p, J, q, field=None) -> ExtTable:
    """Right side of Ext^r = sum over I-(I n J) <= S <= I of H^{r-|S|}(O_{I u J, q-p-chi_S})."""
    I, J = to_mask(I), to_mask(J)
    p, q = W.weight(p), W.weight(q)
    n = len(p)
    lo = I & ~J
    total = {}
    for S in range(1 << n):
        if not (is_subset(lo, S) and is_subset(S, I)):
            continue
        h = cohomology_sheaf(sigma, I | J, W.sub(W.sub(q, p), W.chi(S, n)), field)
        for j, d in h.items():
            total[j + size(S)] = total.get(j + size(S), 0) + d
    return ExtTable(total)


# -- closed forms --------------------------------------------------------------------

def weighted_proj_closed_form(p, q) -> ExtTable:
    k = len(p)
    if all(b >= a for a, b in zip(p, q)):
        return ExtTable({0: 1})
    if all(b < a for a, b in zip(p, q)):
        return ExtTable({k - 1: 1})
    return ExtTable()


def weighted_proj_ext(k: int, p, q, field=None) -> ExtTable:
    """Ext(O(p), O(q)) on A^k minus 0, via Cech cohomology of O(q-p)."""
    p, q = W.weight(p), W.weight(q)
    if len(p) != k or len(q) != k:
        raise ValueError("weights must have length k")
    got = line_bundle_cohomology(boundary_of_simplex(k), W.sub(q, p), field)
    want = weighted_proj_closed_form(p, q)
    if got != want:
        raise VerificationError(f"weighted projective table mismatch at p={p}, q={q}: {got} vs {want}")
    return got


P2_MINUS_POINTS = skeleton(3, 1)


def p2_minus_points_closed_form(p1, p2) -> ExtTable:
    m = sum(1 for x in W.sub(p2, p1) if x >= 0)
    return {3: ExtTable({0: 1}), 2: ExtTable(), 1: ExtTable({1: 1}), 0: ExtTable({1: 2})}[m]


def p2_minus_points_ext(p1, p2, field=None) -> ExtTable:
    """Ext(O(p1), O(p2)) on P^2 minus its three fixed points."""
    p1, p2 = W.weight(p1), W.weight(p2)
    got = line_bundle_cohomology(P2_MINUS_POINTS, W.sub(p2, p1), field)
    want = p2_minus_points_closed_form(p1, p2)
    if got != want:
        raise VerificationError(f"table mismatch at {p1} -> {p2}: {got} vs {want}")
    return got


def collection_51(K: int):
    """The ordered line bundle collection on P^2 minus points, truncated at k, |a| <= K."""
    out = [(0, 0, k) for k in range(K + 1)]
    out += [(a, -a, 0) for a in range(-K, K + 1) if a != 0]
    out += [(a, 1 - a, 0) for a in range(-K, K + 1) if a != 1]
    out += [(1, 0, -k) for k in range(K, -1, -1)]
    return out


@dataclass
class Report51:
    objects: int = 0
    pairs: int = 0
    violations: list = dc_field(default_factory=list)
    witness: dict = dc_field(default_factory=dict)

    @property
    def ok(self):
        return not self.violations

    def to_json(self):
        return {"pass": self.ok, "objects": self.objects, "pairs": self.pairs,
                "violations": [str(v) for v in self.violations],
                "witness": {k: v.to_json() for k, v in self.witness.items()}}


NON_STRONG_WITNESS = {
    "Hom(O(0,0,0),O(0,0,1))": ((0, 0, 0), (0, 0, 1), 0),
    "Hom(O(0,0,0),O(0,1,0))": ((0, 0, 0), (0, 1, 0), 0),
    "Hom(O(-1,1,0),O(0,1,0))": ((-1, 1, 0), (0, 1, 0), 0),
    "Ext1(O(0,0,1),O(-1,1,0))": ((0, 0, 1), (-1, 1, 0), 1),
}


def verify_51_collection(K: int = 4, field=None, oracle: bool = True) -> Report51:
    """Exceptionality of the four-family collection plus the non-strongness witness.

    For p1 before p2 the criterion is that p1 - p2 has exactly two nonnegative
    coordinates; with ``oracle`` every pair is also recomputed by Cech
    cohomology (both directions, including End = k).
    """
    coll = collection_51(K)
    rep = Report51(objects=len(coll))
    if len(set(coll)) != len(coll):
        rep.violations.append("collection has repeated objects")
    for i, p1 in enumerate(coll):
        for j, p2 in enumerate(coll):
            if i < j:
                rep.pairs += 1
                nonneg = sum(1 for x in W.sub(p1, p2) if x >= 0)
                if nonneg != 2:
                    rep.violations.append(f"{p1} before {p2}: p1-p2 has {nonneg} nonnegative coordinates")
            if oracle:
                back = p2_minus_points_ext(p2, p1, field) if i < j else None
                if back:
                    rep.violations.append(f"backward Ext from {p2} to {p1}: {back}")
                if i == j and p2_minus_points_ext(p1, p1, field) != {0: 1}:
                    rep.violations.append(f"End of {p1} is not k")
    for name, (a, b, deg) in NON_STRONG_WITNESS.items():
        tab = p2_minus_points_ext(a, b, field)
        rep.witness[name] = tab
        if tab.get(deg, 0) == 0:
            rep.violations.append(f"witness {name} vanishes")
    return rep
