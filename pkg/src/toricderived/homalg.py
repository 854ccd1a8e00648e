"""Koszul complexes over k[z_1..z_n] and their Hom/tensor calculus.

A generator with twist ``d`` stands for the free module S(-d), whose
generator sits in degree d.  A differential entry (scalar, monomial) from a
source generator of twist d_s to a target of twist d_t is homogeneous when
d_t + monomial = d_s.  Since every degree-zero map between such modules is
a scalar times the unique bridging monomial, degree-zero linear algebra
reduces to scalar matrices with a support pattern.
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache

from .errors import LiftingError, PreconditionError
from .fields import Field, get_field
from .subsets import full, is_subset, members, size, submasks, to_mask
from . import weights as W


class ExtTable(dict):
    """Cohomological degree -> dimension, zero entries dropped."""

    def __init__(self, data=()):
        super().__init__((int(k), int(v)) for k, v in dict(data).items() if v)

    def total(self) -> int:
        return sum(self.values())

    def __repr__(self):
        return "{" + ", ".join(f"{k}: {v}" for k, v in sorted(self.items())) + "}"

    def to_json(self):
        return {str(k): v for k, v in sorted(self.items())}


@dataclass(frozen=True, eq=False)
class GradedFreeComplex:
    """Cochain complex of Z^n-graded free modules.

    terms[k] lists generator twists in cohomological degree k; diffs[k] is
    d^k : C^k -> C^{k+1} as {(target, source): ((scalar, monomial), ...)}.
    ``key`` names the differential pattern; twisting keeps it, so degree
    zero ranks can be cached across twists.
    """

    n: int
    terms: dict
    diffs: dict
    labels: dict | None = None
    key: object = None

    def degrees(self):
        return sorted(self.terms)

    def rank(self, k) -> int:
        return len(self.terms.get(k, ()))

    def entry_scalar(self, k, t, s):
        return sum(c for c, _ in self.diffs.get(k, {}).get((t, s), ()))

    def to_json(self):
        return {
            "n": self.n,
            "terms": {str(k): [list(w) for w in v] for k, v in sorted(self.terms.items())},
            "diffs": {str(k): [[t, s, [[str(c), list(m)] for c, m in e]]
                               for (t, s), e in sorted(v.items())]
                      for k, v in sorted(self.diffs.items())},
        }

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)


def _ordered_subsets(I: int):
    return sorted(submasks(I), key=lambda S: (size(S), members(S)))


def koszul(I, p, n: int) -> GradedFreeComplex:
    """K_I(-p): S(-p-chi_S) for |S| = s in degree -s, d(e_S) = sum (-1)^pos z_i e_{S-i}."""
    I = to_mask(I)
    p = W.weight(p)
    if len(p) != n or I & ~full(n):
        raise PreconditionError("I and p must live on [n]")
    by_size = defaultdict(list)
    for S in _ordered_subsets(I):
        by_size[size(S)].append(S)
    terms, labels, index = {}, {}, {}
    for s, subs in by_size.items():
        terms[-s] = tuple(W.add(p, W.chi(S, n)) for S in subs)
        labels[-s] = tuple(subs)
        for j, S in enumerate(subs):
            index[S] = j
    diffs = {}
    for s, subs in by_size.items():
        if s == 0:
            continue
        d = {}
        for col, S in enumerate(subs):
            for pos, i in enumerate(members(S)):
                T = S & ~(1 << (i - 1))
                d[(index[T], col)] = (((-1) ** pos, W.eps(i, n)),)
        diffs[-s] = d
    return GradedFreeComplex(n, terms, diffs, labels, ("koszul", I, n))


def twist(c: GradedFreeComplex, w) -> GradedFreeComplex:
    """c(w): since S(-d)(w) = S(-(d-w)), every generator twist drops by w."""
    w = W.weight(w)
    terms = {k: tuple(W.sub(t, w) for t in v) for k, v in c.terms.items()}
    return GradedFreeComplex(c.n, terms, c.diffs, c.labels, c.key)


def dualize(c: GradedFreeComplex) -> GradedFreeComplex:
    """Hom(c, S): D^k = C^{-k}^dual with twists negated, d_D^k = (-1)^(k+1) (d_C^{-k-1})^T."""
    terms = {-k: tuple(W.neg(t) for t in v) for k, v in c.terms.items()}
    diffs = {}
    for k, d in c.diffs.items():
        # d_C^k : C^k -> C^{k+1} becomes D^{-k-1} -> D^{-k}
        kd = -k - 1
        sign = -1 if (kd + 1) % 2 else 1
        diffs[kd] = {(s, t): tuple((sign * x, m) for x, m in e) for (t, s), e in d.items()}
    labels = {-k: v for k, v in c.labels.items()} if c.labels else None
    key = ("dual", c.key) if c.key is not None else None
    return GradedFreeComplex(c.n, terms, diffs, labels, key)


def tensor(c1: GradedFreeComplex, c2: GradedFreeComplex) -> GradedFreeComplex:
    """Total complex of c1 (x) c2 with d(x(x)y) = dx(x)y + (-1)^|x| x(x)dy."""
    if c1.n != c2.n:
        raise PreconditionError("tensor factors must share n")
    index = {}
    terms = defaultdict(list)
    labels = defaultdict(list)
    for k1 in sorted(c1.terms):
        for i1, t1 in enumerate(c1.terms[k1]):
            for k2 in sorted(c2.terms):
                for i2, t2 in enumerate(c2.terms[k2]):
                    k = k1 + k2
                    index[(k1, i1, k2, i2)] = len(terms[k])
                    terms[k].append(W.add(t1, t2))
                    labels[k].append((k1, i1, k2, i2))
    diffs = defaultdict(lambda: defaultdict(list))
    for k1, d in c1.diffs.items():
        for (t, s), e in d.items():
            for k2 in c2.terms:
                for i2 in range(len(c2.terms[k2])):
                    src = index[(k1, s, k2, i2)]
                    tgt = index[(k1 + 1, t, k2, i2)]
                    diffs[k1 + k2][(tgt, src)].extend(e)
    for k2, d in c2.diffs.items():
        for (t, s), e in d.items():
            for k1 in c1.terms:
                sign = -1 if k1 % 2 else 1
                for i1 in range(len(c1.terms[k1])):
                    src = index[(k1, i1, k2, s)]
                    tgt = index[(k1, i1, k2 + 1, t)]
                    diffs[k1 + k2][(tgt, src)].extend((sign * x, m) for x, m in e)
    terms = {k: tuple(v) for k, v in terms.items()}
    diffs = {k: {ts: tuple(e) for ts, e in v.items()} for k, v in diffs.items()}
    key = ("tensor", c1.key, c2.key) if c1.key is not None and c2.key is not None else None
    return GradedFreeComplex(c1.n, terms, diffs, {k: tuple(v) for k, v in labels.items()}, key)


def check_homogeneous(c: GradedFreeComplex) -> list:
    bad = []
    for k, d in c.diffs.items():
        for (t, s), e in d.items():
            for _, m in e:
                if min(m) < 0 or W.add(c.terms[k + 1][t], m) != c.terms[k][s]:
                    bad.append((k, t, s))
    return bad


def check_d_squared(c: GradedFreeComplex) -> list:
    """Entries of d^{k+1} d^k that fail to vanish as polynomials."""
    bad = []
    for k in c.diffs:
        if k + 1 not in c.diffs:
            continue
        acc = defaultdict(int)
        by_src = defaultdict(list)
        for (t, s), e in c.diffs[k + 1].items():
            by_src[s].append((t, e))
        for (mid, s), e1 in c.diffs[k].items():
            for t, e2 in by_src.get(mid, ()):
                for x1, m1 in e1:
                    for x2, m2 in e2:
                        acc[(t, s, W.add(m1, m2))] += x1 * x2
        bad.extend((k, key) for key, v in acc.items() if v != 0)
    return bad


# -- degree-zero cohomology ---------------------------------------------------

def _survivors(c: GradedFreeComplex):
    """Per degree, bitmask of generators whose degree-zero piece is nonzero (twist <= 0)."""
    out = {}
    for k, ts in c.terms.items():
        m = 0
        for j, t in enumerate(ts):
            if max(t) <= 0:
                m |= 1 << j
        out[k] = m
    return out


def _bits(m):
    out, j = [], 0
    while m:
        if m & 1:
            out.append(j)
        m >>= 1
        j += 1
    return out


def _restricted_matrix(d, rows, cols):
    ri = {r: a for a, r in enumerate(rows)}
    ci = {s: b for b, s in enumerate(cols)}
    mat = [[0] * len(cols) for _ in rows]
    for (t, s), e in d.items():
        if t in ri and s in ci:
            mat[ri[t]][ci[s]] += sum(x for x, _ in e)
    return mat


def _cohomology_dims(c: GradedFreeComplex, surv: dict, field: Field) -> ExtTable:
    ranks = {}
    for k, d in c.diffs.items():
        rows = _bits(surv.get(k + 1, 0))
        cols = _bits(surv.get(k, 0))
        ranks[k] = field.rank(_restricted_matrix(d, rows, cols), len(cols)) if rows and cols else 0
    dims = {}
    for k, m in surv.items():
        dims[k] = bin(m).count("1") - ranks.get(k, 0) - ranks.get(k - 1, 0)
    return ExtTable(dims)


_DZ_CACHE: dict = {}


def degree_zero_cohomology(c: GradedFreeComplex, field=None) -> ExtTable:
    """Cohomology of the degree-0 piece of a complex of free modules."""
    field = get_field(field)
    surv = _survivors(c)
    if c.key is None:
        return _cohomology_dims(c, surv, field)
    ck = (c.key, tuple(sorted(surv.items())), field.name)
    hit = _DZ_CACHE.get(ck)
    if hit is None:
        hit = _DZ_CACHE[ck] = _cohomology_dims(c, surv, field)
    return ExtTable(hit)


@lru_cache(maxsize=None)
def _hom_template(I: int, J: int, n: int) -> GradedFreeComplex:
    return tensor(dualize(koszul(I, W.zero(n), n)), koszul(J, W.zero(n), n))


def hom_complex(I, p, J, q) -> GradedFreeComplex:
    """K_I^dual(p) (x) K_J(-q), computing Ext(O_{I,p}, O_{J,q}) in degree zero."""
    p, q = W.weight(p), W.weight(q)
    n = len(p)
    # (K_I^dual (x) K_J)(p - q) equals K_I^dual(p) (x) K_J(-q)
    return twist(_hom_template(to_mask(I), to_mask(J), n), W.sub(p, q))


def ext_oracle_affine(I, p, J, q, field=None) -> ExtTable:
    return degree_zero_cohomology(hom_complex(I, p, J, q), field)


# -- Yoneda composition -------------------------------------------------------

@dataclass(frozen=True)
class HomToQuotient:
    """Degree-zero Hom(K_I(-p), M_{K,r}) as a cochain complex.

    basis[k] lists the generators of K_I(-p)^{-k} whose target piece
    (S/<z_K>)_{d - r} is nonzero; delta[k] is the matrix of c -> c o d.
    """

    I: int
    p: tuple
    K: int
    r: tuple
    P: GradedFreeComplex
    basis: dict
    delta: dict


def _quotient_piece(d, K: int, r) -> bool:
    m = W.sub(d, r)
    return min(m) >= 0 and all(m[i] == 0 for i in range(len(m)) if (K >> i) & 1)


def hom_to_quotient(I, p, K, r) -> HomToQuotient:
    return _hom_to_quotient(to_mask(I), W.weight(p), to_mask(K), W.weight(r))


@lru_cache(maxsize=None)
def _hom_to_quotient(I, p, K, r) -> HomToQuotient:
    P = koszul(I, p, len(p))
    basis = {}
    for k in range(size(I) + 1):
        basis[k] = tuple(j for j, d in enumerate(P.terms[-k]) if _quotient_piece(d, K, r))
    delta = {}
    for k in range(size(I)):
        d = P.diffs[-k - 1]  # P^{-k-1} -> P^{-k}
        rows, cols = basis[k + 1], basis[k]
        ri = {g: a for a, g in enumerate(rows)}
        ci = {g: b for b, g in enumerate(cols)}
        mat = [[0] * len(cols) for _ in rows]
        for (t, s), e in d.items():
            if s in ri and t in ci:
                mat[ri[s]][ci[t]] += sum(x for x, _ in e)
        delta[k] = mat
    return HomToQuotient(I, p, K, r, P, basis, delta)


@dataclass(frozen=True)
class Cocycle:
    """A degree s cochain K_I(-p)^{-s} -> M_{J,q}, by generator index."""

    I: int
    p: tuple
    J: int
    q: tuple
    degree: int
    values: tuple  # one scalar per generator of K_I(-p)^{-degree}

    def __add__(self, other):
        return Cocycle(self.I, self.p, self.J, self.q, self.degree,
                       tuple(a + b for a, b in zip(self.values, other.values)))

    def scaled(self, c):
        return Cocycle(self.I, self.p, self.J, self.q, self.degree, tuple(c * a for a in self.values))


def _coboundaries(h: HomToQuotient, s: int):
    """Image of delta^{s-1} as row vectors in the full generator basis of P^{-s}."""
    if s == 0 or s - 1 not in h.delta:
        return []
    mat = h.delta[s - 1]
    rows, cols = h.basis[s], h.basis[s - 1]
    ngen = h.P.rank(-s)
    out = []
    for b in range(len(cols)):
        v = [0] * ngen
        for a, g in enumerate(rows):
            v[g] = mat[a][b]
        out.append(v)
    return out


def is_cocycle(c: Cocycle, field=None) -> bool:
    field = get_field(field)
    h = hom_to_quotient(c.I, c.p, c.J, c.q)
    if c.degree not in h.delta:
        return True
    rows, cols = h.basis[c.degree + 1], h.basis[c.degree]
    mat = h.delta[c.degree]
    for a in range(len(rows)):
        if field(sum(mat[a][b] * c.values[g] for b, g in enumerate(cols))) != 0:
            return False
    return True


def is_coboundary(c: Cocycle, field=None) -> bool:
    field = get_field(field)
    h = hom_to_quotient(c.I, c.p, c.J, c.q)
    return field.in_span(_coboundaries(h, c.degree), [field(x) for x in c.values])


def class_representative(I, p, J, q, s: int, field=None):
    """A cocycle spanning H^s of Hom(K_I(-p), M_{J,q}) modulo coboundaries, or None."""
    field = get_field(field)
    h = hom_to_quotient(I, p, J, q)
    if s not in h.basis:
        return None
    cols = h.basis[s]
    ngen = h.P.rank(-s)
    if s in h.delta:
        kern = field.kernel(h.delta[s], len(cols))
    else:
        kern = [[field(1) if a == b else field(0) for a in range(len(cols))] for b in range(len(cols))]
    bounds = _coboundaries(h, s)
    for v in kern:
        full_v = [field(0)] * ngen
        for b, g in enumerate(cols):
            full_v[g] = v[b]
        if not field.in_span(bounds, full_v):
            return Cocycle(to_mask(I), W.weight(p), to_mask(J), W.weight(q), s, tuple(full_v))
    return None


def _scalar_matrix(P: GradedFreeComplex, k: int):
    """d^k as a scalar matrix (rows: C^{k+1}, cols: C^k)."""
    rows, cols = P.rank(k + 1), P.rank(k)
    mat = [[0] * cols for _ in range(rows)]
    for (t, s), e in P.diffs.get(k, {}).items():
        mat[t][s] += sum(x for x, _ in e)
    return mat


def lift_to_chain_map(f: Cocycle, depth: int, field=None) -> dict:
    """Lift f : K_I(-p)^{-s} -> M_{J,q} to maps phi^k : P^k -> Q^{k+s}.

    P = K_I(-p), Q = K_J(-q).  Returns {k: scalar matrix} for
    k = -s, ..., -s-depth with d_Q phi^k = phi^{k+1} d_P, each solved as the
    reduced-echelon particular solution.
    """
    field = get_field(field)
    n = len(f.p)
    P = koszul(f.I, f.p, n)
    Q = koszul(f.J, f.q, n)
    s = f.degree
    src = P.terms[-s]
    # Q^0 is the single generator S(-q) mapping onto M_{J,q}
    phi = {-s: [[field(x) for x in f.values]]}
    for k in range(-s - 1, -s - depth - 1, -1):
        if k not in P.terms:
            break
        tgt_deg = k + s
        if tgt_deg not in Q.terms:
            phi[k] = [[field(0)] * P.rank(k) for _ in range(Q.rank(tgt_deg))]
            continue
        dP = _scalar_matrix(P, k)               # P^k -> P^{k+1}
        prev = phi[k + 1]                        # P^{k+1} -> Q^{k+1+s}
        dQ = _scalar_matrix(Q, tgt_deg)          # Q^{k+s} -> Q^{k+s+1}
        rhs = [[field(sum(prev[a][b] * dP[b][c] for b in range(len(dP)))) for c in range(P.rank(k))]
               for a in range(len(prev))]
        Qt = Q.terms[tgt_deg]
        X = [[field(0)] * P.rank(k) for _ in range(len(Qt))]
        for c, du in enumerate(P.terms[k]):
            allowed = [t for t, dt in enumerate(Qt) if W.leq(dt, du)]
            col_rhs = [rhs[a][c] for a in range(len(rhs))]
            if not allowed:
                if any(x != 0 for x in col_rhs):
                    raise LiftingError(f"no admissible entries in column {c} of degree {k}")
                continue
            A = [[dQ[a][t] for t in allowed] for a in range(len(dQ))]
            x = field.solve(A, len(allowed), col_rhs)
            if x is None:
                raise LiftingError(f"lifting system inconsistent at degree {k}, column {c}")
            for t, val in zip(allowed, x):
                X[t][c] = val
        phi[k] = X
    return phi


def yoneda_product(f: Cocycle, g: Cocycle, field=None) -> Cocycle:
    """Cocycle for g o f in Ext^{s+t}(O_{I,p}, O_{K,r})."""
    field = get_field(field)
    if f.J != g.I or f.q != g.p:
        raise PreconditionError("target of f must be the source of g")
    s, t = f.degree, g.degree
    phi = lift_to_chain_map(f, t, field)
    n = len(f.p)
    P = koszul(f.I, f.p, n)
    k = -s - t
    if k not in P.terms:
        return Cocycle(f.I, f.p, g.J, g.q, s + t, ())
    X = phi[k]  # P^{-s-t} -> Q^{-t}
    vals = []
    for c, du in enumerate(P.terms[k]):
        v = field(sum(field(g.values[a]) * X[a][c] for a in range(len(g.values))))
        if not _quotient_piece(du, g.J, g.q):
            v = field(0)
        vals.append(v)
    return Cocycle(f.I, f.p, g.J, g.q, s + t, tuple(vals))


def _datum(d):
    I, p, S, J = d
    p = W.weight(p)
    return to_mask(I), p, to_mask(S), to_mask(J), W.add(p, W.chi(S, len(p)))


def yoneda_compose_nonzero(f, g, field=None) -> bool:
    """f = (I,p,S,J), g = (J,q,T,K): is the Yoneda product of their Ext classes nonzero?"""
    field = get_field(field)
    I, p, S, J, q = _datum(f)
    J2, q2, T, K, r = _datum(g)
    if J2 != J or q2 != q:
        raise PreconditionError("g must start where f ends (q = p + chi_S)")
    cf = class_representative(I, p, J, q, size(S), field)
    cg = class_representative(J, q, K, r, size(T), field)
    if cf is None or cg is None:
        raise PreconditionError("one of the Ext classes does not exist")
    return not is_coboundary(yoneda_product(cf, cg, field), field)


# -- canonical generators -----------------------------------------------------

def restriction_cocycle(I, p, j) -> Cocycle:
    """rho^j_{I,p} : O_{I,p} -> O_{I+j,p}, the quotient map."""
    I = to_mask(I)
    p = W.weight(p)
    return Cocycle(I, p, I | (1 << (j - 1)), p, 0, (1,))


def extension_cocycle(I, p, i, field=None) -> Cocycle:
    """psi^i_{I,p} in Ext^1(O_{I,p}, O_{I-i,p+e_i}) from 0 -> A --z_i--> B -> O_{I,p} -> 0.

    A = O_{I-i,p+e_i}, B = O_{I-i,p}.  Lift K_I(-p)^0 -> O_{I,p} to B, compose
    with d, and divide by z_i inside A.
    """
    field = get_field(field)
    I = to_mask(I)
    p = W.weight(p)
    n = len(p)
    bit = 1 << (i - 1)
    if not I & bit:
        raise PreconditionError("i must lie in I")
    I1 = I & ~bit
    P = koszul(I, p, n)
    lift0 = [field(1)]  # e_empty -> 1 in B
    d = _scalar_matrix(P, -1)
    vals = []
    for c, du in enumerate(P.terms[-1]):
        x = field(sum(lift0[a] * d[a][c] for a in range(len(lift0))))
        if x != 0 and _quotient_piece(du, I1, p):
            mono = W.sub(du, p)
            if mono[i - 1] < 1:
                raise LiftingError("composite does not land in z_i * A")
            vals.append(x)
        else:
            vals.append(field(0))
    return Cocycle(I, p, I1, W.add(p, W.eps(i, n)), 1, tuple(vals))


def phi_sign(p, i) -> int:
    """(-1)^eps with eps = p(1) + ... + p(i-1)."""
    return (-1) ** (sum(p[: i - 1]) % 2)


def normalized_extension_cocycle(I, p, i, field=None) -> Cocycle:
    return extension_cocycle(I, p, i, field).scaled(phi_sign(p, i))


def same_class(a: Cocycle, b: Cocycle, sign: int = 1, field=None) -> bool:
    """a == sign * b in cohomology, with both sides nonzero."""
    return (is_coboundary(a + b.scaled(-sign), field)
            and not is_coboundary(a, field))
