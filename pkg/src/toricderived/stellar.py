"""The stellar subdivision equivalence on line bundle indices.

For Sigma~ = stellar_subdivide(Sigma, sigma) the functor sends O(p) to
O(s(p)) with s(p) = (p, floor(sum_{i in sigma} p_i / |sigma|)).
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .cech import line_bundle_ext
from .errors import ParseError, PreconditionError
from .simplicial import SimplicialComplex, recognize_weld, stellar_subdivide
from .subsets import members, size, submasks, to_mask
from . import weights as W


def pullback_index(p, sigma) -> tuple:
    sigma = to_mask(sigma)
    if size(sigma) < 2:
        raise PreconditionError("sigma must have at least two elements")
    p = W.weight(p)
    return p + (sum(p[i - 1] for i in members(sigma)),)


def pushforward_index(p, k: int) -> tuple:
    if k < 1:
        raise PreconditionError("k must be positive")
    p = W.weight(p)
    return p[:-1] + (p[-1] // k,)


def composite_s(p, sigma) -> tuple:
    return pushforward_index(pullback_index(p, sigma), size(to_mask(sigma)))


def in_image_s(q, sigma) -> bool:
    """q lies in the image of s iff 0 <= sum_sigma q_i - |sigma| q_{n+1} < |sigma|."""
    sigma = to_mask(sigma)
    k = size(sigma)
    r = sum(q[i - 1] for i in members(sigma)) - k * q[-1]
    return 0 <= r < k


def section_index(q) -> tuple:
    """Left inverse of s: drop the last coordinate."""
    return tuple(q[:-1])


@dataclass
class StellarReport:
    pairs: int = 0
    mismatches: list = dc_field(default_factory=list)
    hom_pattern_ok: bool | None = None

    @property
    def ok(self):
        return not self.mismatches

    def to_json(self):
        return {"pass": self.ok, "pairs": self.pairs,
                "mismatches": [[list(p), list(q), a.to_json(), b.to_json()]
                               for p, q, a, b in self.mismatches]}


def verify_stellar_window(sigma_complex: SimplicialComplex, sigma, window, field=None,
                          max_mismatches=20) -> StellarReport:
    """Compare Ext(O(p), O(q)) on U_Sigma with Ext(O(s p), O(s q)) on U_Sigma~."""
    sigma = to_mask(sigma)
    tilde = stellar_subdivide(sigma_complex, sigma)
    window = W.parse_window(window, sigma_complex.n)
    pts = window.points()
    image = {p: composite_s(p, sigma) for p in pts}
    rep = StellarReport()
    for p in pts:
        for q in pts:
            rep.pairs += 1
            a = line_bundle_ext(sigma_complex, p, q, field)
            b = line_bundle_ext(tilde, image[p], image[q], field)
            if a != b and len(rep.mismatches) < max_mismatches:
                rep.mismatches.append((p, q, a, b))
    return rep


def koszul_twists(q, sigma):
    """Twists q - chi_J, J <= sigma, of the Koszul sequence on the z_i, i in sigma."""
    n = len(q)
    return [W.sub(q, W.chi(J, n)) for J in submasks(to_mask(sigma))]


def koszul_closure(seeds, region: W.Window, relations):
    """Close ``seeds`` inside ``region`` under: if all but one line bundle of a
    Koszul sequence (one per non-face in ``relations``, at every twist) is
    present, add the missing one."""
    rels = [to_mask(r) for r in relations]
    n = region.n
    chis = [[W.chi(J, n) for J in submasks(r)] for r in rels]
    have = set(p for p in seeds if p in region)

    def check(top, cs):
        terms = [W.sub(top, c) for c in cs]
        if not all(t in region for t in terms):
            return None
        missing = [t for t in terms if t not in have]
        return missing[0] if len(missing) == 1 else None

    queue = []
    for top in region.points():
        for cs in chis:
            m = check(top, cs)
            if m is not None and m not in have:
                have.add(m)
                queue.append(m)
    while queue:
        x = queue.pop()
        for cs in chis:
            for c in cs:
                m = check(W.add(x, c), cs)
                if m is not None and m not in have:
                    have.add(m)
                    queue.append(m)
    return have


def generation_witness(sigma_complex: SimplicialComplex, sigma, window, seeds=None,
                       margin=None, extra_relations=()) -> bool:
    """Finite-window evidence that the line bundles O(s(p)) generate.

    ``sigma_complex`` is the subdivided complex on [n+1].  The BFS runs in
    the window padded by a margin, because the exact sequences that fill
    the window's corners involve bundles just outside it.  Without an
    explicit ``margin`` the padding grows from 0 up to |sigma| * (width + 1)
    and the first success is returned (closures only grow with the region).
    Returns True iff every index of the window is reached.
    """
    sigma = to_mask(sigma)
    window = W.parse_window(window, sigma_complex.n)
    if margin is None:
        width = max(hi - lo for lo, hi in window.bounds)
        margins = range(0, size(sigma) * (width + 1) + 1)
    else:
        margins = [margin]
    for m in margins:
        region = window.padded(m)
        pts = seeds
        if pts is None:
            pts = [composite_s(p, sigma) for p in W.Window(region.bounds[:-1]).points()]
        have = koszul_closure(pts, region, [sigma, *extra_relations])
        if all(q in have for q in window.points()):
            return True
    return False


# -- move scripts -------------------------------------------------------------------

@dataclass
class MoveStep:
    op: str
    before: SimplicialComplex
    after: SimplicialComplex
    sigma: int
    report: StellarReport


@dataclass
class MoveResult:
    final: SimplicialComplex
    steps: list
    correspondence: list  # (start index, end index or None)

    @property
    def ok(self):
        return all(s.report.ok for s in self.steps)

    def to_json(self):
        return {"pass": self.ok, "final": self.final.to_json(),
                "steps": [{"op": s.op, "sigma": list(members(s.sigma)),
                           "complex": s.after.to_json(), "report": s.report.to_json()}
                          for s in self.steps],
                "correspondence": [[list(a), list(b) if b is not None else None]
                                   for a, b in self.correspondence]}


def run_move_sequence(start: SimplicialComplex, script, window, field=None, verify=True) -> MoveResult:
    """Apply subdivide/weld moves, verifying each step on the window.

    A subdivide step maps O(p) to O(s(p)); a weld step is the inverse of a
    recognized subdivision and maps O(q) to O(q[:-1]) when q is in the
    image of s, and to None otherwise.
    """
    window = W.parse_window(window, start.n)
    current = start
    corr = {p: p for p in window.points()}
    steps = []
    for k, move in enumerate(script):
        if not isinstance(move, dict) or "op" not in move:
            raise ParseError("each move needs an 'op'", f"script[{k}]")
        op = move["op"]
        if op == "subdivide":
            sigma = to_mask(move.get("sigma", []))
            try:
                after = stellar_subdivide(current, sigma)
            except PreconditionError as e:
                raise ParseError(str(e), f"script[{k}]") from e
            w = window.resized(current.n)
            rep = verify_stellar_window(current, sigma, w, field) if verify else StellarReport()
            corr = {a: (composite_s(b, sigma) if b is not None else None) for a, b in corr.items()}
            steps.append(MoveStep(op, current, after, sigma, rep))
            current = after
        elif op == "weld":
            vertex = move.get("vertex")
            if vertex != current.n:
                raise ParseError(f"weld vertex must be the last vertex {current.n}", f"script[{k}]")
            found = recognize_weld(current)
            if found is None:
                raise ParseError("complex is not a stellar subdivision at its last vertex",
                                 f"script[{k}]")
            base, sigma = found
            w = window.resized(base.n)
            rep = verify_stellar_window(base, sigma, w, field) if verify else StellarReport()
            corr = {a: (section_index(b) if b is not None and in_image_s(b, sigma) else None)
                    for a, b in corr.items()}
            steps.append(MoveStep(op, current, base, sigma, rep))
            current = base
        else:
            raise ParseError(f"unknown op {op!r}", f"script[{k}]")
    return MoveResult(current, steps, sorted(corr.items()))
