"""Command-line front end.

Every command prints a JSON report (sorted keys) and exits 0 when all
requested checks pass, 1 on a verification failure and 2 on bad input.
A ``--job FILE`` JSON object supplies any option; flags given on the
command line override it.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from multiprocessing import Pool

from . import __version__
from . import cech, ext_engine, homalg, noncomm, stellar
from . import weights as W
from .errors import BoundaryError, ParseError, PreconditionError
from .fields import get_field
from .simplicial import full_simplex, load_complex
from .subsets import full, members, submasks

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _subset(text):
    if isinstance(text, (list, tuple)):
        return [int(x) for x in text]
    text = str(text).strip().strip("{}[]")
    if text in ("", "-", "none", "empty"):
        return []
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise InputError(f"bad subset {text!r}; expected e.g. 1,3") from e


def _weight(text):
    if isinstance(text, (list, tuple)):
        return W.weight(text)
    text = str(text).strip().strip("()[]")
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as e:
        raise InputError(f"bad weight {text!r}; expected e.g. 0,-1,2") from e


def _window(text, n):
    try:
        return W.parse_window(text, n)
    except ValueError as e:
        raise InputError(str(e)) from e


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON at line {e.lineno}: {e.msg}", path) from e


def _complex(path, n=None):
    if path is None:
        if n is None:
            raise InputError("--complex is required")
        return full_simplex(n)
    return load_complex(path)


# -- parallel sweeps ------------------------------------------------------------

def _affine_row(task):
    n, I, p, bounds, field = task
    F = get_field(field)
    win = W.Window(bounds)
    diff = []
    count = 0
    for J in submasks(full(n)):
        for q in win.points():
            count += 1
            a = ext_engine.ext_dims_affine(I, p, J, q)
            b = homalg.ext_oracle_affine(I, p, J, q, F)
            if a != b:
                diff.append({"I": list(members(I)), "p": list(p), "J": list(members(J)),
                             "q": list(q), "formula": a.to_json(), "oracle": b.to_json()})
    return count, diff


def _open_row(task):
    sigma_json, I, p, bounds, field = task
    from .simplicial import validate
    sigma = validate(sigma_json).complex
    F = get_field(field)
    win = W.Window(bounds)
    diff = []
    count = 0
    for J in submasks(full(sigma.n)):
        for q in win.points():
            if W.supp(q) & ~J:
                continue
            count += 1
            a = ext_engine.ext_dims(sigma, I, p, J, q)
            b = cech.ext_oracle_U(sigma, I, p, J, q, F)
            if a != b:
                diff.append({"I": list(members(I)), "p": list(p), "J": list(members(J)),
                             "q": list(q), "formula": a.to_json(), "oracle": b.to_json()})
    return count, diff


def default_jobs():
    if hasattr(os, "sched_getaffinity"):
        return len(os.sched_getaffinity(0))
    return os.cpu_count() or 1


def run_pool(func, tasks, jobs):
    """Map ``func`` over ``tasks`` keeping task order; jobs <= 1 runs in-process."""
    if jobs is None or jobs <= 0:
        jobs = default_jobs()
    if jobs == 1 or len(tasks) <= 1:
        return [func(t) for t in tasks]
    with Pool(min(jobs, len(tasks))) as pool:
        return pool.map(func, tasks, chunksize=max(1, len(tasks) // (4 * jobs)))


def crosscheck(n, window, field=None, sigma=None, jobs=None):
    """Formula-vs-oracle sweep; the report's ``diff`` is empty on success.

    Without ``sigma`` every (I, p, J, q) with p, q in the window is compared
    against the Koszul oracle on affine space.  With ``sigma`` only
    collection-normalized pairs are swept, against the Cech oracle on U_Sigma.
    """
    win = W.parse_window(window, n)
    fspec = "Q" if get_field(field).name == "QQ" else get_field(field).q
    if sigma is None:
        tasks = [(n, I, p, win.bounds, fspec) for I in submasks(full(n)) for p in win.points()]
        results = run_pool(_affine_row, tasks, jobs)
    else:
        tasks = [(sigma.to_json(), I, p, win.bounds, fspec)
                 for I in submasks(full(n)) for p in win.points() if not W.supp(p) & ~I]
        results = run_pool(_open_row, tasks, jobs)
    cases = sum(c for c, _ in results)
    diff = [d for _, ds in results for d in ds]
    return {"pass": not diff, "cases": cases, "diff": diff, "n": n,
            "window": win.to_json(), "field": str(get_field(field))}


# -- commands ---------------------------------------------------------------------

def cmd_ext(o):
    p, q = _weight(o.p), _weight(o.q)
    if len(p) != len(q):
        raise InputError("--p and --q must have the same length")
    affine = o.complex is None
    sigma = _complex(o.complex, len(p))
    if sigma.n != len(p):
        raise InputError(f"weights have length {len(p)} but the complex lives on [{sigma.n}]")
    I, J = _subset(o.I or []), _subset(o.J or [])
    F = get_field(o.field)
    if affine:
        formula = ext_engine.ext_dims_affine(I, p, J, q)
        oracle = homalg.ext_oracle_affine(I, p, J, q, F)
    else:
        try:
            formula = ext_engine.ext_dims(sigma, I, p, J, q)
        except PreconditionError:
            formula = None
        oracle = cech.ext_oracle_U(sigma, I, p, J, q, F)
    ok = formula is None or formula == oracle
    out = {"pass": ok, "oracle": oracle.to_json(),
           "formula": formula.to_json() if formula is not None else None}
    if formula is not None and not ok:
        out["counterexample"] = {"formula": formula.to_json(), "oracle": oracle.to_json()}
    return ok, out


def cmd_cech(o):
    p = _weight(o.p)
    sigma = _complex(o.complex, len(p))
    if sigma.n != len(p):
        raise InputError(f"weight has length {len(p)} but the complex lives on [{sigma.n}]")
    cx = cech.cech_complex(sigma, _subset(o.I or []), p)
    tab = cx.cohomology(get_field(o.field))
    ok = cx.d_squared_zero()
    return ok, {"pass": ok, "cohomology": tab.to_json(), "cover": [list(members(m)) for m in sigma.maximal]}


def cmd_collection(o):
    sigma = _complex(o.complex)
    win = _window(o.window or "-2..2", sigma.n)
    oracle = None
    if o.oracle:
        F = get_field(o.field)
        oracle = lambda s, I, p, J, q: cech.ext_oracle_U(s, I, p, J, q, F)  # noqa: E731
    rep = ext_engine.verify_collection_window(sigma, win, oracle=oracle,
                                              associativity=not o.no_associativity)
    out = rep.to_json()
    if not rep.ok:
        out["counterexample"] = str(rep.violations[0])
    return rep.ok, out


def cmd_stellar(o):
    sigma_c = _complex(o.complex)
    F = get_field(o.field)
    if o.script:
        script = o.script if isinstance(o.script, (list, dict)) else _load_json(o.script)
        if isinstance(script, dict):
            script = script.get("moves", [])
        if not isinstance(script, list):
            raise ParseError("script must be a list of moves", str(o.script))
        win = _window(o.window or "-2..2", sigma_c.n)
        res = stellar.run_move_sequence(sigma_c, script, win, F)
        return res.ok, res.to_json()
    if o.sigma is None:
        raise InputError("--sigma or --script is required")
    sig = _subset(o.sigma)
    win = _window(o.window or "-2..2", sigma_c.n)
    rep = stellar.verify_stellar_window(sigma_c, sig, win, F)
    out = rep.to_json()
    ok = rep.ok
    out["image_characterization"] = all(stellar.in_image_s(stellar.composite_s(p, sig), sig)
                                        for p in win.points())
    ok = ok and out["image_characterization"]
    if o.generation:
        from .simplicial import stellar_subdivide
        tilde = stellar_subdivide(sigma_c, sig)
        g = stellar.generation_witness(tilde, sig, win.resized(tilde.n))
        out["generation"] = g
        ok = ok and g
    out["pass"] = ok
    return ok, out


def cmd_noncomm(o):
    if o.theta is None:
        raise InputError("--theta is required")
    data = o.theta if isinstance(o.theta, dict) else _load_json(o.theta)
    theta = noncomm.load_theta(data, window=o.window, field=o.field)
    yb = noncomm.yb_check(theta)
    out = {"yang_baxter": yb.to_json()}
    if not yb.ok:
        out["pass"] = False
        out["counterexample"] = out["yang_baxter"]["violation"]
        return False, out
    norm = noncomm.normalize(theta)
    checks = {"commutation": noncomm.verify_commutation(theta, norm),
              "base_normalization": noncomm.check_base_normalization(norm),
              "recurrences": noncomm.check_recurrences(theta, norm)}
    for k, v in checks.items():
        out[k] = v.to_json()
    inner = theta.window.interior(1)
    table = noncomm.normalized_table(theta, norm)
    out["composition_table_matches_commutative"] = table == noncomm.commutative_table(theta.n, inner, theta.field)
    ok = all(checks.values()) and out["composition_table_matches_commutative"]
    out["pass"] = ok
    return ok, out


def cmd_crosscheck(o):
    if o.n is None:
        raise InputError("--n is required")
    sigma = load_complex(o.complex) if o.complex else None
    if sigma is not None and sigma.n != o.n:
        raise InputError(f"complex lives on [{sigma.n}], not [{o.n}]")
    out = crosscheck(o.n, _window(o.window or "-2..2", o.n), o.field, sigma, o.jobs)
    if out["diff"]:
        out["counterexample"] = out["diff"][0]
    return out["pass"], out


def cmd_export_quiver(o):
    sigma = _complex(o.complex)
    win = _window(o.window or "-1..1", sigma.n)
    fmt_ = o.format or "json"
    if fmt_ not in ("json", "dot"):
        raise InputError("--format must be dot or json")
    return True, ext_engine.export_quiver(sigma, win, fmt_)


COMMANDS = {"ext": cmd_ext, "cech": cmd_cech, "collection": cmd_collection,
            "stellar": cmd_stellar, "noncomm": cmd_noncomm, "crosscheck": cmd_crosscheck,
            "export-quiver": cmd_export_quiver}


def build_parser():
    ap = argparse.ArgumentParser(prog="toricderived", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, window=True):
        sp.add_argument("--job", help="JSON file with default values for any option")
        sp.add_argument("--field", help="q (F_32003, default), Q, or a prime")
        sp.add_argument("--output", "-o", help="write the report here instead of stdout")
        if window:
            sp.add_argument("--window", help="lo..hi or lo..hi,lo..hi,...")
        return sp

    sp = common(sub.add_parser("ext", help="Ext dimensions by formula and oracle"), window=False)
    sp.add_argument("--complex")
    for flag in ("--I", "--p", "--J", "--q"):
        sp.add_argument(flag)

    sp = common(sub.add_parser("cech", help="Cech cohomology of O_{I,p} on U_Sigma"), window=False)
    sp.add_argument("--complex")
    sp.add_argument("--I")
    sp.add_argument("--p")

    sp = common(sub.add_parser("collection", help="verify the exceptional collection on a window"))
    sp.add_argument("--complex")
    sp.add_argument("--oracle", action="store_true", default=None,
                    help="cross-check every pair against the Cech oracle")
    sp.add_argument("--no-associativity", action="store_true", default=None)

    sp = common(sub.add_parser("stellar", help="verify the stellar subdivision equivalence"))
    sp.add_argument("--complex")
    sp.add_argument("--sigma")
    sp.add_argument("--script", help="JSON list of {op: subdivide|weld, ...} moves")
    sp.add_argument("--generation", action="store_true", default=None,
                    help="also run the finite-window generation witness")

    sp = common(sub.add_parser("noncomm", help="Yang-Baxter check and normalization"))
    sp.add_argument("--theta")

    sp = common(sub.add_parser("crosscheck", help="formula vs oracle sweep"))
    sp.add_argument("--n", type=int)
    sp.add_argument("--complex", help="sweep on U_Sigma instead of affine space")
    sp.add_argument("--jobs", type=int, help="worker processes (default: all cores)")

    sp = common(sub.add_parser("export-quiver", help="indecomposable arrows as DOT or JSON"))
    sp.add_argument("--complex")
    sp.add_argument("--format")
    return ap


def _fix_negative_values(argv):
    """Let ``--window -2..2`` and ``--p -1,0`` through argparse."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok.startswith("--") and "=" not in tok:
            out.append(tok)
            nxt = next(it, None)
            if nxt is None:
                break
            if nxt.startswith("-") and len(nxt) > 1 and (nxt[1].isdigit() or nxt[1] == "."):
                out[-1] = f"{tok}={nxt}"
            else:
                out.append(nxt)
        else:
            out.append(tok)
    return out


def _apply_job(o):
    if not o.job:
        return
    data = _load_json(o.job)
    if not isinstance(data, dict):
        raise ParseError("job file must hold a JSON object", o.job)
    base = os.path.dirname(os.path.abspath(o.job))
    for key, val in data.items():
        attr = key.replace("-", "_")
        if attr in ("command", "job"):
            continue
        if not hasattr(o, attr):
            raise ParseError(f"unknown option {key!r}", o.job)
        if getattr(o, attr) is None:
            if attr in ("complex", "theta", "script") and isinstance(val, str) and not os.path.isabs(val):
                val = os.path.join(base, val)
            setattr(o, attr, val)


def _emit(result, path):
    text = result if isinstance(result, str) else json.dumps(result, sort_keys=True, indent=1) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        o = parser.parse_args(_fix_negative_values(argv))
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_PASS
    try:
        _apply_job(o)
        ok, result = COMMANDS[o.command](o)
        _emit(result, o.output)
    except (ParseError, PreconditionError, InputError, BoundaryError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    if not ok:
        ce = result.get("counterexample") if isinstance(result, dict) else None
        print(f"verification failed; first counterexample: {json.dumps(ce, sort_keys=True)}",
              file=sys.stderr)
        return EXIT_FAIL
    return EXIT_PASS


if __name__ == "__main__":
    sys.exit(main())
