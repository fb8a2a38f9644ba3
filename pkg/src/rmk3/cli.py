"""Command-line interface.

Machine output is JSONL (one sorted-key record per line) on stdout or
``--out``; a short human summary goes to stderr.  Exit codes: 0 success or
candidate, 1 negative answer (rejected, failed check, no witness), 2 usage
error, 3 computational refusal (bad prime, ambiguous sign, ...).
"""
from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager

from sympy import isprime

from . import __version__

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_REFUSED = 0, 1, 2, 3


class Refusal(Exception):
    """Raised by subcommands for inputs they cannot handle; becomes exit code 3."""


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# plumbing


class Output:
    def __init__(self, fh, surface: str | None = None):
        self.fh = fh
        self.surface = surface

    def emit(self, record: dict):
        rec = {"version": __version__, "surface": self.surface, **record}
        self.fh.write(json.dumps(rec, sort_keys=True, default=str) + "\n")


@contextmanager
def _open_out(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _say(msg: str):
    print(msg, file=sys.stderr)


def _surface(args):
    from .families import make_family
    from .surface import load_surface, parse_rational

    if args.surface and args.family:
        raise UsageError("--surface and --family are mutually exclusive")
    if args.surface:
        if args.t is not None:
            raise UsageError("--t only applies to --family")
        return load_surface(args.surface)
    if args.family:
        if args.family == "x13":
            if args.t is not None:
                raise UsageError("x13 takes no --t")
            return make_family("x13")
        if args.t is None:
            raise UsageError(f"--family {args.family} needs --t")
        return make_family(args.family, parse_rational(args.t))
    raise UsageError("give --surface FILE or --family NAME")


def _prime(p):
    if p is None:
        raise UsageError("--p is required")
    if p < 3 or not isprime(p):
        raise UsageError(f"--p must be an odd prime, got {p}")
    return p


def _workers(args) -> int:
    from .batchscan import default_workers

    return args.workers if args.workers is not None else default_workers()


def _add_surface_args(sp):
    sp.add_argument("--surface", metavar="FILE", help="surface JSON file")
    sp.add_argument("--family", choices=("x2", "x5", "x13"))
    sp.add_argument("--t", metavar="RAT", help="family parameter, e.g. 1 or 3/2")


# ---------------------------------------------------------------------------
# subcommands


def cmd_count(args, out):
    from .counter import count_bruteforce, count_singular
    from .surface import as_mod_p

    X = _surface(args)
    out.surface = X.digest()
    p = _prime(args.p)
    if not 1 <= args.ext <= 4:
        raise UsageError("--ext must be between 1 and 4")
    Xp = as_mod_p(X, p)
    count = count_bruteforce if args.method == "bruteforce" else count_singular
    kwargs = {} if args.method == "bruteforce" else {"method": args.method}
    counts = [count(Xp, (p, k), **kwargs) for k in range(1, args.ext + 1)]
    out.emit({"command": "count", "p": p, "ext": args.ext, "counts": counts, "good": Xp.good})
    _say(f"#V(F_{p}^k), k=1..{args.ext}: {counts}")
    return EXIT_OK


def cmd_charpoly(args, out):
    from .charpoly import ArtinTateRefused, artin_tate_class, transcendental_charpoly
    from .ratpoly import galois_group_quartic, is_irreducible_quartic, quartic_discriminant, real_quadratic_subfields

    X = _surface(args)
    out.surface = X.digest()
    p = _prime(args.p)
    T = transcendental_charpoly(X, p)
    rec = {"command": "charpoly", **T.to_json()}
    if T.degree == 4:
        h = T.chitr
        rec["disc"] = int(quartic_discriminant(h))
        if is_irreducible_quartic(h):
            rec["galois"] = galois_group_quartic(h, weil_p=p)
            rec["real_subfields"] = real_quadratic_subfields(h, weil_p=p)
        try:
            rec["artin_tate_class"] = artin_tate_class(T)
        except ArtinTateRefused as exc:
            rec["artin_tate_class"] = None
            rec["artin_tate_note"] = str(exc)
    out.emit(rec)
    _say(f"p={p} eps={T.eps} chi^tr degree {T.degree}: {rec['chitr']}")
    return EXIT_OK


def cmd_detect(args, out):
    from .detect import DeterministicParams, StatisticalParams, detect_deterministic, detect_statistical

    X = _surface(args)
    out.surface = X.digest()
    if args.mode == "det":
        if args.d is None:
            raise UsageError("--mode det needs --d")
        params = DeterministicParams(inert_bound=args.prime_bound or 300)
        report = detect_deterministic(X, args.d, params)
    else:
        params = StatisticalParams(inert_bound=args.prime_bound or 300)
        report = detect_statistical(X, params)
    out.emit({"command": "detect", **report.to_json()})
    _say(f"{report.mode}: {report.outcome} (step {report.step}) {report.reason}".rstrip())
    return EXIT_OK if report.candidate else EXIT_NEGATIVE


def _form_lists(args):
    from .batchscan import forms_of_height, read_forms_csv

    if args.forms and args.height is not None:
        raise UsageError("--forms and --height are mutually exclusive")
    if args.forms:
        if len(args.forms) not in (1, 3):
            raise UsageError("give one --forms file (used three times) or three")
        lists = [read_forms_csv(f) for f in args.forms]
        return lists * 3 if len(lists) == 1 else lists
    if args.height is not None:
        forms = forms_of_height(args.height)
        return [forms, forms, forms]
    raise UsageError("give --forms FILE or --height H")


def cmd_scan(args, out):
    from .batchscan import scan_prime

    p = _prime(args.p)
    lists = _form_lists(args)
    res = scan_prime(*lists, p, workers=_workers(args))
    k1, k2, k3 = res.kept
    for a, i in enumerate(k1):
        for b, j in enumerate(k2):
            for c, k in enumerate(k3):
                f1, f2, f3 = lists[0][i], lists[1][j], lists[2][k]
                out.emit({"q1": f1.to_json(), "q2": f2.to_json(), "q3": f3.to_json(), "p": p, "count": int(res.counts[a, b, c])})
    for n, skipped in enumerate(res.skipped):
        for i in skipped:
            out.emit({"skipped": f"q{n + 1}", "index": i, "form": lists[n][i].to_json(), "p": p})
    _say(f"scanned {res.counts.size} surfaces at p={p}, skipped {sum(map(len, res.skipped))} forms")
    return EXIT_OK


def cmd_sieve(args, out):
    from .batchscan import ScanConfig, rm_sieve, write_survivors_jsonl
    from .detect import inert_primes

    if args.d is None:
        raise UsageError("sieve needs --d")
    lists = _form_lists(args)
    if args.primes:
        primes = sorted(int(x) for x in args.primes.split(","))
    else:
        primes = [p for p in inert_primes(args.d, args.prime_bound or 100) if p > 2]
    try:
        config = ScanConfig(primes, product_square=args.product_square, disc_class_d=args.d if args.disc_class else None)
        survivors = list(rm_sieve(lists, args.d, config))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    n = write_survivors_jsonl(out.fh, survivors, {"version": __version__, "d": args.d})
    _say(f"{n} survivors over primes {primes}")
    return EXIT_OK


def cmd_family(args, out):
    from .families import (
        jacobian_count_check,
        qualifying_primes,
        theorem73_count,
        two_is_square,
        verify_family_congruences,
        verify_fibration_identities,
    )
    from .surface import parse_rational

    ok = True
    if args.check == "congruences":
        if args.family is None:
            raise UsageError("--check congruences needs --family")
        rep = verify_family_congruences(args.family, args.prime_bound or 200)
        out.emit({"command": "family", "check": "congruences", **rep.to_json()})
        ok = rep.passed
        _say(f"{args.family}: {rep.cells} cells over {len(rep.primes)} primes, {len(rep.failures)} failures")
    elif args.check == "theorem73":
        bound = args.prime_bound or 197
        cells = bad = 0
        for q in qualifying_primes("x2", bound):
            if q < 5 or two_is_square(q):
                continue
            for t in range(q):
                r = theorem73_count(q, t)
                cells += 1
                bad += not r.passed
                out.emit({"check": "theorem73", "q": q, "t": t, "count": r.count, "expected": r.expected, "case": r.case, "passed": r.passed})
        ok = bad == 0
        _say(f"theorem73: {cells} cells, {bad} failures")
    elif args.check == "identities":
        if args.t is None:
            raise UsageError("--check identities needs --t")
        verdicts = verify_fibration_identities(parse_rational(args.t))
        for v in verdicts:
            out.emit({"check": "identities", "t": args.t, **v.to_json()})
        ok = all(v.passed for v in verdicts)
        _say(f"identities at t={args.t}: {sum(v.passed for v in verdicts)}/{len(verdicts)} pass")
    elif args.check == "jacobian":
        if args.t is None or args.q is None:
            raise UsageError("--check jacobian needs --t and --q")
        rep = jacobian_count_check(int(args.t), args.q)
        out.emit({"check": "jacobian", **rep.to_json()})
        ok = rep.passed
        _say(f"jacobian t={args.t} q={args.q}: {'pass' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_hodge(args, out):
    from .hodge import (
        T_SPACE,
        build_rm_endomorphism,
        search_block_endomorphisms,
        sum_of_two_squares,
        t_plus_form_matrix,
        verify_rm_endomorphism,
    )
    from .surface import parse_rational

    if args.d is None:
        raise UsageError("hodge needs --d")
    d = parse_rational(args.d)
    if d <= 0:
        raise UsageError("--d must be positive")
    w = sum_of_two_squares(d)
    if w is None:
        hits = search_block_endomorphisms(d)
        out.emit({"command": "hodge", "d": str(d), "witness": None, "search_hits": [[str(u), str(v)] for u, v in hits],
                  "note": "bounded random search; evidence, not proof"})
        _say(f"{d} is not a sum of two rational squares; no RM endomorphism of the block form")
        return EXIT_NEGATIVE
    phi = build_rm_endomorphism(d)
    report = verify_rm_endomorphism(T_SPACE, phi, d)
    rec = {
        "command": "hodge",
        "d": str(d),
        "witness": [str(w[0]), str(w[1])],
        "blocks": [[[str(x) for x in row] for row in b] for b in phi.blocks],
        "verification": report.to_json(),
    }
    u, v = w
    if v == 0:
        u, v = v, u
    rec["t_plus"] = t_plus_form_matrix(d, u, v).to_json()
    out.emit(rec)
    _say(f"{d} = ({w[0]})^2 + ({w[1]})^2; phi verified: {report.passed}")
    return EXIT_OK if report.passed else EXIT_NEGATIVE


def cmd_prob(args, out):
    from .detect import format_probability, survival_probabilities, survival_tail

    mode = {"stat": "statistical", "statistical": "statistical", "inert": "inert"}[args.mode]
    if mode == "inert" and args.d is None:
        raise UsageError("--mode inert needs --d")
    x = survival_probabilities(mode, args.d)
    rec = {"command": "prob", "mode": mode, "d": args.d, "probability": format_probability(x)}
    if mode == "statistical":
        rec["tail"] = format_probability(survival_tail())
    out.emit(rec)
    _say(rec["probability"])
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rmk3", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", metavar="FILE")
        sp.add_argument("--workers", type=int)

    sp = sub.add_parser("count", help="point counts of the singular model")
    _add_surface_args(sp)
    sp.add_argument("--p", type=int)
    sp.add_argument("--ext", type=int, default=1)
    sp.add_argument("--method", choices=("fft", "direct", "bruteforce"), default="fft")
    common(sp)
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("charpoly", help="transcendental characteristic polynomial at a good prime")
    _add_surface_args(sp)
    sp.add_argument("--p", type=int)
    common(sp)
    sp.set_defaults(func=cmd_charpoly)

    sp = sub.add_parser("detect", help="statistical or deterministic RM test")
    _add_surface_args(sp)
    sp.add_argument("--mode", choices=("stat", "det"), default="stat")
    sp.add_argument("--d", type=int)
    sp.add_argument("--prime-bound", type=int)
    common(sp)
    sp.set_defaults(func=cmd_detect)

    for name, func, helptext in (("scan", cmd_scan, "count a Cartesian product of form lists"),
                                 ("sieve", cmd_sieve, "inert-prime sieve over form lists")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--forms", action="append", metavar="CSV")
        sp.add_argument("--height", type=int)
        sp.add_argument("--p", type=int)
        sp.add_argument("--d", type=int)
        sp.add_argument("--primes", help="comma-separated inert primes")
        sp.add_argument("--prime-bound", type=int)
        sp.add_argument("--product-square", action="store_true")
        sp.add_argument("--disc-class", action="store_true", help="one discriminant in the class of d")
        common(sp)
        sp.set_defaults(func=func)

    sp = sub.add_parser("family", help="checks on the explicit families")
    sp.add_argument("--family", choices=("x2", "x5", "x13"))
    sp.add_argument("--check", choices=("congruences", "theorem73", "identities", "jacobian"), required=True)
    sp.add_argument("--t", metavar="RAT")
    sp.add_argument("--q", type=int)
    sp.add_argument("--prime-bound", type=int)
    common(sp)
    sp.set_defaults(func=cmd_family)

    sp = sub.add_parser("hodge", help="RM endomorphism on the rank-6 quadratic space")
    sp.add_argument("--d", metavar="RAT")
    common(sp)
    sp.set_defaults(func=cmd_hodge)

    sp = sub.add_parser("prob", help="survival probability of a surface without RM")
    sp.add_argument("--mode", choices=("stat", "statistical", "inert"), default="stat")
    sp.add_argument("--d", type=int)
    common(sp)
    sp.set_defaults(func=cmd_prob)
    return ap


def main(argv=None) -> int:
    from .charpoly import Ambiguous, ArtinTateRefused, NoValidSign, WeilBoundViolation, ZeroValue
    from .detect import ExhaustedPrimes
    from .surface import SurfaceError

    refusals = (Refusal, SurfaceError, Ambiguous, NoValidSign, WeilBoundViolation, ArtinTateRefused, ZeroValue, ExhaustedPrimes)
    parser = build_parser()
    args = parser.parse_args(argv)
    with _open_out(getattr(args, "out", None)) as fh:
        out = Output(fh)
        try:
            return args.func(args, out)
        except UsageError as exc:
            parser.print_usage(sys.stderr)
            _say(f"rmk3 {args.command}: error: {exc}")
            return EXIT_USAGE
        except refusals as exc:
            out.emit({"command": args.command, "error": type(exc).__name__, "message": str(exc)})
            _say(f"refused: {type(exc).__name__}: {exc}")
            return EXIT_REFUSED


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
