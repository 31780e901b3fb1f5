"""Command-line harness: expansions, classification, and period-length scans.

Subcommands
-----------
cf        expand one element and print its periodic form plus convergents
classify  run the recurrence classifier on a JSON job, print the evidence tree
periods   scan period lengths l(A_n) (optionally of D*A_n) to CSV
props     verify the two closed-form expansion families bit-exactly
schinzel  scan l(sqrt(f(n))) for an integer polynomial f
growth    place-absolute-value growth profile and dominance check

Jobs are JSON objects {"command", "d", "coeffs", "initials", "range",
"options"}; each K-element is a ["a", "b"] pair of rational strings meaning
a + b*sqrt(d) (a bare "a" is shorthand for ["a", "0"]).  CSV output is
deterministic: fixed column order, floats printed to 12 significant digits,
timing columns 0 unless --timing is given.  Summary lines start with '#'.

Exit codes: 0 success, 2 bad input or unmet precondition, 3 internal bug.
Environment: CFPERIOD_MAX_BITS caps per-coordinate term size in scans
(default 2^20); CFPERIOD_PRECISION_DIGITS sets working precision for
certified real-place numerics (default 60).
"""
from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
import time
from fractions import Fraction
from statistics import linear_regression
from typing import NamedTuple

from .classifier import classify, explain
from .contfrac import (check_convergent_bound, convergents, expand,
                       period_length, period_lower_bound)
from .errors import (DivisionByZero, HypothesisViolated, InternalError,
                     ParseError, PreconditionViolated, TooFewPoints, UsageError)
from .places import (Place, arch_dominant_bounds, finite_dominant_slope,
                     growth_check, places_above, real_places, root_abs_table, val)
from .qfield import QuadElem, floor_exact, quad, split_square
from .recurrence import LinRec

DEFAULT_MAX_BITS = 1 << 20
DEFAULT_PRECISION = 60
DEFAULT_STEP_CAP = 250_000


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"{name} must be an integer, got {raw!r}")
    if value <= 0:
        raise UsageError(f"{name} must be positive, got {value}")
    return value


def max_bits_guard() -> int:
    return _env_int("CFPERIOD_MAX_BITS", DEFAULT_MAX_BITS)


def precision_digits() -> int:
    return _env_int("CFPERIOD_PRECISION_DIGITS", DEFAULT_PRECISION)


# ---------------------------------------------------------------------------
# element grammar:  expr := term (("+"|"-") term)*
#                   term := unary (("*"|"/") unary)*
#                   unary := ("+"|"-")* power
#                   power := atom ("^" exponent)?
#                   atom := INT | "sqrt" "(" expr ")" | "(" expr ")"
# ---------------------------------------------------------------------------

def _tokenize(src: str):
    toks = []
    i = 0
    while i < len(src):
        c = src[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit():
            j = i
            while j < len(src) and src[j].isdigit():
                j += 1
            toks.append(("int", int(src[i:j]), i))
            i = j
            continue
        if src.startswith("sqrt", i):
            toks.append(("sqrt", None, i))
            i += 4
            continue
        if c in "+-*/^()":
            toks.append((c, None, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    toks.append(("end", None, len(src)))
    return toks


class _ElementParser:
    def __init__(self, src: str):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0

    def _peek(self):
        return self.toks[self.i]

    def _next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def _expect(self, kind: str):
        tok = self._next()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}", tok[2])
        return tok

    def parse(self):
        value = self._expr()
        tok = self._peek()
        if tok[0] != "end":
            raise ParseError("trailing input", tok[2])
        return value

    def _expr(self):
        value = self._term()
        while self._peek()[0] in ("+", "-"):
            op = self._next()[0]
            rhs = self._term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def _term(self):
        value = self._unary()
        while self._peek()[0] in ("*", "/"):
            op, _v, pos = self._next()
            rhs = self._unary()
            if op == "*":
                value = value * rhs
            else:
                if rhs == 0:
                    raise DivisionByZero(f"division by zero at position {pos}")
                value = value / rhs
        return value

    def _unary(self):
        sign = 1
        while self._peek()[0] in ("+", "-"):
            if self._next()[0] == "-":
                sign = -sign
        value = self._power()
        return value if sign > 0 else -value

    def _power(self):
        value = self._atom()
        if self._peek()[0] == "^":
            self._next()
            e = self._exponent()
            if e < 0 and value == 0:
                raise DivisionByZero("zero raised to a negative power")
            value = value ** e
        return value

    def _exponent(self) -> int:
        parenthesized = self._peek()[0] == "("
        if parenthesized:
            self._next()
        sign = 1
        while self._peek()[0] in ("+", "-"):
            if self._next()[0] == "-":
                sign = -sign
        tok = self._next()
        if tok[0] != "int":
            raise ParseError("expected an integer exponent", tok[2])
        if parenthesized:
            self._expect(")")
        return sign * tok[1]

    def _atom(self):
        tok = self._next()
        if tok[0] == "int":
            return Fraction(tok[1])
        if tok[0] == "(":
            value = self._expr()
            self._expect(")")
            return value
        if tok[0] == "sqrt":
            self._expect("(")
            inner = self._expr()
            self._expect(")")
            if isinstance(inner, QuadElem):
                raise ParseError("nested radicals are not supported", tok[2])
            if inner < 0:
                raise ParseError("sqrt of a negative value", tok[2])
            if inner == 0:
                return Fraction(0)
            s, k = split_square(inner.numerator * inner.denominator)
            if k == 1:
                return Fraction(s, inner.denominator)
            return quad(0, Fraction(s, inner.denominator), k)
        raise ParseError("expected a number, sqrt(...), or '('", tok[2])


def parse_element(src: str):
    """Evaluate the element grammar to a Fraction or a QuadElem, exactly."""
    return _ElementParser(src).parse()


def parse_range(src: str) -> tuple[int, int]:
    m = re.fullmatch(r"\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*", src)
    if not m:
        raise ParseError(f"range must look like 'n0..n1', got {src!r}")
    lo, hi = int(m.group(1)), int(m.group(2))
    if hi < lo:
        raise ParseError(f"empty range {src!r}")
    return lo, hi


def parse_int_poly(src: str) -> list[int]:
    """"2x^2+1" -> ascending coefficients [1, 0, 2]; x or X accepted."""
    s = src.replace(" ", "")
    if not s:
        raise ParseError("empty polynomial")
    terms = re.findall(r"[+-]?[^+-]+", s)
    if "".join(terms) != s:
        raise ParseError(f"could not split terms of {src!r}")
    coeffs: dict[int, int] = {}
    for t in terms:
        m = re.fullmatch(r"([+-]?)(\d*)(?:([xX])(?:\^(\d+))?)?", t)
        if not m or (not m.group(2) and not m.group(3)):
            raise ParseError(f"bad term {t!r} in {src!r}")
        sign = -1 if m.group(1) == "-" else 1
        c = int(m.group(2)) if m.group(2) else 1
        e = 0 if not m.group(3) else (int(m.group(4)) if m.group(4) else 1)
        coeffs[e] = coeffs.get(e, 0) + sign * c
    deg = max(coeffs)
    out = [coeffs.get(i, 0) for i in range(deg + 1)]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


# ---------------------------------------------------------------------------
# JSON jobs
# ---------------------------------------------------------------------------

def _job_elem(v, d: int) -> QuadElem:
    if isinstance(v, (int, str)):
        return quad(Fraction(str(v)), 0, d)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return quad(Fraction(str(v[0])), Fraction(str(v[1])), d)
    raise UsageError(f"bad element spec {v!r}: want \"a\" or [\"a\", \"b\"]")


def load_job(path: str) -> dict:
    try:
        with open(path) as fh:
            job = json.load(fh)
    except OSError as e:
        raise UsageError(f"cannot read job file: {e}")
    except json.JSONDecodeError as e:
        raise UsageError(f"bad JSON in {path}: {e}")
    if not isinstance(job, dict):
        raise UsageError("job file must contain a JSON object")
    return job


def rec_from_job(job: dict) -> LinRec:
    for key in ("d", "coeffs", "initials"):
        if key not in job:
            raise UsageError(f"job is missing {key!r}")
    d = job["d"]
    if not isinstance(d, int):
        raise UsageError("job field 'd' must be an integer")
    coeffs = [_job_elem(c, d) for c in job["coeffs"]]
    initials = [_job_elem(c, d) for c in job["initials"]]
    return LinRec(coeffs, initials, d)


def _job_range(job: dict) -> tuple[int, int]:
    rng = job.get("range")
    if (not isinstance(rng, (list, tuple)) or len(rng) != 2
            or not all(isinstance(x, int) for x in rng) or rng[1] < rng[0]):
        raise UsageError("job field 'range' must be [n0, n1] with n0 <= n1")
    return rng[0], rng[1]


def place_from_spec(spec, d: int) -> Place:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise UsageError("place spec must be an object with a 'kind' field")
    if spec["kind"] == "real":
        emb = spec.get("embedding")
        if emb not in (1, 2):
            raise UsageError("real place needs \"embedding\": 1 or 2")
        return real_places(d)[emb - 1]
    if spec["kind"] == "finite":
        p = spec.get("p")
        if not isinstance(p, int):
            raise UsageError("finite place needs an integer \"p\"")
        ws = places_above(p, d)
        if len(ws) == 1:
            return ws[0]
        branch = spec.get("branch")
        for w in ws:
            if w.branch == branch:
                return w
        raise UsageError(
            f"p = {p} splits; pick \"branch\" from {[w.branch for w in ws]}")
    raise UsageError(f"unknown place kind {spec['kind']!r}")


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _fmt_float(x) -> str:
    return f"{float(x):.12g}"


def _emit(lines: list[str], out_path: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def format_expansion(e) -> str:
    head = str(e.preperiod[0])
    rest = ", ".join(str(a) for a in e.preperiod[1:])
    cycle = ", ".join(str(a) for a in e.period)
    body = head
    if rest:
        body += "; " + rest
        if cycle:
            body += ", (" + cycle + ")"
    elif cycle:
        body += "; (" + cycle + ")"
    return "[" + body + "]"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_cf(args) -> int:
    x = parse_element(args.expr)
    e = expand(x)
    lines = [f"value = {x}",
             f"expansion = {format_expansion(e)}",
             f"preperiod_len = {len(e.preperiod)}",
             f"ell = {len(e.period)}",
             "convergents:"]
    total = None if e.period else len(e.preperiod)
    count = 8 if total is None else min(8, total)
    for c in convergents(e, count):
        if total is not None and c.n == total - 1:
            mark = "exact"
        else:
            mark = "yes" if check_convergent_bound(x, c.n) else "NO"
        lines.append(f"  n={c.n} p={c.p} q={c.q} bound_ok={mark}")
    _emit(lines, args.out)
    return 0


def cmd_classify(args) -> int:
    job = load_job(args.job)
    r = rec_from_job(job)
    c = classify(r)
    _emit(explain(c).splitlines(), args.out)
    return 0


def _term_bits(x: QuadElem) -> int:
    return max(x.a.numerator.bit_length(), x.a.denominator.bit_length(),
               x.b.numerator.bit_length(), x.b.denominator.bit_length())


def _doubling_windows(n_lo: int, n_hi: int):
    """Split [n_lo, n_hi] at powers of two: ..0, [1], [2,3], [4,7], ..."""
    if n_lo < 1:
        yield n_lo, min(0, n_hi)
    lo = 1
    while lo <= n_hi:
        hi = 2 * lo - 1
        a, b = max(lo, n_lo), min(hi, n_hi)
        if a <= b:
            yield a, b
        lo *= 2


def cmd_periods(args) -> int:
    job = load_job(args.job)
    r = rec_from_job(job)
    n_lo, n_hi = _job_range(job)
    mult = args.mult
    if mult == 0:
        raise UsageError("--mult must be nonzero")
    bits = max_bits_guard()
    lines = ["n,ell,preperiod_len,a1,wall_time_ms,truncated"]
    rows = {}
    for n in range(n_lo, n_hi + 1):
        t0 = time.perf_counter()
        a = r.term(n) * mult
        if _term_bits(a) > bits:
            print(f"periods: n={n} skipped (term exceeds {bits} bits)",
                  file=sys.stderr)
            continue
        if a == 0:
            rows[n] = (0, True)
            lines.append(f"{n},0,1,0,0,0")
            continue
        a1 = floor_exact(a)
        if a.b == 0:
            e = expand(a.a)
            ell, closed, pre = len(e.period), True, len(e.preperiod)
        else:
            ell, truncated = period_lower_bound(a, cap=args.step_cap)
            closed = not truncated
            pre = len(expand(a).preperiod) if closed else -1
        ms = int(round((time.perf_counter() - t0) * 1000)) if args.timing else 0
        rows[n] = (ell, closed)
        lines.append(f"{n},{ell},{pre},{a1},{ms},{0 if closed else 1}")
    for a, b in _doubling_windows(n_lo, n_hi):
        window = [rows[n] for n in range(a, b + 1) if n in rows]
        if not window:
            continue
        best = max(ell for ell, _c in window)
        exact = all(c for _e, c in window)
        lines.append(f"# window [{a}..{b}] max_ell={best}"
                     f"{'' if exact else ' (lower bound)'}")
    _emit(lines, args.out)
    return 0


def _props_alpha(src: str, want_norm: tuple[int, ...]) -> QuadElem:
    alpha = parse_element(src)
    if not isinstance(alpha, QuadElem) or alpha.b == 0:
        raise PreconditionViolated(f"alpha must be quadratic, got {src!r}")
    nrm = alpha.norm()
    if nrm.denominator != 1 or int(nrm) not in want_norm:
        raise PreconditionViolated(
            f"alpha must be a unit with norm in {want_norm}, got norm {nrm}")
    if not alpha > 1:
        raise PreconditionViolated("alpha must exceed 1")
    return alpha


def _trace_int(x: QuadElem) -> int:
    t = 2 * x.a
    if t.denominator != 1:
        raise PreconditionViolated(f"trace of {x} is not an integer")
    return int(t)


def cmd_props(args) -> int:
    lines = ["family,r,s,cond,ell,verdict"]
    fails = 0
    rows = 0
    if args.family == "p61":
        alpha = _props_alpha(args.alpha, (-1,))
        smax = args.smax
        pairs = [(rr, ss) for rr in range(1, smax + 1, 2)
                 for ss in range(rr + 2, smax + 1, 2) if ss - rr > rr]
        for rr, ss in pairs:
            a = alpha ** rr + alpha ** ss
            cond = -1 < a.conj() < 0
            t = _trace_int(a)
            e = expand(a)
            want_pre, want_cycle = (t,), (floor_exact(alpha ** rr), t)
            match = e.preperiod == want_pre and e.period == want_cycle
            verdict = "pass" if (cond and match) else (
                "cond_fail" if not cond else "fail")
            fails += verdict == "fail"
            rows += 1
            lines.append(f"p61,{rr},{ss},{'ok' if cond else 'no'},"
                         f"{len(e.period)},{verdict}")
    else:
        alpha = _props_alpha(args.alpha, (-1, 1))
        for rr in range(2, args.rmax + 1, 2):
            a = alpha ** rr + alpha ** (2 * rr)
            cond = 0 < a.conj() < 1
            t = _trace_int(a)
            e = expand(a)
            want_pre = (t - 1,)
            want_cycle = (1, floor_exact(alpha ** rr) - 2, 1, t - 2)
            match = e.preperiod == want_pre and e.period == want_cycle
            verdict = "pass" if (cond and match) else (
                "cond_fail" if not cond else "fail")
            fails += verdict == "fail"
            rows += 1
            lines.append(f"p62,{rr},{2 * rr},{'ok' if cond else 'no'},"
                         f"{len(e.period)},{verdict}")
        lines.append("# note: the verified p62 repeating block is "
                     "(1, floor(alpha^r)-2, 1, tr-2)")
    lines.append(f"# summary: {rows} rows, {fails} failures")
    _emit(lines, args.out)
    return 0


def cmd_schinzel(args) -> int:
    coeffs = parse_int_poly(args.poly)
    n_lo, n_hi = parse_range(args.range)
    deg = len(coeffs) - 1
    lead = coeffs[-1]
    covered = (deg % 2 == 1) or (lead > 0 and split_square(lead)[1] != 1)
    lines = ["n,ell,flag", f"# hypothesis: {'covered' if covered else 'not covered'}"]
    running = None
    increases = []
    for n in range(n_lo, n_hi + 1):
        v = sum(c * n ** i for i, c in enumerate(coeffs))
        if v < 0:
            lines.append(f"{n},,negative_skipped")
            continue
        s, k = split_square(v) if v else (0, 1)
        if k == 1:
            ell, flag = 0, "square"
        else:
            ell, flag = period_length(quad(0, s, k)), ""
        lines.append(f"{n},{ell},{flag}")
        if running is None or ell > running:
            running = ell
            increases.append((n, ell))
    for n, ell in increases:
        lines.append(f"# running_max: n={n} ell={ell}")
    _emit(lines, args.out)
    return 0


class LogLimitEstimate(NamedTuple):
    slope: float
    positive: bool


ESTIMATOR_LABEL = "empirical estimator, not a proof"


def estimate_log_limit(values, margin: float = 0.05) -> LogLimitEstimate:
    """Least-squares slope of the tail half of (n, y) points.

    The verdict (slope > margin) is an empirical estimator, not a proof.
    """
    pts = sorted((int(n), float(y)) for n, y in values)
    if len(pts) < 16:
        raise TooFewPoints(f"need at least 16 points, got {len(pts)}")
    tail = pts[len(pts) // 2:]
    slope, _intercept = linear_regression([n for n, _ in tail],
                                          [y for _, y in tail])
    return LogLimitEstimate(slope, slope > margin)


def _log_abs_real(x: QuadElem, embedding: int, dps: int) -> float:
    import mpmath

    from .qfield import to_mpf

    with mpmath.workdps(dps):
        y = x if embedding == 1 else x.conj()
        return float(mpmath.log(to_mpf(abs(y), dps)))


def cmd_growth(args) -> int:
    job = load_job(args.job)
    r = rec_from_job(job)
    n_lo, n_hi = _job_range(job)
    options = job.get("options") or {}
    v = place_from_spec(options.get("place"), r.d)
    eps = Fraction(str(options.get("eps", "1/10")))
    dps = precision_digits()
    try:
        if v.kind == "finite":
            log_a1 = float(finite_dominant_slope(r, v)) * v.f * math.log(v.p)
        else:
            _lo, hi = arch_dominant_bounds(r, v, dps)
            log_a1 = math.log(float(hi))
    except HypothesisViolated as e:
        print(f"error: {e}", file=sys.stderr)
        for line in root_abs_table(r, v, dps):
            print("  " + line, file=sys.stderr)
        return 2
    lines = ["n,log_abs,bound"]
    factor = (1 - float(eps)) * log_a1
    for n in range(n_lo, n_hi + 1):
        a = r.term(n)
        if a == 0:
            continue
        if v.kind == "finite":
            la = -val(a, v) * v.f * math.log(v.p)
        else:
            la = _log_abs_real(a, v.embedding, dps)
        lines.append(f"{n},{_fmt_float(la)},{_fmt_float(factor * n)}")
    passed = growth_check(r, v, eps, n_lo, n_hi, dps)
    lines.append(f"# growth_check: {'pass' if passed else 'fail'}")
    if args.estimate_limit:
        pts = [(n, _log_abs_real(diff, 1, dps))
               for n in range(n_lo, n_hi + 1)
               if (diff := r.term(n) - r.term(n).conj()) != 0]
        est = estimate_log_limit(pts)
        lines.append(f"# limit_slope={_fmt_float(est.slope)} "
                     f"positive={'yes' if est.positive else 'no'} "
                     f"({ESTIMATOR_LABEL})")
    _emit(lines, args.out)
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cfperiod",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cf", help="expand an element written in the "
                       "grammar: integers, sqrt(k), + - * / ( ) ^")
    p.add_argument("expr")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_cf)

    p = sub.add_parser("classify", help="classify a recurrence from a JSON job")
    p.add_argument("job")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser(
        "periods",
        help="CSV columns n,ell,preperiod_len,a1,wall_time_ms,truncated; "
             "preperiod_len is -1 and truncated is 1 when the scan hit "
             "--step-cap (ell is then a certified lower bound)")
    p.add_argument("job")
    p.add_argument("--mult", type=int, default=1,
                   help="scan l(D*A_n) with this integer D")
    p.add_argument("--step-cap", type=int, default=DEFAULT_STEP_CAP,
                   help="per-row budget of expansion steps")
    p.add_argument("--timing", action="store_true",
                   help="fill wall_time_ms (off: column is 0 for determinism)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_periods)

    p = sub.add_parser("props", help="bit-exact closed-form expansion families")
    p.add_argument("--alpha", required=True)
    p.add_argument("--family", required=True, choices=("p61", "p62"))
    p.add_argument("--smax", type=int, default=15,
                   help="p61: odd exponent pairs r < s <= smax with s > 2r")
    p.add_argument("--rmax", type=int, default=12,
                   help="p62: even exponents r = 2..rmax")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_props)

    p = sub.add_parser("schinzel", help="scan l(sqrt(f(n))) for integer f")
    p.add_argument("--poly", required=True, help="e.g. \"2x^2+1\"")
    p.add_argument("--range", required=True, help="e.g. \"1..60\"")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_schinzel)

    p = sub.add_parser("growth", help="growth profile and dominance check")
    p.add_argument("job")
    p.add_argument("--estimate-limit", action="store_true",
                   help="also report the tail slope of log|A_n - A_n'|")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_growth)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except InternalError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
