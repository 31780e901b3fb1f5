"""Places of K = Q(sqrt(d)): absolute values, heights, and growth checks.

Finite places are identified by a rational prime together with its splitting
behavior; split places carry a Hensel branch (a root t of x^2 = d mod p^k).
Normalization: |x|_w = (p^f)^(-ord_w(x)) with residue degree f, so the product
formula over the two real embeddings and all finite places holds with no
exponent weights.  Ramified places use ord_w(x) = v_p(N(x)) with f = 1, which
keeps sum-over-p consistency and gives |sqrt(2)|_2 = 1/2.

Growth of |A_n|_v along a recurrence is compared against the dominant root:
at finite places both sides are exact rationals (Newton polygon slopes), at
the real embeddings certified enclosures are used and strict >1 facts come
from the exact circle profile.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    HypothesisViolated,
    InternalInvariantError,
    PrecisionExhausted,
    PreconditionViolated,
    SupportIncomplete,
    ZeroInput,
)
from .polyalg import KPoly, certified_root_boxes, circle_profile, conj_poly, factor_k
from .qfield import QuadElem, to_mpf
from .recurrence import LinRec, ZeroSequence, nondegenerate_rec, seq_min_charpoly

ARCH_DPS = 60


@dataclass(frozen=True)
class Place:
    """A place of K; real embeddings are kind="real" with embedding 1 or 2."""

    d: int
    kind: str                    # "real" | "finite"
    embedding: int | None = None  # 1: sqrt(d) -> +sqrt(d), 2: -> -sqrt(d)
    p: int | None = None
    splitting: str | None = None  # "split" | "inert" | "ramified"
    branch: int | None = None     # split only: t mod 8 (p=2) or t mod p
    f: int = 1                    # residue degree

    def __str__(self):
        if self.kind == "real":
            return f"real embedding {self.embedding} of Q(sqrt({self.d}))"
        extra = f", branch t={self.branch}" if self.branch is not None else ""
        return f"{self.splitting} place above {self.p} in Q(sqrt({self.d})){extra}"


def real_places(d: int) -> list[Place]:
    return [Place(d, "real", embedding=1), Place(d, "real", embedding=2)]


def _sqrt_mod_prime_power(d: int, p: int, k: int) -> list[int]:
    from sympy.ntheory.residue_ntheory import sqrt_mod

    roots = sqrt_mod(d % p ** k, p ** k, all_roots=True)
    return sorted(int(t) for t in roots)


def places_above(p: int, d: int) -> list[Place]:
    """The finite places of Q(sqrt(d)) lying above the rational prime p."""
    from sympy import isprime

    if not isprime(p):
        raise PreconditionViolated(f"{p} is not prime")
    if p == 2:
        if d % 4 in (2, 3):
            return [Place(d, "finite", p=2, splitting="ramified", f=1)]
        if d % 8 == 5:
            return [Place(d, "finite", p=2, splitting="inert", f=2)]
        # d = 1 mod 8: split; the two branches are the residues mod 8 of the
        # two 2-adic square roots (read off roots mod 16 to kill ghost roots)
        reps = sorted({t % 8 for t in _sqrt_mod_prime_power(d, 2, 4)})
        if len(reps) != 2:
            raise InternalInvariantError(f"expected 2 branch classes mod 8, got {reps}")
        return [Place(d, "finite", p=2, splitting="split", branch=t, f=1)
                for t in reps]
    if d % p == 0:
        return [Place(d, "finite", p=p, splitting="ramified", f=1)]
    ls = pow(d % p, (p - 1) // 2, p)
    if ls == p - 1:
        return [Place(d, "finite", p=p, splitting="inert", f=2)]
    roots = _sqrt_mod_prime_power(d, p, 1)
    return [Place(d, "finite", p=p, splitting="split", branch=t, f=1)
            for t in sorted(roots)]


def _vp_int(n: int, p: int) -> int:
    if n == 0:
        raise ZeroInput("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _vp_fraction(q: Fraction, p: int) -> int:
    return _vp_int(q.numerator, p) - _vp_int(q.denominator, p)


def _branch_root(w: Place, k: int) -> int:
    """t with t^2 = d mod p^k on w's branch (split places only)."""
    p, d = w.p, w.d
    if p == 2:
        # increment lifting from the branch rep; valid from k0 = 3 upward
        t = w.branch
        mod = 8
        kk = 3
        while kk < k:
            step = mod // 2
            if (t * t - d) % (2 * mod):
                t += step
            if (t * t - d) % (2 * mod):
                raise InternalInvariantError("2-adic branch lift failed")
            mod *= 2
            kk += 1
        return t % 2 ** k
    t = w.branch % p
    mod = p
    while mod < p ** k:
        # Newton step doubles the precision
        inv = pow(2 * t, -1, mod * mod if mod * mod <= p ** k else p ** k)
        new_mod = min(mod * mod, p ** k)
        t = (t - (t * t - d) * inv) % new_mod
        mod = new_mod
    return t % p ** k


def val(x: QuadElem, w: Place) -> int:
    """ord_w(x) for a finite place, in the f-normalization described above."""
    if w.kind != "finite":
        raise PreconditionViolated("val is defined for finite places only")
    if x == 0:
        raise ZeroInput("valuation of 0")
    p = w.p
    nrm = x.norm()
    vn = _vp_fraction(nrm, p)
    if w.splitting == "inert":
        if vn % 2:
            raise InternalInvariantError("odd norm valuation at an inert place")
        return vn // 2
    if w.splitting == "ramified":
        return vn
    # split: ord = v_p(A + B t) - v_p(m) for x = (A + B sqrt(d)) / m
    m = math.lcm(x.a.denominator, x.b.denominator)
    A = int(x.a * m)
    B = int(x.b * m)
    vm = _vp_int(m, p)
    bound = abs(vn) + 2 * vm + 4
    k = max(bound, 8)
    slack = 2 if p == 2 else 1
    for _ in range(6):
        t = _branch_root(w, k)
        s = (A + B * t) % p ** k
        if s != 0:
            v = _vp_int(s, p)
            if v < k - slack:
                return v - vm
        k *= 2
    raise PrecisionExhausted(f"could not settle ord at {w} for {x}")


@dataclass(frozen=True)
class PlaceAbs:
    """|x|_v as an exact statement: finite (p^f)^exponent, real |sigma(x)|."""

    kind: str                    # "finite" | "real"
    base: object                 # int p^f, or exact QuadElem magnitude
    exponent: int                # finite: -ord_w(x); real: 1

    def as_fraction(self) -> Fraction:
        if self.kind != "finite":
            raise PreconditionViolated("exact rational value only at finite places")
        return Fraction(self.base) ** self.exponent

    def to_mpf(self, dps: int = ARCH_DPS):
        import mpmath

        with mpmath.workdps(dps):
            if self.kind == "finite":
                return mpmath.mpf(self.base) ** self.exponent
            return to_mpf(self.base, dps)


def abs_at(x: QuadElem, v: Place) -> PlaceAbs:
    if v.kind == "real":
        y = x if v.embedding == 1 else x.conj()
        return PlaceAbs("real", abs(y), 1)
    return PlaceAbs("finite", v.p ** v.f, -val(x, v))


# ---------------------------------------------------------------------------
# heights
# ---------------------------------------------------------------------------

def _support_candidates(xs) -> set[int]:
    from sympy import factorint

    primes: set[int] = set()
    for x in xs:
        if x == 0:
            continue
        nrm = x.norm()
        for n in (x.a.denominator, x.b.denominator,
                  abs(nrm.numerator), nrm.denominator):
            if n > 1:
                primes.update(factorint(n).keys())
    return primes


@dataclass(frozen=True)
class Height:
    """H = finite_part * arch_part, with the Archimedean part an exact surd."""

    finite_part: Fraction
    arch_part: QuadElem

    def value(self) -> QuadElem:
        return self.arch_part * self.finite_part

    def to_mpf(self, dps: int = ARCH_DPS):
        import mpmath

        with mpmath.workdps(dps):
            return to_mpf(self.arch_part, dps) * mpmath.mpf(
                self.finite_part.numerator) / self.finite_part.denominator


def height(xs, support) -> Height:
    """Projective height: product over places of the max coordinate |x_i|_v.

    Runs over both real embeddings and every finite place above the declared
    support primes; any coordinate with valuation support outside the list
    raises SupportIncomplete.
    """
    xs = list(xs)
    if not xs or all(x == 0 for x in xs):
        raise ZeroInput("height needs a coordinate vector with a nonzero entry")
    d = next(x.d for x in xs if isinstance(x, QuadElem))
    support = sorted(set(int(p) for p in support))
    nonzero = [x for x in xs if x != 0]
    for q in sorted(_support_candidates(nonzero)):
        if q in support:
            continue
        for w in places_above(q, d):
            if any(val(x, w) != 0 for x in nonzero):
                raise SupportIncomplete(
                    f"coordinate has nonzero valuation at {w}, outside the "
                    f"declared support {support}")
    finite = Fraction(1)
    for q in support:
        for w in places_above(q, d):
            best = min(val(x, w) for x in nonzero)
            finite *= Fraction(q ** w.f) ** (-best)
    arch = QuadElem(Fraction(1), Fraction(0), d)
    for emb in (1, 2):
        best = None
        for x in nonzero:
            mag = abs(x if emb == 1 else x.conj())
            if best is None or mag > best:
                best = mag
        arch = arch * best
    return Height(finite, arch)


# ---------------------------------------------------------------------------
# growth along recurrences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LogAbs:
    """log|A_n|_v: exact (coeff * log base) at finite places, enclosure at real."""

    n: int
    base: int | None           # p^f at finite places, None at real embeddings
    coeff: int | None          # -ord_w(A_n)
    enclosure: tuple | None    # (lo, hi) mpf log bounds at real embeddings


def growth_profile(r: LinRec, v: Place, n_lo: int, n_hi: int,
                   dps: int = ARCH_DPS) -> list[LogAbs]:
    """log|A_n|_v for n in [n_lo, n_hi]; zero terms are skipped (gaps)."""
    import mpmath

    out = []
    for n in range(n_lo, n_hi + 1):
        a = r.term(n)
        if a == 0:
            continue
        if v.kind == "finite":
            out.append(LogAbs(n, v.p ** v.f, -val(a, v), None))
        else:
            with mpmath.workdps(2 * dps):
                m = to_mpf(abs(a if v.embedding == 1 else a.conj()), 2 * dps)
                lg = mpmath.log(m)
                eps = (abs(lg) + 1) * mpmath.mpf(10) ** (-dps)
            out.append(LogAbs(n, None, None, (lg - eps, lg + eps)))
    return out


def _newton_polygon_max_slope(p: KPoly, w: Place) -> Fraction | None:
    """Largest lower-hull slope of the w-adic Newton polygon (None if p constant).

    A slope m contributes roots alpha with ord_w(alpha) = -m, so the dominant
    root satisfies |alpha_1|_w = (p^f)^m for the maximum slope m.
    """
    pts = [(i, Fraction(val(c, w))) for i, c in enumerate(p.coeffs) if c != 0]
    if len(pts) < 2:
        return None
    # lower convex hull, left to right
    hull: list[tuple[int, Fraction]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    slopes = [Fraction(y2 - y1, x2 - x1)
              for (x1, y1), (x2, y2) in zip(hull, hull[1:])]
    return max(slopes)


def _arch_max_root(p: KPoly, embedding: int, dps: int):
    """(lo, hi) certified bounds for the largest root magnitude under sigma."""
    import mpmath

    boxes = certified_root_boxes(p, dps=dps, embed_conj=(embedding == 2))
    with mpmath.workdps(dps):
        lo = hi = None
        for z, rad in boxes:
            m = abs(z)
            if lo is None or m - rad > lo:
                lo = m - rad
            if hi is None or m + rad > hi:
                hi = m + rad
        return lo, hi


def _charpoly_or_raise(r: LinRec) -> KPoly:
    p = seq_min_charpoly(r)
    if isinstance(p, ZeroSequence) or p.degree < 1:
        raise HypothesisViolated("sequence has no roots")
    return p


def finite_dominant_slope(r: LinRec, w: Place) -> Fraction:
    """max_alpha (-ord_w(alpha)) over charpoly roots, as an exact rational.

    |alpha_1|_w = (p^f)^slope; raises HypothesisViolated when the slope is
    not positive (no root exceeds 1 in absolute value at w).
    """
    slope = _newton_polygon_max_slope(_charpoly_or_raise(r), w)
    if slope is None or slope <= 0:
        raise HypothesisViolated(f"no root with |.|_v > 1 at {w}")
    return slope


def arch_dominant_bounds(r: LinRec, v: Place, dps: int = ARCH_DPS):
    """(lo, hi) certified bounds on max |sigma_v(alpha)| over charpoly roots.

    Strict dominance (|alpha_1|_v > 1) is certified through the exact circle
    profile before any numerics; HypothesisViolated otherwise.
    """
    import mpmath

    p = _charpoly_or_raise(r)
    prof_poly = p if v.embedding == 1 else conj_poly(p)
    if circle_profile(prof_poly).outside == 0:
        raise HypothesisViolated(f"no root with |.|_v > 1 at {v}")
    with mpmath.workdps(2 * dps):
        best_lo = best_hi = None
        for pi, _m in factor_k(prof_poly, max_degree=max(prof_poly.degree, 12)).factors:
            lo, hi = _arch_max_root(pi, 1, dps)
            if best_hi is None or hi > best_hi:
                best_lo, best_hi = lo, hi
        if best_hi is None or best_hi <= 1:
            raise HypothesisViolated(f"no root with |.|_v > 1 at {v}")
        return best_lo, best_hi


def root_abs_table(r: LinRec, v: Place, dps: int = ARCH_DPS) -> list[str]:
    """Human-readable |root|_v lines per irreducible charpoly factor."""
    import mpmath

    p = _charpoly_or_raise(r)
    lines = []
    if v.kind == "finite":
        for pi, m in factor_k(p, max_degree=max(p.degree, 12)).factors:
            slope = _newton_polygon_max_slope(pi, v)
            if slope is None:
                continue
            lines.append(f"factor {pi} (mult {m}): max |root|_v = "
                         f"({v.p}^{v.f})^({slope})")
        return lines
    prof = p if v.embedding == 1 else conj_poly(p)
    with mpmath.workdps(dps):
        for pi, m in factor_k(prof, max_degree=max(prof.degree, 12)).factors:
            mags = sorted(abs(z) for z, _rad in certified_root_boxes(pi, dps=dps))
            shown = ", ".join(mpmath.nstr(x, 8) for x in mags)
            lines.append(f"factor {pi} (mult {m}): |roots|_v = {shown}")
    return lines


def growth_check(r: LinRec, v: Place, eps: Fraction, n_lo: int, n_hi: int,
                 dps: int = ARCH_DPS) -> bool:
    """Empirical check of |A_n|_v >= |alpha_1|_v^(n(1-eps)) on the range tail.

    alpha_1 is a dominant root of the minimal charpoly at v; the first 20% of
    the range is discarded as burn-in.  At finite places the comparison is an
    exact rational inequality on valuations; at the real embeddings certified
    enclosures are compared conservatively.
    """
    eps = Fraction(eps)
    if not (0 < eps < 1):
        raise PreconditionViolated("eps must lie strictly between 0 and 1")
    ok, _w = nondegenerate_rec(r, "baseK")
    if not ok:
        raise PreconditionViolated("growth check needs a non-degenerate sequence")

    burn = (n_hi - n_lo) // 5
    start = n_lo + burn

    if v.kind == "finite":
        slope = finite_dominant_slope(r, v)
        for n in range(start, n_hi + 1):
            a = r.term(n)
            if a == 0:
                return False
            # -ord(A_n) >= slope * n * (1 - eps), all exact rationals
            if Fraction(-val(a, v)) < slope * n * (1 - eps):
                return False
        return True

    import mpmath

    with mpmath.workdps(2 * dps):
        _lo, best_hi = arch_dominant_bounds(r, v, dps)
        log_hi = mpmath.log(best_hi)
        frac = mpmath.mpf(1) - mpmath.mpf(eps.numerator) / eps.denominator
        for n in range(start, n_hi + 1):
            a = r.term(n)
            if a == 0:
                return False
            y = a if v.embedding == 1 else a.conj()
            m = to_mpf(abs(y), 2 * dps)
            if m <= 0:
                return False
            lhs_lo = mpmath.log(m) - (abs(mpmath.log(m)) + 1) * mpmath.mpf(10) ** (-dps)
            if lhs_lo < frac * n * log_hi:
                return False
        return True
