"""Exact polynomial algebra over Q and over a real quadratic field K = Q(sqrt(d)).

Dense coefficient lists, low degree, everything exact.  Highlights:

* factorization over Q (sympy-backed, certified by exact multiply-back and
  independent small-degree irreducibility re-checks) and over K (norm descent
  through a squarefree-shift resultant, factors recovered by gcd);
* the conjugation-fixed / conjugation-moved decomposition of a K-polynomial;
* unit-circle root profiles with an exact on-circle decision (self-reciprocal
  factors + Sturm chains on the x + 1/x transform) and certified numeric
  enclosures only for provably off-circle roots;
* unital / Pisot-style predicates on factorizations;
* composed-ratio resultants and the root-ratio non-degeneracy test with
  exact root-of-unity witnesses.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DegreeTooLarge,
    InternalInvariantError,
    NotIrreducible,
    PrecisionExhausted,
    PreconditionViolated,
    ZeroRootInDenominator,
)
from .qfield import QuadElem, to_mpf

FACTOR_Q_MAX_DEGREE = 24
FACTOR_K_MAX_DEGREE = 12


def _sign_of(c) -> int:
    if isinstance(c, QuadElem):
        return c.sign()
    return (c > 0) - (c < 0)


# ---------------------------------------------------------------------------
# dense polynomials
# ---------------------------------------------------------------------------

class _PolyBase:
    """Shared exact algorithms; subclasses fix the coefficient field."""

    __slots__ = ("coeffs",)

    # subclasses: _zero(), _one(), _coerce_coeff(c), _make(coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self):
        if self.is_zero:
            raise ValueError("leading coefficient of zero polynomial")
        return self.coeffs[-1]

    def constant_term(self):
        return self.coeffs[0] if self.coeffs else self._zero()

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    @staticmethod
    def _strip(coeffs: list) -> tuple:
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        return tuple(coeffs)

    def _same(self, other):
        if isinstance(other, type(self)):
            return other
        c = self._try_coeff(other)
        if c is None:
            return None
        return self._make([c] if c else [])

    def __add__(self, other):
        o = self._same(other)
        if o is None:
            return NotImplemented
        n = max(len(self.coeffs), len(o.coeffs))
        z = self._zero()
        a = list(self.coeffs) + [z] * (n - len(self.coeffs))
        for i, c in enumerate(o.coeffs):
            a[i] = a[i] + c
        return self._make(a)

    __radd__ = __add__

    def __neg__(self):
        return self._make([-c for c in self.coeffs])

    def __sub__(self, other):
        o = self._same(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._same(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._same(other)
        if o is None:
            return NotImplemented
        if self.is_zero or o.is_zero:
            return self._make([])
        z = self._zero()
        out = [z] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(o.coeffs):
                out[i + j] = out[i + j] + a * b
        return self._make(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative polynomial power")
        result = self._make([self._one()])
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __divmod__(self, other):
        o = self._same(other)
        if o is None:
            return NotImplemented
        if o.is_zero:
            from .errors import DivisionByZero
            raise DivisionByZero("polynomial division by zero")
        if self.degree < o.degree:
            return self._make([]), self
        rem = list(self.coeffs)
        quo = [self._zero()] * (len(rem) - len(o.coeffs) + 1)
        inv_lc = self._one() / o.lc
        for k in range(len(quo) - 1, -1, -1):
            c = rem[k + o.degree] * inv_lc
            if c:
                quo[k] = c
                for j, b in enumerate(o.coeffs):
                    rem[k + j] = rem[k + j] - c * b
        return self._make(quo), self._make(rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other):
        q, r = divmod(self, other)
        if not r.is_zero:
            raise InternalInvariantError(f"exact division had remainder {r}")
        return q

    def monic(self):
        if self.is_zero:
            return self
        if self.lc == self._one():
            return self
        inv = self._one() / self.lc
        return self._make([c * inv for c in self.coeffs])

    def scale(self, s):
        c = self._try_coeff(s)
        return self._make([a * c for a in self.coeffs])

    def gcd(self, other):
        a, b = self, self._same(other)
        while not b.is_zero:
            a, b = b, a % b
        if a.is_zero:
            return a
        return a.monic()

    def derivative(self):
        return self._make([i * c for i, c in enumerate(self.coeffs)][1:])

    def squarefree_part(self):
        if self.degree <= 0:
            return self.monic()
        g = self.gcd(self.derivative())
        return self.exact_div(g).monic()

    def is_squarefree(self) -> bool:
        return self.degree <= 0 or self.gcd(self.derivative()).degree == 0

    def eval(self, x):
        acc = self._zero()
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose(self, other):
        o = self._same(other)
        acc = self._make([])
        for c in reversed(self.coeffs):
            acc = acc * o + self._make([c] if c else [])
        return acc

    def reverse(self):
        """x^deg * p(1/x); trailing zero coefficients of p drop out."""
        return self._make(list(reversed(self.coeffs)))

    def _coerce(self, c):
        v = self._try_coeff(c)
        if v is None:
            raise TypeError(f"cannot coerce {c!r} into {type(self).__name__} coefficient")
        return v

    def resultant(self, other):
        """Res(self, other) over the coefficient field, by Euclidean descent."""
        f, g = self, self._same(other)
        one = self._one()
        if f.is_zero or g.is_zero:
            if f.is_constant() and g.is_constant():
                return one * 0
            return self._zero()
        acc = one
        while True:
            if g.degree == 0:
                return acc * g.lc ** f.degree
            if f.degree < g.degree:
                if (f.degree * g.degree) % 2 == 1:
                    acc = -acc
                f, g = g, f
                continue
            r = f % g
            if r.is_zero:
                return self._zero()
            if (f.degree * g.degree) % 2 == 1:
                acc = -acc
            acc = acc * g.lc ** (f.degree - r.degree)
            f, g = g, r

    def sturm_count(self, lo, hi) -> int:
        """Number of distinct real roots in (lo, hi]; needs squarefree self."""
        chain = [self, self.derivative()]
        while chain[-1].degree > 0:
            r = chain[-2] % chain[-1]
            if r.is_zero:
                break
            chain.append(-r)

        def variations(x):
            signs = [_sign_of(p.eval(x)) for p in chain]
            signs = [s for s in signs if s != 0]
            return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

        return variations(lo) - variations(hi)

    def __eq__(self, other):
        o = self._same(other)
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash((type(self).__name__, self.coeffs))

    def __bool__(self):
        return bool(self.coeffs)

    def _format(self, var="x") -> str:
        if self.is_zero:
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            if i == 0:
                parts.append(f"{c}")
            else:
                xs = var if i == 1 else f"{var}^{i}"
                cs = "" if c == self._one() else f"({c})*"
                parts.append(f"{cs}{xs}")
        return " + ".join(parts)

    def __str__(self):
        return self._format()


class RatPoly(_PolyBase):
    """Dense polynomial with Fraction coefficients, low-to-high order."""

    __slots__ = ()

    def __init__(self, coeffs=()):
        object.__setattr__(self, "coeffs",
                           self._strip([self._coerce(c) for c in coeffs]))

    def __setattr__(self, *a):
        raise AttributeError("RatPoly is immutable")

    @staticmethod
    def _zero() -> Fraction:
        return Fraction(0)

    @staticmethod
    def _one() -> Fraction:
        return Fraction(1)

    @staticmethod
    def _try_coeff(c):
        if isinstance(c, Fraction):
            return c
        if isinstance(c, int):
            return Fraction(c)
        if isinstance(c, str):
            return Fraction(c)
        return None

    def _make(self, coeffs) -> "RatPoly":
        p = RatPoly.__new__(RatPoly)
        object.__setattr__(p, "coeffs", self._strip(list(coeffs)))
        return p

    @classmethod
    def x(cls) -> "RatPoly":
        return cls([0, 1])

    @classmethod
    def const(cls, c) -> "RatPoly":
        return cls([c])

    @classmethod
    def from_roots(cls, roots) -> "RatPoly":
        p = cls([1])
        for r in roots:
            p = p * cls([-Fraction(r), 1])
        return p

    def primitive_integer_coeffs(self) -> tuple[int, ...]:
        """Integer coefficients, content 1, positive leading; low-to-high."""
        if self.is_zero:
            raise ValueError("primitive form of zero polynomial")
        import math
        den = math.lcm(*(c.denominator for c in self.coeffs))
        ints = [int(c * den) for c in self.coeffs]
        g = math.gcd(*ints)
        ints = [c // g for c in ints]
        if ints[-1] < 0:
            ints = [-c for c in ints]
        return tuple(ints)

    def lift(self, d: int) -> "KPoly":
        return KPoly([QuadElem(c, Fraction(0), d) for c in self.coeffs], d)

    def __repr__(self):
        return f"RatPoly({self._format()})"


class KPoly(_PolyBase):
    """Dense polynomial with QuadElem coefficients over a fixed Q(sqrt(d))."""

    __slots__ = ("d",)

    def __init__(self, coeffs, d: int):
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "coeffs",
                           self._strip([self._coerce(c) for c in coeffs]))

    def __setattr__(self, *a):
        raise AttributeError("KPoly is immutable")

    def _zero(self) -> QuadElem:
        return QuadElem(Fraction(0), Fraction(0), self.d)

    def _one(self) -> QuadElem:
        return QuadElem(Fraction(1), Fraction(0), self.d)

    def _try_coeff(self, c):
        if isinstance(c, QuadElem):
            if c.d != self.d:
                from .errors import MixedFieldError
                raise MixedFieldError(f"coefficient field d={c.d}, polynomial d={self.d}")
            return c
        if isinstance(c, (int, Fraction)):
            return QuadElem(Fraction(c), Fraction(0), self.d)
        return None

    def _same(self, other):
        if isinstance(other, KPoly):
            if other.d != self.d:
                from .errors import MixedFieldError
                raise MixedFieldError(f"mixed polynomial fields d={self.d}, d={other.d}")
            return other
        if isinstance(other, RatPoly):
            return other.lift(self.d)
        c = self._try_coeff(other)
        if c is None:
            return None
        return self._make([c] if c else [])

    def _make(self, coeffs) -> "KPoly":
        p = KPoly.__new__(KPoly)
        object.__setattr__(p, "d", self.d)
        object.__setattr__(p, "coeffs", self._strip(list(coeffs)))
        return p

    @classmethod
    def x(cls, d: int) -> "KPoly":
        return cls([0, 1], d)

    @classmethod
    def const(cls, c, d: int) -> "KPoly":
        return cls([c], d)

    @classmethod
    def from_roots(cls, roots, d: int) -> "KPoly":
        p = cls([1], d)
        for r in roots:
            p = p * cls([-r, 1], d)
        return p

    def conj(self) -> "KPoly":
        return self._make([c.conj() for c in self.coeffs])

    def is_rational(self) -> bool:
        return all(c.is_rational() for c in self.coeffs)

    def to_ratpoly(self) -> RatPoly:
        if not self.is_rational():
            raise ValueError(f"{self} has irrational coefficients")
        return RatPoly([c.a for c in self.coeffs])

    def __repr__(self):
        return f"KPoly({self._format()}; d={self.d})"


def conj_poly(p: KPoly) -> KPoly:
    """Coefficient-wise field conjugation."""
    return p.conj()


# ---------------------------------------------------------------------------
# factorization over Q (sympy-backed, certified here)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Factorization:
    """unit * prod(factor^mult) with monic irreducible factors."""

    unit: object
    factors: tuple  # ((poly, mult), ...)

    def distinct(self) -> list:
        return [f for f, _m in self.factors]


KFactorization = Factorization  # K-coefficient case: unit is a QuadElem


def poly_arith(p, q, op: str):
    """Named dispatch over the exact polynomial kernel."""
    table = {
        "add": lambda: p + q,
        "mul": lambda: p * q,
        "divmod": lambda: divmod(p, q),
        "gcd": lambda: p.gcd(q),
        "squarefree_part": lambda: p.squarefree_part(),
        "resultant": lambda: p.resultant(q),
    }
    if op not in table:
        raise PreconditionViolated(f"unknown polynomial op {op!r}")
    return table[op]()


def _rat_to_sympy(p: RatPoly):
    import sympy

    x = sympy.Symbol("x")
    return sympy.Poly([sympy.Rational(c.numerator, c.denominator)
                       for c in reversed(p.coeffs)], x, domain="QQ")


def _rat_from_sympy(sp) -> RatPoly:
    return RatPoly([Fraction(int(c.p), int(c.q)) for c in reversed(sp.all_coeffs())])


def _rational_roots(p: RatPoly) -> list[Fraction]:
    """All rational roots (exact; divisor enumeration on the primitive form)."""
    from sympy import divisors

    roots = []
    ints = list(p.primitive_integer_coeffs())
    while ints[0] == 0:
        roots.append(Fraction(0))
        ints = ints[1:]
    for num in divisors(abs(ints[0])):
        for den in divisors(abs(ints[-1])):
            for cand in (Fraction(num, den), Fraction(-num, den)):
                if cand not in roots and p.eval(cand) == 0:
                    roots.append(cand)
    return roots


def _is_rational_square(q: Fraction) -> bool:
    import math

    if q < 0:
        return False
    return (math.isqrt(q.numerator) ** 2 == q.numerator
            and math.isqrt(q.denominator) ** 2 == q.denominator)


def _certify_irreducible_q(p: RatPoly) -> None:
    """Independent irreducibility re-check for degree <= 4 (raises on failure)."""
    deg = p.degree
    if deg <= 1:
        return
    if _rational_roots(p):
        raise NotIrreducible(f"{p} has a rational root")
    if deg <= 3:
        return
    if deg == 4:
        # depress: x -> y - a3/4, then quadratic splits come from the
        # resolvent cubic z^3 + 2Pz^2 + (P^2-4R)z - Q^2 having a positive
        # rational square root z0 = u^2 (Q != 0), or the biquadratic cases.
        m = p.monic()
        a3 = m.coeffs[2 + 1]
        dep = m.compose(RatPoly([-a3 / 4, 1]))
        P, Q, R = dep.coeffs[2], dep.coeffs[1], dep.coeffs[0]
        if Q == 0:
            if _is_rational_square(P * P - 4 * R):
                raise NotIrreducible(f"{p} splits as a biquadratic")
            if _is_rational_square(R):
                import math
                g = Fraction(math.isqrt(R.numerator), math.isqrt(R.denominator))
                if _is_rational_square(2 * g - P) or _is_rational_square(-2 * g - P):
                    raise NotIrreducible(f"{p} splits into quadratics")
            return
        resolvent = RatPoly([-Q * Q, P * P - 4 * R, 2 * P, 1])
        for z0 in _rational_roots(resolvent):
            if z0 > 0 and _is_rational_square(z0):
                raise NotIrreducible(f"{p} splits into quadratics (resolvent root {z0})")
        return
    # degree >= 5: no independent certificate here (see decision ledger)


def factor_q(p: RatPoly, max_degree: int = FACTOR_Q_MAX_DEGREE) -> Factorization:
    """Complete factorization over Q into monic irreducibles.

    Certified on every call: the factors multiply back to p exactly, and
    factors of degree <= 4 pass an independent irreducibility re-check.
    """
    if p.is_zero:
        raise ValueError("factor_q of zero polynomial")
    if p.degree > max_degree:
        raise DegreeTooLarge(f"degree {p.degree} exceeds factor cap {max_degree}")
    if p.degree == 0:
        return Factorization(p.coeffs[0], ())
    coeff, sympy_factors = _rat_to_sympy(p).factor_list()
    unit = Fraction(int(coeff.p), int(coeff.q))
    factors = []
    for sf, mult in sympy_factors:
        f = _rat_from_sympy(sf)
        unit *= f.lc ** mult
        factors.append((f.monic(), int(mult)))
    factors.sort(key=lambda fm: (fm[0].degree, fm[0].coeffs))
    check = RatPoly([unit])
    for f, m in factors:
        _certify_irreducible_q(f)
        check = check * f ** m
    if check != p:
        raise InternalInvariantError(f"factor_q multiply-back failed for {p}")
    return Factorization(unit, tuple(factors))


# ---------------------------------------------------------------------------
# factorization over K (norm descent)
# ---------------------------------------------------------------------------

def _squarefree_decomposition(p):
    """Yun's algorithm; p monic, char 0.  Returns [(g_i, i)] with prod g_i^i = p."""
    out = []
    g = p.gcd(p.derivative())
    w = p.exact_div(g)
    i = 1
    while w.degree > 0:
        y = w.gcd(g)
        f = w.exact_div(y)
        if f.degree > 0:
            out.append((f.monic(), i))
        w, g = y, g.exact_div(y)
        i += 1
    return out


def _factor_k_squarefree(g: KPoly, max_degree: int) -> list[KPoly]:
    if g.degree == 1:
        return [g.monic()]
    d = g.d
    sqrt_d = QuadElem(Fraction(0), Fraction(1), d)
    for s in range(1, 65):
        # shift so that the norm N(x) = h(x) * conj(h)(x) becomes squarefree
        shift = KPoly([-(s * sqrt_d), 1], d)
        h = g.compose(shift)
        norm = h * h.conj()
        if not norm.is_rational():
            raise InternalInvariantError("norm polynomial not rational")
        nq = norm.to_ratpoly()
        if not nq.is_squarefree():
            continue
        pieces = []
        for f, _m in factor_q(nq, max_degree=max(2 * max_degree, FACTOR_Q_MAX_DEGREE)).factors:
            c = h.gcd(f.lift(d))
            if c.degree >= 1:
                pieces.append(c.monic())
        unshift = KPoly([s * sqrt_d, 1], d)
        factors = [c.compose(unshift).monic() for c in pieces]
        prod = KPoly([1], d)
        for f in factors:
            prod = prod * f
        if prod != g.monic():
            raise InternalInvariantError(f"factor_k multiply-back failed for {g}")
        return factors
    raise InternalInvariantError(f"no squarefree shift found for {g}")


def factor_k(p: KPoly, max_degree: int = FACTOR_K_MAX_DEGREE) -> Factorization:
    """Factorization into monic irreducibles over K = Q(sqrt(d)).

    Norm-descent: a shifted copy p(x - s*sqrt(d)) with squarefree norm is
    factored through factor_q of the norm, and K-factors are recovered as
    gcds; the result is certified by exact multiplication.
    """
    if p.is_zero:
        raise ValueError("factor_k of zero polynomial")
    if p.degree > max_degree:
        raise DegreeTooLarge(f"degree {p.degree} exceeds factor cap {max_degree}")
    unit = p.lc
    if p.degree == 0:
        return Factorization(unit, ())
    monic = p.monic()
    factors: dict[KPoly, int] = {}
    for g, mult in _squarefree_decomposition(monic):
        for f in _factor_k_squarefree(g, max_degree):
            factors[f] = factors.get(f, 0) + mult
    items = sorted(factors.items(),
                   key=lambda fm: (fm[0].degree,
                                   tuple((c.a, c.b) for c in fm[0].coeffs)))
    check = KPoly([unit], p.d)
    for f, m in items:
        check = check * f ** m
    if check != p:
        raise InternalInvariantError(f"factor_k multiply-back failed for {p}")
    return Factorization(unit, tuple(items))


def decompose_q_k(p: KPoly, max_degree: int = FACTOR_K_MAX_DEGREE) -> tuple[KPoly, KPoly]:
    """Split monic p into (conjugation-fixed part, conjugation-moved part)."""
    if p.is_zero or p.lc != p._one():
        raise PreconditionViolated(f"decompose_q_k needs a monic polynomial, got {p}")
    fixed = KPoly([1], p.d)
    moved = KPoly([1], p.d)
    for f, m in factor_k(p, max_degree=max_degree).factors:
        if f.conj() == f:
            fixed = fixed * f ** m
        else:
            moved = moved * f ** m
    if fixed * moved != p:
        raise InternalInvariantError("decompose_q_k parts do not multiply back")
    return fixed, moved


def minpoly_over_q(pi: KPoly) -> RatPoly:
    """Minimal rational polynomial of the roots of an irreducible K-factor."""
    if pi.is_zero or pi.degree < 1:
        raise PreconditionViolated(f"minpoly_over_q needs degree >= 1, got {pi}")
    pi = pi.monic()
    if pi.conj() == pi:
        cand = pi.to_ratpoly()
    else:
        prod = pi * pi.conj()
        if not prod.is_rational():
            raise InternalInvariantError("pi * conj(pi) not rational")
        cand = prod.to_ratpoly()
    fac = factor_q(cand, max_degree=max(cand.degree, FACTOR_Q_MAX_DEGREE))
    if len(fac.factors) != 1 or fac.factors[0][1] != 1:
        raise NotIrreducible(f"{pi} is not irreducible over K")
    return cand


def root_integrality_flags(q: RatPoly) -> tuple[bool, bool, bool]:
    """(roots are algebraic integers, reciprocals are too, both = units).

    q must be irreducible over Q; read off the primitive integer form.
    """
    if q.degree < 1:
        raise NotIrreducible(f"{q} is constant")
    fac = factor_q(q, max_degree=max(q.degree, FACTOR_Q_MAX_DEGREE))
    if len(fac.factors) != 1 or fac.factors[0][1] != 1:
        raise NotIrreducible(f"{q} is not irreducible over Q")
    ints = q.primitive_integer_coeffs()
    is_int = abs(ints[-1]) == 1
    is_recip = ints[0] != 0 and abs(ints[0]) == 1
    return is_int, is_recip, is_int and is_recip


def is_unital(p) -> bool:
    """Every root of p is a unit (root and reciprocal both algebraic integers)."""
    if isinstance(p, KPoly):
        if p.is_rational():
            return is_unital(p.to_ratpoly())
        items = factor_k(p, max_degree=max(p.degree, FACTOR_K_MAX_DEGREE)).factors
        return all(root_integrality_flags(minpoly_over_q(f))[2] for f, _m in items)
    items = factor_q(p, max_degree=max(p.degree, FACTOR_Q_MAX_DEGREE)).factors
    return all(root_integrality_flags(f)[2] for f, _m in items)


# ---------------------------------------------------------------------------
# unit-circle profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CircleProfile:
    inside: int
    on: int
    outside: int

    @property
    def total(self) -> int:
        return self.inside + self.on + self.outside

    def max_at_least_one(self) -> bool:
        return self.on > 0 or self.outside > 0

    def all_inside(self) -> bool:
        return self.on == 0 and self.outside == 0

    def all_outside(self) -> bool:
        return self.on == 0 and self.inside == 0


def _self_reciprocal(pi) -> bool:
    c0 = pi.constant_term()
    if not c0:
        return False
    return pi.reverse().monic() == pi.monic()


def _chebyshev_like_transform(pi):
    """g with pi(x) = x^(deg/2) * g(x + 1/x); pi palindromic of even degree."""
    m = pi.degree
    h = m // 2
    coeffs = pi.coeffs
    # V_k(y) represents x^k + x^-k:  V_0 = 2, V_1 = y, V_k = y V_{k-1} - V_{k-2}
    y = pi._make([pi._zero(), pi._one()])
    v_prev = pi._make([pi._one() + pi._one()])
    v_cur = y
    g = pi._make([coeffs[h]])
    for k in range(1, h + 1):
        g = g + v_cur.scale(coeffs[h + k])
        v_prev, v_cur = v_cur, y * v_cur - v_prev
    return g


def _certified_roots(coeffs_mpc, dps: int):
    """(roots, radii) with pairwise-one-root disk certification, or None."""
    import mpmath

    with mpmath.workdps(dps):
        deg = len(coeffs_mpc) - 1
        try:
            roots = mpmath.polyroots(coeffs_mpc, maxsteps=200, extraprec=dps * 2)
        except Exception:  # treat any solver failure as "retry with more digits"
            return None

        def _eval(cs, z):
            acc = mpmath.mpc(0)
            for c in cs:
                acc = acc * z + c
            return acc

        dcoeffs = [c * (deg - i) for i, c in enumerate(coeffs_mpc[:-1])]
        radii = []
        for z in roots:
            dv = _eval(dcoeffs, z)
            if dv == 0:
                return None
            # disk of radius deg*|p(z)/p'(z)| contains a root; 4x safety margin
            radii.append(4 * deg * abs(_eval(coeffs_mpc, z) / dv))
        for (z1, r1), (z2, r2) in itertools.combinations(zip(roots, radii), 2):
            if abs(z1 - z2) <= r1 + r2:
                return None
        return list(zip(roots, radii))


def _poly_to_mpc_coeffs(p, dps: int, embed_conj: bool = False):
    import mpmath

    with mpmath.workdps(dps):
        out = []
        for c in reversed(p.coeffs):
            if isinstance(c, QuadElem):
                cc = c.conj() if embed_conj else c
                out.append(mpmath.mpc(to_mpf(cc, dps)))
            else:
                out.append(mpmath.mpc(mpmath.mpf(c.numerator) / c.denominator))
        return out


def certified_root_boxes(p, dps: int = 60, embed_conj: bool = False):
    """Certified (root, radius) pairs at adaptive precision (squarefree p)."""
    for trial_dps in (dps, 2 * dps, 4 * dps, 8 * dps, 16 * dps):
        got = _certified_roots(_poly_to_mpc_coeffs(p, trial_dps, embed_conj), trial_dps)
        if got is not None:
            return got
    raise PrecisionExhausted(f"could not certify roots of {p}")


def _offcircle_counts(pi, dps: int = 60) -> tuple[int, int]:
    """(inside, outside) for an irreducible factor with no unit-circle roots."""
    for trial_dps in (dps, 2 * dps, 4 * dps, 8 * dps, 16 * dps, 32 * dps):
        boxes = _certified_roots(_poly_to_mpc_coeffs(pi, trial_dps), trial_dps)
        if boxes is None:
            continue
        inside = outside = 0
        ok = True
        for z, r in boxes:
            m = abs(z)
            if m + r < 1:
                inside += 1
            elif m - r > 1:
                outside += 1
            else:
                ok = False
                break
        if ok:
            return inside, outside
    raise PrecisionExhausted(f"roots of {pi} not separated from the unit circle")


def _profile_irreducible(pi) -> CircleProfile:
    deg = pi.degree
    if deg == 1:
        r = -pi.coeffs[0] / pi.coeffs[1]
        s = _sign_of(r * r - 1)
        if s == 0:
            return CircleProfile(0, 1, 0)
        return CircleProfile(1, 0, 0) if s < 0 else CircleProfile(0, 0, 1)
    if _self_reciprocal(pi):
        if deg % 2:
            raise InternalInvariantError(f"odd self-reciprocal irreducible {pi}")
        g = _chebyshev_like_transform(pi.monic())
        two = Fraction(2)
        on = 2 * g.sturm_count(-two, two)
        if (deg - on) % 2:
            raise InternalInvariantError("off-circle roots of self-reciprocal not paired")
        half = (deg - on) // 2
        return CircleProfile(half, on, half)
    inside, outside = _offcircle_counts(pi)
    return CircleProfile(inside, 0, outside)


def circle_profile(p) -> CircleProfile:
    """Counts of roots inside / on / outside the unit circle, with multiplicity.

    On-circle roots are decided exactly: an irreducible factor has them iff it
    is self-reciprocal, and then the count is 2 * (real roots of the x + 1/x
    transform in (-2, 2)), a Sturm computation over the coefficient field.
    Off-circle roots are separated by certified adaptive-precision disks.
    """
    if p.is_zero:
        raise ValueError("circle_profile of zero polynomial")
    if isinstance(p, KPoly) and p.is_rational():
        p = p.to_ratpoly()
    if isinstance(p, KPoly):
        items = factor_k(p, max_degree=max(p.degree, FACTOR_K_MAX_DEGREE)).factors
    else:
        items = factor_q(p, max_degree=max(p.degree, FACTOR_Q_MAX_DEGREE)).factors
    inside = on = outside = 0
    for f, m in items:
        prof = _profile_irreducible(f)
        inside += m * prof.inside
        on += m * prof.on
        outside += m * prof.outside
    return CircleProfile(inside, on, outside)


def is_pisot_paper(p: KPoly, max_degree: int = FACTOR_K_MAX_DEGREE) -> bool:
    """Every irreducible factor pi is moved by conjugation, and the roots of
    pi and conj(pi) sit strictly on opposite sides of the unit circle."""
    if p.is_zero:
        raise ValueError("is_pisot_paper of zero polynomial")
    for f, _m in factor_k(p, max_degree=max_degree).factors:
        fc = f.conj()
        if fc == f:
            return False
        pf, pc = _profile_irreducible(f), _profile_irreducible(fc)
        if not ((pf.all_inside() and pc.all_outside())
                or (pf.all_outside() and pc.all_inside())):
            return False
    return True


def is_unital_pisot(p: KPoly) -> bool:
    return is_pisot_paper(p) and is_unital(p)


# ---------------------------------------------------------------------------
# cyclotomics and root-of-unity detection
# ---------------------------------------------------------------------------

_CYCLOTOMIC_CACHE: dict[int, RatPoly] = {}


def cyclotomic(n: int) -> RatPoly:
    if n in _CYCLOTOMIC_CACHE:
        return _CYCLOTOMIC_CACHE[n]
    num = RatPoly([-1] + [0] * (n - 1) + [1])  # x^n - 1
    den = RatPoly([1])
    for d in range(1, n):
        if n % d == 0:
            den = den * cyclotomic(d)
    phi = num.exact_div(den)
    _CYCLOTOMIC_CACHE[n] = phi
    return phi


@functools.lru_cache(maxsize=None)
def _orders_with_totient_at_most(bound: int) -> tuple[int, ...]:
    from sympy import totient

    # phi(n) >= sqrt(n/2) gives the scan limit
    return tuple(n for n in range(1, 2 * bound * bound + 3) if totient(n) <= bound)


def is_root_of_unity(q: RatPoly) -> tuple[bool, int | None]:
    """Whether irreducible q is a cyclotomic polynomial; returns (flag, order)."""
    if q.degree < 1:
        raise PreconditionViolated(f"is_root_of_unity needs degree >= 1, got {q}")
    from sympy import totient

    m = q.degree
    qm = q.monic()
    for n in _orders_with_totient_at_most(m):
        if totient(n) == m and cyclotomic(n) == qm:
            return True, n
    return False, None


# ---------------------------------------------------------------------------
# composed-ratio resultants and non-degeneracy
# ---------------------------------------------------------------------------

def ratio_poly(p: RatPoly, q: RatPoly) -> RatPoly:
    """Polynomial whose roots are the ratios (root of p) / (root of q).

    Computed as Res_y(q(y), p(x*y)) and returned in primitive integer form
    with positive leading coefficient.
    """
    if p.is_zero or q.is_zero or p.degree < 1 or q.degree < 1:
        raise PreconditionViolated("ratio_poly needs two nonconstant polynomials")
    if q.constant_term() == 0:
        raise ZeroRootInDenominator("denominator polynomial has root 0")
    if not p.is_squarefree() or not q.is_squarefree():
        raise PreconditionViolated("ratio_poly needs squarefree inputs")
    import sympy

    x, y = sympy.symbols("x y")

    def expr(poly, var):
        return sum(sympy.Rational(c.numerator, c.denominator) * var ** i
                   for i, c in enumerate(poly.coeffs))

    res = sympy.resultant(expr(q, y), expr(p, x * y).expand(), y)
    out = _rat_from_sympy(sympy.Poly(sympy.expand(res), x, domain="QQ"))
    if out.degree != p.degree * q.degree:
        raise InternalInvariantError("ratio_poly degree mismatch")
    return RatPoly(out.primitive_integer_coeffs())


def _ratio_resultant_field(pi, pj):
    """Res_y(pj(y), pi(x*y)) over the common coefficient field, by interpolation."""
    di, dj = pi.degree, pj.degree
    n = di * dj + 1
    xs, ys = [], []
    c = 1
    while len(xs) < n:
        # nonzero sample points only: at x=0 the specialized pair drops degree
        # and its resultant no longer equals the generic one evaluated there
        point = Fraction(c)
        scaled = pi._make([coef * point ** k for k, coef in enumerate(pi.coeffs)])
        val = pj.resultant(scaled)
        xs.append(point)
        ys.append(val)
        c = -c if c > 0 else -c + 1  # 1, -1, 2, -2, ...
    # Lagrange interpolation over the field
    acc = pi._make([])
    for i in range(n):
        num = pi._make([pi._one()])
        den = pi._one()
        for j in range(n):
            if i == j:
                continue
            num = num * pi._make([pi._coerce(-xs[j]), pi._one()])
            den = den * pi._coerce(xs[i] - xs[j])
        acc = acc + num.scale(ys[i] / den)
    return acc


def nondegeneracy(p, over: str = "baseK") -> tuple[bool, list[int]]:
    """Root-ratio degeneracy test.

    over="baseK": ratios among the roots of p itself.  over="Q": ratios among
    the roots of the squarefree part of p * conj_poly(p) (conjugate orbits).
    Roots at zero are ignored: they cannot take part in a unit-modulus ratio.
    Returns (non_degenerate, sorted root-of-unity witness orders).
    """
    if over not in ("baseK", "Q"):
        raise PreconditionViolated(f"unknown Galois level {over!r}")
    if p.is_zero or p.degree < 1:
        raise PreconditionViolated("nondegeneracy needs a nonconstant polynomial")
    if isinstance(p, KPoly) and p.is_rational():
        p = p.to_ratpoly()
    while p.degree >= 1 and p.coeffs[0] == 0:
        p = p._make(list(p.coeffs[1:]))
    if p.degree < 1:
        return True, []
    if isinstance(p, KPoly):
        base = [f for f, _m in factor_k(p, max_degree=max(p.degree, FACTOR_K_MAX_DEGREE)).factors]
        if over == "Q":
            for f in list(base):
                fc = f.conj()
                if fc not in base:
                    base.append(fc)
        field_degree = 2
    else:
        base = [f for f, _m in factor_q(p, max_degree=max(p.degree, FACTOR_Q_MAX_DEGREE)).factors]
        field_degree = 1

    witnesses: set[int] = set()
    for pi, pj in itertools.product(base, repeat=2):
        r = _ratio_resultant_field(pi, pj)
        if pi == pj:
            # self-ratios contribute (x-1)^deg exactly once per root; strip them
            one_root = r._make([-r._one(), r._one()])
            for _ in range(pi.degree):
                r = r.exact_div(one_root)
        if r.is_zero:
            raise InternalInvariantError("vanishing ratio resultant")
        if r.degree == 0:
            continue
        r = r.monic()
        bound = field_degree * r.degree
        for n in _orders_with_totient_at_most(bound):
            phi = cyclotomic(n)
            phi_lift = phi.lift(r.d) if isinstance(r, KPoly) else phi
            if r.gcd(phi_lift).degree > 0:
                if n == 1:
                    raise InternalInvariantError(
                        "distinct irreducible factors share a root")
                witnesses.add(n)
    return (not witnesses), sorted(witnesses)
