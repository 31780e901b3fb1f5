"""Decision procedure for period-length behavior of recurrence sequences over K.

Given a sequence A over K = Q(sqrt(d)), the procedure inspects the minimal
characteristic polynomials of D_n = A_n - conj(A_n) and S_n = A_n + conj(A_n)
and emits one of:

* ClassA           -- D vanishes identically (A is rational);
* ClassB_b         -- D_n = (+-1)^n * beta for an irrational beta, S unital;
* ClassC_c         -- D's polynomial is unital Pisot and S's factors carry the
                      matching integrality flags ("possibly bounded");
* ProvenUnbounded  -- with a step tag B.1-B.4 / C.1-C.6 naming the exact
                      violated condition and machine-checkable evidence;
* DegenerateInput  -- the sequence was split into arithmetic subsequences
                      first, each classified recursively.

Degenerate inputs are detected over Q (ratios range over field conjugates of
the roots) so that the splitting also repairs conjugate-pair ratios.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import InternalInvariantError
from .polyalg import (
    KPoly,
    RatPoly,
    circle_profile,
    conj_poly,
    decompose_q_k,
    factor_k,
    factor_q,
    is_pisot_paper,
    is_unital,
    root_integrality_flags,
)
from .qfield import QuadElem
from .recurrence import (
    LinRec,
    ZeroSequence,
    conj_rec,
    diff_sum_parts,
    nondegenerate_rec,
    seq_min_charpoly,
    split_degenerate,
)


@dataclass(frozen=True)
class EvidenceReport:
    """Everything the verdict cites; factor/divisibility claims re-verified."""

    p_a_min: object = None          # KPoly | ZeroSequence | None
    p_d: object = None              # KPoly | ZeroSequence | None
    p_s: object = None              # RatPoly | ZeroSequence | None
    conj_fixed: object = None       # conj-fixed part of P_D
    conj_moved: object = None
    fixed_profile: object = None    # CircleProfile of the conj-fixed part
    moved_factors: tuple = ()       # (pi, mult, profile(pi), profile(conj pi))
    s_factors: tuple = ()           # (q, mult, profile, integrality flags)
    s_unital: object = None         # direct is_unital(P_S)
    s_unital_effective: object = None   # after degenerate splitting of S
    notes: tuple = ()

    def __post_init__(self):
        if isinstance(self.p_d, KPoly):
            if isinstance(self.conj_fixed, KPoly) and isinstance(self.conj_moved, KPoly):
                if self.conj_fixed * self.conj_moved != self.p_d:
                    raise InternalInvariantError("P_D decomposition does not multiply back")
            for pi, mult, _pr, _pc in self.moved_factors:
                if not (self.p_d % pi ** mult).is_zero:
                    raise InternalInvariantError(f"cited factor {pi} does not divide P_D")


@dataclass(frozen=True)
class Classification:
    verdict: str                    # ClassA | ClassB_b | ClassC_c | ProvenUnbounded | DegenerateInput
    step: str | None = None
    evidence: EvidenceReport | None = None
    beta: QuadElem | None = None    # ClassB_b: D_0
    sign: int | None = None         # ClassB_b: +1 / -1
    split_modulus: int | None = None        # DegenerateInput: d
    subresults: tuple = ()          # DegenerateInput: ((j, Classification), ...)


def _x_minus_one(d: int) -> KPoly:
    return KPoly([-1, 1], d)


def _x_plus_one(d: int) -> KPoly:
    return KPoly([1, 1], d)


def _s_rec_from(p_s: RatPoly, r: LinRec) -> LinRec:
    """A recurrence generating S_n = A_n + conj(A_n) from its minimal polynomial."""
    order = p_s.degree
    coeffs = [-p_s.coeffs[order - 1 - i] for i in range(order)]
    rc = conj_rec(r)
    initials = [r.term(i) + rc.term(i) for i in range(order)]
    return LinRec(coeffs, initials, r.d)


def _analyze_s(p_s, r: LinRec):
    """Unital data for the sum part, honoring degenerate splitting of S.

    Returns (direct, effective, factor data tuple, notes).  The boundedness
    argument for the sum sequence needs non-degeneracy, so when S itself is
    degenerate the unital test is re-run on its arithmetic subsequences; both
    answers are reported when they differ.
    """
    if isinstance(p_s, ZeroSequence):
        return True, True, (), ("sum sequence is identically zero; unital holds vacuously",)
    direct = is_unital(p_s)
    factor_polys: list[tuple[RatPoly, int]] = list(factor_q(p_s).factors)
    notes: list[str] = []
    effective = direct
    s_rec = _s_rec_from(p_s, r)
    ok, _wit = nondegenerate_rec(s_rec, "Q")
    if not ok:
        d_step, parts = split_degenerate(s_rec)
        part_polys = []
        for part in parts:
            cp = seq_min_charpoly(part)
            if isinstance(cp, ZeroSequence):
                continue
            part_polys.append(cp.to_ratpoly() if cp.is_rational() else None)
        if any(q is None for q in part_polys):
            raise InternalInvariantError("subsequence of a rational sequence not rational")
        effective = all(is_unital(q) for q in part_polys)
        seen = set()
        factor_polys = []
        for q in part_polys:
            for f, m in factor_q(q).factors:
                if f not in seen:
                    seen.add(f)
                    factor_polys.append((f, m))
        notes.append(f"sum sequence degenerate; unital test applied to the {d_step} "
                     f"arithmetic subsequences")
        if effective != direct:
            notes.append(f"direct unital test gives {direct}, after splitting {effective}; "
                         f"the split result decides")
    s_factors = tuple((f, m, circle_profile(f), root_integrality_flags(f))
                      for f, m in factor_polys)
    return direct, effective, s_factors, tuple(notes)


def classify(r: LinRec) -> Classification:
    """Run the full decision procedure on a recurrence sequence."""
    partial: dict = {}
    try:
        return _classify(r, partial)
    except Exception as e:
        e.partial_evidence = EvidenceReport(**partial)  # type: ignore[attr-defined]
        raise


def _classify(r: LinRec, partial: dict) -> Classification:
    p_a = seq_min_charpoly(r)
    partial["p_a_min"] = p_a

    ok, _witness = nondegenerate_rec(r, "Q")
    if not ok:
        d_step, parts = split_degenerate(r)
        subs = tuple((j, classify(part)) for j, part in enumerate(parts))
        return Classification(
            "DegenerateInput",
            evidence=EvidenceReport(p_a_min=p_a),
            split_modulus=d_step,
            subresults=subs,
        )

    p_d, p_s = diff_sum_parts(r)
    partial["p_d"] = p_d
    partial["p_s"] = p_s

    if isinstance(p_d, ZeroSequence):
        return Classification("ClassA", evidence=EvidenceReport(
            p_a_min=p_a, p_d=p_d, p_s=p_s,
            notes=("difference sequence vanishes identically: every A_n is rational",)))

    fixed, moved = decompose_q_k(p_d)
    partial["conj_fixed"] = fixed
    partial["conj_moved"] = moved
    s_direct, s_effective, s_factors, s_notes = _analyze_s(p_s, r)
    partial["s_unital"] = s_direct
    partial["s_unital_effective"] = s_effective
    partial["s_factors"] = s_factors

    if fixed.degree >= 1:
        fixed_profile = circle_profile(fixed)
        ev = EvidenceReport(p_a_min=p_a, p_d=p_d, p_s=p_s, conj_fixed=fixed,
                            conj_moved=moved, fixed_profile=fixed_profile,
                            s_factors=s_factors, s_unital=s_direct,
                            s_unital_effective=s_effective, notes=s_notes)
        if fixed_profile.inside > 0 or fixed_profile.outside > 0:
            return Classification("ProvenUnbounded", "B.1", ev)
        d = r.d
        if p_d != _x_minus_one(d) and p_d != _x_plus_one(d):
            fac = factor_k(p_d)
            pm_power = (len(fac.factors) == 1
                        and fac.factors[0][0] in (_x_minus_one(d), _x_plus_one(d))
                        and fac.factors[0][1] >= 2)
            if pm_power and s_effective:
                return Classification("ProvenUnbounded", "B.4", ev)
            if not s_effective:
                return Classification("ProvenUnbounded", "B.3", ev)
            return Classification("ProvenUnbounded", "B.2", ev)
        if not s_effective:
            return Classification("ProvenUnbounded", "B.3", ev)
        beta = r.term(0) - conj_rec(r).term(0)
        sign = 1 if p_d == _x_minus_one(d) else -1
        return Classification("ClassB_b", evidence=ev, beta=beta, sign=sign)

    # set C: P_D nonzero with every factor moved by conjugation
    moved_items = factor_k(p_d).factors
    moved_factors = tuple((pi, m, circle_profile(pi), circle_profile(conj_poly(pi)))
                          for pi, m in moved_items)
    ev = EvidenceReport(p_a_min=p_a, p_d=p_d, p_s=p_s, conj_fixed=fixed,
                        conj_moved=moved, moved_factors=moved_factors,
                        s_factors=s_factors, s_unital=s_direct,
                        s_unital_effective=s_effective, notes=s_notes)

    for _pi, _m, prof, prof_conj in moved_factors:
        if prof.max_at_least_one() and prof_conj.max_at_least_one():
            return Classification("ProvenUnbounded", "C.1", ev)
    for _pi, _m, prof, _pc in moved_factors:
        if prof.on > 0:
            return Classification("ProvenUnbounded", "C.2", ev)
    if not is_pisot_paper(p_d):
        # remaining failure mode: a conjugate pair with all roots inside;
        # reversing the sequence (n -> -n) turns it into a C.1 configuration
        return Classification("ProvenUnbounded", "C.3", ev)
    if not is_unital(p_d):
        return Classification("ProvenUnbounded", "C.4", ev)
    for _q, _m, prof, flags in s_factors:
        if (prof.on > 0 or prof.outside > 0) and not flags[0]:
            return Classification("ProvenUnbounded", "C.5", ev)
    for _q, _m, prof, flags in s_factors:
        if (prof.on > 0 or prof.inside > 0) and not flags[1]:
            return Classification("ProvenUnbounded", "C.6", ev)
    # note: class c does NOT need all of P_S unital -- only the side conditions
    # above (a factor like X-2 with no root on or inside the circle is fine)
    return Classification("ClassC_c", evidence=ev)


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

_VERDICT_LABEL = {
    "ClassA": "ClassA (rational sequence; bounded period lengths)",
    "ClassB_b": "ClassB_b (sign-flip irrational offset; bounded period lengths)",
    "ClassC_c": "ClassC_c (possibly bounded)",
    "ProvenUnbounded": "ProvenUnbounded",
    "DegenerateInput": "DegenerateInput (split into arithmetic subsequences)",
}


def _fmt_poly(p) -> str:
    if p is None:
        return "-"
    if isinstance(p, ZeroSequence):
        return "0 (zero sequence)"
    return str(p)


def _fmt_profile(pr) -> str:
    return f"{pr.inside}/{pr.on}/{pr.outside}" if pr is not None else "-"


def explain(c: Classification, indent: str = "") -> str:
    """Deterministic plain-text report of a classification."""
    lines = [f"{indent}verdict: {_VERDICT_LABEL[c.verdict]}"]
    if c.step is not None:
        lines.append(f"{indent}step: {c.step}")
    if c.beta is not None:
        lines.append(f"{indent}offset beta = {c.beta}, sign = {'+1' if c.sign > 0 else '-1'}")
    e = c.evidence
    if e is not None:
        lines.append(f"{indent}minimal charpoly: {_fmt_poly(e.p_a_min)}")
        if e.p_d is not None:
            lines.append(f"{indent}difference part P_D: {_fmt_poly(e.p_d)}")
        if e.p_s is not None:
            lines.append(f"{indent}sum part P_S: {_fmt_poly(e.p_s)}")
        if e.conj_fixed is not None and not isinstance(e.conj_fixed, ZeroSequence):
            lines.append(f"{indent}conjugation-fixed part: {_fmt_poly(e.conj_fixed)}"
                         + (f"  (roots inside/on/outside = {_fmt_profile(e.fixed_profile)})"
                            if e.fixed_profile is not None else ""))
        for pi, m, pr, pc in e.moved_factors:
            lines.append(f"{indent}P_D factor {pi} (mult {m}): "
                         f"roots {_fmt_profile(pr)}; conjugate roots {_fmt_profile(pc)}")
        for q, m, pr, flags in e.s_factors:
            lines.append(f"{indent}P_S factor {q} (mult {m}): roots {_fmt_profile(pr)}, "
                         f"alg-integer={flags[0]}, reciprocal-integer={flags[1]}")
        if e.s_unital is not None:
            lines.append(f"{indent}unital(P_S): {e.s_unital_effective}")
        for note in e.notes:
            lines.append(f"{indent}note: {note}")
    if c.split_modulus is not None:
        lines.append(f"{indent}split modulus d = {c.split_modulus}")
    for j, sub in c.subresults:
        lines.append(f"{indent}subsequence j={j}:")
        lines.append(explain(sub, indent + "  "))
    return "\n".join(lines)
