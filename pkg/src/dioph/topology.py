"""Gap conditions between same-parity convergent exclusion intervals,
isolated-point diagnostics, and the per-window census of surviving measure.

The basic gap condition at index n asks whether the exclusion intervals
around p_n/q_n and p_{n+2}/q_{n+2} are disjoint; the strengthened variant
demands an extra 2*gamma/q_{n+2}^(tau-1) of clearance on the q_{n+2} side.
Both are equivalent to an explicit threshold on the partial quotient a_{n+2},
which the exact integer path checks with zero tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .arith import (
    DEFAULT_PRECISION,
    PRECISION_CAP,
    DomainError,
    Quad,
    Real,
    RealEnclosure,
    _exact_binop,
    cmp_certified,
    exact_sign,
    power_sum_tail,
)
from .contfrac import (
    AlphaSpec,
    ConvergentTable,
    PrefixAlpha,
    RationalAlpha,
    convergents,
)
from .dioset import (
    exclusion_radius,
    fractions_in_interval,
    union_open_measure,
)
from .quality import _quotients_to, _rows_to, _tail_lower, membership

HOLDS = "holds"
FAILS = "fails"
UNRESOLVED = "unresolved"


def _table_to(alpha: AlphaSpec, depth: int) -> ConvergentTable:
    quotients = _quotients_to(alpha, depth)
    if len(quotients) <= depth:
        raise DomainError(f"expansion provides no convergent {depth}")
    return convergents(quotients)


def _radius_real(q: int, gamma: Fraction, tau: Fraction, shift: int = 1) -> Real:
    """gamma / q^(tau+shift) as a certified real (exact for integer tau)."""
    return Real.from_exact(gamma) / Real.power(Fraction(q), tau + shift)


# ---------------------------------------------------------------------------
# Gap conditions
# ---------------------------------------------------------------------------

def _gap_sides(table: ConvergentTable, n: int, gamma: Fraction, tau: Fraction,
               strict: bool) -> tuple[Fraction, Real]:
    """(window width |p_{n+2}/q_{n+2} - p_n/q_n|, required clearance)."""
    width = abs(table.fraction(n + 2) - table.fraction(n))
    q_n, q_n2 = table.denom(n), table.denom(n + 2)
    needed = _radius_real(q_n, gamma, tau) + _radius_real(q_n2, gamma, tau)
    if strict:
        needed = needed + _radius_real(q_n2, gamma, tau, shift=-1) * 2
    return width, needed


def check_gap(alpha: AlphaSpec, gamma: Fraction, tau: Fraction, n: int,
              precision: int = PRECISION_CAP) -> str:
    """Do the exclusion intervals at n and n+2 stay disjoint?"""
    gamma, tau = Fraction(gamma), Fraction(tau)
    table = _table_to(alpha, n + 2)
    width, needed = _gap_sides(table, n, gamma, tau, strict=False)
    v = cmp_certified(needed, width, precision)
    if v.is_less:
        return HOLDS
    if v.is_greater or v.is_equal:
        return FAILS
    return UNRESOLVED


def check_gap_strict(alpha: AlphaSpec, gamma: Fraction, tau: Fraction, n: int,
                     precision: int = PRECISION_CAP) -> str:
    """Gap condition with the extra 2*gamma/q_{n+2}^(tau-1) clearance."""
    gamma, tau = Fraction(gamma), Fraction(tau)
    table = _table_to(alpha, n + 2)
    width, needed = _gap_sides(table, n, gamma, tau, strict=True)
    v = cmp_certified(needed, width, precision)
    if v.is_less:
        return HOLDS
    if v.is_greater or v.is_equal:
        return FAILS
    return UNRESOLVED


def _threshold(q_n: int, q_n1: int, q_n2: int, gamma: Fraction, tau: Fraction,
               strict: bool, precision: int) -> RealEnclosure:
    gamma, tau = Fraction(gamma), Fraction(tau)
    if min(q_n, q_n1, q_n2) < 1:
        raise DomainError("denominators must be positive")
    if gamma <= 0:
        raise DomainError("gamma must be positive")
    bracket = (Real.from_exact(1 / gamma)
               - Real.from_exact(Fraction(q_n1)) / Real.power(Fraction(q_n), tau)
               - Real.from_exact(Fraction(q_n * q_n1)) / Real.power(Fraction(q_n2), tau + 1))
    if strict:
        bracket = bracket - Real.from_exact(Fraction(2 * q_n * q_n1)) / Real.power(Fraction(q_n2), tau - 1)
    sign = cmp_certified(bracket, Fraction(0), precision)
    if not sign.is_greater:
        raise DomainError(
            "threshold undefined: clearance bracket is not provably positive "
            "(outside the membership regime)")
    t = (Real.from_exact(Fraction(q_n, q_n1) / gamma) / bracket
         - Fraction(q_n, q_n1))
    return t.enclose(precision)


def gap_threshold(q_n: int, q_n1: int, q_n2: int, gamma: Fraction, tau: Fraction,
                  precision: int = DEFAULT_PRECISION) -> RealEnclosure:
    """Threshold T with: gap holds at n if and only if a_{n+2} > T
    (given the positive-clearance precondition).  Exact for integer tau."""
    return _threshold(q_n, q_n1, q_n2, gamma, tau, strict=False, precision=precision)


def gap_threshold_strict(q_n: int, q_n1: int, q_n2: int, gamma: Fraction,
                         tau: Fraction, precision: int = DEFAULT_PRECISION
                         ) -> RealEnclosure:
    """Threshold for the strengthened gap condition."""
    return _threshold(q_n, q_n1, q_n2, gamma, tau, strict=True, precision=precision)


@dataclass(frozen=True)
class GapReport:
    n: int
    a_actual: int
    gap: str
    gap_strict: str
    threshold: Optional[RealEnclosure]
    threshold_strict: Optional[RealEnclosure]


def gap_report(alpha: AlphaSpec, gamma: Fraction, tau: Fraction, n: int,
               precision: int = DEFAULT_PRECISION) -> GapReport:
    table = _table_to(alpha, n + 2)
    thr = thr_s = None
    try:
        thr = gap_threshold(table.denom(n), table.denom(n + 1), table.denom(n + 2),
                            gamma, tau, precision)
    except DomainError:
        pass
    try:
        thr_s = gap_threshold_strict(table.denom(n), table.denom(n + 1),
                                     table.denom(n + 2), gamma, tau, precision)
    except DomainError:
        pass
    return GapReport(
        n=n,
        a_actual=table.a(n + 2),
        gap=check_gap(alpha, gamma, tau, n),
        gap_strict=check_gap_strict(alpha, gamma, tau, n),
        threshold=thr,
        threshold_strict=thr_s,
    )


# ---------------------------------------------------------------------------
# Isolation diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IsolationReport:
    """Exact tie structure of the quality rows at the level of their infimum.

    cross_parity_ties lists pairs (n, m) of opposite parity whose rows both
    attain the infimum exactly; attained_minima lists attaining rows when no
    cross-parity tie exists; boundary_flags lists rows whose distance to the
    convergent equals gamma/q_n^(tau+1) exactly.  Ties are only reported when
    provable from exact representations.
    """

    member: Optional[bool]
    at_min_level: Optional[bool]
    cross_parity_ties: tuple[tuple[int, int], ...]
    attained_minima: tuple[int, ...]
    boundary_flags: tuple[int, ...]
    unresolved: tuple[int, ...]


def detect_isolation(alpha: AlphaSpec, gamma: Fraction, tau: Fraction,
                     depth: int = 40, precision: int = DEFAULT_PRECISION
                     ) -> IsolationReport:
    gamma, tau = Fraction(gamma), Fraction(tau)
    if gamma <= 0:
        raise DomainError("gamma must be positive")
    verdict = membership(alpha, gamma, tau, depth, precision)
    member = True if verdict.is_in else (False if verdict.is_out else None)

    if isinstance(alpha, RationalAlpha):
        depth_eff = len(_quotients_to(alpha, depth)) - 1
    elif isinstance(alpha, PrefixAlpha):
        depth_eff = min(depth, len(alpha.quotients) - 1)
    else:
        depth_eff = depth
    table, rows = _rows_to(alpha, tau, depth_eff, precision)

    boundary = tuple(
        r.n for r in rows
        if r.exact is not None and _exact_eq(r.exact, gamma)
    )

    if not all(r.exact is not None for r in rows):
        upper = min(r.enclosure.hi for r in rows)
        unresolved = tuple(r.n for r in rows if r.enclosure.lo <= upper)
        return IsolationReport(member, None, (), (), boundary, unresolved)

    vmin = rows[0].exact
    for r in rows[1:]:
        if _exact_lt_strict(r.exact, vmin):
            vmin = r.exact
    tail_bound = _tail_lower(alpha, tau, table, depth_eff, None, precision)
    attained_known = False
    if isinstance(alpha, RationalAlpha):
        attained_known = True  # finite expansion: the infimum is this minimum
    elif tail_bound is not None:
        # deeper rows all exceed the bound strictly; the infimum is attained
        # among the computed rows when the minimum does not exceed the bound
        if tail_bound.exact is not None:
            diff = _exact_binop(vmin, tail_bound.exact, "sub")
            attained_known = diff is not None and exact_sign(diff) <= 0
        else:
            enc = tail_bound.enclose(precision)
            attained_known = enc.lo is not None and \
                not _exact_gt_fraction(vmin, enc.lo)
    if not attained_known:
        upper = min(r.enclosure.hi for r in rows)
        unresolved = tuple(r.n for r in rows if r.enclosure.lo <= upper)
        return IsolationReport(member, None, (), (), boundary, unresolved)

    hits = [r.n for r in rows if r.exact == vmin or _exact_eq_general(r.exact, vmin)]
    evens = [n for n in hits if n % 2 == 0]
    odds = [n for n in hits if n % 2 == 1]
    ties = tuple((n, m) for n in evens for m in odds)
    attained = tuple(hits) if not ties else ()
    at_min = _exact_eq(vmin, gamma)
    return IsolationReport(member, at_min, ties, attained, boundary, ())


def _exact_eq(x: Union[Fraction, Quad], y: Fraction) -> bool:
    diff = _exact_binop(x, Fraction(y), "sub")
    return diff is not None and exact_sign(diff) == 0


def _exact_eq_general(x, y) -> bool:
    diff = _exact_binop(x, y, "sub")
    return diff is not None and exact_sign(diff) == 0


def _exact_lt_strict(x, y) -> bool:
    diff = _exact_binop(x, y, "sub")
    if diff is None:
        raise DomainError("incomparable exact values")
    return exact_sign(diff) < 0


def _exact_gt_fraction(x: Union[Fraction, Quad], bound: Fraction) -> bool:
    diff = _exact_binop(x, Fraction(bound), "sub")
    return diff is not None and exact_sign(diff) > 0


# ---------------------------------------------------------------------------
# Window census
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CensusRecord:
    n: int
    window: tuple[Fraction, Fraction]
    window_measure: Fraction
    complement_measure_in_window: Fraction
    tail_bound: Fraction
    verdict: bool
    c_n: Optional[Fraction]


def census(alpha: AlphaSpec, gamma: Fraction, tau: Fraction, n: int, qmax: int,
           precision: int = DEFAULT_PRECISION) -> CensusRecord:
    """Exact measure audit of the window between convergents n and n+2.

    Sums the excluded intervals with denominator <= qmax clipped to the
    window, adds an analytic tail bound for larger denominators, and reports
    whether surviving measure provably remains.
    """
    gamma, tau = Fraction(gamma), Fraction(tau)
    if gamma <= 0:
        raise DomainError("gamma must be positive")
    if tau <= 1:
        raise DomainError("window tail bound requires tau > 1")
    table = _table_to(alpha, n + 2)
    q_n2 = table.denom(n + 2)
    if qmax < q_n2:
        raise DomainError(f"cutoff {qmax} is below q_(n+2) = {q_n2}")
    e1, e2 = table.fraction(n), table.fraction(n + 2)
    lo, hi = (e1, e2) if e1 <= e2 else (e2, e1)
    width = hi - lo

    rounding = "exact" if (tau + 1).denominator == 1 else "outer"
    clipped: list[tuple[Fraction, Fraction]] = []
    for q in range(1, qmax + 1):
        r = exclusion_radius(q, gamma, tau, rounding, precision)
        p_start = -((-(lo - r).numerator * q) // (lo - r).denominator)  # ceil(q*(lo-r))
        p_end = ((hi + r).numerator * q) // (hi + r).denominator        # floor(q*(hi+r))
        for p in range(p_start, p_end + 1):
            if math.gcd(p, q) != 1:
                continue
            center = Fraction(p, q)
            a, b = center - r, center + r
            if a < hi and b > lo:
                clipped.append((max(a, lo), min(b, hi)))
    excluded_measure = union_open_measure(clipped)

    u1 = power_sum_tail(tau, qmax)
    u2 = power_sum_tail(tau + 1, qmax)
    u3 = power_sum_tail(2 * tau + 1, qmax)
    tail = 2 * gamma * (width * u1 + u2) + 4 * gamma * gamma * u3

    c_n = None
    for p, q in fractions_in_interval(lo, hi, q_n2 - 1, include_lo=True):
        cand = Fraction(p, q) + exclusion_radius(q, gamma, tau, rounding, precision)
        if c_n is None or cand > c_n:
            c_n = cand

    residual = width - excluded_measure - tail
    return CensusRecord(
        n=n,
        window=(lo, hi),
        window_measure=width,
        complement_measure_in_window=excluded_measure,
        tail_bound=tail,
        verdict=residual > 0,
        c_n=c_n,
    )


def window_margin_table(alpha: AlphaSpec, gamma: Fraction, tau: Fraction, n: int,
                        max_den: Optional[int] = None,
                        precision: int = DEFAULT_PRECISION
                        ) -> list[tuple[int, int, Fraction]]:
    """Per-fraction slack of the strengthened clearance inside the window.

    For each reduced p/q strictly inside the window with q below the cutoff
    (default q_{n+2} - 1), reports how far its exclusion edge stays from the
    strengthened q_{n+2}-side edge; negative slack rows flag small-index
    exceptions.  Rounded conservatively for fractional tau.
    """
    gamma, tau = Fraction(gamma), Fraction(tau)
    table = _table_to(alpha, n + 2)
    q_n2 = table.denom(n + 2)
    cutoff = q_n2 - 1 if max_den is None else min(max_den, q_n2 - 1)
    e_near, e_far = table.fraction(n), table.fraction(n + 2)
    lo, hi = (e_near, e_far) if e_near <= e_far else (e_far, e_near)
    margin = (exclusion_radius(q_n2, gamma, tau, _rnd_out(tau), precision)
              + 2 * _radius_out(q_n2, gamma, tau, -1, precision))
    rows = []
    for p, q in fractions_in_interval(lo, hi, cutoff):
        r = exclusion_radius(q, gamma, tau, _rnd_out(tau), precision)
        if e_near <= e_far:
            slack = (hi - margin) - (Fraction(p, q) + r)
        else:
            slack = (Fraction(p, q) - r) - (lo + margin)
        rows.append((p, q, slack))
    return rows


def _rnd_out(tau: Fraction) -> str:
    return "exact" if (Fraction(tau) + 1).denominator == 1 else "outer"


def _radius_out(q: int, gamma: Fraction, tau: Fraction, shift: int, bits: int) -> Fraction:
    """gamma / q^(tau+shift), rounded up for fractional tau."""
    tau = Fraction(tau)
    if (tau + shift).denominator == 1:
        return Fraction(gamma) / Fraction(q) ** int(tau + shift)
    enc = Real.power(Fraction(q), tau + shift).enclose(bits)
    return Fraction(gamma) / enc.lo


def gap_report_obj(rep: GapReport) -> dict:
    """JSON-ready form of a gap report."""
    return {
        "n": rep.n,
        "a_next": rep.a_actual,
        "gap": rep.gap,
        "gap_strict": rep.gap_strict,
        "threshold": None if rep.threshold is None else rep.threshold.to_obj(),
        "threshold_strict": (None if rep.threshold_strict is None
                             else rep.threshold_strict.to_obj()),
    }


def census_obj(rec: CensusRecord) -> dict:
    from .arith import format_rat
    return {
        "n": rec.n,
        "window": [format_rat(rec.window[0]), format_rat(rec.window[1])],
        "window_measure": format_rat(rec.window_measure),
        "complement_measure_in_window": format_rat(rec.complement_measure_in_window),
        "tail_bound": format_rat(rec.tail_bound),
        "verdict": rec.verdict,
        "c_n": None if rec.c_n is None else format_rat(rec.c_n),
    }


def isolation_obj(rep: IsolationReport) -> dict:
    return {
        "member": rep.member,
        "at_min_level": rep.at_min_level,
        "cross_parity_ties": [list(t) for t in rep.cross_parity_ties],
        "attained_minima": list(rep.attained_minima),
        "boundary_flags": list(rep.boundary_flags),
        "unresolved": list(rep.unresolved),
    }


def margin_table_csv(rows: list[tuple[int, int, Fraction]]) -> str:
    """Slack table as CSV text: one "p,q,slack" row per window fraction."""
    from .arith import format_rat
    lines = ["p,q,slack"]
    lines += [f"{p},{q},{format_rat(slack)}" for p, q, slack in rows]
    return "\n".join(lines) + "\n"


def quotient_growth_table(alpha: AlphaSpec, gamma: Fraction, tau: Fraction,
                          depth: int, eps: Fraction, c: Fraction = Fraction(1),
                          precision: int = DEFAULT_PRECISION
                          ) -> list[tuple[int, int, RealEnclosure, str]]:
    """Diagnostic rows (n, a_{n+2}, c*q_n^(2+eps), verdict) at indices where
    the gap condition fails: does a_{n+2} stay below the polynomial bound?"""
    gamma, tau, eps, c = Fraction(gamma), Fraction(tau), Fraction(eps), Fraction(c)
    table = _table_to(alpha, depth)
    rows = []
    for n in range(0, len(table) - 2):
        if check_gap(alpha, gamma, tau, n, precision) != FAILS:
            continue
        bound = Real.power(Fraction(table.denom(n)), 2 + eps) * c
        enc = bound.enclose(precision)
        v = cmp_certified(Fraction(table.a(n + 2)), bound, precision)
        if v.is_less or v.is_equal:
            ok = HOLDS
        elif v.is_greater:
            ok = FAILS
        else:
            ok = UNRESOLVED
        rows.append((n, table.a(n + 2), enc, ok))
    return rows
