"""Exact arithmetic for sets of reals badly approximable at rate gamma/q^tau.

Library layout:

* ``arith`` — rationals, quadratic surds, certified enclosures, comparisons;
* ``contfrac`` — continued fractions, convergents, exact tails;
* ``quality`` — quality rows, certified infimum brackets, membership;
* ``dioset`` — exact truncated sets, measures, Farey enumeration;
* ``topology`` — gap conditions, isolation diagnostics, window census;
* ``bands`` — exceptional-gamma bands and series exponents;
* ``cli`` — the ``dioph`` command-line front end.
"""

from .arith import (
    CmpVerdict,
    DomainError,
    Quad,
    Real,
    RealEnclosure,
    cmp_certified,
    format_rat,
    parse_rat,
    pow_real,
    rat_sum_tail_bound,
    surd,
)
from .contfrac import (
    AlphaSpec,
    ConvergentTable,
    PrefixAlpha,
    QuadraticAlpha,
    RationalAlpha,
    cf_cycle,
    cf_expand,
    convergents,
    one_minus,
    parse_alpha,
    quadratic_from_periodic,
    tail,
    value_of,
)
from .dioset import (
    IntervalSet,
    SetBracket,
    excluded_interval,
    farey_sequence,
    fractions_in_interval,
    measure,
    restrict,
    set_bracket,
    truncated_set,
)
from .quality import (
    GammaResult,
    MembershipVerdict,
    QualityRow,
    brute_force_gamma,
    gamma_n,
    gamma_of,
    gamma_parity,
    membership,
    tau_bounds,
)
from .topology import (
    CensusRecord,
    GapReport,
    IsolationReport,
    census,
    check_gap,
    check_gap_strict,
    detect_isolation,
    gap_threshold,
    gap_threshold_strict,
    quotient_growth_table,
    window_margin_table,
)
from .bands import (
    BandRecord,
    SeriesReport,
    bands_union_measure,
    bands_union_tail,
    critical_tau,
    exponents,
    gamma_band,
    pinch_band,
    power_approx_margin,
)

__version__ = "0.1.0"
