"""Edge Kähler–Einstein classification of a pair.

Two independent routes decide whether L_alpha is nef and big, or ample, for alpha
close to 1.  The structural route reads the declared catalog and boundary only:
D-minimality, semi-stability, bigness of K + D, and the (-2)-curve obstructions.
The threshold route scans every test curve, enumerated ones included, for the
interval (threshold, 1).  They must agree; a disagreement means the catalog is
missing curves and is reported as an error rather than a verdict.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .lattice import (
    DivisorClass,
    EnumerationError,
    SurfacePair,
    enumerate_classes,
)
from .positivity import (
    AlphaFamily,
    NoThreshold,
    TestCurve,
    Threshold,
    Tri,
    Verdict,
    ample_class,
    big_class,
    curve_set,
    known_curves,
    nef_class,
    nef_threshold,
    square_poly,
    _sign_near_one,
)


class CatalogInconsistency(Exception):
    """The structural and threshold routes disagree."""

    def __init__(self, message: str, structural=None, threshold=None, missing=()):
        super().__init__(message)
        self.structural = structural
        self.threshold = threshold
        self.missing = tuple(missing)


class ClassifierPrecondition(ValueError):
    """The pair does not satisfy the hypotheses an operation needs."""


class NoAdmissibleN(ClassifierPrecondition):
    """No n up to the cap gives a nef adjoint class with square above 4."""


@dataclass(frozen=True)
class ObstructionReport:
    interior_minus2: tuple = ()
    boundary_minus2: tuple = ()
    d_minimality_violations: tuple = ()
    semistability_violations: tuple = ()

    @property
    def ample_obstructed(self) -> bool:
        return bool(self.interior_minus2 or self.boundary_minus2)


@dataclass(frozen=True)
class RouteResult:
    nef_near_one: Tri
    ample_near_one: Tri
    detail: str = ""


@dataclass(frozen=True)
class ClassificationVerdict:
    d_minimal: bool
    semistable: bool
    log_general: Tri
    nef_near_one: Tri
    ample_near_one: Tri
    ke_edge_small_angles: Tri
    obstructions: ObstructionReport
    nef_threshold: Threshold | None
    ample_threshold: Threshold | None
    case_tags: tuple = ()
    catalog_consistent: bool = True


# --- structural route ------------------------------------------------------


def check_d_minimal(p: SurfacePair) -> tuple[bool, list[TestCurve]]:
    """False iff a declared smooth rational (-1)-curve E has E.D <= 1."""
    bad = []
    for c in known_curves(p):
        if c.rational and c.smooth and p.pair(c.cls, c.cls) == -1 and p.pair(c.cls, p.D) <= 1:
            bad.append(c)
    return not bad, bad


def check_semistable(p: SurfacePair) -> tuple[bool, list]:
    """False iff a smooth rational component E has E.(D - E) < 2."""
    bad = []
    for i, comp in enumerate(p.components):
        if comp.rational and p.pair(comp.cls, p.complement(i)) < 2:
            bad.append(comp)
    return not bad, bad


def obstruction_report(p: SurfacePair) -> ObstructionReport:
    L = p.L
    interior = []
    for rec in p.catalog:
        c = rec.cls
        if any(c == comp.cls for comp in p.components):
            continue
        if rec.rational and rec.smooth and p.pair(c, c) == -2 and p.pair(L, c) == 0 and p.pair(p.D, c) == 0:
            interior.append(rec)
    boundary = [
        comp
        for i, comp in enumerate(p.components)
        if comp.rational and p.pair(comp.cls, comp.cls) == -2 and p.pair(comp.cls, p.complement(i)) == 2
    ]
    _, dviol = check_d_minimal(p)
    _, sviol = check_semistable(p)
    return ObstructionReport(tuple(interior), tuple(boundary), tuple(dviol), tuple(sviol))


def log_general_type(p: SurfacePair) -> Verdict:
    """Bigness of K + D certified from the declared curves only."""
    return big_class(p.L, p, known_curves(p))


def structural_route(p: SurfacePair) -> tuple[RouteResult, ObstructionReport, Verdict]:
    dmin, _ = check_d_minimal(p)
    semi, _ = check_semistable(p)
    lg = log_general_type(p)
    obs = obstruction_report(p)
    known = known_curves(p)
    # nef near 1 implies nef at 1, a declared-curve certificate
    at_one = nef_class(p.L, p, known) if known else Verdict(Tri.UNKNOWN)
    if not dmin or not semi or lg.state is Tri.NO or at_one.state is Tri.NO:
        nef = Tri.NO
    elif lg.state is Tri.YES and known_curves(p):
        nef = Tri.YES
    else:
        nef = Tri.UNKNOWN
    if nef is Tri.NO or obs.ample_obstructed:
        amp = Tri.NO
    else:
        amp = nef
    return RouteResult(nef, amp, "declared curves"), obs, lg


# --- threshold route -------------------------------------------------------


def threshold_route(p: SurfacePair) -> tuple[RouteResult, Threshold | None, Threshold | None]:
    fam = AlphaFamily.of_pair(p)
    if not curve_set(p):
        return RouteResult(Tri.UNKNOWN, Tri.UNKNOWN, "no test curves"), None, None
    try:
        nef_t = nef_threshold(fam, p, "nef")
    except NoThreshold:
        nef_t = None
    a, b, c = square_poly(fam, p)
    if nef_t is None or _sign_near_one(a, b, c) <= 0:
        nef = Tri.NO
    else:
        nef = Tri.YES
    try:
        amp_t = nef_threshold(fam, p, "ample")
        amp = Tri.YES
    except NoThreshold:
        amp_t, amp = None, Tri.NO
    return RouteResult(nef, amp, "all test curves"), nef_t, amp_t


# --- case analysis of curves with L.C = 0 -------------------------------------


def _case_tags(p: SurfacePair) -> list[tuple[str, str]]:
    """Which known case explains each declared curve with L.C = 0."""
    L = p.L
    tags = []
    comp_index = {}
    for i, comp in enumerate(p.components):
        comp_index.setdefault(comp.cls, i)
    for c in known_curves(p):
        if p.pair(L, c.cls) != 0:
            continue
        sq = p.pair(c.cls, c.cls)
        if c.cls in comp_index:
            rest = p.pair(c.cls, p.complement(comp_index[c.cls]))
            g = p.genus(c.cls)
            if g == 1 and rest == 0:
                tag = "isolated elliptic boundary curve"
            elif g == 0 and rest == 2 and sq == -2:
                tag = "boundary (-2)-curve meeting the rest twice"
            elif g == 0 and rest == 2:
                tag = "rational boundary curve meeting the rest twice"
            else:
                tag = ""
        else:
            tag = "interior (-2)-curve" if (sq == -2 and p.pair(p.D, c.cls) == 0 and c.rational) else ""
        if not tag:
            raise CatalogInconsistency(f"curve {c.name()} has L.C = 0 but matches no known case")
        tags.append((c.name(), tag))
    return tags


# --- classification --------------------------------------------------------


def _missing_curves(p: SurfacePair) -> list[DivisorClass]:
    """Enumerated curves that obstruct positivity near 1 but are absent from the catalog."""
    L, D = p.L, p.D
    out = []
    for c in curve_set(p):
        if c.origin != "enumerated":
            continue
        v, s = p.pair(L, c.cls), p.pair(D, c.cls)
        if v < 0 or (v == 0 and s >= 0):
            out.append(c.cls)
    return out


def classify(p: SurfacePair) -> ClassificationVerdict:
    struct, obs, lg = structural_route(p)
    thresh, nef_t, amp_t = threshold_route(p)
    if struct.nef_near_one != thresh.nef_near_one or struct.ample_near_one != thresh.ample_near_one:
        missing = _missing_curves(p)
        names = ", ".join(str(m) for m in missing) or "none found"
        raise CatalogInconsistency(
            f"declared curves give nef={struct.nef_near_one}, ample={struct.ample_near_one}; "
            f"all test curves give nef={thresh.nef_near_one}, ample={thresh.ample_near_one}; "
            f"candidate missing curves: {names}",
            struct,
            thresh,
            missing,
        )
    dmin, _ = check_d_minimal(p)
    semi, _ = check_semistable(p)
    tags = _case_tags(p) if struct.nef_near_one is Tri.YES else []
    return ClassificationVerdict(
        d_minimal=dmin,
        semistable=semi,
        log_general=lg.state,
        nef_near_one=struct.nef_near_one,
        ample_near_one=struct.ample_near_one,
        ke_edge_small_angles=struct.ample_near_one,
        obstructions=obs,
        nef_threshold=nef_t,
        ample_threshold=amp_t,
        case_tags=tuple(tags),
    )


# --- Reider ------------------------------------------------------------------


@dataclass(frozen=True)
class ReiderResult:
    n: int
    alpha_n: Fraction
    adjoint_class: DivisorClass
    adjoint_square: Fraction
    obstruction_curves: tuple = ()
    rejected: tuple = ()  # (class, reason)
    base_point_free: Tri = Tri.UNKNOWN


def reider_exclusion(p: SurfacePair, c: DivisorClass) -> str | None:
    """Reason a Reider candidate cannot be an effective obstruction, or None."""
    L = p.L
    sq, kc, lc = p.pair(c, c), p.pair(p.K, c), p.pair(L, c)
    if sq == -1 and kc == 0:
        return "genus integrality"
    if lc < 0:
        return "not effective"
    if sq >= 0 and lc == 0 and p.pair(L, L) > 0:
        return "Hodge index"
    return None


def reider_search(p: SurfacePair, n_max: int = 64) -> ReiderResult:
    """Least n >= 3 with K + (n-2)(K+D) nef and of square > 4, plus its obstruction candidates.

    n L_{alpha_n} = K + adjoint_class with alpha_n = (n-2)/n.
    """
    dmin, _ = check_d_minimal(p)
    semi, _ = check_semistable(p)
    if not dmin or not semi or log_general_type(p).state is not Tri.YES:
        raise ClassifierPrecondition("Reider search needs a D-minimal, semi-stable pair of log general type")
    curves = curve_set(p)
    L, K = p.L, p.K
    for n in range(3, n_max + 1):
        adj = K + L * (n - 2)
        sq = p.pair(adj, adj)
        if sq > 4 and nef_class(adj, p, curves).state is Tri.YES:
            break
    else:
        raise NoAdmissibleN(f"no n in [3, {n_max}] gives a nef adjoint class with square above 4")
    cands: list[DivisorClass] = []
    try:
        h = p.reference_class()
        for target, self_int in ((0, -1), (1, 0)):
            cands += enumerate_classes(p.lattice, self_int, h, p.height_bound, [(adj, target)])
    except EnumerationError:
        pass
    for c in curves:
        sq_c, v = p.pair(c.cls, c.cls), p.pair(adj, c.cls)
        if ((sq_c, v) in ((-1, 0), (0, 1))) and c.cls not in cands:
            cands.append(c.cls)
    kept, rejected = [], []
    for c in cands:
        why = reider_exclusion(p, c)
        if why:
            rejected.append((c, why))
        else:
            kept.append(c)
    return ReiderResult(
        n=n,
        alpha_n=Fraction(n - 2, n),
        adjoint_class=adj,
        adjoint_square=sq,
        obstruction_curves=tuple(kept),
        rejected=tuple(rejected),
        base_point_free=Tri.YES if not kept else Tri.UNKNOWN,
    )


def beta_decompose(alpha, alpha_bar) -> tuple[Fraction, Fraction]:
    """Weights with L_alpha = b1 L_abar + b2 L_1 and b1 + b2 = 1."""
    a, ab = Fraction(alpha), Fraction(alpha_bar)
    if ab >= 1:
        raise ValueError("alpha_bar must be below 1")
    return (1 - a) / (1 - ab), (a - ab) / (1 - ab)


def check_fano_edge(p: SurfacePair, alpha) -> Verdict:
    """Ampleness of -L_alpha, relative to the test curves."""
    fam = AlphaFamily.of_pair(p).negated()
    return ample_class(fam.at(Fraction(alpha)), p, curve_set(p))
