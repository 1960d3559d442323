"""Nef, big and ample tests for the family L_alpha = K + alpha D.

All verdicts are relative to a finite set of test curves: the catalog, the
boundary components, and the (-1,-1) and (-2,0) classes found by bounded
enumeration.  A "no" always carries the curve or number that certifies it.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache

from .lattice import DivisorClass, EnumerationError, SurfacePair, enumerate_negative_classes


class Tri(str, Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Verdict:
    state: Tri
    witness: DivisorClass | None = None
    value: Fraction | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.state is Tri.YES


@dataclass(frozen=True)
class PositivityVerdict:
    nef: Verdict
    big: Verdict
    ample: Verdict
    catalog_hash: str

    def __post_init__(self):
        if self.ample.state is Tri.YES and not (self.nef.state is Tri.YES and self.big.state is Tri.YES):
            raise AssertionError("ample verdict without nef and big")


@dataclass(frozen=True)
class AlphaFamily:
    """L_alpha = base + alpha * boundary."""

    base: DivisorClass
    boundary: DivisorClass

    @classmethod
    def of_pair(cls, p: SurfacePair) -> "AlphaFamily":
        return cls(p.K, p.D)

    def at(self, alpha) -> DivisorClass:
        return self.base + self.boundary * Fraction(alpha)

    def negated(self) -> "AlphaFamily":
        return AlphaFamily(-self.base, -self.boundary)


@dataclass(frozen=True)
class AlphaLinear:
    """Affine function of alpha: value(alpha) = at_one + (alpha - 1) * slope."""

    at_one: Fraction
    slope: Fraction

    def __call__(self, alpha) -> Fraction:
        return self.at_one + (Fraction(alpha) - 1) * self.slope

    def root(self) -> Fraction | None:
        if self.slope == 0:
            return None
        return 1 - self.at_one / self.slope


def intersect_alpha(fam: AlphaFamily, c: DivisorClass, p: SurfacePair) -> AlphaLinear:
    return AlphaLinear(p.pair(fam.at(1), c), p.pair(fam.boundary, c))


@dataclass(frozen=True)
class TestCurve:
    cls: DivisorClass
    origin: str  # "catalog", "component" or "enumerated"
    label: str = ""
    rational: bool = False
    smooth: bool = True

    def name(self) -> str:
        return self.label or str(self.cls)


def known_curves(p: SurfacePair) -> tuple[TestCurve, ...]:
    """Catalog curves then boundary components, one entry per class."""
    comp = {c.cls: c for c in p.components}
    out: list[TestCurve] = []
    seen: set = set()
    for rec in p.catalog:
        if rec.cls in seen:
            continue
        seen.add(rec.cls)
        src = comp.get(rec.cls)
        origin = "component" if src is not None else "catalog"
        out.append(TestCurve(rec.cls, origin, rec.label or (src.label if src else ""), rec.rational, rec.smooth))
    for c in p.components:
        if c.cls in seen:
            continue
        seen.add(c.cls)
        out.append(TestCurve(c.cls, "component", c.label, c.rational, c.smooth))
    return tuple(out)


def admissible(p: SurfacePair, c: DivisorClass, known: tuple[TestCurve, ...]) -> bool:
    """Could an enumerated class be a new irreducible curve not in the boundary?

    It must not be the negative of a known curve, must meet every known curve
    nonnegatively, and cannot meet D negatively.
    """
    for k in known:
        if k.cls == -c or p.pair(k.cls, c) < 0:
            return False
    return p.pair(p.D, c) >= 0


@lru_cache(maxsize=512)
def enumerated_curves(p: SurfacePair) -> tuple[TestCurve, ...]:
    """Admissible (-1,-1) and (-2,0) classes up to the pair's height bound."""
    known = known_curves(p)
    have = {k.cls for k in known}
    out = []
    try:
        found = enumerate_negative_classes(p, -1, -1) + enumerate_negative_classes(p, -2, 0)
    except EnumerationError:
        return ()
    for c in found:
        if c in have or not admissible(p, c, known):
            continue
        out.append(TestCurve(c, "enumerated", "", True, True))
    return tuple(out)


def curve_set(p: SurfacePair, enumerated: bool = True) -> tuple[TestCurve, ...]:
    base = known_curves(p)
    return base + enumerated_curves(p) if enumerated else base


def catalog_hash(p: SurfacePair, curves: tuple[TestCurve, ...]) -> str:
    payload = json.dumps(
        {"curves": sorted([str(c) for c in x.cls] for x in curves), "bound": p.height_bound},
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


# --- class-level tests -----------------------------------------------------


def _reference(p: SurfacePair) -> DivisorClass | None:
    try:
        return p.reference_class()
    except EnumerationError:
        return None


def nef_class(L: DivisorClass, p: SurfacePair, curves: tuple[TestCurve, ...]) -> Verdict:
    """Nonnegative on the test curves, plus the cone conditions every nef class meets.

    The reference class is effective, so a nef class pairs nonnegatively with
    it, and a nef class has nonnegative square.
    """
    if not curves:
        return Verdict(Tri.UNKNOWN, reason="no test curves")
    for c in curves:
        v = p.pair(L, c.cls)
        if v < 0:
            return Verdict(Tri.NO, c.cls, v, f"negative on {c.name()}")
    h = _reference(p)
    if h is not None and p.pair(L, h) < 0:
        return Verdict(Tri.NO, h, p.pair(L, h), "negative on the reference class")
    sq = p.pair(L, L)
    if sq < 0:
        return Verdict(Tri.NO, None, sq, "negative self-intersection")
    return Verdict(Tri.YES, reason="nonnegative on every test curve")


def ample_class(L: DivisorClass, p: SurfacePair, curves: tuple[TestCurve, ...]) -> Verdict:
    """Nakai–Moishezon relative to the test curves and the reference class."""
    if not curves:
        return Verdict(Tri.UNKNOWN, reason="no test curves")
    sq = p.pair(L, L)
    if sq <= 0:
        return Verdict(Tri.NO, None, sq, "nonpositive self-intersection")
    for c in curves:
        v = p.pair(L, c.cls)
        if v <= 0:
            return Verdict(Tri.NO, c.cls, v, f"nonpositive on {c.name()}")
    h = _reference(p)
    if h is not None and p.pair(L, h) <= 0:
        return Verdict(Tri.NO, h, p.pair(L, h), "nonpositive on the reference class")
    return Verdict(Tri.YES, reason="positive square and positive on every test curve")


def big_class(L: DivisorClass, p: SurfacePair, curves: tuple[TestCurve, ...], nef: Verdict | None = None) -> Verdict:
    """Tri-state bigness from sufficient certificates only."""
    nef = nef if nef is not None else nef_class(L, p, curves)
    sq = p.pair(L, L)
    if nef.state is Tri.YES and sq > 0:
        return Verdict(Tri.YES, None, sq, "nef with positive square")
    h = _reference(p)
    if h is not None and sq > 0:
        lh = p.pair(L, h)
        if lh > 0:
            return Verdict(Tri.YES, h, sq, "in the positive cone")
        if lh < 0:
            return Verdict(Tri.NO, h, lh, "in the negative cone, so not pseudo-effective")
    if nef.state is Tri.YES and sq <= 0:
        return Verdict(Tri.NO, None, sq, "nef with zero volume")
    for c in curves:
        if p.pair(c.cls, c.cls) >= 0:
            v = p.pair(L, c.cls)
            if v < 0:
                return Verdict(Tri.NO, c.cls, v, f"negative on the movable curve {c.name()}")
    return Verdict(Tri.UNKNOWN, reason="no certificate either way")


# --- family-level operations ------------------------------------------------


def _check_alpha(alpha) -> Fraction:
    a = Fraction(alpha)
    if not 0 <= a <= 1:
        raise ValueError(f"alpha must lie in [0, 1], got {a}")
    return a


def is_nef(fam: AlphaFamily, alpha, p: SurfacePair) -> Verdict:
    return nef_class(fam.at(_check_alpha(alpha)), p, curve_set(p))


def is_ample(fam: AlphaFamily, alpha, p: SurfacePair) -> Verdict:
    return ample_class(fam.at(_check_alpha(alpha)), p, curve_set(p))


def is_big(fam: AlphaFamily, alpha, p: SurfacePair) -> Verdict:
    a = _check_alpha(alpha)
    curves = curve_set(p)
    v = big_class(fam.at(a), p, curves)
    if v.state is not Tri.UNKNOWN:
        return v
    # bigness propagates upward: L_alpha = L_a' + (alpha - a') D with D effective
    lo, hi = _nef_interval(fam, p, curves, a)
    if lo is None:
        return v
    for cand in _square_maximisers(fam, p, lo, hi):
        L = fam.at(cand)
        if p.pair(L, L) > 0 and nef_class(L, p, curves).state is Tri.YES:
            return Verdict(Tri.YES, None, cand, f"nef and big at alpha = {cand}")
    return v


def positivity(fam: AlphaFamily, alpha, p: SurfacePair) -> PositivityVerdict:
    curves = curve_set(p)
    return PositivityVerdict(is_nef(fam, alpha, p), is_big(fam, alpha, p), is_ample(fam, alpha, p), catalog_hash(p, curves))


def _nef_interval(fam: AlphaFamily, p: SurfacePair, curves, upper: Fraction):
    """Exact interval of alpha in [0, upper] on which L_alpha is nef on the curves."""
    lo, hi = Fraction(0), upper
    if not curves:
        return None, None
    h = _reference(p)
    for c in [c.cls for c in curves] + ([h] if h is not None else []):
        f = intersect_alpha(fam, c, p)
        if f.slope == 0:
            if f.at_one < 0:
                return None, None
            continue
        r = f.root()
        if f.slope > 0:
            lo = max(lo, r)
        else:
            hi = min(hi, r)
    if lo > hi:
        return None, None
    return lo, hi


def square_poly(fam: AlphaFamily, p: SurfacePair) -> tuple[Fraction, Fraction, Fraction]:
    """Coefficients (a, b, c) with L_alpha^2 = a + 2 b alpha + c alpha^2."""
    return (p.pair(fam.base, fam.base), p.pair(fam.base, fam.boundary), p.pair(fam.boundary, fam.boundary))


def _square_maximisers(fam, p, lo: Fraction, hi: Fraction) -> list[Fraction]:
    a, b, c = square_poly(fam, p)
    cands = [hi, lo]
    if c < 0:
        v = -b / c
        if lo < v < hi:
            cands.append(v)
    return cands


# --- thresholds --------------------------------------------------------------


class NoThreshold(Exception):
    """The property fails on the whole interval (threshold, 1)."""

    def __init__(self, reason: str, witness: DivisorClass | None = None, value: Fraction | None = None):
        super().__init__(reason)
        self.reason = reason
        self.witness = witness
        self.value = value


@dataclass(frozen=True)
class Threshold:
    """Least alpha with the property on (value, 1]; ``strict`` says whether it also holds at value."""

    value: Fraction
    strict: bool
    property: str
    binding_curves: tuple = ()
    binding_labels: tuple = ()
    square_binds: bool = False
    exact: bool = True


_ROOT_TOL = Fraction(1, 10**12)


def _sign_near_one(a: Fraction, b: Fraction, c: Fraction) -> int:
    """Sign of a + 2 b alpha + c alpha^2 as alpha -> 1 from below."""
    q1 = a + 2 * b + c
    if q1:
        return 1 if q1 > 0 else -1
    d1 = 2 * b + 2 * c  # derivative at 1; moving left flips its sign
    if d1:
        return -1 if d1 > 0 else 1
    return (c > 0) - (c < 0)


def _square_lower_bound(a: Fraction, b: Fraction, c: Fraction) -> tuple[Fraction, bool]:
    """Least r <= 1 with a + 2 b x + c x^2 > 0 on (r, 1), and whether r is exact.

    Assumes the square is positive just below 1.  Irrational roots are replaced
    by a rational upper bound within 1e-12 of the root.
    """
    roots: list[Fraction] = []
    exact = True
    if c == 0:
        if b != 0:
            roots.append(-a / (2 * b))
    else:
        disc = b * b - a * c
        if disc >= 0:
            num, den = disc.numerator, disc.denominator
            sn, sd = math.isqrt(num), math.isqrt(den)
            if sn * sn == num and sd * sd == den:
                s = Fraction(sn, sd)
                roots += [(-b + s) / c, (-b - s) / c]
            else:
                for sgn in (1, -1):
                    roots.append(_bracket_root(a, b, c, (-float(b) + sgn * math.sqrt(float(disc))) / float(c)))
                exact = False
    below = [r for r in roots if r < 1]
    if not below:
        return Fraction(-(10**9)), True
    r = max(below)
    if r in roots and not exact:
        return r, False
    return r, True


def _bracket_root(a, b, c, approx: float) -> Fraction:
    """Rational r within 1e-12 right of the root near ``approx``, with the square positive at r."""

    def q(x: Fraction) -> Fraction:
        return a + 2 * b * x + c * x * x

    centre = Fraction(approx)
    width = Fraction(1, 10**6)
    lo, hi = centre - width, centre + width
    while not (q(lo) <= 0 < q(hi)) and not (q(hi) <= 0 < q(lo)):
        width *= 2
        lo, hi = centre - width, centre + width
    rising = q(hi) > 0
    while hi - lo > _ROOT_TOL:
        mid = (lo + hi) / 2
        if (q(mid) > 0) == rising:
            hi = mid
        else:
            lo = mid
    return hi if rising else lo


def nef_threshold(fam: AlphaFamily, p: SurfacePair, prop: str = "nef") -> Threshold:
    """Least alpha such that L_alpha is nef (or ample) for every alpha in (value, 1)."""
    if prop not in ("nef", "ample"):
        raise ValueError("property must be 'nef' or 'ample'")
    curves = curve_set(p)
    if not curves:
        raise NoThreshold("no test curves")
    L1 = fam.at(1)
    base = nef_class(L1, p, curves)
    if base.state is Tri.NO:
        raise NoThreshold("L is not nef", base.witness, base.value)
    bounds: list[tuple[Fraction, TestCurve]] = []
    for c in curves:
        f = intersect_alpha(fam, c.cls, p)
        if f.slope > 0:
            bounds.append((f.root(), c))
        elif f.slope == 0 and f.at_one == 0 and prop == "ample":
            raise NoThreshold(f"L_alpha.{c.name()} vanishes for every alpha", c.cls, Fraction(0))
    h = _reference(p)
    if h is not None:
        f = intersect_alpha(fam, h, p)
        if f.slope > 0:
            bounds.append((f.root(), TestCurve(h, "reference", "reference")))
        elif f.slope == 0 and f.at_one == 0 and prop == "ample":
            raise NoThreshold("L_alpha vanishes on the reference class for every alpha", h, Fraction(0))
    lo = max([Fraction(0)] + [b for b, _ in bounds])
    square_binds, exact = False, True
    a, b, cc = square_poly(fam, p)
    sign = _sign_near_one(a, b, cc)
    if prop == "ample" and sign <= 0:
        raise NoThreshold("L_alpha^2 is not positive near 1", None, a + 2 * b + cc)
    if sign < 0:
        raise NoThreshold("L_alpha^2 is negative just below 1", None, a + 2 * b + cc)
    if sign > 0:
        r, exact_r = _square_lower_bound(a, b, cc)
        if r > 0 and (r > lo or (r == lo and prop == "ample")):
            square_binds = True
            exact = exact_r
            lo = r
    if lo >= 1:
        witnesses = [c for b_, c in bounds if b_ >= 1]
        w = witnesses[0].cls if witnesses else None
        raise NoThreshold(f"{prop} fails on every alpha below 1", w, lo)
    binding = []
    seen = set()
    for b_, c in bounds:
        if b_ == lo:
            ray = c.cls.primitive()
            if ray not in seen:
                seen.add(ray)
                binding.append(c)
    return Threshold(
        value=lo,
        strict=_holds_at(fam, p, curves, lo, prop),
        property=prop,
        binding_curves=tuple(c.cls for c in binding),
        binding_labels=tuple(c.name() for c in binding),
        square_binds=square_binds,
        exact=exact,
    )


def _holds_at(fam: AlphaFamily, p: SurfacePair, curves, alpha: Fraction, prop: str) -> bool:
    L = fam.at(alpha)
    if prop == "nef":
        return nef_class(L, p, curves).state is Tri.YES
    return ample_class(L, p, curves).state is Tri.YES
