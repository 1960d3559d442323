"""Exact arithmetic on the Néron–Severi lattice of a surface pair.

Everything here is rational and exact.  A class is a coefficient vector in a
fixed basis, the intersection form is an integer Gram matrix, and a pair bundles
the lattice with the canonical class, the boundary components and a catalog of
known irreducible curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Iterable, Iterator, Sequence


class LatticeError(ValueError):
    """Malformed lattice data."""


class DimensionMismatch(LatticeError):
    """Two classes, or a class and a lattice, have different ranks."""


class EnumerationError(LatticeError):
    """A class enumeration was requested without a usable reference class."""


def _frac(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("classes are exact; got a float coefficient")
    return Fraction(x)


@dataclass(frozen=True)
class DivisorClass:
    """A rational class in the lattice basis."""

    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(_frac(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        den = math.lcm(*(c.denominator for c in coeffs)) if coeffs else 1
        # integer numerators over a common denominator, for fast pairing
        object.__setattr__(self, "_den", den)
        object.__setattr__(self, "_num", tuple(int(c * den) for c in coeffs))

    @classmethod
    def of(cls, *coeffs) -> "DivisorClass":
        return cls(coeffs)

    @classmethod
    def zero(cls, rank: int) -> "DivisorClass":
        return cls((0,) * rank)

    @property
    def rank(self) -> int:
        return len(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.coeffs)

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i]

    def _check(self, other: "DivisorClass") -> None:
        if len(other.coeffs) != len(self.coeffs):
            raise DimensionMismatch(f"rank {len(self.coeffs)} vs rank {len(other.coeffs)}")

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        self._check(other)
        return DivisorClass(a + b for a, b in zip(self.coeffs, other.coeffs))

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        self._check(other)
        return DivisorClass(a - b for a, b in zip(self.coeffs, other.coeffs))

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(-a for a in self.coeffs)

    def __mul__(self, scalar) -> "DivisorClass":
        s = _frac(scalar)
        return DivisorClass(s * a for a in self.coeffs)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def primitive(self) -> "DivisorClass":
        """Generator of the ray through this class: integral with coprime entries."""
        if self.is_zero():
            return self
        den = math.lcm(*(c.denominator for c in self.coeffs))
        ints = [int(c * den) for c in self.coeffs]
        g = math.gcd(*ints)
        return DivisorClass(i // g for i in ints)

    def as_ints(self) -> tuple[int, ...]:
        if not self.is_integral():
            raise LatticeError(f"class {self} is not integral")
        return tuple(int(c) for c in self.coeffs)

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coeffs) + ")"


def _as_int(x) -> int:
    if isinstance(x, bool) or Fraction(x).denominator != 1:
        raise LatticeError(f"gram entries must be integers, got {x!r}")
    return int(x)


@dataclass(frozen=True)
class Lattice:
    """Integer Gram matrix of the intersection form.

    Symmetry and signature are not enforced here so that a malformed matrix can
    still be loaded and reported by :func:`validate`.
    """

    gram: tuple

    def __post_init__(self):
        rows = tuple(tuple(_as_int(x) for x in row) for row in self.gram)
        if any(len(r) != len(rows) for r in rows):
            raise LatticeError("gram matrix is not square")
        object.__setattr__(self, "gram", rows)

    @property
    def rank(self) -> int:
        return len(self.gram)

    def basis(self, i: int) -> DivisorClass:
        return DivisorClass(int(j == i) for j in range(self.rank))

    def pair(self, a: DivisorClass, b: DivisorClass) -> Fraction:
        if a.rank != self.rank or b.rank != self.rank:
            raise DimensionMismatch(f"lattice rank {self.rank}, classes of rank {a.rank} and {b.rank}")
        an, bn = a._num, b._num
        total = 0
        for i, ai in enumerate(an):
            if ai:
                row = self.gram[i]
                total += ai * sum(row[j] * bj for j, bj in enumerate(bn) if bj)
        return Fraction(total, a._den * b._den)

    def square(self, a: DivisorClass) -> Fraction:
        return self.pair(a, a)

    def is_symmetric(self) -> bool:
        n = self.rank
        return all(self.gram[i][j] == self.gram[j][i] for i in range(n) for j in range(i + 1, n))

    def signature(self) -> tuple[int, int, int]:
        """(positive, negative, zero) inertia counts by exact congruence diagonalisation."""
        diag = congruence_diagonal(self.gram)
        return (sum(d > 0 for d in diag), sum(d < 0 for d in diag), sum(d == 0 for d in diag))


def pair(a: DivisorClass, b: DivisorClass, lattice: Lattice) -> Fraction:
    """Intersection number of two classes."""
    return lattice.pair(a, b)


def congruence_diagonal(gram: Sequence[Sequence]) -> list[Fraction]:
    """Diagonal of a matrix congruent to the symmetric ``gram``, in exact arithmetic."""
    a = [[Fraction(x) for x in row] for row in gram]
    n = len(a)
    diag: list[Fraction] = []
    for k in range(n):
        if a[k][k] == 0:
            j = next((j for j in range(k + 1, n) if a[j][j] != 0), None)
            if j is not None:
                a[k], a[j] = a[j], a[k]
                for row in a:
                    row[k], row[j] = row[j], row[k]
            else:
                j = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
                if j is None:
                    diag.append(Fraction(0))
                    continue
                # a[k][k] becomes 2 a[k][j] which is nonzero
                for i in range(n):
                    a[k][i] += a[j][i]
                for i in range(n):
                    a[i][k] += a[i][j]
        p = a[k][k]
        diag.append(p)
        for i in range(k + 1, n):
            f = a[i][k] / p
            if f == 0:
                continue
            for j in range(n):
                a[i][j] -= f * a[k][j]
            for j in range(n):
                a[j][i] -= f * a[j][k]
    return diag


# --- surface pairs ---------------------------------------------------------


@dataclass(frozen=True)
class BoundaryComponent:
    cls: DivisorClass
    smooth: bool = True
    rational: bool = False
    label: str = ""


@dataclass(frozen=True)
class CurveRecord:
    """A known irreducible curve."""

    cls: DivisorClass
    rational: bool = False
    smooth: bool = True
    irreducible: bool = True
    label: str = ""


DEFAULT_HEIGHT_BOUND = 20


@dataclass(frozen=True)
class SurfacePair:
    lattice: Lattice
    K: DivisorClass
    components: tuple = ()
    catalog: tuple = ()
    chi: int = 0
    sigma: int = 0
    name: str = ""
    height_bound: int = DEFAULT_HEIGHT_BOUND
    reference: DivisorClass | None = None

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "catalog", tuple(self.catalog))

    @property
    def rank(self) -> int:
        return self.lattice.rank

    @property
    def D(self) -> DivisorClass:
        total = DivisorClass.zero(self.rank)
        for c in self.components:
            total = total + c.cls
        return total

    @property
    def L(self) -> DivisorClass:
        """Log canonical class K + D."""
        return self.K + self.D

    def pair(self, a: DivisorClass, b: DivisorClass) -> Fraction:
        return self.lattice.pair(a, b)

    def genus(self, c: DivisorClass) -> Fraction:
        return arithmetic_genus(c, self.K, self.lattice)

    def reference_class(self) -> DivisorClass:
        """Class h used to bound enumeration heights."""
        if self.reference is not None:
            h = self.reference
        elif self.catalog:
            h = self.catalog[0].cls
        else:
            raise EnumerationError("no reference class: the catalog is empty and none was given")
        if not h.is_integral() or self.lattice.square(h) <= 0:
            raise EnumerationError(f"reference class {h} must be integral with positive square")
        return h

    def complement(self, index: int) -> DivisorClass:
        """D minus the component at ``index`` (by position, so repeated classes are handled)."""
        return self.D - self.components[index].cls

    def label_of(self, c: DivisorClass) -> str:
        for rec in tuple(self.catalog) + tuple(self.components):
            if rec.label and rec.cls == c:
                return rec.label
        return str(c)


def arithmetic_genus(c: DivisorClass, K: DivisorClass, lattice: Lattice) -> Fraction:
    """Adjunction: p_a = (C^2 + K.C)/2 + 1."""
    return (lattice.square(c) + lattice.pair(K, c)) / 2 + 1


# --- validation ------------------------------------------------------------


@dataclass(frozen=True)
class Failure:
    invariant: str
    message: str
    path: str = ""
    witness: object = None


@dataclass
class ValidationReport:
    failures: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, invariant: str, message: str, path: str = "", witness=None) -> None:
        self.failures.append(Failure(invariant, message, path, witness))

    def __str__(self) -> str:
        if self.ok:
            return "valid" + "".join(f"\n  warning: {w}" for w in self.warnings)
        return "\n".join(f"{f.path or '-'}: [{f.invariant}] {f.message}" for f in self.failures)


def validate(p: SurfacePair) -> ValidationReport:
    """Check every structural invariant of a pair and report all violations."""
    rep = ValidationReport()
    lat = p.lattice
    n = lat.rank
    if n < 1:
        rep.fail("gram.shape", "rank must be at least 1", ".gram")
        return rep
    if not lat.is_symmetric():
        rep.fail("gram.symmetric", "gram matrix is not symmetric", ".gram")
        return rep
    pos, neg, zero = lat.signature()
    if (pos, neg, zero) != (1, n - 1, 0):
        rep.fail("gram.signature", f"signature is (+{pos}, -{neg}, 0x{zero}); expected (1, {n - 1})", ".gram")

    shapes_ok = True
    if p.K.rank != n or not p.K.is_integral():
        rep.fail("K.shape", f"K must be an integral vector of length {n}", ".K")
        shapes_ok = False
    for idx, comp in enumerate(p.components):
        if comp.cls.rank != n or not comp.cls.is_integral():
            rep.fail("component.shape", f"component {idx} must be integral of length {n}", f".components[{idx}].class")
            shapes_ok = False
    for idx, cur in enumerate(p.catalog):
        if cur.cls.rank != n or not cur.cls.is_integral():
            rep.fail("curve.shape", f"curve {idx} must be integral of length {n}", f".curves[{idx}].class")
            shapes_ok = False
    if not shapes_ok:
        return rep

    for i in range(n):
        if (lat.gram[i][i] - lat.pair(p.K, lat.basis(i))) % 2 != 0:
            rep.fail("K.characteristic", f"K.e{i} and e{i}^2 differ in parity", ".K", lat.basis(i))
    k2 = lat.square(p.K)
    if k2 != 2 * p.chi + 3 * p.sigma:
        rep.fail("noether", f"K^2 = {k2} but 2*chi + 3*sigma = {2 * p.chi + 3 * p.sigma}", ".chi")

    seen: dict = {}
    for idx, comp in enumerate(p.components):
        if comp.cls.is_zero():
            rep.fail("component.nonzero", f"component {idx} has zero class", f".components[{idx}].class")
            continue
        if comp.cls in seen:
            rep.warnings.append(f"components {seen[comp.cls]} and {idx} share the class {comp.cls}")
        seen.setdefault(comp.cls, idx)
        _check_curve_flags(rep, p, comp.cls, comp.rational, comp.smooth, f".components[{idx}]")
    for idx, cur in enumerate(p.catalog):
        if not cur.irreducible:
            rep.fail("curve.irreducible", "catalog entries must be irreducible", f".curves[{idx}].irreducible")
        if cur.cls.is_zero():
            rep.fail("curve.nonzero", f"curve {idx} has zero class", f".curves[{idx}].class")
            continue
        _check_curve_flags(rep, p, cur.cls, cur.rational, cur.smooth, f".curves[{idx}]")

    # distinct irreducible curves meet nonnegatively; two boundary components
    # are distinct even when their classes agree
    known = [(f".components[{i}]", c.cls) for i, c in enumerate(p.components)]
    known += [(f".curves[{i}]", c.cls) for i, c in enumerate(p.catalog)]
    for a in range(len(known)):
        for b in range(a + 1, len(known)):
            (pa, ca), (pb, cb) = known[a], known[b]
            both_boundary = pb.startswith(".components")
            if (ca != cb or both_boundary) and lat.pair(ca, cb) < 0:
                rep.fail("curves.meet", f"{pa} and {pb} are distinct curves with negative intersection", pb, cb)

    if p.reference is not None:
        if p.reference.rank != n or not p.reference.is_integral() or lat.square(p.reference) <= 0:
            rep.fail("reference", "reference class must be integral with positive square", ".reference")
    elif p.catalog and lat.square(p.catalog[0].cls) <= 0:
        rep.fail("reference", "first catalog curve is the default reference and needs positive square", ".curves[0].class")
    if p.height_bound < 0:
        rep.fail("height_bound", "height bound must be nonnegative", ".height_bound")
    return rep


def _check_curve_flags(rep: ValidationReport, p: SurfacePair, c: DivisorClass, rational: bool, smooth: bool, path: str) -> None:
    g = p.genus(c)
    if g < 0 or g.denominator != 1:
        rep.fail("curve.genus", f"arithmetic genus {g} is impossible for an irreducible curve", path + ".class", c)
        return
    # an irreducible curve with p_a = 0 is a smooth rational curve, and a smooth
    # rational curve has p_a = 0
    if rational and smooth and g != 0:
        rep.fail("curve.flags", f"smooth rational curve has arithmetic genus {g}", path + ".rational", c)
    if g == 0 and not (rational and smooth):
        rep.fail("curve.flags", "arithmetic genus 0 forces a smooth rational curve", path + ".rational", c)


# --- integer linear algebra for enumeration ----------------------------------


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _colop(m: list, c: int, j: int, x: int, y: int, u: int, v: int) -> None:
    for row in m:
        a, b = row[c], row[j]
        row[c], row[j] = x * a + y * b, u * a + v * b


class _AffineSolver:
    """Integer solutions of A x = b via a unimodular column echelon form A U = H."""

    def __init__(self, rows: list[list[int]], n: int):
        a = [list(r) for r in rows]
        u = [[int(i == j) for j in range(n)] for i in range(n)]
        pivots: list[tuple[int, int]] = []
        c = 0
        for i in range(len(a)):
            if c >= n:
                break
            for j in range(c + 1, n):
                if a[i][j] == 0:
                    continue
                p, q = a[i][c], a[i][j]
                g, x, y = _xgcd(p, q)
                _colop(a, c, j, x, y, -q // g, p // g)
                _colop(u, c, j, x, y, -q // g, p // g)
            if a[i][c] != 0:
                pivots.append((i, c))
                c += 1
        self.h, self.u, self.pivots, self.n = a, u, pivots, n

    def kernel(self) -> list[list[int]]:
        k = len(self.pivots)
        return [[self.u[r][c] for r in range(self.n)] for c in range(k, self.n)]

    def particular(self, b: Sequence[int]) -> list[int] | None:
        z = [0] * self.n
        for i, c in self.pivots:
            rest = b[i] - sum(self.h[i][j] * z[j] for j in range(c))
            if rest % self.h[i][c]:
                return None
            z[c] = rest // self.h[i][c]
        for i, row in enumerate(self.h):
            if sum(row[j] * z[j] for j in range(self.n)) != b[i]:
                return None
        return [sum(self.u[r][c] * z[c] for c in range(self.n)) for r in range(self.n)]


def _ldl(p: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[Fraction]]:
    m = len(p)
    low = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    d = [Fraction(0)] * m
    for j in range(m):
        d[j] = p[j][j] - sum(low[j][k] ** 2 * d[k] for k in range(j))
        if d[j] <= 0:
            raise EnumerationError("orthogonal complement of the reference class is not negative definite")
        for i in range(j + 1, m):
            low[i][j] = (p[i][j] - sum(low[i][k] * low[j][k] * d[k] for k in range(j))) / d[j]
    return low, d


def _rational_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    a, b = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


def _shell_points(low, d, centre, radius: Fraction) -> Iterator[tuple[int, ...]]:
    """Integer z with (z - centre)^T P (z - centre) == radius, where P = L diag(d) L^T."""
    m = len(d)
    if radius < 0:
        return
    if m == 0:
        if radius == 0:
            yield ()
        return
    z = [0] * m

    def rec(i: int, budget: Fraction):
        shift = sum((low[j][i] * (z[j] - centre[j]) for j in range(i + 1, m)), Fraction(0))
        mid = centre[i] - shift
        if i == 0:
            r = _rational_sqrt(budget / d[0])
            if r is None:
                return
            for cand in {mid + r, mid - r}:
                if cand.denominator == 1:
                    z[0] = int(cand)
                    yield tuple(z)
            return
        span = math.sqrt(float(budget / d[i]))
        lo, hi = math.floor(float(mid) - span) - 1, math.ceil(float(mid) + span) + 1
        for zi in range(lo, hi + 1):
            dev = zi - mid
            rest = budget - d[i] * dev * dev
            if rest < 0:
                continue
            z[i] = zi
            yield from rec(i - 1, rest)

    yield from rec(m - 1, radius)


def _integral_row(c: DivisorClass, value, lattice: Lattice) -> tuple[list[int], int] | None:
    """Row of the linear condition c.x = value, scaled to integers; None if unsatisfiable."""
    row = [sum(c[i] * lattice.gram[i][j] for i in range(lattice.rank)) for j in range(lattice.rank)]
    den = math.lcm(*(x.denominator for x in row), Fraction(value).denominator)
    v = Fraction(value) * den
    return [int(x * den) for x in row], int(v)


def enumerate_classes(
    lattice: Lattice,
    self_int: int,
    reference: DivisorClass,
    height_bound: int,
    constraints: Iterable[tuple[DivisorClass, object]] = (),
) -> list[DivisorClass]:
    """All nonzero integral x with x^2 = self_int, 0 <= h.x <= bound and c.x = v for each constraint.

    Output is sorted by height, ties broken with larger coefficient vectors first.
    Results are cached per argument set.
    """
    key = tuple((c, Fraction(v)) for c, v in constraints)
    return list(_enumerate(lattice, int(self_int), reference, int(height_bound), key))


@lru_cache(maxsize=4096)
def _enumerate(lattice, self_int, reference, height_bound, constraints) -> tuple:
    """Exact search.

    The linear conditions are solved over the integers; on the remaining affine
    lattice the quadratic condition is a shell in the negative definite
    complement of ``reference``, searched by Fincke–Pohst.
    """
    h = reference
    if h.rank != lattice.rank or not h.is_integral() or lattice.square(h) <= 0:
        raise EnumerationError(f"reference class {h} must be integral with positive square")
    rows = [_integral_row(h, 0, lattice)[0]]
    rhs_fixed = []
    for c, v in constraints:
        row, val = _integral_row(c, v, lattice)
        rows.append(row)
        rhs_fixed.append(val)
    n = lattice.rank
    solver = _AffineSolver(rows, n)
    w = solver.kernel()
    q = [[Fraction(x) for x in r] for r in lattice.gram]

    def qmul(v):
        return [sum(q[i][j] * v[j] for j in range(n)) for i in range(n)]

    qw = [qmul(col) for col in w]
    pmat = [[-sum(wi[k] * qwj[k] for k in range(n)) for qwj in qw] for wi in w]
    low, d = _ldl(pmat) if w else ([], [])
    found: set = set()
    hq = rows[0]
    for t in range(height_bound + 1):
        x0 = solver.particular([t] + rhs_fixed)
        if x0 is None:
            continue
        qx0 = qmul(x0)
        lin = [sum(wi[k] * qx0[k] for k in range(n)) for wi in w]
        const = sum(x0[k] * qx0[k] for k in range(n))
        if w:
            centre = _solve_ldl(low, d, lin)
            radius = const - self_int + sum(a * b for a, b in zip(lin, centre))
        else:
            centre, radius = [], const - self_int
        for z in _shell_points(low, d, centre, radius):
            x = tuple(x0[k] + sum(z[i] * w[i][k] for i in range(len(w))) for k in range(n))
            if any(x):
                found.add(x)
    out = []
    for x in found:
        cls = DivisorClass(x)
        assert lattice.square(cls) == self_int and 0 <= sum(a * b for a, b in zip(hq, x)) <= height_bound
        out.append(cls)
    out.sort(key=lambda c: (lattice.pair(h, c), tuple(-a for a in c.coeffs)))
    return tuple(out)


def _solve_ldl(low, d, rhs):
    m = len(d)
    y = [Fraction(0)] * m
    for i in range(m):
        y[i] = rhs[i] - sum(low[i][k] * y[k] for k in range(i))
    y = [y[i] / d[i] for i in range(m)]
    x = [Fraction(0)] * m
    for i in reversed(range(m)):
        x[i] = y[i] - sum(low[k][i] * x[k] for k in range(i + 1, m))
    return x


def enumerate_negative_classes(
    p: SurfacePair,
    self_int: int,
    k_dot: int,
    height_bound: int | None = None,
    reference: DivisorClass | None = None,
) -> list[DivisorClass]:
    """Integral classes with C^2 = self_int, K.C = k_dot and 0 <= h.C <= bound."""
    if self_int >= 0:
        raise ValueError("self_int must be negative")
    h = reference if reference is not None else p.reference_class()
    bound = p.height_bound if height_bound is None else height_bound
    return enumerate_classes(p.lattice, self_int, h, bound, [(p.K, k_dot)])
