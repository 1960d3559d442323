"""Random valid pairs with geometrically meaningful catalogs.

Three families, each optionally written in a random unimodular basis:

* the plane with a few smooth plane curves as boundary;
* the plane blown up at r <= 6 general points, whose catalog holds the line
  class and every (-1)-curve, with boundary curves drawn from those and from
  smooth curves dH - E_S of degree d >= 3;
* the lattice diag(1, -2) with an odd first coordinate of K.  Its catalog is
  closed: every admissible (-1,-1) and (-2,0) class is declared as a curve, so
  the declared curves are the whole story, as on a real surface.

Every sample is passed through ``validate``; rejected samples are redrawn.
"""

from __future__ import annotations

import dataclasses
import random
from fractions import Fraction

from logsurf.lattice import (
    BoundaryComponent,
    CurveRecord,
    DivisorClass,
    Lattice,
    SurfacePair,
    enumerate_negative_classes,
    validate,
)
from logsurf.positivity import enumerated_curves


def _mat_mul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


def random_unimodular(n: int, rng: random.Random, steps: int = 6):
    """Integer matrix of determinant +-1 and its inverse."""
    m = [[int(i == j) for j in range(n)] for i in range(n)]
    inv = [row[:] for row in m]
    for _ in range(steps if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        c = rng.choice([-2, -1, 1, 2])
        # column op: col_j += c col_i ; inverse: row_i -= c row_j
        for row in m:
            row[j] += c * row[i]
        inv[i] = [inv[i][k] - c * inv[j][k] for k in range(n)]
    if rng.random() < 0.5:
        k = rng.randrange(n)
        for row in m:
            row[k] = -row[k]
        inv[k] = [-x for x in inv[k]]
    return m, inv


def change_basis(p: SurfacePair, b, binv) -> SurfacePair:
    """Rewrite the pair in the basis given by the columns of ``b``."""
    n = p.rank
    q = [list(r) for r in p.lattice.gram]
    bt = [list(r) for r in zip(*b)]
    gram = _mat_mul(_mat_mul(bt, q), b)

    def tr(c: DivisorClass) -> DivisorClass:
        return DivisorClass(sum(binv[i][k] * c[k] for k in range(n)) for i in range(n))

    return SurfacePair(
        lattice=Lattice(gram),
        K=tr(p.K),
        components=tuple(BoundaryComponent(tr(c.cls), c.smooth, c.rational, c.label) for c in p.components),
        catalog=tuple(CurveRecord(tr(c.cls), c.rational, c.smooth, c.irreducible, c.label) for c in p.catalog),
        chi=p.chi,
        sigma=p.sigma,
        name=p.name,
        height_bound=p.height_bound,
        reference=None if p.reference is None else tr(p.reference),
    )


def plane_pair(rng: random.Random) -> SurfacePair:
    lat = Lattice([[1]])
    H = DivisorClass.of(1)
    degrees = [rng.randint(1, 6) for _ in range(rng.randint(0, 3))]
    comps = tuple(BoundaryComponent(H * d, True, d <= 2, f"C{d}") for d in degrees)
    catalog = (CurveRecord(H, True, True, label="H"), CurveRecord(H * 2, True, True, label="conic"))
    catalog += tuple(CurveRecord(H * d, d <= 2, True, label=f"C{d}") for d in sorted(set(degrees)) if d > 2)
    return SurfacePair(lat, DivisorClass.of(-3), comps, catalog, 3, 1, name="plane", reference=H)


_BLOWUP_CACHE: dict = {}


def _blowup_lattice(r: int):
    if r not in _BLOWUP_CACHE:
        n = r + 1
        gram = [[0] * n for _ in range(n)]
        gram[0][0] = 1
        for i in range(1, n):
            gram[i][i] = -1
        lat = Lattice(gram)
        K = DivisorClass([-3] + [1] * r)
        H = lat.basis(0)
        probe = SurfacePair(lat, K, catalog=(CurveRecord(H, True, True),), chi=3 + r, sigma=1 - r)
        lines = enumerate_negative_classes(probe, -1, -1, height_bound=6, reference=H)
        _BLOWUP_CACHE[r] = (lat, K, H, lines)
    return _BLOWUP_CACHE[r]


def blowup_pair(rng: random.Random) -> SurfacePair:
    r = rng.randint(1, 6)
    lat, K, H, lines = _blowup_lattice(r)
    catalog = [CurveRecord(H, True, True, label="H")] + [CurveRecord(c, True, True, label=f"E{i}") for i, c in enumerate(lines)]
    comps = []
    for _ in range(rng.randint(0, 3)):
        if rng.random() < 0.4 and lines:
            c = rng.choice(lines)
            comps.append(BoundaryComponent(c, True, True, "line"))
        else:
            d = rng.randint(3, 6)
            pts = [i for i in range(1, r + 1) if rng.random() < 0.5]
            cls = DivisorClass([d] + [-int(i in pts) for i in range(1, r + 1)])
            comps.append(BoundaryComponent(cls, True, False, f"deg{d}"))
    # a boundary curve is irreducible and distinct from catalog entries unless equal
    return SurfacePair(lat, K, tuple(comps), tuple(catalog), 3 + r, 1 - r, name=f"blowup{r}", reference=H)


def diag_pair(rng: random.Random) -> SurfacePair:
    lat = Lattice([[1, 0], [0, -2]])
    k = rng.choice([-3, -1, 1, 3, 5])
    m = rng.randint(-2, 0)
    K = DivisorClass.of(k, m)
    k2 = k * k - 2 * m * m
    sigma = rng.choice([s for s in range(-4, 5) if (k2 - 3 * s) % 2 == 0])
    chi = (k2 - 3 * sigma) // 2
    H, C = DivisorClass.of(1, 0), DivisorClass.of(0, 1)
    probe = SurfacePair(lat, K)
    catalog = [CurveRecord(H, probe.genus(H) == 0, True, label="H")]
    if probe.genus(C) >= 0:
        catalog.append(CurveRecord(C, probe.genus(C) == 0, True, label="C"))
    comps = []
    for _ in range(rng.randint(0, 2)):
        a, b = rng.randint(0, 3), rng.randint(-2, 1)
        cls = DivisorClass.of(a, b)
        if cls.is_zero():
            continue
        g = probe.genus(cls)
        comps.append(BoundaryComponent(cls, True, g == 0, f"({a},{b})"))
    p = SurfacePair(lat, K, tuple(comps), tuple(catalog), chi, sigma, name="diag", reference=H)
    extra = tuple(CurveRecord(c.cls, True, True, label=f"N{i}") for i, c in enumerate(enumerated_curves(p)))
    return dataclasses.replace(p, catalog=p.catalog + extra)


FAMILIES = (plane_pair, blowup_pair, diag_pair)


def random_pair(rng: random.Random, rebase: bool = True, families=FAMILIES) -> SurfacePair:
    while True:
        p = rng.choice(families)(rng)
        if rebase:
            b, binv = random_unimodular(p.rank, rng)
            p = change_basis(p, b, binv)
        if validate(p).ok:
            return p


def random_alpha(rng: random.Random) -> Fraction:
    den = rng.randint(1, 50)
    return Fraction(rng.randint(0, den), den)
