"""Hand-built pairs used by several test modules."""

from logsurf.lattice import BoundaryComponent, CurveRecord, DivisorClass, Lattice, SurfacePair


def fabricated_genus_pair() -> SurfacePair:
    """diag(1, -1) with K = (-3, 0): E = (0, 1) has K.E = 0 and E^2 = -1.

    K is not characteristic here, so the pair does not validate; it exists to
    feed Reider's search a candidate that only genus integrality excludes.
    """
    lat = Lattice([[1, 0], [0, -1]])
    H = DivisorClass.of(1, 0)
    return SurfacePair(
        lattice=lat,
        K=DivisorClass.of(-3, 0),
        components=(BoundaryComponent(H * 4, True, False, "quartic"),),
        catalog=(CurveRecord(H, True, True, label="H"),),
        chi=4,
        sigma=0,
        name="fabricated",
        reference=H,
    )


def p2_pair(*degrees, rational=None) -> SurfacePair:
    """The plane with one boundary component of each given degree."""
    H = DivisorClass.of(1)
    comps = tuple(BoundaryComponent(H * d, True, d <= 2 if rational is None else rational, f"C{d}") for d in degrees)
    catalog = (CurveRecord(H, True, True, label="H"), CurveRecord(H * 2, True, True, label="conic"))
    return SurfacePair(Lattice([[1]]), DivisorClass.of(-3), comps, catalog, 3, 1, name="plane", reference=H)
