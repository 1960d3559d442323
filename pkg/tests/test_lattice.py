import dataclasses
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logsurf.io import load_pair, pair_from_dict, pair_to_dict
from logsurf.lattice import (
    DimensionMismatch,
    DivisorClass,
    Lattice,
    LatticeError,
    SurfacePair,
    arithmetic_genus,
    congruence_diagonal,
    enumerate_classes,
    enumerate_negative_classes,
    pair,
    validate,
)
from synth import change_basis, random_pair, random_unimodular

P2 = Lattice([[1]])
K_P2 = DivisorClass.of(-3)


# --- pairing ---------------------------------------------------------------


def test_pair_matrix_product():
    q = Lattice([[1, 0], [0, -2]])
    assert pair(DivisorClass.of(2, -1), DivisorClass.of(0, 1), q) == 2


def test_pair_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        pair(DivisorClass.of(1), DivisorClass.of(1, 0), P2)


def test_non_integer_gram_rejected():
    with pytest.raises(LatticeError):
        Lattice([[Fraction(1, 2)]])


small = st.integers(-6, 6)


@st.composite
def gram_and_classes(draw):
    n = draw(st.integers(1, 4))
    m = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            m[i][j] = m[j][i] = draw(small)
    vec = lambda: DivisorClass(draw(st.lists(small, min_size=n, max_size=n)))
    return Lattice(m), vec(), vec(), vec(), draw(small)


@given(gram_and_classes())
def test_pairing_symmetric_and_bilinear(data):
    q, a, b, c, k = data
    assert pair(a, b, q) == pair(b, a, q)
    assert pair(a * k + b, c, q) == k * pair(a, c, q) + pair(b, c, q)


@given(gram_and_classes(), st.fractions(max_denominator=12))
def test_rational_classes_pair_exactly(data, x):
    q, a, b, _, _ = data
    assert pair(a * x, b, q) == x * pair(a, b, q)
    assert isinstance(pair(a * x, b, q), Fraction)


def test_signature():
    assert P2.signature() == (1, 0, 0)
    assert Lattice([[0, 1], [1, 0]]).signature() == (1, 1, 0)
    assert Lattice([[1, 0], [0, 0]]).signature() == (1, 0, 1)


@given(gram_and_classes())
def test_congruence_diagonal_preserves_determinant_sign(data):
    q = data[0]
    d = congruence_diagonal(q.gram)
    import numpy as np

    det = round(np.linalg.det(np.array(q.gram, dtype=float)))
    prod = 1
    for x in d:
        prod *= x
    assert (prod > 0) - (prod < 0) == (det > 0) - (det < 0)


# --- genus -------------------------------------------------------------------


@pytest.mark.parametrize("d,g", [(1, 0), (2, 0), (3, 1), (4, 3), (5, 6)])
def test_plane_curve_genus(d, g):
    assert arithmetic_genus(DivisorClass.of(d), K_P2, P2) == g


def test_genus_integral_with_characteristic_K():
    rng = random.Random(1)
    for _ in range(100):
        p = random_pair(rng)
        for _ in range(5):
            c = DivisorClass(rng.randint(-5, 5) for _ in range(p.rank))
            assert p.genus(c).denominator == 1


# --- validation ------------------------------------------------------------


def test_plane_data_valid():
    p = SurfacePair(P2, K_P2, chi=3, sigma=1)
    rep = validate(p)
    assert rep.ok, rep.failures


def test_bundled_examples_validate():
    from logsurf.io import bundled_examples

    for name in bundled_examples():
        assert validate(load_pair(name)).ok, name


def _perturbations(d: dict):
    """Single-field perturbations of a pair dictionary that break a stated invariant.

    Moving a curve to another class is left out: 5H in place of 4H, say, is a
    different but perfectly consistent pair.
    """
    for key in ("chi", "sigma"):
        yield key, {**d, key: d[key] + 1}
    n = d["rank"]
    for i in range(n):
        for j in range(n):
            g = [row[:] for row in d["gram"]]
            g[i][j] += 1
            yield f"gram[{i}][{j}]", {**d, "gram": g}
    for i in range(n):
        k = list(d["K"])
        k[i] += 1
        yield f"K[{i}]", {**d, "K": k}
    for part in ("components", "curves"):
        for idx, c in enumerate(d[part]):
            items = [dict(x) for x in d[part]]
            items[idx]["rational"] = not c["rational"]
            yield f"{part}[{idx}].rational", {**d, part: items}


@pytest.mark.parametrize("name", ["p2-quartic", "p2-line", "blowup-line", "boundary-minus2", "interior-minus2"])
def test_single_field_perturbations_rejected(name):
    d = pair_to_dict(load_pair(name))
    count = 0
    for where, bad in _perturbations(d):
        count += 1
        assert not validate(pair_from_dict(bad)).ok, where
    assert count > 5


def test_class_perturbation_to_inconsistent_flags_rejected():
    # a line moved to 3H keeps its rational flag but now has genus 1
    d = pair_to_dict(load_pair("p2-line"))
    d["components"][0]["class"] = [3]
    assert "curve.flags" in [f.invariant for f in validate(pair_from_dict(d)).failures]


def test_non_symmetric_gram_path():
    p = SurfacePair(Lattice([[1, 1], [0, -1]]), DivisorClass.of(-3, 1), chi=4, sigma=0)
    rep = validate(p)
    assert not rep.ok and rep.failures[0].path == ".gram"


def test_noether_failure_names_invariant():
    p = SurfacePair(P2, K_P2, chi=4, sigma=1)
    assert [f.invariant for f in validate(p).failures] == ["noether"]


def test_wrong_signature_rejected():
    p = SurfacePair(Lattice([[-1]]), DivisorClass.of(1), chi=1, sigma=-1)
    assert "gram.signature" in [f.invariant for f in validate(p).failures]


def test_duplicate_negative_components_rejected():
    base = load_pair("boundary-minus2")
    E = base.components[0]
    p = dataclasses.replace(base, components=(E, E))
    assert "curves.meet" in [f.invariant for f in validate(p).failures]


def test_duplicate_lines_only_warn():
    from fixtures import p2_pair

    rep = validate(p2_pair(1, 1, 1))
    assert rep.ok and rep.warnings


# --- enumeration ------------------------------------------------------------


def test_plane_has_no_negative_classes():
    p = SurfacePair(P2, K_P2, chi=3, sigma=1, reference=DivisorClass.of(1))
    assert enumerate_negative_classes(p, -2, 0, height_bound=10) == []


def test_diag_minus2_classes():
    q = Lattice([[1, 0], [0, -2]])
    p = SurfacePair(q, DivisorClass.of(3, 0), chi=3, sigma=1, reference=DivisorClass.of(1, 0))
    got = enumerate_negative_classes(p, -2, 0, height_bound=5)
    assert got == [DivisorClass.of(0, 1), DivisorClass.of(0, -1)]


def test_blowup_exceptional_class():
    q = Lattice([[1, 0], [0, -1]])
    p = SurfacePair(q, DivisorClass.of(-3, 1), chi=4, sigma=0, reference=DivisorClass.of(1, 0))
    assert DivisorClass.of(0, 1) in enumerate_negative_classes(p, -1, -1, height_bound=3)


def test_enumeration_requires_negative_square():
    p = SurfacePair(P2, K_P2, chi=3, sigma=1, reference=DivisorClass.of(1))
    with pytest.raises(ValueError):
        enumerate_negative_classes(p, 0, 0, height_bound=3)


def test_cubic_surface_lines_and_roots():
    n = 7
    g = [[0] * n for _ in range(n)]
    g[0][0] = 1
    for i in range(1, n):
        g[i][i] = -1
    p = SurfacePair(Lattice(g), DivisorClass([-3] + [1] * 6), chi=9, sigma=-5, reference=DivisorClass([1] + [0] * 6))
    lines = enumerate_negative_classes(p, -1, -1, height_bound=10)
    assert len(lines) == 27
    # roots with K.r = 0 form E6: 72 roots, of which 51 have h.r >= 0 (36 positive plus 15 of height 0 in A5)
    roots = enumerate_negative_classes(p, -2, 0, height_bound=10)
    assert len(roots) == 51


def _brute(q, self_int, h, bound, box):
    import itertools

    out = []
    for v in itertools.product(range(-box, box + 1), repeat=q.rank):
        c = DivisorClass(v)
        if c.is_zero():
            continue
        if q.square(c) == self_int and 0 <= q.pair(h, c) <= bound:
            out.append(c)
    return set(out)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_enumeration_matches_brute_force(seed):
    rng = random.Random(seed)
    q = Lattice([[1, 0, 0], [0, -1, 0], [0, 0, -2]])
    h = DivisorClass.of(1, 0, 0)
    b, binv = random_unimodular(3, rng, steps=3)
    p = change_basis(SurfacePair(q, DivisorClass.of(-3, 1, 0), chi=4, sigma=0, reference=h), b, binv)
    bound = rng.randint(0, 3)
    # in the diagonal basis every solution has |coefficient| <= 2 bound + 2; map back
    want = _brute(q, -2, h, bound, 2 * bound + 2)
    got = set(enumerate_classes(p.lattice, -2, p.reference, bound))
    back = {DivisorClass(sum(b[i][k] * c[k] for k in range(3)) for i in range(3)) for c in got}
    assert back == want


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_enumeration_invariant_under_basis_change(seed):
    rng = random.Random(seed)
    p = random_pair(rng, rebase=False)
    b, binv = random_unimodular(p.rank, rng)
    q = change_basis(p, b, binv)
    h = p.reference_class()
    a = {tuple(c) for c in enumerate_negative_classes(p, -1, -1, reference=h)}
    bq = {DivisorClass(sum(b[i][k] * c[k] for k in range(p.rank)) for i in range(p.rank)) for c in enumerate_negative_classes(q, -1, -1)}
    assert a == {tuple(c) for c in bq}
