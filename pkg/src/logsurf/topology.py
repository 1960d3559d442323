"""Log Chern numbers, the BMY inequality and the alpha-interpolated invariants."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

from .lattice import SurfacePair


class InvariantIdentityError(AssertionError):
    """2 chi_alpha + 3 sigma_alpha differs from L_alpha^2."""


@dataclass(frozen=True)
class LogChernNumbers:
    c1_sq: Fraction
    c2: Fraction
    chi_D: Fraction


def log_chern(p: SurfacePair) -> LogChernNumbers:
    """c1^2 = (K+D)^2 and c2 = chi - chi(D), with chi(D) = -K.D - D^2.

    The boundary term comes from the Whitney product for a smooth divisor.  For a
    nodal D it counts each node twice, once more than the topological Euler
    characteristic does.
    """
    L, K, D = p.L, p.K, p.D
    chi_D = -p.pair(K, D) - p.pair(D, D)
    return LogChernNumbers(p.pair(L, L), p.chi - chi_D, chi_D)


def chi_D_by_components(p: SurfacePair) -> Fraction:
    """Sum of 2 - 2 p_a(D_i), minus twice the pairwise intersections."""
    total = sum((2 - 2 * p.genus(c.cls) for c in p.components), Fraction(0))
    comps = p.components
    for i in range(len(comps)):
        for j in range(i + 1, len(comps)):
            total -= 2 * p.pair(comps[i].cls, comps[j].cls)
    return total


@dataclass(frozen=True)
class BMYResult:
    holds: bool
    lhs: Fraction
    rhs: Fraction

    @property
    def equality(self) -> bool:
        return self.lhs == self.rhs


def bmy_check(p: SurfacePair) -> BMYResult:
    """c1^2 <= 3 c2, evaluated in two forms that must agree."""
    n = log_chern(p)
    # expanded form K^2 + 2 K.D + D^2 against 3 (chi + K.D + D^2)
    K, D = p.K, p.D
    lhs2 = p.pair(K, K) + 2 * p.pair(K, D) + p.pair(D, D)
    rhs2 = 3 * (p.chi + p.pair(K, D) + p.pair(D, D))
    if (lhs2, rhs2) != (n.c1_sq, 3 * n.c2):
        raise InvariantIdentityError("expanded and direct log Chern numbers disagree")
    return BMYResult(n.c1_sq <= 3 * n.c2, n.c1_sq, 3 * n.c2)


def bmy_limit_check(p: SurfacePair) -> BMYResult:
    """chi - chi_D >= 3 (sigma - D^2/3): the alpha -> 1 limit of 3 sigma_alpha <= chi_alpha."""
    n = log_chern(p)
    D2 = p.pair(p.D, p.D)
    out = BMYResult(p.chi - n.chi_D >= 3 * (p.sigma - D2 / 3), p.chi - n.chi_D, 3 * (p.sigma - D2 / 3))
    if out.holds != bmy_check(p).holds:
        raise InvariantIdentityError("limit form and log form of BMY disagree")
    return out


@dataclass(frozen=True)
class EdgeInvariants:
    alpha: Fraction
    chi_alpha: Fraction
    sigma_alpha: Fraction
    l_alpha_sq: Fraction
    conjectural: bool = False

    def __post_init__(self):
        if 2 * self.chi_alpha + 3 * self.sigma_alpha != self.l_alpha_sq:
            raise InvariantIdentityError(
                f"2 chi_alpha + 3 sigma_alpha = {2 * self.chi_alpha + 3 * self.sigma_alpha} "
                f"but L_alpha^2 = {self.l_alpha_sq} at alpha = {self.alpha}"
            )


def edge_invariants(p: SurfacePair, alpha) -> EdgeInvariants:
    """chi_alpha = chi - alpha chi_D and sigma_alpha = sigma - alpha(2 - alpha) D^2 / 3.

    alpha = 0 is accepted as the formal limit.  With more than one boundary
    component the interpolation is not established and the result is tagged.
    """
    a = Fraction(alpha)
    if not 0 <= a <= 1:
        raise ValueError(f"alpha must lie in [0, 1], got {a}")
    n = log_chern(p)
    D2 = p.pair(p.D, p.D)
    La = p.K + p.D * a
    conj = len(p.components) > 1
    if conj:
        warnings.warn("edge invariants for a reducible boundary are conjectural", stacklevel=2)
    return EdgeInvariants(
        alpha=a,
        chi_alpha=p.chi - a * n.chi_D,
        sigma_alpha=p.sigma - a * (2 - a) * D2 / 3,
        l_alpha_sq=p.pair(La, La),
        conjectural=conj,
    )


IDENTITY_TABLE_ALPHAS = (Fraction(1, 2), Fraction(3, 4), Fraction(9, 10), Fraction(1))
