"""Numerical checks of the model edge metric.

The model metric on C^2 with cone angle 2 pi (1 - alpha) along {z1 = 0} is
omega_0 = |z1|^(-2 alpha) dA(z1) + dA(z2).  Three things are checked here:
finite volume, Lelong numbers vanishing at rate r^(2(1 - alpha)), and a radial
solve of the curvature -1 cone metric on a disc against its closed form.

Every singular integral is taken in t = rho^(1 - alpha), which turns the
measure rho^(1 - 2 alpha) d rho into t dt / (1 - alpha).  This is binary64
code; tolerances are stated per function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import simpson
from scipy.linalg import solve_banded


class ConvergenceError(RuntimeError):
    """Newton iteration failed to converge."""


class GridTooCoarse(ConvergenceError):
    """The solve converged but its curvature residual exceeds the tolerance."""

    def __init__(self, message: str, result: "ConeSolveResult"):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class ModelMetricSpec:
    alpha: float
    dimension: int = 2
    quadrature_points: int = 64

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.dimension != 2:
            raise ValueError("only the model surface (complex dimension 2) is supported")
        if self.quadrature_points < 2:
            raise ValueError("need at least 2 quadrature points")


def _gauss(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1), half * w


def _singular_disc_mass(alpha: float, r: float, n: int, weight=None) -> float:
    """Integral of |z|^(-2 alpha) * weight(|z|) over the disc of radius r, in t = rho^beta."""
    beta = 1.0 - alpha
    t, w = _gauss(n, 0.0, r**beta)
    rho = t ** (1.0 / beta)
    vals = 2 * math.pi * t / beta
    if weight is not None:
        vals = vals * weight(rho)
    return float(np.dot(w, vals))


# --- volume ---------------------------------------------------------------


def model_volume_closed_form(alpha: float, r: float) -> float:
    return math.pi**2 * r ** (2 * (1 - alpha)) * r**2 / (1 - alpha)


def model_volume(spec: ModelMetricSpec, r: float) -> float:
    """Volume omega_0^2 / 2 of the bidisc of radius r."""
    if not 0 < r <= 1:
        raise ValueError(f"radius must lie in (0, 1], got {r}")
    return _singular_disc_mass(spec.alpha, r, spec.quadrature_points) * math.pi * r**2


# --- Lelong numbers ---------------------------------------------------------


@dataclass(frozen=True)
class LelongResult:
    alpha: float
    radii: tuple
    values: tuple
    fitted_exponent: float
    offset: float = 0.0

    @property
    def expected_exponent(self) -> float:
        return 2 * (1 - self.alpha) if self.offset == 0 else 2.0


def lelong_ratio(spec: ModelMetricSpec, r: float, offset: float = 0.0) -> float:
    """nu(r) = (1 / (pi r^2)) * integral over the 4-ball B(x, r) of omega_0 ^ omega_euc.

    The centre x is (offset, 0); offset 0 puts it on the divisor.  The integrand
    is |z1|^(-2 alpha) + 1 times Euclidean volume.
    """
    n = spec.quadrature_points
    if offset == 0:
        inner = lambda rho1: _disc_area(np.sqrt(np.maximum(r * r - rho1 * rho1, 0.0)), n)
        sing = _singular_disc_mass(spec.alpha, r, n, inner)
    else:
        sing = _offset_mass(spec.alpha, r, offset, n)
    flat = _flat_ball_volume(r, n)
    return (sing + flat) / (math.pi * r * r)


def _disc_area(radius: np.ndarray, n: int) -> np.ndarray:
    """Area of discs by Gauss–Legendre on 2 pi rho d rho, one rule per radius."""
    x, w = leggauss(n)
    u = 0.5 * (x + 1)
    out = np.empty_like(radius)
    for i, R in enumerate(radius):
        out[i] = np.dot(0.5 * R * w, 2 * math.pi * R * u)
    return out


def _flat_ball_volume(r: float, n: int) -> float:
    rho1, w = _gauss(n, 0.0, r)
    return float(np.dot(w, 2 * math.pi * rho1 * _disc_area(np.sqrt(r * r - rho1 * rho1), n)))


def _offset_mass(alpha: float, r: float, delta: float, n: int) -> float:
    """Integral of |z1|^(-2 alpha) over the 4-ball of radius r centred at (delta, 0), delta > r."""
    s, ws = _gauss(n, 0.0, r)
    theta = np.linspace(0.0, 2 * math.pi, 2 * n, endpoint=False)
    ss, tt = np.meshgrid(s, theta, indexing="ij")
    mod = np.abs(delta + ss * np.exp(1j * tt)) ** (-2 * alpha)
    ang = mod.mean(axis=1) * 2 * math.pi
    inner = _disc_area(np.sqrt(r * r - s * s), n)
    return float(np.dot(ws, s * ang * inner))


def lelong_estimate(spec: ModelMetricSpec, radii, offset: float = 0.0) -> LelongResult:
    """nu(r) at each radius and the least-squares slope of log nu against log r."""
    radii = [float(r) for r in radii]
    if len(radii) < 3:
        raise ValueError("need at least 3 radii")
    if any(not 0 < r < 1 for r in radii) or any(a <= b for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly decreasing in (0, 1)")
    if offset < 0 or (0 < offset <= radii[0]):
        raise ValueError("offset must be 0 (on the divisor) or exceed every radius")
    vals = [lelong_ratio(spec, r, offset) for r in radii]
    slope = float(np.polyfit(np.log(radii), np.log(vals), 1)[0])
    return LelongResult(spec.alpha, tuple(radii), tuple(vals), slope, offset)


# --- radial cone metric -----------------------------------------------------


def oracle_potential(alpha: float, rho):
    """phi with e^(2 phi) rho^(-2 alpha) |dz|^2 the curvature -1 cone metric on the unit disc."""
    beta = 1.0 - alpha
    return np.log(2 * beta) - np.log1p(-np.asarray(rho) ** (2 * beta))


@dataclass(frozen=True)
class ConeSolveResult:
    alpha: float
    radius: float
    grid: np.ndarray  # rho
    t: np.ndarray  # rho^(1 - alpha)
    s: np.ndarray  # 2 artanh(t), the uniform computational coordinate
    phi: np.ndarray
    curvature: np.ndarray
    curvature_residual: float
    cone_angle_estimate: float
    oracle_sup_error: float
    quasi_isometry: tuple
    newton_iterations: int = 0
    newton_residual: float = 0.0
    converged: bool = True
    residual_window: tuple = (1e-3, 1.0)

    @property
    def grid_n(self) -> int:
        return len(self.grid) - 1

    @property
    def phi_sup(self) -> float:
        return float(np.max(np.abs(self.phi)))

    def summary(self) -> dict:
        return {
            "alpha": self.alpha,
            "radius": self.radius,
            "grid_n": self.grid_n,
            "oracle_sup_error": self.oracle_sup_error,
            "curvature_residual": self.curvature_residual,
            "cone_angle_estimate": self.cone_angle_estimate,
            "cone_angle_expected": 2 * math.pi * (1 - self.alpha),
            "quasi_isometry_min": self.quasi_isometry[0],
            "quasi_isometry_max": self.quasi_isometry[1],
            "phi_sup": self.phi_sup,
            "newton_iterations": self.newton_iterations,
            "newton_residual": self.newton_residual,
        }


def _residual(phi, phi_b, s_half, mass, h):
    full = np.append(phi, phi_b)
    flux = s_half * (full[1:] - full[:-1]) / h
    return flux - np.concatenate(([0.0], flux[:-1])) - np.exp(2 * phi) * mass


def _curvature(s: np.ndarray, phi: np.ndarray, beta: float) -> np.ndarray:
    """K = -beta^2 e^(-2 phi) Lap_t phi, with Lap_t = 4 cosh^4(s/2) (d_ss + coth(s) d_s).

    Derivatives are plain central differences, independent of the solver's
    flux form, so the residual measures the discretisation honestly.
    """
    h = s[1] - s[0]
    d1 = np.gradient(phi, h, edge_order=2)
    d2 = np.empty_like(phi)
    d2[1:-1] = (phi[2:] - 2 * phi[1:-1] + phi[:-2]) / h**2
    d2[0] = 2 * (phi[1] - phi[0]) / h**2  # symmetric extension about the centre
    d2[-1] = (2 * phi[-1] - 5 * phi[-2] + 4 * phi[-3] - phi[-4]) / h**2
    lap = np.empty_like(phi)
    lap[1:] = d2[1:] + d1[1:] / np.tanh(s[1:])
    lap[0] = 2 * d2[0]
    return -(beta**2) * np.exp(-2 * phi) * 4 * np.cosh(s / 2) ** 4 * lap


def _cone_angle(s: np.ndarray, t: np.ndarray, phi: np.ndarray, beta: float, nodes: int = 8) -> float:
    """Circumference over geodesic radius, extrapolated to the centre in t^2."""
    dt_ds = (1 - t * t) / 2
    f = np.exp(phi) * dt_ds / beta
    h = s[1] - s[0]
    rg = np.concatenate(([0.0], np.cumsum(0.5 * h * (f[1:] + f[:-1]))))
    k = slice(1, nodes + 1)
    ratio = 2 * math.pi * t[k] * np.exp(phi[k]) / rg[k]
    return float(np.polyfit(t[k] ** 2, ratio, 1)[1])


def solve_radial_cone(alpha: float, R: float, grid_n: int = 2000, tol: float = 1e-6, max_iter: int = 100) -> ConeSolveResult:
    """Curvature -1 cone metric of angle 2 pi (1 - alpha) on the disc of radius R.

    Writing the metric as e^(2 phi) rho^(-2 alpha) |dz|^2 and t = rho^(1-alpha),
    the Liouville equation becomes Lap_t phi = e^(2 phi) / (1 - alpha)^2, regular
    at t = 0.  It is discretised by finite volumes on a grid uniform in
    s = 2 artanh(t), which grades towards the outer edge, with Dirichlet data from
    the closed form and a damped Newton iteration.
    """
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if not 0 < R < 1:
        raise ValueError(f"radius must lie in (0, 1), got {R}")
    if grid_n < 100:
        raise ValueError("grid_n must be at least 100")
    if tol <= 0:
        raise ValueError("tol must be positive")
    beta = 1.0 - alpha
    T = R**beta
    S = 2 * math.atanh(T)
    h = S / grid_n
    s = np.linspace(0.0, S, grid_n + 1)
    t = np.tanh(s / 2)
    s_half = np.sinh(0.5 * (s[:-1] + s[1:]))
    edges = np.tanh(np.concatenate(([0.0], 0.5 * (s[:-1] + s[1:]))) / 2)
    mass = (edges[1:] ** 2 - edges[:-1] ** 2) / (2 * beta**2)
    phi_b = float(oracle_potential(alpha, R))

    phi = np.full(grid_n, phi_b)  # a supersolution, so Newton descends monotonically
    res = _residual(phi, phi_b, s_half, mass, h)
    norm = float(np.max(np.abs(res)))
    it = 0
    for it in range(1, max_iter + 1):
        band = np.zeros((3, grid_n))
        band[1] = -s_half / h - np.concatenate(([0.0], s_half[:-1] / h)) - 2 * np.exp(2 * phi) * mass
        band[0, 1:] = s_half[:-1] / h
        band[2, :-1] = s_half[:-1] / h
        step = solve_banded((1, 1), band, -res)
        lam = 1.0
        while True:
            trial = phi + lam * step
            tres = _residual(trial, phi_b, s_half, mass, h)
            tnorm = float(np.max(np.abs(tres)))
            if tnorm < norm or lam < 1e-10 or float(np.max(np.abs(step))) < 1e-14:
                break
            lam /= 2
        phi, res, norm = trial, tres, tnorm
        if float(np.max(np.abs(lam * step))) < 1e-13:
            break
    else:
        raise ConvergenceError(f"Newton did not converge in {max_iter} iterations (residual {norm:.3e})")

    full = np.append(phi, phi_b)
    rho = t ** (1.0 / beta)
    K = _curvature(s, full, beta)
    lo = 1e-3
    window = (rho >= lo) & (rho <= R)
    curv_res = float(np.max(np.abs(K[window] + 1))) if window.any() else float("nan")
    err = float(np.max(np.abs(full - oracle_potential(alpha, rho))))
    ratio = np.exp(2 * full)
    result = ConeSolveResult(
        alpha=alpha,
        radius=R,
        grid=rho,
        t=t,
        s=s,
        phi=full,
        curvature=K,
        curvature_residual=curv_res,
        cone_angle_estimate=_cone_angle(s, t, full, beta),
        oracle_sup_error=err,
        quasi_isometry=(float(ratio.min()), float(ratio.max())),
        newton_iterations=it,
        newton_residual=norm,
        residual_window=(lo, R),
    )
    if not curv_res <= tol:
        raise GridTooCoarse(f"curvature residual {curv_res:.3e} exceeds tol {tol:.1e}", result)
    return result


def euclidean_disc(R: float, grid_n: int = 400) -> ConeSolveResult:
    """The flat unit-density disc in the same representation (alpha = 0, phi = 0)."""
    s = np.linspace(0.0, 2 * math.atanh(R), grid_n + 1)
    t = np.tanh(s / 2)
    phi = np.zeros_like(s)
    K = _curvature(s, phi, 1.0)
    return ConeSolveResult(0.0, R, t, t, s, phi, K, 1.0, 2 * math.pi, float("nan"), (1.0, 1.0))


# --- Gauss–Bonnet -----------------------------------------------------------


@dataclass(frozen=True)
class GaussBonnetReport:
    eps: tuple
    defects: tuple
    inner_turning: tuple
    inner_turning_limit: float
    expected_turning: float

    @property
    def defect(self) -> float:
        return max(abs(d) for d in self.defects)


def _turning(s, phi, beta, i, h, one_sided=False):
    """Total geodesic curvature 2 pi beta (1 + t phi_t) of the circle through node i."""
    if one_sided:
        d1 = (3 * phi[i] - 4 * phi[i - 1] + phi[i - 2]) / (2 * h)
    elif i == 0:
        d1 = 0.0
    else:
        d1 = (phi[i + 1] - phi[i - 1]) / (2 * h)
    return float(2 * math.pi * beta * (1 + math.sinh(s[i]) * d1))


def gauss_bonnet_defect(result: ConeSolveResult, eps=(1e-2, 1e-3, 1e-4)) -> GaussBonnetReport:
    """(1/2 pi)(int K dA + outer turning - inner turning) over annuli eps < rho < R.

    For an annulus this is 0.  The inner turning tends to 2 pi (1 - alpha), the
    cone angle, and its limit is reported by extrapolation to the centre.
    """
    if not result.converged:
        raise ConvergenceError("Gauss–Bonnet needs a converged solve")
    s, t, phi, K = result.s, result.t, result.phi, result.curvature
    beta = 1.0 - result.alpha
    h = s[1] - s[0]
    rho = result.grid
    dens = 2 * math.pi * K * np.exp(2 * phi) * t * (1 - t * t) / (2 * beta)
    outer = _turning(s, phi, beta, len(s) - 1, h, one_sided=True)
    defects, turns = [], []
    for e in eps:
        i = int(np.searchsorted(rho, e))
        i = min(max(i, 1), len(s) - 3)
        area = float(simpson(dens[i:], x=s[i:]))
        inner = _turning(s, phi, beta, i, h)
        defects.append(float((area + outer - inner) / (2 * math.pi)))
        turns.append(float(inner))
    k = np.arange(1, 9)
    near = [_turning(s, phi, beta, j, h) for j in k]
    limit = float(np.polyfit(t[k] ** 2, near, 1)[1])
    return GaussBonnetReport(tuple(eps), tuple(defects), tuple(turns), limit, 2 * math.pi * beta)
