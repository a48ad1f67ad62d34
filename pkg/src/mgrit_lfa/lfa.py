"""Closed-form local Fourier analysis of the two-level solver.

For a spatial Fourier mode with fine/coarse stepper eigenvalues (lambda, mu)
and a low temporal frequency theta in [-pi/m, pi/m), the m temporal harmonics
theta + 2 pi a / m (a = 0..m-1) couple into an m x m block. This module
assembles the harmonic symbols of every solver component, the error
propagator

    E_hat(theta) = f(theta) * S_F_hat(theta),
    f(theta) = (lambda e^{-i theta})^{m nu} (lambda^m - mu) / (e^{i m theta} - mu),

and the closed-form norm, spectral radius, and their suprema over theta.
It also provides the space-time diagnostics (coarse-grid correction ratio,
characteristic flag) and the semi-Lagrangian lower bound rho_check.

All functions are pure; nothing here touches a mesh or a solver state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "TemporalSymbolInput",
    "HarmonicSymbol",
    "SpaceTimeCell",
    "harmonic_frequencies",
    "symbol_A0",
    "symbol_A1",
    "symbol_SF",
    "symbol_SCF",
    "symbol_prerelax",
    "symbol_error_propagator",
    "lfa_norm",
    "lfa_norm_sup",
    "lfa_spectral_radius",
    "lfa_rho_sup",
    "spacetime_rho",
    "cgc_order_probe",
    "rho_check_lower_bound",
    "discrete_theta_grid",
    "wrap_theta",
]

UNIT_TOL = 1e-12


@dataclass(frozen=True)
class TemporalSymbolInput:
    """One spatial mode's data: eigenvalue pair and cycle parameters.

    Stability requires |lam| < 1 and |mu| < 1. The single admitted
    exception is the exact unit pair lam = mu = 1 (the spatial mean mode of
    a semi-Lagrangian pair), which every downstream quantity treats as
    contributing zero error. Formulas hold for any nu >= 0; validated use
    stays within nu <= 8.
    """

    lam: complex
    mu: complex
    m: int
    nu: int

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("coarsening factor m must be >= 2")
        if self.nu < 0:
            raise ValueError("nu must be >= 0")
        if self.is_unit_pair:
            return
        if abs(self.lam) >= 1.0 or abs(self.mu) >= 1.0:
            raise ValueError(
                f"|lambda|={abs(self.lam):.6f}, |mu|={abs(self.mu):.6f}: "
                "both moduli must be < 1 (only the exact unit pair "
                "lambda = mu = 1 is admitted)")

    @property
    def is_unit_pair(self) -> bool:
        return abs(self.lam - 1.0) <= UNIT_TOL and abs(self.mu - 1.0) <= UNIT_TOL


@dataclass(frozen=True)
class HarmonicSymbol:
    """The m x m error-propagator symbol at theta with all of its factors."""

    theta: float
    matrix: np.ndarray
    a0_diag: np.ndarray
    a1: complex
    p_hat: np.ndarray
    s_f: np.ndarray
    s_cf: np.ndarray
    c: complex
    f: complex


@dataclass(frozen=True)
class SpaceTimeCell:
    """Space-time LFA record at one (omega, theta) pair."""

    omega: float
    theta: float
    lam: complex
    mu: complex
    rho: float
    norm: float
    cgc_ratio: float
    is_characteristic: bool
    singular: bool = False


def harmonic_frequencies(theta: float, m: int) -> np.ndarray:
    """The m harmonics theta + 2 pi a / m, a = 0..m-1."""
    return theta + 2.0 * np.pi * np.arange(m) / m


def wrap_theta(theta: float, m: int) -> float:
    """Alias a temporal frequency into the low band [-pi/m, pi/m)."""
    span = 2.0 * np.pi / m
    return float((theta + np.pi / m) % span - np.pi / m)


def symbol_A0(inp: TemporalSymbolInput, theta: float) -> np.ndarray:
    """Diagonal of the fine all-at-once symbol: 1 - lambda e^{-i theta_a}."""
    return 1.0 - inp.lam * np.exp(-1j * harmonic_frequencies(theta, inp.m))


def symbol_A1(inp: TemporalSymbolInput, theta: float) -> complex:
    """Scalar coarse all-at-once symbol at the coarse frequency m theta."""
    return complex(1.0 - inp.mu * np.exp(-1j * inp.m * theta))


def _c_factor(inp: TemporalSymbolInput, theta: float) -> complex:
    return (1.0 - (inp.lam * np.exp(-1j * theta)) ** inp.m) / inp.m


def symbol_SF(inp: TemporalSymbolInput, theta: float) -> np.ndarray:
    """F-relaxation symbol, the rank-1 matrix c(theta) A0^{-1} 1 1^T.

    Row a is constant with value c(theta) / (1 - lambda e^{-i theta_a}).
    Idempotent, with eigenvalues {1, 0 x (m-1)}.
    """
    a0 = symbol_A0(inp, theta)
    if np.min(np.abs(a0)) < 1e-14:
        raise ValueError("fine symbol A0 is singular at this theta "
                         "(unit-modulus lambda aligned with a harmonic)")
    col = _c_factor(inp, theta) / a0
    return np.tile(col[:, None], (1, inp.m))


def symbol_SCF(inp: TemporalSymbolInput, theta: float) -> np.ndarray:
    """CF-sweep symbol S_F (I - A0)."""
    sf = symbol_SF(inp, theta)
    return sf @ (np.eye(inp.m) - np.diag(symbol_A0(inp, theta)))


def symbol_prerelax(inp: TemporalSymbolInput, theta: float) -> np.ndarray:
    """Pre-relaxation symbol (S_CF)^nu S_F = (lambda e^{-i theta})^{m nu} S_F."""
    scale = (inp.lam * np.exp(-1j * theta)) ** (inp.m * inp.nu)
    return scale * symbol_SF(inp, theta)


def symbol_error_propagator(inp: TemporalSymbolInput, theta: float) -> HarmonicSymbol:
    """Full two-level error-propagator symbol and its factors.

    The matrix is formed as f(theta) * S_F(theta); the definitional product
    S_F K (S_CF)^nu S_F is left to tests as an independent route. The exact
    unit pair short-circuits to the zero matrix.
    """
    m = inp.m
    if inp.is_unit_pair:
        z = np.zeros((m, m), dtype=complex)
        return HarmonicSymbol(
            theta=theta, matrix=z,
            a0_diag=symbol_A0(inp, theta), a1=symbol_A1(inp, theta),
            p_hat=np.ones(m) / math.sqrt(m),
            s_f=np.full((m, m), np.nan + 0j), s_cf=np.full((m, m), np.nan + 0j),
            c=complex(_c_factor(inp, theta)), f=0.0 + 0.0j)
    a1 = symbol_A1(inp, theta)
    if abs(a1) < 1e-14:
        raise ValueError("coarse symbol A1 vanishes: e^{i m theta} = mu")
    f = ((inp.lam * np.exp(-1j * theta)) ** (m * inp.nu)
         * (inp.lam ** m - inp.mu) / (np.exp(1j * m * theta) - inp.mu))
    sf = symbol_SF(inp, theta)
    return HarmonicSymbol(
        theta=theta, matrix=f * sf,
        a0_diag=symbol_A0(inp, theta), a1=a1,
        p_hat=np.ones(m) / math.sqrt(m),
        s_f=sf, s_cf=symbol_SCF(inp, theta),
        c=complex(_c_factor(inp, theta)), f=complex(f))


def _f_relax_norm(lam: complex, m: int) -> float:
    # ||(1, lam, ..., lam^{m-1})||_2 as a plain geometric sum; stable for
    # |lam| close to 1, exact at lam = 0
    x = abs(lam) ** 2
    return math.sqrt(float(np.sum(x ** np.arange(m))))


def lfa_spectral_radius(inp: TemporalSymbolInput, theta: float) -> float:
    """rho(E_hat(theta)) = |f(theta)|."""
    if inp.is_unit_pair:
        return 0.0
    num = abs(inp.lam ** inp.m - inp.mu)
    den = abs(np.exp(1j * inp.m * theta) - inp.mu)
    if den < 1e-14:
        raise ValueError("coarse symbol A1 vanishes: e^{i m theta} = mu")
    return abs(inp.lam) ** (inp.m * inp.nu) * num / den


def lfa_norm(inp: TemporalSymbolInput, theta: float) -> float:
    """||E_hat(theta)||_2 = rho(E_hat(theta)) * ||(1, lambda, ..)||_2."""
    if inp.is_unit_pair:
        return 0.0
    return lfa_spectral_radius(inp, theta) * _f_relax_norm(inp.lam, inp.m)


def _theta_dagger(inp: TemporalSymbolInput) -> float:
    # worst frequency: arg(mu)/m with the arg branch [-pi, pi), so the
    # result lands in the low band; arg(0) is defined as 0
    a = float(np.angle(inp.mu))
    if a == np.pi:
        a = -np.pi
    return a / inp.m


def lfa_rho_sup(inp: TemporalSymbolInput) -> float:
    """sup over theta of rho(E_hat): |lambda|^{m nu} |lambda^m - mu|/(1 - |mu|)."""
    if inp.is_unit_pair:
        return 0.0
    return (abs(inp.lam) ** (inp.m * inp.nu)
            * abs(inp.lam ** inp.m - inp.mu) / (1.0 - abs(inp.mu)))


def lfa_norm_sup(inp: TemporalSymbolInput) -> tuple[float, float]:
    """sup over theta of the norm, and the frequency theta_dagger where the
    sup is attained. theta_dagger = arg(mu)/m; for mu = 0 the norm is
    theta-independent and theta_dagger is reported as 0."""
    if inp.is_unit_pair:
        return 0.0, 0.0
    return lfa_rho_sup(inp) * _f_relax_norm(inp.lam, inp.m), _theta_dagger(inp)


def _is_unit_pair_values(lam: complex, mu: complex) -> bool:
    return abs(lam - 1.0) <= UNIT_TOL and abs(mu - 1.0) <= UNIT_TOL


def spacetime_rho(lambda_fn, mu_fn, omega: float, theta: float, m: int, nu: int,
                  cfl: float | None = None) -> SpaceTimeCell:
    """Space-time LFA cell at (omega, theta).

    lambda_fn/mu_fn evaluate the fine/coarse stepper symbols at a spatial
    frequency. The coarse-grid correction ratio is

        cgc_ratio = |A1_tilde - A1_tilde_ideal| / |A1_tilde|

    with A1_tilde = 1 - mu(omega) e^{-i m theta} and the ideal variant using
    lambda(omega)^m; rho = |lambda|^{m nu} * cgc_ratio. A vanishing A1_tilde
    is reported as +inf with the singular flag rather than an error. The
    characteristic flag tests |theta + omega*cfl| <= max(1e-8, 0.1|omega|)
    and needs the CFL number; without it the flag is False.
    """
    lam = complex(lambda_fn(omega))
    mu = complex(mu_fn(omega))
    is_char = False
    if cfl is not None:
        is_char = abs(theta + omega * cfl) <= max(1e-8, 0.1 * abs(omega))
    if _is_unit_pair_values(lam, mu):
        return SpaceTimeCell(omega=omega, theta=theta, lam=lam, mu=mu,
                             rho=0.0, norm=0.0, cgc_ratio=0.0,
                             is_characteristic=is_char)
    ph = np.exp(-1j * m * theta)
    a1 = 1.0 - mu * ph
    a1_ideal = 1.0 - lam ** m * ph
    num = abs(a1 - a1_ideal)
    den = abs(a1)
    if den < 1e-300:
        return SpaceTimeCell(omega=omega, theta=theta, lam=lam, mu=mu,
                             rho=math.inf, norm=math.inf, cgc_ratio=math.inf,
                             is_characteristic=is_char, singular=True)
    ratio = num / den
    damp = abs(lam) ** (m * nu)
    return SpaceTimeCell(omega=omega, theta=theta, lam=lam, mu=mu,
                         rho=damp * ratio,
                         norm=damp * ratio * _f_relax_norm(lam, m),
                         cgc_ratio=ratio, is_characteristic=is_char)


def cgc_order_probe(fine_scheme, coarse_op, m: int, characteristic: bool,
                    omega_list, theta_offset: float | None = None) -> float:
    """Fitted log-log slope of the coarse-grid correction ratio vs omega.

    Along the characteristic the temporal frequency is theta = -omega * c
    (c the fine CFL number); off it a fixed omega-independent offset is used
    (default pi/(2m)). Symbols are evaluated in extended precision because
    the modified coarse operator's numerator decays like omega^{p+2} and
    falls below double-precision cancellation noise inside the probe range.
    """
    omegas = np.asarray(omega_list, dtype=np.longdouble)
    if omegas.size < 3:
        raise ValueError("need at least 3 frequencies for a slope fit")
    c = fine_scheme.cfl.c
    if characteristic:
        thetas = -c * omegas
    else:
        off = np.longdouble(np.pi / (2 * m) if theta_offset is None else theta_offset)
        thetas = np.full(omegas.shape, off, dtype=np.longdouble)
    lam = fine_scheme.symbol(omegas)
    mu = coarse_op.symbol(omegas)
    ph = np.exp(-1j * m * thetas)
    a1 = 1.0 - mu * ph
    a1_ideal = 1.0 - lam ** m * ph
    ratio = (np.abs(a1 - a1_ideal) / np.abs(a1)).astype(np.float64)
    if np.any(ratio <= 0.0) or np.any(~np.isfinite(ratio)):
        raise ValueError("degenerate coarse-grid correction ratios; cannot fit")
    return float(np.polyfit(np.log(omegas.astype(np.float64)), np.log(ratio), 1)[0])


def rho_check_lower_bound(p: int, m: int, eps: float) -> float:
    """Semi-Lagrangian lower bound rho_check = m f_{p+1}(eps)/f_{p+1}(frac(m eps)) - 1.

    Defined on eps in (0, 1) with frac(m*eps) != 0; outside that set the
    characteristics of the coarse problem intersect the mesh and the bound
    does not apply, so such eps are rejected.
    """
    from .advection import coarse_fraction, f_poly

    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    em = coarse_fraction(eps, m)
    if em == 0.0:
        raise ValueError(
            f"eps={eps} has frac(m*eps) = 0: the coarse characteristics "
            "intersect the mesh and the lower bound is not defined there")
    return float(m * f_poly(p, eps) / f_poly(p, em) - 1.0)


def discrete_theta_grid(n_t: int, m: int) -> np.ndarray:
    """The n_t/m discrete low-band frequencies of a periodic time grid.

    These are the fine temporal mesh frequencies 2 pi k / n_t that alias
    into [-pi/m, pi/m); together with their m harmonics they enumerate all
    n_t Fourier modes, which is what makes the periodic-boundary analysis
    exact on finite grids.
    """
    if n_t % m:
        raise ValueError("n_t must be divisible by m")
    th = 2.0 * np.pi * np.arange(n_t // m) / n_t
    th = np.where(th >= np.pi / m, th - 2.0 * np.pi / m, th)
    return np.sort(th)
