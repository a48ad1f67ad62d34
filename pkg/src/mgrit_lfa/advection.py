"""Semi-Lagrangian discretizations of 1D constant-coefficient periodic
advection, u_t + alpha u_x = 0 on (-1, 1).

A semi-Lagrangian step of order p traces each mesh point back along the
characteristic by alpha*dt = c*h (c the CFL number) and interpolates the
previous solution at the departure point with a degree-p Lagrange polynomial.
Writing c = floor(c) + eps, the step is an integer mesh shift composed with an
interpolation stencil that depends only on eps, so the stepper is circulant
and its Fourier symbol is available in closed form.

The module also provides the pieces the convergence analysis is built from:
the truncation-error polynomial f_{p+1}, centered stencils for the (p+1)-st
derivative, small-frequency eigenvalue estimates, and the corrected coarse
operator (I - gamma*D_{p+1})^{-1} S_p applied with the coarse step m*dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fourier import CirculantOperator

__all__ = [
    "AdvectionProblem",
    "CflDecomposition",
    "SemiLagrangianScheme",
    "DerivativeOperator",
    "ModifiedCoarseOperator",
    "f_poly",
    "decompose_cfl",
    "coarse_fraction",
    "build_semilagrangian",
    "rediscretize",
    "sl_symbol_exact",
    "sl_symbol_estimate",
    "build_derivative_operator",
    "build_modified_coarse",
]

_SNAP = 1e-12


@dataclass(frozen=True)
class AdvectionProblem:
    """Constant-wave-speed advection on the periodic domain (-1, 1).

    alpha  wave speed, > 0
    n_x    number of spatial mesh points; mesh width h = 2 / n_x
    dt     fine time step
    n_t    number of fine time points (optional until a solver needs it)
    """

    alpha: float
    n_x: int
    dt: float
    n_t: int | None = None

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("wave speed alpha must be positive")
        if self.n_x < 1:
            raise ValueError("n_x must be positive")
        if self.dt <= 0:
            raise ValueError("dt must be positive")

    @property
    def h(self) -> float:
        return 2.0 / self.n_x

    @property
    def cfl(self) -> float:
        return self.alpha * self.dt / self.h

    @classmethod
    def from_cfl(cls, c: float, n_x: int, n_t: int | None = None,
                 alpha: float = 1.0) -> "AdvectionProblem":
        """Convenience constructor fixing dt from a target CFL number."""
        h = 2.0 / n_x
        return cls(alpha=alpha, n_x=n_x, dt=c * h / alpha, n_t=n_t)


@dataclass(frozen=True)
class CflDecomposition:
    """CFL number split as c = integer_part + eps with eps in [0, 1)."""

    c: float
    integer_part: int
    eps: float


def decompose_cfl(c: float) -> CflDecomposition:
    """Split c into integer and fractional parts with a 1e-12 snap guard.

    Values of eps within 1e-12 of 0 or 1 are snapped to exactly 0 (adjusting
    the integer part), so 0.9999999999999 artifacts do not leak into the
    interpolation weights.
    """
    if c <= 0:
        raise ValueError("CFL number must be positive")
    k = math.floor(c)
    eps = c - k
    if eps > 1.0 - _SNAP:
        k += 1
        eps = 0.0
    elif eps < _SNAP:
        eps = 0.0
    return CflDecomposition(c=c, integer_part=k, eps=eps)


def coarse_fraction(eps: float, m: int) -> float:
    """Fractional part of the coarse CFL number: frac(m * eps)."""
    em = m * eps - math.floor(m * eps)
    if em > 1.0 - _SNAP or em < _SNAP:
        em = 0.0
    return em


def f_poly(p: int, z):
    """Truncation-error polynomial of the order-p interpolation:

        f_{p+1}(z) = (1 / (p+1)!) * prod_{q = -(p+1)/2}^{(p-1)/2} (q + z).

    Vanishes at every integer node (z = 0 in particular) and satisfies
    |f(z)| = |f(1 - z)|. Accepts scalar or array z of any float dtype and
    preserves it, so callers can evaluate in extended precision.
    """
    _check_odd(p)
    z = np.asarray(z)
    if not np.issubdtype(z.dtype, np.floating):
        z = z.astype(np.float64)
    acc = np.ones(z.shape, dtype=z.dtype)
    for q in range(-(p + 1) // 2, (p - 1) // 2 + 1):
        acc = acc * (q + z)
    acc = acc / math.factorial(p + 1)
    return acc if acc.shape else acc[()]


def _check_odd(p: int):
    if p % 2 == 0 or p < 1:
        raise ValueError(f"interpolation order p must be odd and >= 1, got {p}")


def _interp_nodes(p: int) -> np.ndarray:
    # nodes relative to the mesh point just east of the departure point
    return np.arange(-(p + 1) // 2, (p - 1) // 2 + 1)


def _lagrange_weights(p: int, eps, dtype=np.float64) -> np.ndarray:
    """Degree-p Lagrange basis values at the departure offset -eps.

    Node r's weight is prod_{q != r} (-eps - q) / (r - q) over the centered
    node set; the departure point sits in the central interval [-1, 0].
    """
    nodes = _interp_nodes(p)
    scalar = np.dtype(dtype).type
    eps = scalar(eps)
    w = np.empty(nodes.size, dtype=dtype)
    for i, r in enumerate(nodes):
        num = den = scalar(1.0)
        for q in nodes:
            if q != r:
                num *= (-eps - q)
                den *= scalar(int(r - q))
        w[i] = num / den
    return w


class SemiLagrangianScheme:
    """Order-p semi-Lagrangian stepper for an AdvectionProblem.

    stepper is the circulant realization on the problem's mesh; symbol()
    evaluates the continuous Fourier symbol at arbitrary frequencies.
    A scheme built with an integer CFL number is a pure mesh shift; that
    degenerate mode is flagged so analysis code can reject it.
    """

    def __init__(self, p: int, problem: AdvectionProblem,
                 cfl: CflDecomposition, stepper: CirculantOperator):
        self.p = p
        self.problem = problem
        self.cfl = cfl
        self.stepper = stepper
        self.degenerate = cfl.eps == 0.0

    @property
    def size(self) -> int:
        return self.stepper.size

    def apply(self, u: np.ndarray) -> np.ndarray:
        return self.stepper.apply(u)

    def symbol_grid(self) -> np.ndarray:
        return self.stepper.symbol_grid()

    def symbol(self, omega):
        """Exact symbol exp(-i omega floor(c)) * sum_r w_r exp(i omega r).

        Dtype-preserving: longdouble frequencies are evaluated in extended
        precision.
        """
        omega = np.asarray(omega)
        if not np.issubdtype(omega.dtype, np.floating):
            omega = omega.astype(np.float64)
        rdtype = omega.dtype.type
        w = _lagrange_weights(self.p, rdtype(self.cfl.eps), dtype=omega.dtype)
        acc = np.zeros(omega.shape, dtype=np.result_type(omega.dtype, np.complex64))
        for r, wr in zip(_interp_nodes(self.p), w):
            acc = acc + wr * np.exp(1j * omega * rdtype(int(r)))
        acc = acc * np.exp(-1j * omega * rdtype(self.cfl.integer_part))
        return acc if acc.shape else acc[()]

    def __repr__(self) -> str:
        return (f"SemiLagrangianScheme(p={self.p}, c={self.cfl.c}, "
                f"n_x={self.problem.n_x})")


def build_semilagrangian(p: int, problem: AdvectionProblem,
                         allow_integer_cfl: bool = False) -> SemiLagrangianScheme:
    """Build the order-p semi-Lagrangian stepper for the problem's CFL number.

    The stencil combines the integer mesh shift floor(c) with Lagrange
    interpolation at offset -eps over the centered p+1 node set, so node r
    contributes weight w_r at periodic offset floor(c) - r.

    Integer CFL numbers make the step a pure shift (all |symbol| = 1); that
    is only useful for solver exactness experiments and must be requested
    explicitly with allow_integer_cfl.
    """
    _check_odd(p)
    width = p + 1
    if problem.n_x < width:
        raise ValueError(f"n_x={problem.n_x} is smaller than the stencil width {width}")
    cfl = decompose_cfl(problem.cfl)
    if cfl.eps == 0.0 and not allow_integer_cfl:
        raise ValueError(
            f"CFL number {cfl.c} is an integer; the stepper degenerates to a "
            "pure shift (pass allow_integer_cfl=True if that is intended)")
    if cfl.eps == 0.0:
        stencil = {cfl.integer_part: 1.0 + 0.0j}
    else:
        w = _lagrange_weights(p, cfl.eps)
        stencil = {int(cfl.integer_part - r): complex(wr)
                   for r, wr in zip(_interp_nodes(p), w)}
    return SemiLagrangianScheme(p, problem, cfl, CirculantOperator(stencil, problem.n_x))


def rediscretize(scheme: SemiLagrangianScheme, m: int) -> SemiLagrangianScheme:
    """Same discretization with the time step scaled by m (coarse stepper)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    pr = scheme.problem
    coarse_problem = AdvectionProblem(
        alpha=pr.alpha, n_x=pr.n_x, dt=m * pr.dt,
        n_t=None if pr.n_t is None else pr.n_t // m)
    return build_semilagrangian(scheme.p, coarse_problem, allow_integer_cfl=True)


def sl_symbol_exact(scheme: SemiLagrangianScheme, omega):
    """Continuous-frequency eigenvalue of the stepper at omega."""
    if np.any(~np.isfinite(np.asarray(omega, dtype=np.float64))):
        raise ValueError("omega must be finite")
    return scheme.symbol(omega)


def sl_symbol_estimate(p: int, eps: float, omega, m_power: int = 1):
    """Small-frequency eigenvalue estimate for m_power fine steps:

        exp(-i omega eps m_power) * (1 - m_power * f_{p+1}(eps) * (i omega)^{p+1})

    keeping only the leading term of the derivative symbol. m_power = 1
    estimates the fine stepper, m_power = m the ideal coarse operator
    (fine stepper to the m-th power). Valid for omega -> 0; the dropped
    remainder is O(omega^{p+2}). Dtype-preserving like symbol().
    """
    _check_odd(p)
    if m_power < 1:
        raise ValueError("m_power must be >= 1")
    omega = np.asarray(omega)
    if not np.issubdtype(omega.dtype, np.floating):
        omega = omega.astype(np.float64)
    rdtype = omega.dtype.type
    f = f_poly(p, rdtype(eps))
    lead = (1j * omega) ** (p + 1)
    out = np.exp(-1j * omega * rdtype(eps) * m_power) * (1 - m_power * f * lead)
    return out if out.shape else out[()]


@dataclass(frozen=True)
class DerivativeOperator:
    """Centered stencil approximating the (p+1)-st derivative of periodic
    grid functions, scaled by h^{p+1} (pure stencil, no mesh factors)."""

    derivative_order: int
    approximation_order: int
    stencil: CirculantOperator

    def symbol(self, omega):
        return self.stencil.symbol(omega)

    def circulant(self, size: int) -> CirculantOperator:
        return CirculantOperator(self.stencil.stencil, size)


def build_derivative_operator(p: int, size: int | None = None) -> DerivativeOperator:
    """Second-order centered stencil for the (p+1)-st derivative.

    For even derivative order 2r the minimal symmetric stencil has
    coefficient (-1)^(r-o) * binom(2r, r-o) at offset o in [-r, r]:
    (1, -2, 1) for p = 1 and (1, -4, 6, -4, 1) for p = 3. The approximation
    order is s = 2 for every p. size defaults to the stencil width; pass the
    mesh size to get an applicable operator.
    """
    _check_odd(p)
    r = (p + 1) // 2
    stencil = {o: float((-1) ** (r - o)) * math.comb(2 * r, r - o)
               for o in range(-r, r + 1)}
    n = size if size is not None else 2 * r + 1
    return DerivativeOperator(
        derivative_order=p + 1, approximation_order=2,
        stencil=CirculantOperator(stencil, n))


class ModifiedCoarseOperator:
    """Corrected coarse stepper (I - gamma * D_{p+1})^{-1} S_p^{(m dt)}.

    gamma = f_{p+1}(eps_coarse) - m * f_{p+1}(eps_fine) matches the coarse
    operator's leading truncation error to that of m fine steps. Application
    runs the rediscretized coarse step and then solves the circulant system
    (I - gamma D) z = y by Fourier division; the symbol is the ratio
    s_p^{(m dt)}(omega) / (1 - gamma * d_{p+1}(omega)).
    """

    def __init__(self, coarse: SemiLagrangianScheme, gamma: float,
                 derivative: DerivativeOperator):
        self.coarse = coarse
        self.gamma = gamma
        self.derivative = derivative
        corr = 1.0 - gamma * derivative.circulant(coarse.size).symbol_grid()
        if np.min(np.abs(corr)) < 1e-14:
            raise ValueError(
                "modified coarse operator is singular: 1 - gamma*d(omega) "
                "vanishes at a grid frequency")
        self._corr_grid = corr

    @property
    def size(self) -> int:
        return self.coarse.size

    def symbol(self, omega):
        return self.coarse.symbol(omega) / (1 - self.gamma * self.derivative.symbol(omega))

    def symbol_grid(self) -> np.ndarray:
        return self.coarse.symbol_grid() / self._corr_grid

    def apply(self, u: np.ndarray) -> np.ndarray:
        y = self.coarse.apply(u)
        out = np.fft.ifft(np.fft.fft(y, axis=-1) / self._corr_grid, axis=-1)
        if not np.iscomplexobj(u):
            return out.real
        return out

    def __repr__(self) -> str:
        return (f"ModifiedCoarseOperator(p={self.coarse.p}, "
                f"coarse_c={self.coarse.cfl.c}, gamma={self.gamma})")


def build_modified_coarse(scheme_fine: SemiLagrangianScheme, m: int) -> ModifiedCoarseOperator:
    """Build the corrected coarse operator for coarsening factor m."""
    if scheme_fine.degenerate:
        raise ValueError("modified coarse operator needs a non-integer fine CFL number")
    if m < 1:
        raise ValueError("m must be >= 1")
    eps = scheme_fine.cfl.eps
    eps_m = coarse_fraction(eps, m)
    gamma = float(f_poly(scheme_fine.p, eps_m) - m * f_poly(scheme_fine.p, eps))
    coarse = rediscretize(scheme_fine, m)
    return ModifiedCoarseOperator(coarse, gamma,
                                  build_derivative_operator(scheme_fine.p))
