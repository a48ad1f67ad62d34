"""Two-level MGRIT solver for linear one-step integration, with Parareal as
the nu = 0 special case.

The fine grid holds n_t time points; every m-th one is a C-point (t_0
included), so the coarse grid has K = n_t / m points. A cycle performs
F(CF)^nu pre-relaxation, injects the residual to the C-points, solves the
coarse all-at-once system exactly by sequential time-stepping, corrects the
C-points, and finishes with one F-relaxation.

Steppers are circulant spatial operators (anything exposing size, apply on
the last axis, and symbol_grid); a scalar test problem is the size-1
circulant {0: lambda}. States are (n_t, n_x) complex arrays; the residual
norm is the global l2 norm over all space-time unknowns.

Boundary modes: "initial-value" fixes u_0 = b_0, "time-periodic" couples
u_0 - Phi u_{n_t-1} = b_0 (block-circulant all-at-once matrix).

assemble_dense_propagator builds the error-iteration matrix E per spatial
Fourier mode from the component formulas, which is the brute-force oracle
the analysis results are checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fourier import CirculantOperator

__all__ = [
    "MgritConfig",
    "SolverState",
    "MgritRunResult",
    "DensePropagator",
    "DivergenceError",
    "InsufficientIterationsError",
    "scalar_stepper",
    "ideal_coarse",
    "f_relax",
    "c_relax",
    "residual",
    "coarse_correction",
    "two_level_cycle",
    "run_mgrit",
    "random_initial_state",
    "convergence_factor_from_result",
    "measured_convergence_factor",
    "assemble_dense_propagator",
]

DENSE_SIZE_CAP = 2 ** 14
DIVERGENCE_FACTOR = 1e12


class DivergenceError(RuntimeError):
    """Raised when the residual exceeds 1e12 times its initial value."""


class InsufficientIterationsError(RuntimeError):
    """Raised when too few iterations completed to measure a factor."""


@dataclass(frozen=True)
class MgritConfig:
    m: int
    nu: int
    n_t: int
    boundary: str = "initial-value"
    max_iters: int = 100
    residual_tol: float = 1e-10

    BOUNDARIES = ("initial-value", "time-periodic")

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("coarsening factor m must be >= 2")
        if self.nu < 0:
            raise ValueError("nu must be >= 0")
        if self.n_t < self.m or self.n_t % self.m:
            raise ValueError(f"n_t={self.n_t} must be a positive multiple of m={self.m}")
        if self.boundary not in self.BOUNDARIES:
            raise ValueError(f"boundary must be one of {self.BOUNDARIES}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")

    @property
    def n_coarse(self) -> int:
        return self.n_t // self.m

    @property
    def periodic(self) -> bool:
        return self.boundary == "time-periodic"

    @property
    def exactness_iterations(self) -> int:
        """Iteration count after which the error is exactly zero in
        initial-value mode: ceil(n_t / (m (nu + 1)))."""
        return math.ceil(self.n_coarse / (self.nu + 1))


@dataclass
class SolverState:
    """Space-time iterate u and right-hand side b, both (n_t, n_x) complex.

    initial_residual_norm is filled by the first cycle and anchors the
    divergence guard.
    """

    u: np.ndarray
    b: np.ndarray
    initial_residual_norm: float | None = None

    @classmethod
    def from_arrays(cls, u, b, config: MgritConfig) -> "SolverState":
        u = np.array(u, dtype=complex)
        b = np.array(b, dtype=complex)
        if u.ndim == 1:
            u = u[:, None]
        if b.ndim == 1:
            b = b[:, None]
        if u.shape != b.shape or u.shape[0] != config.n_t:
            raise ValueError(f"inconsistent shapes u{u.shape} b{b.shape} "
                             f"for n_t={config.n_t}")
        return cls(u=u, b=b)

    @property
    def n_x(self) -> int:
        return self.u.shape[1]


@dataclass
class MgritRunResult:
    state: SolverState
    residual_history: list[float]
    converged: bool
    iterations: int
    diverged: bool = False


def scalar_stepper(value: complex) -> CirculantOperator:
    """Size-1 circulant: the scalar model problem u_{n+1} = value * u_n."""
    return CirculantOperator({0: value}, 1)


class _PowerOperator:
    """Stepper applying another stepper's m-th power (the ideal coarse op)."""

    def __init__(self, base, m: int):
        self.base = base
        self.m = m
        self.size = base.size
        self._grid = base.symbol_grid() ** m

    def symbol_grid(self) -> np.ndarray:
        return self._grid

    def symbol(self, omega):
        return self.base.symbol(omega) ** self.m

    def apply(self, u: np.ndarray) -> np.ndarray:
        for _ in range(self.m):
            u = self.base.apply(u)
        return u


def ideal_coarse(phi, m: int):
    """The ideal coarse operator Phi^m; a cycle with it converges at once."""
    return _PowerOperator(phi, m)


def _check_shapes(state: SolverState, phi, config: MgritConfig):
    if state.u.shape[0] != config.n_t:
        raise ValueError(f"state has {state.u.shape[0]} time points, config says {config.n_t}")
    if state.u.shape != state.b.shape:
        raise ValueError("u and b shapes differ")
    if phi.size != state.n_x:
        raise ValueError(f"stepper size {phi.size} != state n_x {state.n_x}")


def f_relax(state: SolverState, phi, config: MgritConfig) -> SolverState:
    """Time-step from each C-point across its m-1 F-points.

    All CF-intervals are independent, so the sweep is one batched stepper
    application per slot.
    """
    _check_shapes(state, phi, config)
    U = state.u.reshape(config.n_coarse, config.m, state.n_x)
    B = state.b.reshape(config.n_coarse, config.m, state.n_x)
    for j in range(1, config.m):
        U[:, j] = phi.apply(U[:, j - 1]) + B[:, j]
    return state


def c_relax(state: SolverState, phi, config: MgritConfig) -> SolverState:
    """Update every C-point from the F-point before it; F-points unchanged.

    t_0 is set by the initial condition row (initial-value) or from the last
    fine point (time-periodic).
    """
    _check_shapes(state, phi, config)
    U = state.u.reshape(config.n_coarse, config.m, state.n_x)
    B = state.b.reshape(config.n_coarse, config.m, state.n_x)
    last = U[:, config.m - 1]
    wrap = phi.apply(last[-1]) + B[0, 0] if config.periodic else B[0, 0].copy()
    U[1:, 0] = phi.apply(last[:-1]) + B[1:, 0]
    U[0, 0] = wrap
    return state


def residual(state: SolverState, phi, config: MgritConfig) -> np.ndarray:
    """b - A u for the all-at-once system, shape (n_t, n_x)."""
    _check_shapes(state, phi, config)
    u, b = state.u, state.b
    r = np.empty_like(u)
    r[1:] = b[1:] - (u[1:] - phi.apply(u[:-1]))
    if config.periodic:
        r[0] = b[0] - (u[0] - phi.apply(u[-1]))
    else:
        r[0] = b[0] - u[0]
    return r


def _norm(r: np.ndarray) -> float:
    return float(np.linalg.norm(r))


def _coarse_solve(rc: np.ndarray, psi, config: MgritConfig) -> np.ndarray:
    """Exact sequential solve of the coarse all-at-once system A1 e = rc.

    Initial-value mode is plain forward substitution. Time-periodic mode
    works per spatial Fourier mode: with psi's eigenvalue s, the cyclic
    bidiagonal system has e_0 = (sum_j s^j rc_{-j mod K}) / (1 - s^K),
    followed by the same forward substitution. Modes where 1 - s^K is
    numerically zero cannot be determined by the residual; they use the
    documented e_0 = 0 convention.
    """
    K = config.n_coarse
    e = np.zeros_like(rc)
    if not config.periodic:
        e[0] = rc[0]
        for k in range(1, K):
            e[k] = psi.apply(e[k - 1]) + rc[k]
        return e
    s = psi.symbol_grid()
    rch = np.fft.fft(rc, axis=-1)
    acc = rch[0].copy()
    pw = np.ones_like(s)
    for j in range(1, K):
        pw = pw * s
        acc += pw * rch[K - j]
    denom = 1.0 - s ** K
    e0 = np.where(np.abs(denom) < 1e-12, 0.0, acc / np.where(denom == 0, 1.0, denom))
    eh = np.empty_like(rch)
    eh[0] = e0
    for k in range(1, K):
        eh[k] = s * eh[k - 1] + rch[k]
    return np.fft.ifft(eh, axis=-1)


def coarse_correction(state: SolverState, phi, psi, config: MgritConfig) -> float:
    """Inject the residual to C-points, solve coarsely, correct C-points.

    Returns the pre-correction global residual norm (the quantity the
    divergence guard watches).
    """
    _check_shapes(state, phi, config)
    if psi.size != state.n_x:
        raise ValueError(f"coarse stepper size {psi.size} != state n_x {state.n_x}")
    r = residual(state, phi, config)
    rn = _norm(r)
    rc = r.reshape(config.n_coarse, config.m, state.n_x)[:, 0, :]
    e = _coarse_solve(rc, psi, config)
    U = state.u.reshape(config.n_coarse, config.m, state.n_x)
    U[:, 0] += e
    return rn


def two_level_cycle(state: SolverState, phi, psi, config: MgritConfig) -> SolverState:
    """One two-level iteration: F(CF)^nu, coarse-grid correction, F."""
    f_relax(state, phi, config)
    for _ in range(config.nu):
        c_relax(state, phi, config)
        f_relax(state, phi, config)
    rn = coarse_correction(state, phi, psi, config)
    if state.initial_residual_norm is None:
        state.initial_residual_norm = rn
    elif rn > DIVERGENCE_FACTOR * max(state.initial_residual_norm, 1e-300):
        raise DivergenceError(
            f"residual {rn:.3e} exceeds {DIVERGENCE_FACTOR:.0e} x initial "
            f"{state.initial_residual_norm:.3e}; aborting divergent run")
    f_relax(state, phi, config)
    return state


def run_mgrit(phi, psi, config: MgritConfig, state: SolverState) -> MgritRunResult:
    """Cycle until the residual drops below residual_tol relative to the
    initial residual, divergence is detected, or max_iters is reached.

    residual_history[k] is the global residual norm after k cycles
    (entry 0 is the initial residual).
    """
    r0 = _norm(residual(state, phi, config))
    history = [r0]
    state.initial_residual_norm = r0
    converged = False
    diverged = False
    for _ in range(config.max_iters):
        try:
            two_level_cycle(state, phi, psi, config)
        except DivergenceError:
            diverged = True
            break
        history.append(_norm(residual(state, phi, config)))
        if history[-1] <= config.residual_tol * max(r0, 1e-300):
            converged = True
            break
    return MgritRunResult(state=state, residual_history=history,
                          converged=converged, iterations=len(history) - 1,
                          diverged=diverged)


def random_initial_state(config: MgritConfig, n_x: int, seed) -> SolverState:
    """Zero-source state with iterate entries uniform on [0, 1).

    The generator is Philox (64-bit, splittable); callers record the seed.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    u = rng.random((config.n_t, n_x))
    return SolverState(u=u.astype(complex), b=np.zeros((config.n_t, n_x), dtype=complex))


def convergence_factor_from_result(result: MgritRunResult, config: MgritConfig) -> float:
    """Geometric mean of the residual ratios over the last 5 completed
    iterations that precede both the stopping iteration and the exactness
    iteration count (after which residuals are roundoff noise).

    Raises InsufficientIterationsError when fewer than 5 such ratios exist,
    which includes the ideal-coarse-operator case of immediate convergence.
    """
    history = result.residual_history
    n_done = len(history) - 1
    stop_iter = result.iterations if result.converged else None
    k_exact = config.exactness_iterations
    usable = [k for k in range(1, n_done + 1)
              if (stop_iter is None or k < stop_iter) and k < k_exact]
    if len(usable) < 5:
        raise InsufficientIterationsError(
            f"insufficient iterations to measure: {len(usable)} usable "
            f"ratios after {n_done} completed iterations")
    ratios = [history[k] / history[k - 1] for k in usable[-5:]]
    return float(np.exp(np.mean(np.log(ratios))))


def measured_convergence_factor(phi, psi, config: MgritConfig, seed) -> float:
    """Measured convergence factor of the (phi, psi) pair.

    Runs from a uniformly random iterate with zero source and applies the
    convergence_factor_from_result window. A divergent run still reports a
    factor when enough pre-abort ratios accumulated, and that factor
    exceeds 1.
    """
    state = random_initial_state(config, phi.size, seed)
    result = run_mgrit(phi, psi, config, state)
    return convergence_factor_from_result(result, config)


@dataclass
class DensePropagator:
    """Explicit error-iteration matrix, stored per spatial Fourier mode.

    blocks[i] is the n_t x n_t matrix acting on spatial mode i in time.
    The physical-space matrix is unitarily similar to their block diagonal,
    so norms and spectra are the maxima over modes.
    """

    blocks: np.ndarray
    config: MgritConfig
    n_x: int

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        squeeze = v.ndim == 1
        if squeeze:
            v = v[:, None]
        vh = np.fft.fft(v, axis=1)
        out = np.einsum("its,si->ti", self.blocks, vh)
        out = np.fft.ifft(out, axis=1)
        return out[:, 0] if squeeze else out

    def matrix(self) -> np.ndarray:
        """Assemble the full physical-space matrix (small problems only)."""
        n_t, n_x = self.config.n_t, self.n_x
        F = np.exp(-2j * np.pi * np.outer(np.arange(n_x), np.arange(n_x)) / n_x)
        Finv = F.conj().T / n_x
        M = np.einsum("xi,its,iy->txsy", Finv, self.blocks, F)
        return M.reshape(n_t * n_x, n_t * n_x)

    def norm(self) -> float:
        return max(float(np.linalg.svd(b, compute_uv=False)[0]) for b in self.blocks)

    def spectral_radius(self) -> float:
        return max(float(np.max(np.abs(np.linalg.eigvals(b)))) for b in self.blocks)


def _shift(n: int, periodic: bool) -> np.ndarray:
    L = np.eye(n, k=-1, dtype=complex)
    if periodic:
        L[0, n - 1] = 1.0
    return L


def _dense_block(lam: complex, mu: complex, config: MgritConfig) -> np.ndarray:
    """E = S_F K (S_CF)^nu S_F for one spatial mode, from the component
    formulas: A0 = I - lam*L, A1 = I - mu*L_c, S_F = I_K (x) [v e_1^T],
    S_CF = L_c (x) [lam v e_m^T], v = (1, lam, .., lam^{m-1})^T, injection
    P = I_K (x) e_1, K = I - P A1^{-1} P^T A0."""
    n_t, m, K = config.n_t, config.m, config.n_coarse
    per = config.periodic
    Lc = _shift(K, per)
    A0 = np.eye(n_t, dtype=complex) - lam * _shift(n_t, per)
    A1 = np.eye(K, dtype=complex) - mu * Lc
    v = lam ** np.arange(m, dtype=complex)
    MF = np.zeros((m, m), dtype=complex)
    MF[:, 0] = v
    MCF = np.zeros((m, m), dtype=complex)
    MCF[:, m - 1] = lam * v
    SF = np.kron(np.eye(K), MF)
    SCF = np.kron(Lc, MCF)
    e1 = np.zeros((m, 1))
    e1[0, 0] = 1.0
    P = np.kron(np.eye(K), e1)
    Kop = np.eye(n_t, dtype=complex) - P @ np.linalg.solve(A1, P.T @ A0)
    return SF @ Kop @ np.linalg.matrix_power(SCF, config.nu) @ SF


def assemble_dense_propagator(phi, psi, config: MgritConfig) -> DensePropagator:
    """Brute-force error propagator for the (phi, psi, config) triple.

    Capped at n_x * n_t <= 2^14. In time-periodic mode a spatial mode with
    the exact unit pair lambda = mu = 1 makes the coarse matrix singular;
    such modes contribute no error (the solver treats that direction
    exactly), so their block is set to zero. Any other unit-modulus mode
    that makes A0 or A1 singular is rejected.
    """
    n_x = phi.size
    if psi.size != n_x:
        raise ValueError("fine and coarse steppers have different sizes")
    if n_x * config.n_t > DENSE_SIZE_CAP:
        raise ValueError(
            f"n_x*n_t = {n_x * config.n_t} exceeds the dense oracle cap {DENSE_SIZE_CAP}")
    lam_grid = np.asarray(phi.symbol_grid(), dtype=complex)
    mu_grid = np.asarray(psi.symbol_grid(), dtype=complex)
    blocks = np.empty((n_x, config.n_t, config.n_t), dtype=complex)
    for i, (lam, mu) in enumerate(zip(lam_grid, mu_grid)):
        unit_pair = abs(lam - 1.0) <= 1e-12 and abs(mu - 1.0) <= 1e-12
        if config.periodic:
            if unit_pair:
                blocks[i] = 0.0
                continue
            if abs(1.0 - lam ** config.n_t) < 1e-12 or abs(1.0 - mu ** config.n_coarse) < 1e-12:
                raise ValueError(
                    f"spatial mode {i} (lambda={lam:.4f}, mu={mu:.4f}) makes the "
                    "periodic all-at-once matrix singular and is not the unit pair")
        blocks[i] = _dense_block(lam, mu, config)
    return DensePropagator(blocks=blocks, config=config, n_x=n_x)
