"""Configuration-driven experiment runners behind the command-line driver.

Five experiment kinds are provided:

  lfa-sweep          space-time LFA grids and cross-sections for the
                     coarse-symbol deviation, the coarse symbol itself, and
                     the predicted convergence factor (four CSV files)
  lower-bound-curve  worst-case LFA factor and the lower bound rho_check as
                     functions of the fractional CFL number (one CSV)
  measured-vs-lfa    measured solver convergence factors next to the LFA
                     prediction on the default (p, m, CFL) matrix (one CSV)
  oracle-check       dense error-propagator cross-checks of the closed-form
                     analysis (JSON report)
  cgc-probe          fitted coarse-grid-correction order slopes (one CSV)

All runners are deterministic for a fixed config and seed; CSV files carry
the config echo in '#' comment lines, with the timestamp isolated on its own
comment line so outputs stay byte-identical up to that line. Floats are
printed with 17 significant digits so files round-trip losslessly.

Sweeps are computed in ω-chunks, optionally on a thread pool, and merged in
frequency order before anything is written.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import advection, engine, lfa
from .fourier import FrequencyGrid

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "parse_config_file",
    "write_csv",
    "run_fig3",
    "run_fig4",
    "run_measured_vs_lfa",
    "run_oracle_check",
    "run_cgc_probe",
    "run_experiment",
]

KINDS = ("lfa-sweep", "lower-bound-curve", "measured-vs-lfa",
         "oracle-check", "cgc-probe")
COARSE_KINDS = ("rediscretize", "ideal", "modified")

UNIT_TOL = 1e-12
EPS_SNAP = 1e-6
MEASURED_TARGETS = (0.2, 0.35, 0.55)
RUNNABLE_RHO = 0.95
DIVERGENT_MAX_ITERS = 30


class ConfigError(ValueError):
    """Invalid experiment configuration (maps to exit code 2)."""


@dataclass
class ExperimentConfig:
    kind: str = "lfa-sweep"
    p: int = 3
    m: int = 4
    nu: int = 1
    cfl: float = 0.8
    n_x: int = 128
    n_t: int = 4096
    omega_points: int = 1024
    theta_points: int = 256
    eps_points: int = 101
    coarse: str = "rediscretize"
    boundary: str = "initial-value"
    seed: int = 12345
    out_dir: str = "."
    threads: int = 1
    max_iters: int = 100
    p_list: str = "1,3"
    m_list: str = "2,4"

    def validate(self) -> "ExperimentConfig":
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}; "
                              f"expected one of {KINDS}")
        if self.p < 1 or self.p % 2 == 0:
            raise ConfigError(f"p={self.p} must be a positive odd integer")
        if self.m < 2:
            raise ConfigError(f"m={self.m} must be >= 2")
        if self.nu < 0:
            raise ConfigError(f"nu={self.nu} must be >= 0")
        if self.cfl <= 0:
            raise ConfigError(f"cfl={self.cfl} must be positive")
        for name in ("n_x", "n_t", "omega_points", "theta_points",
                     "eps_points", "threads", "max_iters"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.coarse not in COARSE_KINDS:
            raise ConfigError(f"coarse={self.coarse!r}; expected one of {COARSE_KINDS}")
        if self.boundary not in engine.MgritConfig.BOUNDARIES:
            raise ConfigError(f"boundary={self.boundary!r}; expected one of "
                              f"{engine.MgritConfig.BOUNDARIES}")
        if self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        for name in ("p_list", "m_list"):
            try:
                values = _int_list(getattr(self, name))
            except ValueError as exc:
                raise ConfigError(f"{name}: {exc}") from None
            if not values:
                raise ConfigError(f"{name} must not be empty")
        return self


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}


def parse_config_file(path: str) -> dict:
    """Read a flat key = value config file into a dict of typed values.

    Lines starting with '#' and blank lines are ignored. Keys must match
    ExperimentConfig field names.
    """
    overrides: dict = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        kind = _FIELD_TYPES[key]
        try:
            if kind == "int":
                overrides[key] = int(value)
            elif kind == "float":
                overrides[key] = float(value)
            else:
                overrides[key] = value
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: cannot parse {value!r} as {kind} "
                              f"for key {key!r}") from None
    return overrides


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_csv(path: str, header: list[str], rows, metadata: dict) -> str:
    """Write rows to path with a '#' metadata block before the header row.

    The generation timestamp sits alone on the first comment line; every
    other comment line echoes a config entry, so two runs with the same
    config and seed differ at most in that first line.
    """
    stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    lines = [f"# generated: {stamp}"]
    for key in sorted(metadata):
        lines.append(f"# {key}: {_fmt(metadata[key])}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    lines.append("")
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines))
    return path


def _metadata(config: ExperimentConfig, **extra) -> dict:
    meta = dataclasses.asdict(config)
    meta.update(extra)
    return meta


def _build_pair(config: ExperimentConfig):
    """Fine semi-Lagrangian scheme and the configured coarse operator."""
    problem = advection.AdvectionProblem.from_cfl(config.cfl, config.n_x,
                                                  n_t=config.n_t)
    scheme = advection.build_semilagrangian(config.p, problem)
    if config.coarse == "rediscretize":
        coarse = advection.rediscretize(scheme, config.m)
    elif config.coarse == "ideal":
        coarse = engine.ideal_coarse(scheme, config.m)
    else:
        coarse = advection.build_modified_coarse(scheme, config.m)
    return scheme, coarse


def _chunks(n: int, n_chunks: int) -> list[np.ndarray]:
    return [idx for idx in np.array_split(np.arange(n), max(1, n_chunks))
            if idx.size]


def _parallel(fn, chunks, threads: int) -> list:
    if threads <= 1 or len(chunks) <= 1:
        return [fn(chunk) for chunk in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, chunks))


def _rho_paired(lam, mu, theta, m: int, nu: int):
    """Space-time rho at paired (omega, theta) samples, vectorized.

    Matches lfa.spacetime_rho cell by cell: exact unit pairs give 0,
    vanishing coarse symbols give +inf.
    """
    lam = np.asarray(lam)
    mu = np.asarray(mu)
    ph = np.exp(-1j * m * np.asarray(theta))
    a1 = 1.0 - mu * ph
    a1_ideal = 1.0 - lam ** m * ph
    mag = np.abs(a1)
    unit = (np.abs(lam - 1.0) <= UNIT_TOL) & (np.abs(mu - 1.0) <= UNIT_TOL)
    singular = (mag < 1e-300) & ~unit
    safe = np.where(mag < 1e-300, 1.0, mag)
    rho = np.abs(lam) ** (m * nu) * np.abs(a1 - a1_ideal) / safe
    rho = np.where(singular, np.inf, rho)
    return np.where(unit, 0.0, rho), singular


def _rho_sup_vec(lam, mu, m: int, nu: int):
    """sup over theta of the LFA spectral radius, elementwise over modes.

    Dtype-preserving so extended-precision symbol values survive; |mu| >= 1
    outside the unit pair reports +inf.
    """
    lam = np.asarray(lam)
    mu = np.asarray(mu)
    den = 1.0 - np.abs(mu)
    num = np.abs(lam ** m - mu)
    unit = (np.abs(lam - 1.0) <= UNIT_TOL) & (np.abs(mu - 1.0) <= UNIT_TOL)
    ok = den > 0
    out = np.where(ok,
                   np.abs(lam) ** (m * nu) * num / np.where(ok, den, 1.0),
                   np.inf)
    return np.where(unit, 0.0, out)


def _theta_dagger_vec(mu, m: int):
    ang = np.angle(np.asarray(mu))
    ang = np.where(ang == np.pi, -np.pi, ang)
    return ang / m


def _wrap_theta_vec(theta, m: int):
    span = 2.0 * np.pi / m
    return (np.asarray(theta) + np.pi / m) % span - np.pi / m


def run_fig3(config: ExperimentConfig) -> dict[str, str]:
    """LFA sweep over the (omega, theta) grid; four CSV files.

    Grid files hold the coarse-symbol deviation |A1~ - A1~_ideal|, the
    coarse symbol magnitude |A1~|, and the predicted factor rho, each with
    its global argmax flagged. The cross-section file follows the
    characteristic line theta = -c*omega (aliased into the low band) and the
    worst frequency theta_dagger(omega).
    """
    m, nu = config.m, config.nu
    scheme, coarse = _build_pair(config)
    c = scheme.cfl.c
    omega = FrequencyGrid(config.omega_points, "spatial").values
    theta = FrequencyGrid(config.theta_points, "temporal-low", m=m).values
    lam = np.asarray(scheme.symbol(omega))
    mu = np.asarray(coarse.symbol(omega))
    ph = np.exp(-1j * m * theta)[None, :]

    def slab(idx):
        lam_s = lam[idx][:, None]
        mu_s = mu[idx][:, None]
        a1 = 1.0 - mu_s * ph
        a1_ideal = 1.0 - lam_s ** m * ph
        dev = np.abs(a1 - a1_ideal)
        mag = np.abs(a1)
        unit = ((np.abs(lam_s - 1.0) <= UNIT_TOL)
                & (np.abs(mu_s - 1.0) <= UNIT_TOL))
        singular = (mag < 1e-300) & ~unit
        safe = np.where(mag < 1e-300, 1.0, mag)
        rho = np.abs(lam_s) ** (m * nu) * dev / safe
        rho = np.where(singular, np.inf, rho)
        rho = np.where(unit, 0.0, rho)
        return dev, mag, rho, singular

    parts = _parallel(slab, _chunks(omega.size, 4 * config.threads), config.threads)
    dev = np.concatenate([p[0] for p in parts])
    mag = np.concatenate([p[1] for p in parts])
    rho = np.concatenate([p[2] for p in parts])
    singular = np.concatenate([p[3] for p in parts])
    char = (np.abs(theta[None, :] + c * omega[:, None])
            <= np.maximum(1e-8, 0.1 * np.abs(omega))[:, None])

    theta_char = _wrap_theta_vec(-c * omega, m)
    theta_dag = _theta_dagger_vec(mu, m)
    rho_char, _ = _rho_paired(lam, mu, theta_char, m, nu)
    rho_dag, _ = _rho_paired(lam, mu, theta_dag, m, nu)

    meta = _metadata(config)
    out = config.out_dir
    paths = {}

    def grid_rows(values, extra=None):
        flat_argmax = int(np.argmax(values))
        rows = []
        for i in range(omega.size):
            for j in range(theta.size):
                row = [i, j, omega[i], theta[j], values[i, j]]
                if extra is not None:
                    for arr in extra:
                        row.append(arr[i, j])
                row.append(int(i * theta.size + j == flat_argmax))
                rows.append(row)
        return rows

    base = ["omega_index", "theta_index", "omega", "theta", "value"]
    paths["cgc_deviation"] = write_csv(
        os.path.join(out, "fig3_cgc_deviation.csv"),
        base + ["is_global_argmax"], grid_rows(dev), meta)
    paths["coarse_symbol"] = write_csv(
        os.path.join(out, "fig3_coarse_symbol.csv"),
        base + ["is_global_argmax"], grid_rows(mag), meta)
    paths["rho"] = write_csv(
        os.path.join(out, "fig3_rho.csv"),
        base + ["is_characteristic", "is_singular", "is_global_argmax"],
        grid_rows(rho, extra=(char, singular)), meta)

    i_char = int(np.argmax(rho_char))
    i_dag = int(np.argmax(rho_dag))
    cross_rows = [
        [i, omega[i], theta_char[i], rho_char[i], int(i == i_char),
         theta_dag[i], rho_dag[i], int(i == i_dag)]
        for i in range(omega.size)
    ]
    paths["cross_sections"] = write_csv(
        os.path.join(out, "fig3_cross_sections.csv"),
        ["omega_index", "omega", "theta_characteristic", "rho_characteristic",
         "is_argmax_characteristic", "theta_dagger", "rho_dagger",
         "is_argmax_dagger"],
        cross_rows, meta)
    return paths


def fig4_omega_grid(n_points: int = 128) -> np.ndarray:
    """Symmetric logarithmic frequency grid for the worst-case sweep.

    Half the points cover [1e-3*pi, pi] geometrically and the other half
    mirror them; omega = 0 carries no information (the unit pair). The
    logarithmic low end matters: near-singular fractional CFL numbers need
    omega small enough that the factor has converged to its limit, while
    staying far above cancellation noise.
    """
    if n_points < 2 or n_points % 2:
        raise ConfigError("omega_points must be even and >= 2 for the curve sweep")
    half = np.geomspace(1e-3 * np.pi, np.pi, n_points // 2)
    return np.concatenate([-half[::-1], half])


def fig4_eps_grid(n_points: int, m: int) -> np.ndarray:
    """Uniform grid on (0.5, 1.0) with mesh-aligned points removed.

    Points whose coarse fraction frac(m*eps) lies within 1e-6 of 0 or 1
    violate the lower bound's domain (the coarse characteristics intersect
    the mesh) and are dropped.
    """
    eps = np.linspace(0.5, 1.0, n_points, endpoint=False)
    frac = m * eps - np.floor(m * eps)
    keep = (frac > EPS_SNAP) & (frac < 1.0 - EPS_SNAP)
    return eps[keep]


def run_fig4(config: ExperimentConfig) -> str:
    """Worst-case LFA factor vs the lower bound rho_check per (p, m, eps).

    Symbols are evaluated in extended precision over the logarithmic
    frequency grid; the worst case maximizes the closed-form theta-supremum
    of the spectral radius over that grid, which is the value at
    theta_dagger(omega).
    """
    omega = fig4_omega_grid(config.omega_points).astype(np.longdouble)
    p_values = _int_list(config.p_list)
    m_values = _int_list(config.m_list)
    rows = []
    for p in p_values:
        for m in m_values:
            eps_grid = fig4_eps_grid(config.eps_points, m)
            endpoint = 1.0 - 2.0 / (3.0 * m)

            def one_eps(eps, p=p, m=m):
                problem = advection.AdvectionProblem.from_cfl(float(eps), 64)
                scheme = advection.build_semilagrangian(p, problem)
                coarse = advection.rediscretize(scheme, m)
                lam = scheme.symbol(omega)
                mu = coarse.symbol(omega)
                return float(np.max(_rho_sup_vec(lam, mu, m, config.nu)))

            def chunk_worst(idx, one_eps=one_eps, eps_grid=eps_grid):
                return [one_eps(eps_grid[i]) for i in idx]

            parts = _parallel(chunk_worst, _chunks(eps_grid.size, 4 * config.threads),
                              config.threads)
            worst = [v for part in parts for v in part]
            for eps, w in zip(eps_grid, worst):
                rows.append([p, m, config.nu, eps, w,
                             lfa.rho_check_lower_bound(p, m, float(eps)),
                             endpoint])
    path = os.path.join(config.out_dir, "fig4_curves.csv")
    return write_csv(
        path,
        ["p", "m", "nu", "eps", "lfa_worst_rho", "rho_check", "endpoint_eps"],
        rows,
        _metadata(config, omega_grid="log-symmetric 1e-3*pi..pi"))


def _mesh_lfa_rho(scheme, coarse, m: int, nu: int) -> float:
    """Worst closed-form factor over the scheme's own spatial mesh modes."""
    lam = np.asarray(scheme.symbol_grid())
    mu = np.asarray(coarse.symbol_grid())
    return float(np.max(_rho_sup_vec(lam, mu, m, nu)))


def _pick_cfls(p: int, m: int, nu: int, n_x: int):
    """CFL numbers whose LFA factor sits nearest the fixed targets.

    Scans a fixed fractional-CFL candidate list and returns one (cfl, rho)
    per target, all with rho < 0.9, plus the candidate nearest rho = 3 as
    the designated divergent configuration.
    """
    candidates = np.round(np.arange(0.02, 0.99, 0.02), 10)
    scored = []
    for c in candidates:
        if advection.coarse_fraction(advection.decompose_cfl(float(c)).eps, m) == 0.0:
            continue
        problem = advection.AdvectionProblem.from_cfl(float(c), n_x)
        scheme = advection.build_semilagrangian(p, problem)
        coarse = advection.rediscretize(scheme, m)
        scored.append((float(c), _mesh_lfa_rho(scheme, coarse, m, nu)))
    chosen = []
    used = set()
    for target in MEASURED_TARGETS:
        best = min((pair for pair in scored
                    if pair[1] < 0.9 and pair[0] not in used),
                   key=lambda pair: abs(pair[1] - target))
        used.add(best[0])
        chosen.append(best)
    divergent = min((pair for pair in scored if math.isfinite(pair[1])),
                    key=lambda pair: abs(pair[1] - 3.0))
    return chosen, divergent


def run_measured_vs_lfa(config: ExperimentConfig) -> str:
    """Measured MGRIT convergence factors against the LFA prediction.

    The default matrix runs three rediscretized-coarse configurations per
    (p, m) with LFA factors near 0.2 / 0.35 / 0.55, one ideal-coarse row
    (converges immediately, so no factor is measurable), and one divergent
    row. Configurations with LFA factor >= 0.95 get a capped iteration
    budget and are expected to diverge; they record the nan sentinel instead
    of a factor.
    """
    p_values = _int_list(config.p_list)
    m_values = _int_list(config.m_list)
    plan = []
    for p in p_values:
        for m in m_values:
            chosen, divergent = _pick_cfls(p, m, config.nu, config.n_x)
            for cfl, rho in chosen:
                plan.append((p, m, cfl, "rediscretize", rho))
            if (p, m) == (p_values[-1], m_values[-1]):
                plan.append((p, m, chosen[0][0], "ideal", 0.0))
                plan.append((p, m, divergent[0], "rediscretize", divergent[1]))
    rows = []
    for index, (p, m, cfl, coarse_kind, lfa_rho) in enumerate(plan):
        seed = config.seed + index
        n_t = config.n_t - (config.n_t % m)
        runnable = lfa_rho < RUNNABLE_RHO
        mgrit = engine.MgritConfig(
            m=m, nu=config.nu, n_t=n_t, boundary=config.boundary,
            max_iters=config.max_iters if runnable else DIVERGENT_MAX_ITERS)
        problem = advection.AdvectionProblem.from_cfl(cfl, config.n_x, n_t=n_t)
        scheme = advection.build_semilagrangian(p, problem)
        coarse = (engine.ideal_coarse(scheme, m) if coarse_kind == "ideal"
                  else advection.rediscretize(scheme, m))
        state = engine.random_initial_state(mgrit, config.n_x, seed)
        result = engine.run_mgrit(scheme, coarse, mgrit, state)
        hist = result.residual_history
        divergent = result.diverged or (not result.converged
                                        and hist[-1] > hist[0])
        if divergent:
            measured = math.nan
        else:
            try:
                measured = engine.convergence_factor_from_result(result, mgrit)
            except engine.InsufficientIterationsError:
                measured = math.nan
        diff = abs(measured - lfa_rho) if math.isfinite(measured) else math.nan
        rows.append([p, m, config.nu, cfl, coarse_kind, lfa_rho, measured,
                     diff, seed, result.iterations, int(divergent)])
    path = os.path.join(config.out_dir, "measured_vs_lfa.csv")
    return write_csv(
        path,
        ["p", "m", "nu", "c", "coarse_kind", "lfa_rho", "measured_rho",
         "abs_diff", "seed", "iters", "divergent"],
        rows, _metadata(config, norm="global-l2", rng="philox4x64",
                        window="last-5-pre-stop"))


def _periodic_closed_form_extrema(lam_grid, mu_grid, m, nu, n_t):
    """Max over spatial modes and discrete frequencies of rho and norm."""
    thetas = lfa.discrete_theta_grid(n_t, m)
    best_rho = 0.0
    best_norm = 0.0
    for lam, mu in zip(np.asarray(lam_grid), np.asarray(mu_grid)):
        if abs(lam - 1.0) <= UNIT_TOL and abs(mu - 1.0) <= UNIT_TOL:
            continue
        inp = lfa.TemporalSymbolInput(complex(lam), complex(mu), m, nu)
        for th in thetas:
            best_rho = max(best_rho, lfa.lfa_spectral_radius(inp, float(th)))
            best_norm = max(best_norm, lfa.lfa_norm(inp, float(th)))
    return best_rho, best_norm


def run_oracle_check(config: ExperimentConfig) -> dict:
    """Dense-propagator cross-checks of the closed-form analysis.

    (a) time-periodic: dense rho(E) and ||E|| must match the discrete-
        frequency closed-form maxima; (b) initial-value: the gap between the
        dense norm and the LFA supremum must shrink as n_t grows; (c) an
        ideal coarse operator must give a numerically zero propagator.
    The JSON report lands in out_dir; "passed" reflects all three.
    """
    checks = []

    scalar_cases = [
        (0.5 + 0.0j, 0.3 + 0.0j, 2, 0),
        (0.5 + 0.0j, 0.3 + 0.0j, 2, 1),
        (0.3 + 0.4j, 0.2 - 0.1j, 4, 1),
    ]
    worst = 0.0
    for lam, mu, m, nu in scalar_cases:
        mgrit = engine.MgritConfig(m=m, nu=nu, n_t=32, boundary="time-periodic")
        dense = engine.assemble_dense_propagator(
            engine.scalar_stepper(lam), engine.scalar_stepper(mu), mgrit)
        rho_ref, norm_ref = _periodic_closed_form_extrema([lam], [mu], m, nu, 32)
        worst = max(worst,
                    abs(dense.spectral_radius() - rho_ref),
                    abs(dense.norm() - norm_ref))
    for n_t in (16, 64):
        for m in (2, 4):
            problem = advection.AdvectionProblem.from_cfl(0.8, 16, n_t=n_t)
            scheme = advection.build_semilagrangian(3, problem)
            coarse = advection.rediscretize(scheme, m)
            mgrit = engine.MgritConfig(m=m, nu=1, n_t=n_t, boundary="time-periodic")
            dense = engine.assemble_dense_propagator(scheme, coarse, mgrit)
            rho_ref, norm_ref = _periodic_closed_form_extrema(
                scheme.symbol_grid(), coarse.symbol_grid(), m, 1, n_t)
            worst = max(worst,
                        abs(dense.spectral_radius() - rho_ref),
                        abs(dense.norm() - norm_ref))
    checks.append({"name": "time-periodic-rigor", "max_abs_error": worst,
                   "threshold": 1e-9, "pass": bool(worst < 1e-9)})

    lam, mu, m, nu = 0.7 + 0.0j, 0.4 + 0.0j, 2, 1
    sup, _ = lfa.lfa_norm_sup(lfa.TemporalSymbolInput(lam, mu, m, nu))
    gaps = []
    for n_t in (32, 64, 128, 256):
        mgrit = engine.MgritConfig(m=m, nu=nu, n_t=n_t)
        dense = engine.assemble_dense_propagator(
            engine.scalar_stepper(lam), engine.scalar_stepper(mu), mgrit)
        gaps.append(sup - dense.norm())
    shrinking = all(gaps[i + 1] <= 1.1 * gaps[i] for i in range(len(gaps) - 1))
    ok = bool(shrinking and gaps[-1] < gaps[0] and all(g > 0 for g in gaps))
    checks.append({"name": "initial-value-gap", "lfa_sup_norm": sup,
                   "gaps": gaps, "n_t": [32, 64, 128, 256], "pass": ok})

    mgrit = engine.MgritConfig(m=2, nu=1, n_t=64)
    dense = engine.assemble_dense_propagator(
        engine.scalar_stepper(0.7), engine.scalar_stepper(0.49), mgrit)
    ideal_norms = [dense.norm()]
    problem = advection.AdvectionProblem.from_cfl(0.8, 8, n_t=32)
    scheme = advection.build_semilagrangian(3, problem)
    mgrit = engine.MgritConfig(m=4, nu=1, n_t=32)
    dense = engine.assemble_dense_propagator(
        scheme, engine.ideal_coarse(scheme, 4), mgrit)
    ideal_norms.append(dense.norm())
    ok = bool(max(ideal_norms) < 1e-12)
    checks.append({"name": "ideal-coarse-zero", "norms": ideal_norms,
                   "threshold": 1e-12, "pass": ok})

    report = {
        "generated": datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
        "checks": checks,
        "passed": bool(all(c["pass"] for c in checks)),
    }
    os.makedirs(config.out_dir, exist_ok=True)
    path = os.path.join(config.out_dir, "oracle_check.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    report["path"] = path
    return report


def run_cgc_probe(config: ExperimentConfig) -> str:
    """Fitted coarse-grid-correction order slopes for the standard probes."""
    omegas = np.pi * 2.0 ** -np.arange(5, 12, dtype=float)
    rows = []
    for p in _int_list(config.p_list):
        problem = advection.AdvectionProblem.from_cfl(config.cfl, 64)
        scheme = advection.build_semilagrangian(p, problem)
        redisc = advection.rediscretize(scheme, config.m)
        modified = advection.build_modified_coarse(scheme, config.m)
        probes = [
            ("rediscretize", True, redisc, 0.0),
            ("rediscretize", False, redisc, float(p + 1)),
            ("modified", True, modified, 1.0),
        ]
        for kind, characteristic, op, expected in probes:
            slope = lfa.cgc_order_probe(scheme, op, config.m, characteristic,
                                        omegas)
            rows.append([p, config.m, config.cfl, kind, int(characteristic),
                         slope, expected, float(omegas.min()),
                         float(omegas.max()), omegas.size])
    path = os.path.join(config.out_dir, "cgc_probe.csv")
    return write_csv(
        path,
        ["p", "m", "cfl", "coarse_kind", "characteristic", "slope",
         "expected_slope", "omega_min", "omega_max", "n_points"],
        rows, _metadata(config))


def run_experiment(config: ExperimentConfig):
    """Dispatch on config.kind; returns the runner's paths or report."""
    config.validate()
    if config.kind == "lfa-sweep":
        return run_fig3(config)
    if config.kind == "lower-bound-curve":
        return run_fig4(config)
    if config.kind == "measured-vs-lfa":
        return run_measured_vs_lfa(config)
    if config.kind == "oracle-check":
        return run_oracle_check(config)
    return run_cgc_probe(config)
