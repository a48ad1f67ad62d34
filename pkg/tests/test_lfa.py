"""Tests for the per-mode convergence predictor.

The error-propagator symbol has two independent routes: the closed-form
scalar factor times the rank-1 relaxation symbol, and the definitional
product of the relaxation / coarse-grid-correction factors. The tests keep
both routes alive and compare them on random draws.
"""

import numpy as np
import pytest

from mgrit_lfa import lfa
from mgrit_lfa.advection import build_semilagrangian, rediscretize, AdvectionProblem


def random_input(rng, m=None, nu=None):
    m = int(rng.integers(2, 6)) if m is None else m
    nu = int(rng.integers(0, 3)) if nu is None else nu
    lam = rng.uniform(0.05, 0.95) * np.exp(1j * rng.uniform(-np.pi, np.pi))
    mu = rng.uniform(0.05, 0.95) * np.exp(1j * rng.uniform(-np.pi, np.pi))
    return lfa.TemporalSymbolInput(complex(lam), complex(mu), m, nu)


def test_definitional_product_matches_closed_form():
    # assemble E = S_F (I - P A1^{-1} P^T A0) S_CF^nu S_F from the factors
    # and compare against the f(theta) * S_F closed form
    rng = np.random.default_rng(42)
    for _ in range(100):
        inp = random_input(rng)
        theta = rng.uniform(-np.pi / inp.m, np.pi / inp.m)
        hs = lfa.symbol_error_propagator(inp, theta)
        a0 = np.diag(hs.a0_diag)
        cgc = np.eye(inp.m) - np.full((inp.m, inp.m), 1.0 / inp.m) @ a0 / hs.a1
        built = hs.s_f @ cgc @ np.linalg.matrix_power(hs.s_cf, inp.nu) @ hs.s_f
        assert np.max(np.abs(built - hs.matrix)) < 1e-12


def test_prerelax_symbol_is_scf_power_times_sf():
    rng = np.random.default_rng(3)
    for _ in range(20):
        inp = random_input(rng)
        theta = rng.uniform(-np.pi / inp.m, np.pi / inp.m)
        sf = lfa.symbol_SF(inp, theta)
        scf = lfa.symbol_SCF(inp, theta)
        direct = np.linalg.matrix_power(scf, inp.nu) @ sf
        assert np.max(np.abs(direct - lfa.symbol_prerelax(inp, theta))) < 1e-12


def test_f_relaxation_symbol_idempotent():
    rng = np.random.default_rng(11)
    for _ in range(20):
        inp = random_input(rng)
        theta = rng.uniform(-np.pi / inp.m, np.pi / inp.m)
        sf = lfa.symbol_SF(inp, theta)
        assert np.max(np.abs(sf @ sf - sf)) < 1e-12
        eig = np.sort(np.abs(np.linalg.eigvals(sf)))[::-1]
        assert abs(eig[0] - 1.0) < 1e-10
        assert np.all(eig[1:] < 1e-10)


def test_frozen_scalar_values():
    inp = lfa.TemporalSymbolInput(0.5, 0.3, 2, 0)
    assert lfa.lfa_spectral_radius(inp, 0.0) == pytest.approx(1.0 / 14.0, abs=1e-15)
    assert lfa.lfa_norm(inp, 0.0) == pytest.approx(0.07985957062499248, abs=1e-14)
    inp1 = lfa.TemporalSymbolInput(0.5, 0.3, 2, 1)
    assert lfa.lfa_spectral_radius(inp1, 0.0) == pytest.approx(1.0 / 56.0, abs=1e-15)
    # lam = 0 kills relaxation entirely; the norm equals the radius
    inp0 = lfa.TemporalSymbolInput(0.0, 0.3, 2, 0)
    assert lfa.lfa_norm(inp0, 0.0) == pytest.approx(3.0 / 7.0, abs=1e-15)
    assert lfa.lfa_spectral_radius(inp0, 0.0) == pytest.approx(3.0 / 7.0, abs=1e-15)


def test_radius_bounded_by_norm():
    rng = np.random.default_rng(19)
    for _ in range(50):
        inp = random_input(rng)
        theta = rng.uniform(-np.pi / inp.m, np.pi / inp.m)
        assert lfa.lfa_spectral_radius(inp, theta) <= lfa.lfa_norm(inp, theta) + 1e-15


def test_grid_sup_matches_closed_form_sup():
    # a dense theta grid must reproduce the closed-form supremum and locate
    # its maximizer within one grid cell of theta_dagger
    rng = np.random.default_rng(23)
    n = 10_000
    for _ in range(10):
        inp = random_input(rng)
        thetas = -np.pi / inp.m + 2.0 * np.pi / inp.m * np.arange(n) / n
        norms = np.array([lfa.lfa_norm(inp, t) for t in thetas])
        sup, theta_dag = lfa.lfa_norm_sup(inp)
        grid_max = float(np.max(norms))
        assert grid_max <= sup * (1.0 + 1e-12)
        assert grid_max == pytest.approx(sup, rel=1e-6)
        cell = 2.0 * np.pi / inp.m / n
        gap = abs(thetas[int(np.argmax(norms))] - theta_dag)
        gap = min(gap, 2.0 * np.pi / inp.m - gap)
        assert gap <= cell * (1.0 + 1e-9)


def test_theta_dagger_location():
    assert lfa.lfa_norm_sup(lfa.TemporalSymbolInput(0.1, 0.3j, 4, 0))[1] == \
        pytest.approx(np.pi / 8, abs=1e-15)
    assert lfa.lfa_norm_sup(lfa.TemporalSymbolInput(0.1, 0.0, 4, 0))[1] == 0.0
    # a negative real mu sits on the branch cut; the low-band convention
    # maps it to -pi/m rather than +pi/m
    assert lfa.lfa_norm_sup(lfa.TemporalSymbolInput(0.1, -0.2, 4, 0))[1] == \
        pytest.approx(-np.pi / 4, abs=1e-15)


def test_unit_pair_contributes_zero():
    inp = lfa.TemporalSymbolInput(1.0, 1.0, 4, 1)
    assert lfa.lfa_spectral_radius(inp, 0.3) == 0.0
    assert lfa.lfa_norm(inp, 0.3) == 0.0
    assert lfa.lfa_rho_sup(inp) == 0.0
    assert lfa.lfa_norm_sup(inp) == (0.0, 0.0)
    hs = lfa.symbol_error_propagator(inp, 0.3)
    assert np.all(hs.matrix == 0.0)


def test_input_validation():
    with pytest.raises(ValueError):
        lfa.TemporalSymbolInput(1.0, 0.5, 2, 0)
    with pytest.raises(ValueError):
        lfa.TemporalSymbolInput(0.5, 1.0 + 1e-6, 2, 0)
    with pytest.raises(ValueError):
        lfa.TemporalSymbolInput(1.2, 0.5, 2, 0)
    with pytest.raises(ValueError):
        lfa.TemporalSymbolInput(0.5, 0.5, 1, 0)
    with pytest.raises(ValueError):
        lfa.TemporalSymbolInput(0.5, 0.5, 2, -1)
    # the exact unit pair is the one admitted boundary case
    lfa.TemporalSymbolInput(1.0, 1.0, 2, 0)


def test_singular_relaxation_symbol_raises():
    inp = lfa.TemporalSymbolInput(1.0, 1.0, 4, 0)
    with pytest.raises(ValueError):
        lfa.symbol_SF(inp, 0.0)


def test_vanishing_coarse_symbol_raises():
    inp = lfa.TemporalSymbolInput(0.5, 1.0 - 1e-16, 2, 0)
    with pytest.raises(ValueError):
        lfa.symbol_error_propagator(inp, 0.0)
    with pytest.raises(ValueError):
        lfa.lfa_spectral_radius(inp, 0.0)


def test_spacetime_cell_unit_pair_and_singular():
    cell = lfa.spacetime_rho(lambda w: 1.0, lambda w: 1.0, 0.0, 0.1, 4, 1)
    assert cell.rho == 0.0 and cell.cgc_ratio == 0.0
    cell = lfa.spacetime_rho(lambda w: 0.5, lambda w: 1.0, 0.3, 0.0, 4, 1)
    assert cell.singular
    assert cell.rho == np.inf


def test_spacetime_characteristic_flag():
    cell = lfa.spacetime_rho(lambda w: 0.5, lambda w: 0.3, 0.1, -0.08, 4, 1, cfl=0.8)
    assert cell.is_characteristic
    cell = lfa.spacetime_rho(lambda w: 0.5, lambda w: 0.3, 0.1, 0.05, 4, 1, cfl=0.8)
    assert not cell.is_characteristic
    # without a CFL number the flag cannot be evaluated
    cell = lfa.spacetime_rho(lambda w: 0.5, lambda w: 0.3, 0.1, -0.08, 4, 1)
    assert not cell.is_characteristic


def test_spacetime_rho_equals_temporal_radius():
    # for frozen scalar symbols the space-time cell reduces to the
    # single-mode closed form
    rng = np.random.default_rng(31)
    for _ in range(20):
        inp = random_input(rng)
        theta = rng.uniform(-np.pi / inp.m, np.pi / inp.m)
        cell = lfa.spacetime_rho(lambda w: inp.lam, lambda w: inp.mu,
                                 0.7, theta, inp.m, inp.nu)
        assert cell.rho == pytest.approx(
            lfa.lfa_spectral_radius(inp, theta), rel=1e-12)
        assert cell.norm == pytest.approx(lfa.lfa_norm(inp, theta), rel=1e-12)


def test_lower_bound_frozen_values():
    assert lfa.rho_check_lower_bound(3, 4, 0.8) == pytest.approx(3.0, abs=1e-12)
    assert lfa.rho_check_lower_bound(1, 2, 1.0 / 3.0) == pytest.approx(1.0, abs=1e-12)
    assert lfa.rho_check_lower_bound(1, 2, 0.75) == pytest.approx(0.5, abs=1e-12)


def test_lower_bound_symmetry():
    for p in (1, 3, 5):
        for m in (2, 3, 4):
            for eps in (0.1, 0.27, 0.4):
                a = lfa.rho_check_lower_bound(p, m, eps)
                b = lfa.rho_check_lower_bound(p, m, 1.0 - eps)
                assert a == pytest.approx(b, abs=1e-12)


def test_lower_bound_domain_violations():
    with pytest.raises(ValueError):
        lfa.rho_check_lower_bound(3, 4, 0.0)
    with pytest.raises(ValueError):
        lfa.rho_check_lower_bound(3, 4, 1.0)
    with pytest.raises(ValueError):
        lfa.rho_check_lower_bound(3, 2, 0.5)


def test_lower_bound_interior_invariant_small():
    # on (2/(3m), 1 - 2/(3m)) away from mesh-aligned points the bound
    # exceeds one; at the endpoint it equals one for m = 2
    for p in (1, 3, 5):
        assert lfa.rho_check_lower_bound(p, 2, 1.0 / 3.0) == \
            pytest.approx(1.0, abs=1e-12)
        for m in (3, 4, 6, 8):
            lo = 2.0 / (3.0 * m)
            hi = 1.0 - lo
            for eps in np.linspace(lo, hi, 50):
                if lfa.UNIT_TOL < (eps * m) % 1.0 < 1.0 - lfa.UNIT_TOL:
                    assert lfa.rho_check_lower_bound(p, m, float(eps)) > 1.0 - 1e-12


def test_discrete_theta_grid():
    th = lfa.discrete_theta_grid(16, 4)
    assert th.shape == (4,)
    assert np.all(th >= -np.pi / 4) and np.all(th < np.pi / 4)
    assert np.all(np.diff(th) > 0)
    # each fine mesh frequency 2 pi k / 16 must alias onto one grid point
    for k in range(16):
        w = lfa.wrap_theta(2.0 * np.pi * k / 16.0, 4)
        assert np.min(np.abs(th - w)) < 1e-12
    with pytest.raises(ValueError):
        lfa.discrete_theta_grid(18, 4)


def test_wrap_theta():
    assert lfa.wrap_theta(np.pi / 4, 4) == pytest.approx(-np.pi / 4, abs=1e-15)
    assert lfa.wrap_theta(0.1, 4) == pytest.approx(0.1, abs=1e-15)
    assert lfa.wrap_theta(0.1 + np.pi, 2) == pytest.approx(0.1, abs=1e-12)


def test_harmonic_frequencies():
    th = lfa.harmonic_frequencies(0.2, 4)
    assert th.shape == (4,)
    np.testing.assert_allclose(np.diff(th), np.pi / 2, atol=1e-15)
    assert th[0] == 0.2


def test_cgc_probe_needs_three_frequencies():
    problem = AdvectionProblem.from_cfl(0.8, 32, 32)
    scheme = build_semilagrangian(3, problem)
    coarse = rediscretize(scheme, 4)
    with pytest.raises(ValueError):
        lfa.cgc_order_probe(scheme, coarse, 4, True, [0.1, 0.05])


def test_cgc_probe_orders():
    problem = AdvectionProblem.from_cfl(0.8, 64, 64)
    scheme = build_semilagrangian(3, problem)
    coarse = rediscretize(scheme, 4)
    omegas = np.pi * 2.0 ** -np.arange(5, 10)
    on_char = lfa.cgc_order_probe(scheme, coarse, 4, True, omegas)
    off_char = lfa.cgc_order_probe(scheme, coarse, 4, False, omegas)
    assert abs(on_char) < 0.2
    assert off_char == pytest.approx(4.0, abs=0.3)
