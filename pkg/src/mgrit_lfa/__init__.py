"""Two-level MGRIT/Parareal convergence analysis for linear one-step
integrators, with semi-Lagrangian advection as the prototype application.

The package splits into four layers:

    fourier     circulant operators, frequency grids, small dense helpers
    advection   semi-Lagrangian steppers and their Fourier symbols
    lfa         closed-form two-level convergence predictions
    engine      the actual solver and its dense error-propagator oracle

plus the experiment runners and CLI reproducing the convergence studies.
"""

from .advection import (AdvectionProblem, CflDecomposition,
                        DerivativeOperator, ModifiedCoarseOperator,
                        SemiLagrangianScheme, build_derivative_operator,
                        build_modified_coarse, build_semilagrangian,
                        coarse_fraction, decompose_cfl, f_poly, rediscretize,
                        sl_symbol_estimate, sl_symbol_exact)
from .engine import (DensePropagator, DivergenceError,
                     InsufficientIterationsError, MgritConfig, MgritRunResult,
                     SolverState, assemble_dense_propagator,
                     convergence_factor_from_result, ideal_coarse,
                     measured_convergence_factor, run_mgrit, scalar_stepper,
                     two_level_cycle)
from .fourier import (CirculantOperator, FrequencyGrid, dft_symbol,
                      spectral_norm, spectral_radius)
from .lfa import (SpaceTimeCell, TemporalSymbolInput, cgc_order_probe,
                  discrete_theta_grid, lfa_norm, lfa_norm_sup,
                  lfa_spectral_radius, lfa_rho_sup, rho_check_lower_bound,
                  spacetime_rho, symbol_error_propagator)

__version__ = "0.1.0"

__all__ = [
    "AdvectionProblem", "CflDecomposition", "DerivativeOperator",
    "ModifiedCoarseOperator", "SemiLagrangianScheme",
    "build_derivative_operator", "build_modified_coarse",
    "build_semilagrangian", "coarse_fraction", "decompose_cfl", "f_poly",
    "rediscretize", "sl_symbol_estimate", "sl_symbol_exact",
    "DensePropagator", "DivergenceError", "InsufficientIterationsError",
    "MgritConfig", "MgritRunResult", "SolverState",
    "assemble_dense_propagator", "convergence_factor_from_result",
    "ideal_coarse", "measured_convergence_factor", "run_mgrit",
    "scalar_stepper", "two_level_cycle",
    "CirculantOperator", "FrequencyGrid", "dft_symbol", "spectral_norm",
    "spectral_radius",
    "SpaceTimeCell", "TemporalSymbolInput", "cgc_order_probe",
    "discrete_theta_grid", "lfa_norm", "lfa_norm_sup", "lfa_spectral_radius",
    "lfa_rho_sup", "rho_check_lower_bound", "spacetime_rho",
    "symbol_error_propagator",
    "__version__",
]
