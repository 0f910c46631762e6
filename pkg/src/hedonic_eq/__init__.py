"""Equilibrium engine for hedonic-linear markets with endogenous product characteristics."""

from .model import (Allocation, CharProfile, MarketInstance, PriceReport, ValidationError,
                    aggregate_profit, demand_system, firm_profit, markup, markups, price_report,
                    total_surplus)
from .geometry import (DonutRadii, InfeasibleTargetError, Pattern, ProfilePattern, classify_profile,
                       construct_profile, donut_radii, is_feasible)
from .benchmarks import BenchmarkResult, Regime, conditional_rho, monopoly_optimum, planner_optimum
from .cournot import (BestResponse, EquilibriumRecord, VerificationReport, best_response,
                      best_response_dynamics, differentiation_equilibrium, enumerate_equilibria,
                      sign_vector_equilibrium, verify_equilibrium)
from .spectral import (SpectralInstance, SpectralReport, concentration_specialization, jacobi_eigh,
                       ranking_condition, spectral_outputs, spectral_welfares)
from .welfare import (ConditionError, WelfareComparison, closed_form_cosine, compare_diff_vs_sigma,
                      compare_mono_vs_conc, compare_mono_vs_diff, gamma_variance,
                      symmetric_welfare_table, weighted_cosine)
from .extensions import (bonacich, first_best_infeasibility_check, network_outputs,
                         ownership_best_response, ownership_equilibrium, ownership_welfare_slope)

__version__ = "0.1.0"
