#pragma once

#include <span>
#include <vector>

#include "rucmkt/case.hpp"
#include "rucmkt/lp.hpp"
#include "rucmkt/uc_model.hpp"

namespace rucmkt {

/// All multipliers of the dispatch LP, in the sign convention of the
/// Lagrangian: lambda free, every inequality multiplier non-negative.
struct DualBundle {
    std::vector<double> lambda;                        // [t]
    std::vector<std::vector<double>> lambda_k;         // [k][t]
    std::vector<std::vector<double>> beta_up, beta_lo; // [i][t]
    std::vector<std::vector<double>> alpha_up, alpha_dn;
    std::vector<std::vector<double>> eta_pos, eta_neg; // [l][t]
    std::vector<std::vector<std::vector<double>>> beta_up_k, beta_lo_k;   // [k][i][t]
    std::vector<std::vector<std::vector<double>>> alpha_up_k, alpha_dn_k;
    std::vector<std::vector<std::vector<double>>> eta_pos_k, eta_neg_k;   // [k][l][t]
};

struct RedSolution {
    double objective = 0.0;  // includes the fixed commitment cost offset
    BaseDispatch dispatch;
    RecourseDispatch recourse;
    DualBundle duals;
};

/// Build and solve the RED LP for a fixed commitment; throws on a
/// non-optimal status (a valid commitment always admits a solution).
RedSolution solve_red(const CaseSystem& sys, const PtdfMatrix& ptdf,
                      const CommitmentSolution& commitment,
                      std::span<const ExtremePoint> extreme_points,
                      const ModelOptions& opts = {},
                      const std::vector<StorageSchedule>* fixed_storage = nullptr,
                      const SolveOptions& solve_opts = {});

DualBundle extract_duals(const CaseSystem& sys, const BuiltModel& model,
                         const SolveResult& result);

/// Energy and uncertainty marginal prices.
struct PriceSet {
    std::vector<std::vector<double>> lmp;     // [bus][t]
    std::vector<std::vector<std::vector<double>>> ump_k;  // [k][bus][t]
    std::vector<std::vector<double>> ump_up;   // [bus][t], >= 0
    std::vector<std::vector<double>> ump_down; // [bus][t], <= 0
};

PriceSet extract_prices(const CaseSystem& sys, const PtdfMatrix& ptdf,
                        const DualBundle& duals);

/// Scheduled generation and transmission reserves.
struct ReserveQuantities {
    std::vector<std::vector<double>> q_up, q_down;    // [unit][t]
    std::vector<std::vector<double>> df_pos, df_neg;  // [line][t]
};

ReserveQuantities compute_reserves(const CaseSystem& sys, const PtdfMatrix& ptdf,
                                   const CommitmentSolution& commitment,
                                   const BaseDispatch& dispatch);

/// Net bus injection of the base dispatch (generation + storage - load).
std::vector<std::vector<double>> bus_injections(const CaseSystem& sys,
                                                const BaseDispatch& dispatch);

/// Max |stationarity residual| of the recourse variables over (i, t, k):
/// beta_up_k - beta_lo_k + alpha_up_k - alpha_dn_k - lambda_k
/// + sum_l Gamma(eta_pos_k - eta_neg_k) must vanish at an optimum.
double kkt_stationarity_residual(const CaseSystem& sys, const PtdfMatrix& ptdf,
                                 const DualBundle& duals);

/// Re-solve LMP audit: marginal system cost of +delta_mw load at one bus.
double lmp_finite_difference(const CaseSystem& sys, const PtdfMatrix& ptdf,
                             const CommitmentSolution& commitment,
                             std::span<const ExtremePoint> extreme_points,
                             int bus, int hour, double delta_mw = 0.1,
                             const ModelOptions& opts = {});

/// Traditional (deterministic + explicit reserve) clearing results.
struct TraditionalPricing {
    double objective = 0.0;
    CommitmentSolution commitment;
    BaseDispatch dispatch;
    std::vector<double> lambda;      // energy price per hour (zonal)
    std::vector<double> price_up;    // dual of sum Q^up >= req_up
    std::vector<double> price_down;  // dual of sum Q^down <= req_down
};

/// Solve the traditional UC MILP, fix binaries, re-solve the pricing LP and
/// pull the zonal reserve-constraint duals.
TraditionalPricing solve_traditional(const CaseSystem& sys, const PtdfMatrix& ptdf,
                                     std::span<const double> req_up,
                                     std::span<const double> req_down,
                                     const ModelOptions& opts = {},
                                     const SolveOptions& solve_opts = {});

/// Per-hour system-wide reserve requirement implied by the uncertainty set:
/// the maximum of sum_m eps_{m,t} over the hour-t set.  `budget_capped`
/// selects the budget-capped bound instead of the plain sum of effective
/// per-bus bounds.
std::vector<double> implied_reserve_requirement(const CaseSystem& sys,
                                                bool budget_capped);

}  // namespace rucmkt
