#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rucmkt/case.hpp"
#include "rucmkt/pricing.hpp"
#include "rucmkt/uc_model.hpp"

namespace rucmkt {

/// Balanced FTR portfolio as net bus injections (positive = injection at the
/// FTR source).  A right m->n of x MW contributes +x at m and -x at n.
struct FtrPortfolio {
    std::vector<double> injection;  // per bus, sums to ~0
};

inline constexpr double kSftToleranceMw = 1e-4;

/// Simultaneous feasibility test + hourly credit.
struct FtrResult {
    bool sft_ok = false;
    std::vector<double> worst_line_flow;  // |Gamma f| per line
    std::vector<double> credit;           // per hour, $
    double total_credit = 0.0;
};

/// Psi_{m,t} = sum_k ump_k * eps_k (uncertainty charge).
std::vector<std::vector<double>> uncertainty_charge(
    const PriceSet& prices, std::span<const ExtremePoint> extreme_points);

/// Box+budget specialization: Psi = ump_up * u_eff + ump_down * (-u_eff),
/// valid when every extreme-point coordinate sits at 0 or +-u_eff.
std::vector<std::vector<double>> uncertainty_charge_budget_form(
    const CaseSystem& sys, const PriceSet& prices);

/// Theta^G via aggregated reserves (Eq. 18 form): ump_up*Q^up + ump_down*Q^down.
std::vector<std::vector<double>> reserve_credit(const CaseSystem& sys,
                                                const PriceSet& prices,
                                                const ReserveQuantities& reserves);

/// Theta^G via per-point re-dispatch (Eq. 14 form): sum_k ump_k * delta_p_k.
std::vector<std::vector<double>> reserve_credit_from_recourse(
    const CaseSystem& sys, const PriceSet& prices, const RecourseDispatch& recourse);

/// Storage reserve credit (per-point form; storage has no Q aggregation).
std::vector<std::vector<double>> storage_reserve_credit(
    const CaseSystem& sys, const PriceSet& prices, const RecourseDispatch& recourse);

/// Theta^T = sum_k (eta_pos_k * df_pos + eta_neg_k * df_neg) per line/hour.
std::vector<std::vector<double>> transmission_reserve_credit(
    const DualBundle& duals, const ReserveQuantities& reserves);

struct EnergySettlement {
    std::vector<double> load_payment;    // per hour, $
    std::vector<double> energy_credit;   // per hour, $ (generators + storage)
    std::vector<double> congestion_cost; // payment - credit
};

EnergySettlement energy_settlement(const PriceSet& prices, const CaseSystem& sys,
                                   const BaseDispatch& dispatch);

/// Throws std::invalid_argument if the portfolio is unbalanced.
FtrResult ftr_check_and_credit(const FtrPortfolio& portfolio, const CaseSystem& sys,
                               const PtdfMatrix& ptdf, const PriceSet& prices);

/// Full per-hour ledger of the market clearing.
struct SettlementLedger {
    int horizon = 0;
    std::vector<std::vector<double>> psi;             // [bus][t]
    std::vector<std::vector<double>> theta_g;         // [unit][t], Eq. 18
    std::vector<std::vector<double>> theta_g_eq14;    // [unit][t], audit route
    std::vector<std::vector<double>> theta_g_storage; // [device][t]
    std::vector<std::vector<double>> theta_t;         // [line][t]
    EnergySettlement energy;
    double eq14_eq18_max_gap = 0.0;  // flag channel for dual/primal mismatch
    std::optional<FtrResult> ftr;

    double psi_total() const;
    double theta_g_total() const;  // units + storage
    double theta_t_total() const;
};

SettlementLedger build_ledger(const CaseSystem& sys, const PtdfMatrix& ptdf,
                              const PriceSet& prices, const DualBundle& duals,
                              const RedSolution& red,
                              const CommitmentSolution& commitment,
                              std::span<const ExtremePoint> extreme_points,
                              const FtrPortfolio* portfolio = nullptr);

inline double money_tolerance(double scale) {
    return std::max(1e-6 * std::abs(scale), 0.01);
}

/// Executable audit of the settlement theorems.
struct AdequacyReport {
    // Uncertainty payment covers reserve credits exactly.
    bool theorem2_ok = false;
    double psi_total = 0.0;
    double theta_g_total = 0.0;
    double theta_t_total = 0.0;
    double identity_gap = 0.0;

    // FTR underfunding is bounded by (and here covered by) Theta^T.
    bool has_ftr = false;
    bool sft_ok = false;
    bool theorem1_ok = true;
    double ftr_credit = 0.0;
    double congestion_cost = 0.0;
    double underfunding = 0.0;           // credit - congestion cost
    double theta_t_cover_residual = 0.0; // underfunding - Theta^T (signed)

    // Collected payments >= distributed credits.
    bool overall_adequacy_ok = false;
    double collected = 0.0;
    double distributed = 0.0;

    bool eq14_matches_eq18 = false;
    std::vector<std::string> failures;

    bool all_ok() const;
};

AdequacyReport revenue_adequacy_report(const SettlementLedger& ledger);

/// Net pairwise rights into the balanced injection encoding.
FtrPortfolio portfolio_from_rights(
    int n_buses, std::span<const std::tuple<int, int, double>> rights);

}  // namespace rucmkt
