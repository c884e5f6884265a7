#include "rucmkt/settlement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rucmkt {

namespace {
std::vector<std::vector<double>> grid(int n, int t) {
    return std::vector<std::vector<double>>(n, std::vector<double>(t, 0.0));
}
double total(const std::vector<std::vector<double>>& g) {
    double s = 0.0;
    for (const auto& row : g) s = std::accumulate(row.begin(), row.end(), s);
    return s;
}
}  // namespace

std::vector<std::vector<double>> uncertainty_charge(
    const PriceSet& prices, std::span<const ExtremePoint> extreme_points) {
    const int nb = static_cast<int>(prices.lmp.size());
    const int t_ = nb > 0 ? static_cast<int>(prices.lmp[0].size()) : 0;
    auto psi = grid(nb, t_);
    for (std::size_t k = 0; k < extreme_points.size(); ++k)
        for (int m = 0; m < nb; ++m)
            for (int t = 0; t < t_; ++t)
                psi[m][t] += prices.ump_k[k][m][t] * extreme_points[k].eps[m][t];
    return psi;
}

std::vector<std::vector<double>> uncertainty_charge_budget_form(
    const CaseSystem& sys, const PriceSet& prices) {
    auto psi = grid(sys.n_buses(), sys.horizon);
    for (int m = 0; m < sys.n_buses(); ++m)
        for (int t = 0; t < sys.horizon; ++t) {
            const double u_eff =
                sys.uncertainty.lambda * sys.uncertainty.bound[m][t];
            psi[m][t] = (prices.ump_up[m][t] - prices.ump_down[m][t]) * u_eff;
        }
    return psi;
}

std::vector<std::vector<double>> reserve_credit(const CaseSystem& sys,
                                                const PriceSet& prices,
                                                const ReserveQuantities& reserves) {
    auto credit = grid(sys.n_units(), sys.horizon);
    for (int i = 0; i < sys.n_units(); ++i) {
        const int m = sys.generators[i].bus;
        for (int t = 0; t < sys.horizon; ++t)
            credit[i][t] = prices.ump_up[m][t] * reserves.q_up[i][t] +
                           prices.ump_down[m][t] * reserves.q_down[i][t];
    }
    return credit;
}

std::vector<std::vector<double>> reserve_credit_from_recourse(
    const CaseSystem& sys, const PriceSet& prices,
    const RecourseDispatch& recourse) {
    auto credit = grid(sys.n_units(), sys.horizon);
    for (std::size_t k = 0; k < recourse.delta_p.size(); ++k)
        for (int i = 0; i < sys.n_units(); ++i) {
            const int m = sys.generators[i].bus;
            for (int t = 0; t < sys.horizon; ++t)
                credit[i][t] +=
                    prices.ump_k[k][m][t] * recourse.delta_p[k][i][t];
        }
    return credit;
}

std::vector<std::vector<double>> storage_reserve_credit(
    const CaseSystem& sys, const PriceSet& prices,
    const RecourseDispatch& recourse) {
    auto credit = grid(sys.n_storages(), sys.horizon);
    for (std::size_t k = 0; k < recourse.delta_storage.size(); ++k)
        for (int s = 0; s < sys.n_storages(); ++s) {
            const int m = sys.storages[s].bus;
            for (int t = 0; t < sys.horizon; ++t)
                credit[s][t] +=
                    prices.ump_k[k][m][t] * recourse.delta_storage[k][s][t];
        }
    return credit;
}

std::vector<std::vector<double>> transmission_reserve_credit(
    const DualBundle& duals, const ReserveQuantities& reserves) {
    const int nl = static_cast<int>(reserves.df_pos.size());
    const int t_ = nl > 0 ? static_cast<int>(reserves.df_pos[0].size()) : 0;
    auto credit = grid(nl, t_);
    for (std::size_t k = 0; k < duals.eta_pos_k.size(); ++k)
        for (int l = 0; l < nl; ++l)
            for (int t = 0; t < t_; ++t)
                credit[l][t] += duals.eta_pos_k[k][l][t] * reserves.df_pos[l][t] +
                                duals.eta_neg_k[k][l][t] * reserves.df_neg[l][t];
    return credit;
}

EnergySettlement energy_settlement(const PriceSet& prices, const CaseSystem& sys,
                                   const BaseDispatch& dispatch) {
    EnergySettlement out;
    out.load_payment.assign(sys.horizon, 0.0);
    out.energy_credit.assign(sys.horizon, 0.0);
    out.congestion_cost.assign(sys.horizon, 0.0);
    for (int t = 0; t < sys.horizon; ++t) {
        for (int m = 0; m < sys.n_buses(); ++m)
            out.load_payment[t] += prices.lmp[m][t] * sys.demand(m, t);
        for (int i = 0; i < sys.n_units(); ++i)
            out.energy_credit[t] +=
                prices.lmp[sys.generators[i].bus][t] * dispatch.p[i][t];
        for (int s = 0; s < sys.n_storages(); ++s)
            out.energy_credit[t] += prices.lmp[sys.storages[s].bus][t] *
                                    dispatch.storage[s].injection(t);
        out.congestion_cost[t] = out.load_payment[t] - out.energy_credit[t];
    }
    return out;
}

FtrResult ftr_check_and_credit(const FtrPortfolio& portfolio, const CaseSystem& sys,
                               const PtdfMatrix& ptdf, const PriceSet& prices) {
    if (static_cast<int>(portfolio.injection.size()) != sys.n_buses())
        throw std::invalid_argument("ftr portfolio dimension mismatch");
    const double net =
        std::accumulate(portfolio.injection.begin(), portfolio.injection.end(), 0.0);
    if (std::abs(net) > 1e-6)
        throw std::invalid_argument("ftr portfolio is unbalanced (net " +
                                    std::to_string(net) + " MW)");

    FtrResult out;
    out.sft_ok = true;
    out.worst_line_flow.assign(sys.n_lines(), 0.0);
    for (int l = 0; l < sys.n_lines(); ++l) {
        double flow = 0.0;
        for (int m = 0; m < sys.n_buses(); ++m)
            flow += ptdf.at(l, m) * portfolio.injection[m];
        out.worst_line_flow[l] = std::abs(flow);
        if (out.worst_line_flow[l] > sys.lines[l].capacity + kSftToleranceMw)
            out.sft_ok = false;
    }
    out.credit.assign(sys.horizon, 0.0);
    for (int t = 0; t < sys.horizon; ++t) {
        for (int m = 0; m < sys.n_buses(); ++m)
            out.credit[t] -= prices.lmp[m][t] * portfolio.injection[m];
        out.total_credit += out.credit[t];
    }
    return out;
}

double SettlementLedger::psi_total() const { return total(psi); }
double SettlementLedger::theta_g_total() const {
    return total(theta_g) + total(theta_g_storage);
}
double SettlementLedger::theta_t_total() const { return total(theta_t); }

SettlementLedger build_ledger(const CaseSystem& sys, const PtdfMatrix& ptdf,
                              const PriceSet& prices, const DualBundle& duals,
                              const RedSolution& red,
                              const CommitmentSolution& commitment,
                              std::span<const ExtremePoint> extreme_points,
                              const FtrPortfolio* portfolio) {
    SettlementLedger ledger;
    ledger.horizon = sys.horizon;
    ledger.psi = uncertainty_charge(prices, extreme_points);
    const auto reserves = compute_reserves(sys, ptdf, commitment, red.dispatch);
    ledger.theta_g = reserve_credit(sys, prices, reserves);
    ledger.theta_g_eq14 = reserve_credit_from_recourse(sys, prices, red.recourse);
    ledger.theta_g_storage = storage_reserve_credit(sys, prices, red.recourse);
    ledger.theta_t = transmission_reserve_credit(duals, reserves);
    ledger.energy = energy_settlement(prices, sys, red.dispatch);
    for (int i = 0; i < sys.n_units(); ++i)
        for (int t = 0; t < sys.horizon; ++t)
            ledger.eq14_eq18_max_gap =
                std::max(ledger.eq14_eq18_max_gap,
                         std::abs(ledger.theta_g[i][t] - ledger.theta_g_eq14[i][t]));
    if (portfolio)
        ledger.ftr = ftr_check_and_credit(*portfolio, sys, ptdf, prices);
    return ledger;
}

bool AdequacyReport::all_ok() const {
    return theorem2_ok && overall_adequacy_ok && eq14_matches_eq18 &&
           (!has_ftr || (sft_ok && theorem1_ok));
}

AdequacyReport revenue_adequacy_report(const SettlementLedger& ledger) {
    AdequacyReport rep;
    rep.psi_total = ledger.psi_total();
    rep.theta_g_total = ledger.theta_g_total();
    rep.theta_t_total = ledger.theta_t_total();
    rep.identity_gap = rep.psi_total - rep.theta_g_total - rep.theta_t_total;
    const double scale = std::max(std::abs(rep.psi_total),
                                  std::abs(rep.theta_g_total + rep.theta_t_total));
    rep.theorem2_ok = std::abs(rep.identity_gap) <= money_tolerance(scale);
    if (!rep.theorem2_ok)
        rep.failures.push_back("uncertainty payment does not cover reserve credits");

    rep.eq14_matches_eq18 = ledger.eq14_eq18_max_gap <= 0.01;
    if (!rep.eq14_matches_eq18)
        rep.failures.push_back("per-point and aggregated reserve credits disagree");

    const double congestion =
        std::accumulate(ledger.energy.congestion_cost.begin(),
                        ledger.energy.congestion_cost.end(), 0.0);
    rep.congestion_cost = congestion;
    if (ledger.ftr) {
        rep.has_ftr = true;
        rep.sft_ok = ledger.ftr->sft_ok;
        if (!rep.sft_ok) rep.failures.push_back("FTR portfolio fails the SFT");
        rep.ftr_credit = ledger.ftr->total_credit;
        rep.underfunding = rep.ftr_credit - congestion;
        rep.theta_t_cover_residual = rep.underfunding - rep.theta_t_total;
        rep.theorem1_ok =
            rep.underfunding <= rep.theta_t_total + money_tolerance(rep.ftr_credit);
        if (!rep.theorem1_ok)
            rep.failures.push_back(
                "FTR underfunding exceeds the transmission reserve credit");
    }

    // collected payments cover distributed credits
    const double load_payment =
        std::accumulate(ledger.energy.load_payment.begin(),
                        ledger.energy.load_payment.end(), 0.0);
    const double energy_credit =
        std::accumulate(ledger.energy.energy_credit.begin(),
                        ledger.energy.energy_credit.end(), 0.0);
    rep.collected = load_payment + rep.psi_total;
    rep.distributed = energy_credit + rep.theta_g_total +
                      (rep.has_ftr ? rep.ftr_credit : 0.0);
    rep.overall_adequacy_ok =
        rep.collected >= rep.distributed - money_tolerance(rep.collected);
    if (!rep.overall_adequacy_ok)
        rep.failures.push_back("collected payments fall short of credits");
    return rep;
}

FtrPortfolio portfolio_from_rights(
    int n_buses, std::span<const std::tuple<int, int, double>> rights) {
    FtrPortfolio p;
    p.injection.assign(n_buses, 0.0);
    for (const auto& [from, to, mw] : rights) {
        if (from < 0 || from >= n_buses || to < 0 || to >= n_buses)
            throw std::invalid_argument("ftr right references unknown bus");
        p.injection[from] += mw;
        p.injection[to] -= mw;
    }
    return p;
}

}  // namespace rucmkt
