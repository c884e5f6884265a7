#include "rucmkt/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rucmkt {

namespace {

std::vector<std::vector<double>> grid(int n, int t) {
    return std::vector<std::vector<double>>(n, std::vector<double>(t, 0.0));
}

std::vector<double> pull(const SolveResult& res, const std::vector<int>& rows) {
    std::vector<double> out(rows.size(), 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i] >= 0) out[i] = res.row_dual[rows[i]];
    return out;
}

std::vector<std::vector<double>> pull(const SolveResult& res, const RowGrid& g) {
    std::vector<std::vector<double>> out;
    out.reserve(g.size());
    for (const auto& row : g) out.push_back(pull(res, row));
    return out;
}

}  // namespace

DualBundle extract_duals(const CaseSystem& sys, const BuiltModel& model,
                         const SolveResult& result) {
    if (result.row_dual.empty())
        throw std::invalid_argument("extract_duals: result carries no duals");
    DualBundle d;
    d.lambda = pull(result, model.rows.balance);
    d.beta_up = pull(result, model.rows.cap_up);
    d.beta_lo = pull(result, model.rows.cap_lo);
    d.alpha_up = pull(result, model.rows.ramp_up);
    d.alpha_dn = pull(result, model.rows.ramp_dn);
    if (!model.rows.flow_pos.empty()) {
        d.eta_pos = pull(result, model.rows.flow_pos);
        d.eta_neg = pull(result, model.rows.flow_neg);
    } else {
        d.eta_pos = grid(sys.n_lines(), sys.horizon);
        d.eta_neg = grid(sys.n_lines(), sys.horizon);
    }
    const int nk = static_cast<int>(model.rows.k_balance.size());
    for (int k = 0; k < nk; ++k) {
        d.lambda_k.push_back(pull(result, model.rows.k_balance[k]));
        d.beta_up_k.push_back(pull(result, model.rows.k_cap_up[k]));
        d.beta_lo_k.push_back(pull(result, model.rows.k_cap_lo[k]));
        d.alpha_up_k.push_back(pull(result, model.rows.k_ramp_up[k]));
        d.alpha_dn_k.push_back(pull(result, model.rows.k_ramp_dn[k]));
        if (!model.rows.k_flow_pos[k].empty()) {
            d.eta_pos_k.push_back(pull(result, model.rows.k_flow_pos[k]));
            d.eta_neg_k.push_back(pull(result, model.rows.k_flow_neg[k]));
        } else {
            d.eta_pos_k.push_back(grid(sys.n_lines(), sys.horizon));
            d.eta_neg_k.push_back(grid(sys.n_lines(), sys.horizon));
        }
    }
    return d;
}

RedSolution solve_red(const CaseSystem& sys, const PtdfMatrix& ptdf,
                      const CommitmentSolution& commitment,
                      std::span<const ExtremePoint> extreme_points,
                      const ModelOptions& opts,
                      const std::vector<StorageSchedule>* fixed_storage,
                      const SolveOptions& solve_opts) {
    BuiltModel model =
        build_red(sys, ptdf, commitment, extreme_points, opts, fixed_storage);
    const SolveResult res = solve_lp(model.lp, solve_opts);
    if (!res.optimal())
        throw std::runtime_error(std::string("RED solve: ") + to_string(res.status));
    RedSolution out;
    out.objective = res.objective;
    out.dispatch = extract_base_dispatch(sys, model, res);
    out.recourse = extract_recourse(sys, model, res);
    out.duals = extract_duals(sys, model, res);
    return out;
}

PriceSet extract_prices(const CaseSystem& sys, const PtdfMatrix& ptdf,
                        const DualBundle& duals) {
    const int nb = sys.n_buses();
    const int t_ = sys.horizon;
    const int nl = sys.n_lines();
    const int nk = static_cast<int>(duals.lambda_k.size());
    const bool networked = !ptdf.gamma.empty();

    PriceSet p;
    p.lmp = grid(nb, t_);
    p.ump_up = grid(nb, t_);
    p.ump_down = grid(nb, t_);
    p.ump_k.assign(nk, grid(nb, t_));

    for (int m = 0; m < nb; ++m) {
        for (int t = 0; t < t_; ++t) {
            double congestion = 0.0;
            if (networked)
                for (int l = 0; l < nl; ++l) {
                    double eta = duals.eta_pos[l][t] - duals.eta_neg[l][t];
                    for (int k = 0; k < nk; ++k)
                        eta += duals.eta_pos_k[k][l][t] - duals.eta_neg_k[k][l][t];
                    congestion += ptdf.at(l, m) * eta;
                }
            p.lmp[m][t] = duals.lambda[t] - congestion;
            for (int k = 0; k < nk; ++k) {
                double ck = 0.0;
                if (networked)
                    for (int l = 0; l < nl; ++l)
                        ck += ptdf.at(l, m) * (duals.eta_pos_k[k][l][t] -
                                               duals.eta_neg_k[k][l][t]);
                const double ump = duals.lambda_k[k][t] - ck;
                p.ump_k[k][m][t] = ump;
                // sign partition of the intermediate signals
                if (ump >= 0)
                    p.ump_up[m][t] += ump;
                else
                    p.ump_down[m][t] += ump;
            }
        }
    }
    return p;
}

std::vector<std::vector<double>> bus_injections(const CaseSystem& sys,
                                                const BaseDispatch& dispatch) {
    auto inj = grid(sys.n_buses(), sys.horizon);
    for (int t = 0; t < sys.horizon; ++t) {
        for (int i = 0; i < sys.n_units(); ++i)
            inj[sys.generators[i].bus][t] += dispatch.p[i][t];
        for (int s = 0; s < sys.n_storages(); ++s)
            inj[sys.storages[s].bus][t] += dispatch.storage[s].injection(t);
        for (int m = 0; m < sys.n_buses(); ++m) inj[m][t] -= sys.demand(m, t);
    }
    return inj;
}

ReserveQuantities compute_reserves(const CaseSystem& sys, const PtdfMatrix& ptdf,
                                   const CommitmentSolution& commitment,
                                   const BaseDispatch& dispatch) {
    ReserveQuantities r;
    r.q_up = grid(sys.n_units(), sys.horizon);
    r.q_down = grid(sys.n_units(), sys.horizon);
    for (int i = 0; i < sys.n_units(); ++i) {
        const auto& g = sys.generators[i];
        for (int t = 0; t < sys.horizon; ++t) {
            const double on = commitment.on[i][t];
            r.q_up[i][t] =
                std::min(on * g.p_max - dispatch.p[i][t],
                         g.ramp_unc_up * (1.0 - commitment.startup[i][t]));
            r.q_down[i][t] =
                std::max(on * g.p_min - dispatch.p[i][t],
                         -g.ramp_unc_down * (1.0 - commitment.shutdown_next(i, t)));
        }
    }
    r.df_pos = grid(sys.n_lines(), sys.horizon);
    r.df_neg = grid(sys.n_lines(), sys.horizon);
    if (!ptdf.gamma.empty()) {
        const auto inj = bus_injections(sys, dispatch);
        for (int l = 0; l < sys.n_lines(); ++l)
            for (int t = 0; t < sys.horizon; ++t) {
                double flow = 0.0;
                for (int m = 0; m < sys.n_buses(); ++m)
                    flow += ptdf.at(l, m) * inj[m][t];
                r.df_pos[l][t] = sys.lines[l].capacity - flow;
                r.df_neg[l][t] = sys.lines[l].capacity + flow;
            }
    }
    return r;
}

double kkt_stationarity_residual(const CaseSystem& sys, const PtdfMatrix& ptdf,
                                 const DualBundle& duals) {
    const int nk = static_cast<int>(duals.lambda_k.size());
    const bool networked = !ptdf.gamma.empty();
    double worst = 0.0;
    for (int k = 0; k < nk; ++k)
        for (int i = 0; i < sys.n_units(); ++i) {
            const int bus = sys.generators[i].bus;
            for (int t = 0; t < sys.horizon; ++t) {
                double r = duals.beta_up_k[k][i][t] - duals.beta_lo_k[k][i][t] +
                           duals.alpha_up_k[k][i][t] - duals.alpha_dn_k[k][i][t] -
                           duals.lambda_k[k][t];
                if (networked)
                    for (int l = 0; l < sys.n_lines(); ++l)
                        r += ptdf.at(l, bus) * (duals.eta_pos_k[k][l][t] -
                                                duals.eta_neg_k[k][l][t]);
                worst = std::max(worst, std::abs(r));
            }
        }
    return worst;
}

double lmp_finite_difference(const CaseSystem& sys, const PtdfMatrix& ptdf,
                             const CommitmentSolution& commitment,
                             std::span<const ExtremePoint> extreme_points,
                             int bus, int hour, double delta_mw,
                             const ModelOptions& opts) {
    auto solve_cost = [&](const ModelOptions& o) {
        BuiltModel model = build_red(sys, ptdf, commitment, extreme_points, o);
        const SolveResult res = solve_lp(model.lp);
        if (!res.optimal())
            throw std::runtime_error("lmp_finite_difference: RED not optimal");
        return res.objective;
    };
    const double base = solve_cost(opts);
    ModelOptions bumped = opts;
    bumped.bump_bus = bus;
    bumped.bump_hour = hour;
    bumped.bump_mw = delta_mw;
    return (solve_cost(bumped) - base) / delta_mw;
}

std::vector<double> implied_reserve_requirement(const CaseSystem& sys,
                                                bool budget_capped) {
    const auto& unc = sys.uncertainty;
    std::vector<double> req(sys.horizon, 0.0);
    for (int t = 0; t < sys.horizon; ++t) {
        if (!budget_capped) {
            for (int m = 0; m < sys.n_buses(); ++m)
                req[t] += unc.lambda * unc.bound[m][t];
        } else {
            // maximize sum eps over the hour-t budget set: fill buses in
            // descending bound order until the budget is exhausted
            std::vector<double> bounds;
            for (int m = 0; m < sys.n_buses(); ++m)
                if (unc.bound[m][t] > 0) bounds.push_back(unc.bound[m][t]);
            std::sort(bounds.rbegin(), bounds.rend());
            double budget = unc.normalization == BudgetNormalization::ByBound
                                ? unc.lambda_budget
                                : unc.lambda * unc.lambda_budget;
            for (double u : bounds) {
                const double take = std::min(unc.lambda, budget);
                if (take <= 0) break;
                req[t] += take * u;
                budget -= take;
            }
        }
    }
    return req;
}

TraditionalPricing solve_traditional(const CaseSystem& sys, const PtdfMatrix& ptdf,
                                     std::span<const double> req_up,
                                     std::span<const double> req_down,
                                     const ModelOptions& opts,
                                     const SolveOptions& solve_opts) {
    BuiltModel model = build_traditional_uc(sys, ptdf, req_up, req_down, opts);
    const SolveResult mip = solve_milp(model.lp, solve_opts);
    if (!mip.optimal())
        throw std::runtime_error(std::string("traditional UC solve: ") +
                                 to_string(mip.status));

    TraditionalPricing out;
    out.objective = mip.objective;
    out.commitment = extract_commitment(sys, model, mip);
    out.dispatch = extract_base_dispatch(sys, model, mip);

    // fix binaries at the incumbent and re-solve as an LP for prices
    LinearProgram pricing_lp = model.lp;
    auto fix_grid = [&](const VarGrid& vars,
                        const std::vector<std::vector<std::uint8_t>>& vals) {
        for (std::size_t i = 0; i < vars.size(); ++i)
            for (std::size_t t = 0; t < vars[i].size(); ++t)
                if (vars[i][t] >= 0)
                    pricing_lp.fix_variable(vars[i][t], vals[i][t]);
    };
    fix_grid(model.vars.on, out.commitment.on);
    fix_grid(model.vars.startup, out.commitment.startup);
    fix_grid(model.vars.shutdown, out.commitment.shutdown);
    for (int s = 0; s < sys.n_storages(); ++s)
        for (int t = 0; t < sys.horizon; ++t) {
            pricing_lp.fix_variable(model.vars.s_mode_discharge[s][t],
                                    out.dispatch.storage[s].mode_discharge[t]);
            pricing_lp.fix_variable(model.vars.s_mode_charge[s][t],
                                    out.dispatch.storage[s].mode_charge[t]);
        }
    pricing_lp.relax_integrality();
    const SolveResult lp = solve_lp(pricing_lp, solve_opts);
    if (!lp.optimal())
        throw std::runtime_error("traditional pricing LP not optimal");

    out.lambda = pull(lp, model.rows.balance);
    out.price_up = pull(lp, model.rows.req_up);
    // report the downward price signed like a downward UMP (<= 0)
    out.price_down = pull(lp, model.rows.req_down);
    for (double& v : out.price_down) v = -v;
    return out;
}

}  // namespace rucmkt
