#include "rucmkt/uc_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace rucmkt {

double ExtremePoint::hour_sum(int t) const {
    double s = 0.0;
    for (const auto& row : eps) s += row[t];
    return s;
}

bool approx_equal(const ExtremePoint& a, const ExtremePoint& b, double tol) {
    if (a.eps.size() != b.eps.size()) return false;
    for (std::size_t m = 0; m < a.eps.size(); ++m) {
        if (a.eps[m].size() != b.eps[m].size()) return false;
        for (std::size_t t = 0; t < a.eps[m].size(); ++t)
            if (std::abs(a.eps[m][t] - b.eps[m][t]) > tol) return false;
    }
    return true;
}

namespace {

VarGrid make_grid(int n, int t, int fill = -1) {
    return VarGrid(n, std::vector<int>(t, fill));
}

using Term = LinearProgram::Term;

/// One builder covers the master MILP, the RED LP (binaries fixed as
/// constants) and the traditional-reserve variant.
class UcModelBuilder {
  public:
    UcModelBuilder(const CaseSystem& sys, const PtdfMatrix& ptdf,
                   std::span<const ExtremePoint> k_points, const ModelOptions& opts)
        : sys_(sys), ptdf_(ptdf), k_(k_points), opts_(opts),
          t_(sys.horizon), ng_(sys.n_units()), nl_(sys.n_lines()),
          ns_(sys.n_storages()) {
        curves_.reserve(ng_);
        for (const auto& g : sys.generators)
            curves_.push_back(build_cost_curve(g, opts.n_cost_blocks));
    }

    void set_fixed(const CommitmentSolution* commitment,
                   const std::vector<StorageSchedule>* storage) {
        fixed_ = commitment;
        fixed_storage_ = storage;
    }

    void set_reserve(std::span<const double> req_up, std::span<const double> req_down) {
        with_reserve_ = true;
        req_up_ = req_up;
        req_down_ = req_down;
    }

    BuiltModel build() {
        add_unit_variables();
        add_storage_variables();
        if (!fixed_) {
            add_commitment_logic();
            add_initial_forcing();
        }
        add_block_links();
        add_capacity_rows();
        add_ramp_rows();
        add_storage_rows();
        add_balance_rows();
        if (opts_.include_network) add_network_rows();
        for (int k = 0; k < static_cast<int>(k_.size()); ++k) add_recourse_block(k);
        if (with_reserve_) add_reserve_rows();
        if (fixed_) lp_.set_objective_offset(fixed_cost_offset());
        return BuiltModel{std::move(lp_), std::move(vars_), std::move(rows_)};
    }

  private:
    bool on_fixed(int i, int t) const { return fixed_->on[i][t]; }
    double on_val(int i, int t) const { return fixed_ ? fixed_->on[i][t] : 0.0; }
    double y_val(int i, int t) const { return fixed_ ? fixed_->startup[i][t] : 0.0; }
    double z_val(int i, int t) const { return fixed_ ? fixed_->shutdown[i][t] : 0.0; }
    double z_next(int i, int t) const {
        return t + 1 < t_ ? z_val(i, t + 1) : 0.0;
    }

    double initial_output(int i) const {
        const auto& g = sys_.generators[i];
        return g.initially_on() ? g.p0 : 0.0;
    }

    double demand(int m, int t) const {
        double d = sys_.demand(m, t);
        if (m == opts_.bump_bus && t == opts_.bump_hour) d += opts_.bump_mw;
        return d;
    }

    double total_demand(int t) const {
        double d = sys_.total_demand(t);
        if (t == opts_.bump_hour && opts_.bump_bus >= 0) d += opts_.bump_mw;
        return d;
    }

    double fixed_cost_offset() const {
        double c = 0.0;
        for (int i = 0; i < ng_; ++i)
            for (int t = 0; t < t_; ++t)
                c += curves_[i].no_load_cost * fixed_->on[i][t] +
                     sys_.generators[i].startup_cost * fixed_->startup[i][t] +
                     sys_.generators[i].shutdown_cost * fixed_->shutdown[i][t];
        return c;
    }

    void add_unit_variables() {
        vars_.on = make_grid(ng_, t_);
        vars_.startup = make_grid(ng_, t_);
        vars_.shutdown = make_grid(ng_, t_);
        vars_.p = make_grid(ng_, t_);
        vars_.block.assign(opts_.n_cost_blocks, make_grid(ng_, t_));
        for (int i = 0; i < ng_; ++i) {
            const auto& g = sys_.generators[i];
            for (int t = 0; t < t_; ++t) {
                if (!fixed_) {
                    vars_.on[i][t] = lp_.add_variable(0, 1, curves_[i].no_load_cost,
                                                      VarType::Binary);
                    vars_.startup[i][t] =
                        lp_.add_variable(0, 1, g.startup_cost, VarType::Binary);
                    vars_.shutdown[i][t] =
                        lp_.add_variable(0, 1, g.shutdown_cost, VarType::Binary);
                }
                vars_.p[i][t] = lp_.add_variable(-kInf, kInf, 0.0);
                for (int j = 0; j < opts_.n_cost_blocks; ++j) {
                    const auto& blk = curves_[i].blocks[j];
                    const double cap =
                        fixed_ ? blk.width() * on_val(i, t) : blk.width();
                    vars_.block[j][i][t] = lp_.add_variable(0, cap, blk.marginal);
                }
            }
        }
        vars_.delta_p.assign(k_.size(), VarGrid());
        for (std::size_t k = 0; k < k_.size(); ++k) {
            vars_.delta_p[k] = make_grid(ng_, t_);
            for (int i = 0; i < ng_; ++i)
                for (int t = 0; t < t_; ++t)
                    vars_.delta_p[k][i][t] = lp_.add_variable(-kInf, kInf, 0.0);
        }
        if (with_reserve_) {
            vars_.q_up = make_grid(ng_, t_);
            vars_.q_down = make_grid(ng_, t_);
            for (int i = 0; i < ng_; ++i)
                for (int t = 0; t < t_; ++t) {
                    vars_.q_up[i][t] = lp_.add_variable(0, kInf, 0.0);
                    vars_.q_down[i][t] = lp_.add_variable(-kInf, 0, 0.0);
                }
        }
    }

    void add_storage_variables() {
        vars_.s_energy = make_grid(ns_, t_);
        vars_.s_discharge = make_grid(ns_, t_);
        vars_.s_charge = make_grid(ns_, t_);
        vars_.s_mode_discharge = make_grid(ns_, t_);
        vars_.s_mode_charge = make_grid(ns_, t_);
        vars_.s_delta.assign(k_.size(), make_grid(ns_, t_));
        for (int s = 0; s < ns_; ++s) {
            const auto& dev = sys_.storages[s];
            for (int t = 0; t < t_; ++t) {
                const bool terminal = t == t_ - 1;
                vars_.s_energy[s][t] = lp_.add_variable(
                    terminal ? dev.e0 : 0.0, terminal ? dev.e0 : dev.e_max, 0.0);
                if (fixed_) {
                    const auto& sch = (*fixed_storage_)[s];
                    vars_.s_discharge[s][t] = lp_.add_variable(
                        -dev.rate_discharge * sch.mode_discharge[t], 0.0, 0.0);
                    vars_.s_charge[s][t] = lp_.add_variable(
                        0.0, dev.rate_charge * sch.mode_charge[t], 0.0);
                } else {
                    vars_.s_discharge[s][t] =
                        lp_.add_variable(-dev.rate_discharge, 0.0, 0.0);
                    vars_.s_charge[s][t] =
                        lp_.add_variable(0.0, dev.rate_charge, 0.0);
                    vars_.s_mode_discharge[s][t] =
                        lp_.add_variable(0, 1, 0.0, VarType::Binary);
                    vars_.s_mode_charge[s][t] =
                        lp_.add_variable(0, 1, 0.0, VarType::Binary);
                }
                for (std::size_t k = 0; k < k_.size(); ++k)
                    vars_.s_delta[k][s][t] = lp_.add_variable(-kInf, kInf, 0.0);
            }
        }
    }

    void add_commitment_logic() {
        for (int i = 0; i < ng_; ++i) {
            const auto& g = sys_.generators[i];
            const double init_on = g.initially_on() ? 1.0 : 0.0;
            for (int t = 0; t < t_; ++t) {
                std::vector<Term> link{{vars_.on[i][t], 1.0},
                                       {vars_.startup[i][t], -1.0},
                                       {vars_.shutdown[i][t], 1.0}};
                double rhs = 0.0;
                if (t > 0)
                    link.push_back({vars_.on[i][t - 1], -1.0});
                else
                    rhs = init_on;
                lp_.add_row(RowSense::Equal, rhs, link);
                lp_.add_row(RowSense::LessEqual, 1.0,
                            {Term{vars_.startup[i][t], 1.0},
                             Term{vars_.shutdown[i][t], 1.0}});
                // aggregated min up/down windows
                std::vector<Term> up{{vars_.on[i][t], -1.0}};
                for (int tau = std::max(0, t - g.min_on + 1); tau <= t; ++tau)
                    up.push_back({vars_.startup[i][tau], 1.0});
                lp_.add_row(RowSense::LessEqual, 0.0, up);
                std::vector<Term> dn{{vars_.on[i][t], 1.0}};
                for (int tau = std::max(0, t - g.min_off + 1); tau <= t; ++tau)
                    dn.push_back({vars_.shutdown[i][tau], 1.0});
                lp_.add_row(RowSense::LessEqual, 1.0, dn);
            }
        }
    }

    void add_initial_forcing() {
        for (int i = 0; i < ng_; ++i) {
            const auto& g = sys_.generators[i];
            int forced = 0;
            bool force_on = false;
            if (g.t0 > 0 && g.t0 < g.min_on) {
                forced = g.min_on - g.t0;
                force_on = true;
            } else if (g.t0 < 0 && -g.t0 < g.min_off) {
                forced = g.min_off + g.t0;
            }
            for (int t = 0; t < std::min(forced, t_); ++t)
                lp_.fix_variable(vars_.on[i][t], force_on ? 1.0 : 0.0);
        }
    }

    // P_{i,t} = p_min I_{i,t} + sum_j delta_j
    void add_block_links() {
        for (int i = 0; i < ng_; ++i) {
            const auto& g = sys_.generators[i];
            for (int t = 0; t < t_; ++t) {
                std::vector<Term> terms{{vars_.p[i][t], 1.0}};
                for (int j = 0; j < opts_.n_cost_blocks; ++j)
                    terms.push_back({vars_.block[j][i][t], -1.0});
                double rhs = 0.0;
                if (fixed_)
                    rhs = g.p_min * on_val(i, t);
                else
                    terms.push_back({vars_.on[i][t], -g.p_min});
                lp_.add_row(RowSense::Equal, rhs, terms);
                if (!fixed_)
                    for (int j = 0; j < opts_.n_cost_blocks; ++j)
                        lp_.add_row(
                            RowSense::LessEqual, 0.0,
                            {Term{vars_.block[j][i][t], 1.0},
                             Term{vars_.on[i][t], -curves_[i].blocks[j].width()}});
            }
        }
    }

    void add_capacity_rows() {
        rows_.cap_up = make_grid(ng_, t_);
        rows_.cap_lo = make_grid(ng_, t_);
        for (int i = 0; i < ng_; ++i) {
            const auto& g = sys_.generators[i];
            for (int t = 0; t < t_; ++t) {
                if (fixed_) {
                    rows_.cap_up[i][t] =
                        lp_.add_row(RowSense::LessEqual, g.p_max * on_val(i, t),
                                    {Term{vars_.p[i][t], 1.0}});
                    rows_.cap_lo[i][t] =
                        lp_.add_row(RowSense::LessEqual, -g.p_min * on_val(i, t),
                                    {Term{vars_.p[i][t], -1.0}});
                } else {
                    rows_.cap_up[i][t] = lp_.add_row(
                        RowSense::LessEqual, 0.0,
                        {Term{vars_.p[i][t], 1.0}, Term{vars_.on[i][t], -g.p_max}});
                    rows_.cap_lo[i][t] = lp_.add_row(
                        RowSense::LessEqual, 0.0,
                        {Term{vars_.p[i][t], -1.0}, Term{vars_.on[i][t], g.p_min}});
                }
            }
        }
    }

    // (6d)(6e): startup/shutdown-aware hourly ramps with the initial output
    // folded into the hour-0 right-hand side.
    void add_ramp_rows() {
        rows_.ramp_up = make_grid(ng_, t_);
        rows_.ramp_dn = make_grid(ng_, t_);
        for (int i = 0; i < ng_; ++i) {
            const auto& g = sys_.generators[i];
            for (int t = 0; t < t_; ++t) {
                const double p_prev = t == 0 ? initial_output(i) : 0.0;
                std::vector<Term> up{{vars_.p[i][t], 1.0}};
                if (t > 0) up.push_back({vars_.p[i][t - 1], -1.0});
                double rhs_up = g.ramp_up + p_prev;
                if (fixed_)
                    rhs_up = g.ramp_up * (1 - y_val(i, t)) + g.p_min * y_val(i, t) +
                             p_prev;
                else
                    up.push_back({vars_.startup[i][t], g.ramp_up - g.p_min});
                rows_.ramp_up[i][t] = lp_.add_row(RowSense::LessEqual, rhs_up, up);

                std::vector<Term> dn{{vars_.p[i][t], -1.0}};
                if (t > 0) dn.push_back({vars_.p[i][t - 1], 1.0});
                double rhs_dn = g.ramp_down - p_prev;
                if (fixed_)
                    rhs_dn = g.ramp_down * (1 - z_val(i, t)) +
                             g.p_min * z_val(i, t) - p_prev;
                else
                    dn.push_back({vars_.shutdown[i][t], g.ramp_down - g.p_min});
                rows_.ramp_dn[i][t] = lp_.add_row(RowSense::LessEqual, rhs_dn, dn);
            }
        }
    }

    void add_storage_rows() {
        for (int s = 0; s < ns_; ++s) {
            const auto& dev = sys_.storages[s];
            for (int t = 0; t < t_; ++t) {
                // E_t = E_{t-1} + rho^d P^D_t + rho^c P^C_t
                std::vector<Term> bal{{vars_.s_energy[s][t], 1.0},
                                      {vars_.s_discharge[s][t], -dev.eff_discharge},
                                      {vars_.s_charge[s][t], -dev.eff_charge}};
                double rhs = 0.0;
                if (t > 0)
                    bal.push_back({vars_.s_energy[s][t - 1], -1.0});
                else
                    rhs = dev.e0;
                lp_.add_row(RowSense::Equal, rhs, bal);
                if (!fixed_) {
                    lp_.add_row(RowSense::LessEqual, 0.0,
                                {Term{vars_.s_discharge[s][t], -1.0},
                                 Term{vars_.s_mode_discharge[s][t],
                                      -dev.rate_discharge}});
                    lp_.add_row(RowSense::LessEqual, 0.0,
                                {Term{vars_.s_charge[s][t], 1.0},
                                 Term{vars_.s_mode_charge[s][t], -dev.rate_charge}});
                    lp_.add_row(RowSense::LessEqual, 1.0,
                                {Term{vars_.s_mode_discharge[s][t], 1.0},
                                 Term{vars_.s_mode_charge[s][t], 1.0}});
                }
            }
        }
    }

    void add_balance_rows() {
        rows_.balance.resize(t_);
        for (int t = 0; t < t_; ++t) {
            std::vector<Term> terms;
            for (int i = 0; i < ng_; ++i) terms.push_back({vars_.p[i][t], 1.0});
            for (int s = 0; s < ns_; ++s) {
                terms.push_back({vars_.s_discharge[s][t], -1.0});
                terms.push_back({vars_.s_charge[s][t], -1.0});
            }
            rows_.balance[t] =
                lp_.add_row(RowSense::Equal, total_demand(t), terms);
        }
    }

    // Coefficients of bus injections mapped through the PTDF row of line l.
    void flow_terms(int l, int t, bool with_recourse, int k,
                    std::vector<Term>& terms) const {
        for (int i = 0; i < ng_; ++i) {
            const double gamma = ptdf_.at(l, sys_.generators[i].bus);
            if (gamma == 0.0) continue;
            terms.push_back({vars_.p[i][t], gamma});
            if (with_recourse) terms.push_back({vars_.delta_p[k][i][t], gamma});
        }
        for (int s = 0; s < ns_; ++s) {
            const double gamma = ptdf_.at(l, sys_.storages[s].bus);
            if (gamma == 0.0) continue;
            terms.push_back({vars_.s_discharge[s][t], -gamma});
            terms.push_back({vars_.s_charge[s][t], -gamma});
            if (with_recourse) terms.push_back({vars_.s_delta[k][s][t], gamma});
        }
    }

    double gamma_dot_load(int l, int t) const {
        double v = 0.0;
        for (int m = 0; m < sys_.n_buses(); ++m)
            v += ptdf_.at(l, m) * demand(m, t);
        return v;
    }

    void add_network_rows() {
        rows_.flow_pos = make_grid(nl_, t_);
        rows_.flow_neg = make_grid(nl_, t_);
        for (int t = 0; t < t_; ++t) {
            for (int l = 0; l < nl_; ++l) {
                std::vector<Term> terms;
                flow_terms(l, t, false, 0, terms);
                const double gd = gamma_dot_load(l, t);
                const double cap = sys_.lines[l].capacity;
                rows_.flow_pos[l][t] =
                    lp_.add_row(RowSense::LessEqual, cap + gd, terms);
                for (auto& tm : terms) tm.second = -tm.second;
                rows_.flow_neg[l][t] =
                    lp_.add_row(RowSense::LessEqual, cap - gd, terms);
            }
        }
    }

    void add_recourse_block(int k) {
        const auto& pt = k_[k];
        rows_.k_balance.resize(k_.size());
        rows_.k_cap_up.resize(k_.size());
        rows_.k_cap_lo.resize(k_.size());
        rows_.k_ramp_up.resize(k_.size());
        rows_.k_ramp_dn.resize(k_.size());
        rows_.k_flow_pos.resize(k_.size());
        rows_.k_flow_neg.resize(k_.size());
        auto& kb = rows_.k_balance[k];
        kb.resize(t_);
        rows_.k_cap_up[k] = make_grid(ng_, t_);
        rows_.k_cap_lo[k] = make_grid(ng_, t_);
        rows_.k_ramp_up[k] = make_grid(ng_, t_);
        rows_.k_ramp_dn[k] = make_grid(ng_, t_);
        if (opts_.include_network) {
            rows_.k_flow_pos[k] = make_grid(nl_, t_);
            rows_.k_flow_neg[k] = make_grid(nl_, t_);
        }
        for (int t = 0; t < t_; ++t) {
            // (7a)/(28a)
            std::vector<Term> bal;
            for (int i = 0; i < ng_; ++i)
                bal.push_back({vars_.delta_p[k][i][t], 1.0});
            for (int s = 0; s < ns_; ++s)
                bal.push_back({vars_.s_delta[k][s][t], 1.0});
            kb[t] = lp_.add_row(RowSense::Equal, pt.hour_sum(t), bal);

            for (int i = 0; i < ng_; ++i) {
                const auto& g = sys_.generators[i];
                // (7b)/(7c)
                std::vector<Term> cap{{vars_.p[i][t], 1.0},
                                      {vars_.delta_p[k][i][t], 1.0}};
                if (fixed_) {
                    rows_.k_cap_up[k][i][t] = lp_.add_row(
                        RowSense::LessEqual, g.p_max * on_val(i, t), cap);
                } else {
                    cap.push_back({vars_.on[i][t], -g.p_max});
                    rows_.k_cap_up[k][i][t] =
                        lp_.add_row(RowSense::LessEqual, 0.0, cap);
                }
                std::vector<Term> cap_lo{{vars_.p[i][t], -1.0},
                                         {vars_.delta_p[k][i][t], -1.0}};
                if (fixed_) {
                    rows_.k_cap_lo[k][i][t] = lp_.add_row(
                        RowSense::LessEqual, -g.p_min * on_val(i, t), cap_lo);
                } else {
                    cap_lo.push_back({vars_.on[i][t], g.p_min});
                    rows_.k_cap_lo[k][i][t] =
                        lp_.add_row(RowSense::LessEqual, 0.0, cap_lo);
                }
                // (7d)/(7e)
                std::vector<Term> rup{{vars_.delta_p[k][i][t], 1.0}};
                double rhs_up = g.ramp_unc_up;
                if (fixed_)
                    rhs_up = g.ramp_unc_up * (1 - y_val(i, t));
                else
                    rup.push_back({vars_.startup[i][t], g.ramp_unc_up});
                rows_.k_ramp_up[k][i][t] =
                    lp_.add_row(RowSense::LessEqual, rhs_up, rup);

                std::vector<Term> rdn{{vars_.delta_p[k][i][t], -1.0}};
                double rhs_dn = g.ramp_unc_down;
                if (fixed_) {
                    rhs_dn = g.ramp_unc_down * (1 - z_next(i, t));
                } else if (t + 1 < t_) {
                    rdn.push_back({vars_.shutdown[i][t + 1], g.ramp_unc_down});
                }
                rows_.k_ramp_dn[k][i][t] =
                    lp_.add_row(RowSense::LessEqual, rhs_dn, rdn);
            }
            // storage recourse headroom: delta <= R^D + P^D, -delta <= R^C - P^C
            for (int s = 0; s < ns_; ++s) {
                const auto& dev = sys_.storages[s];
                lp_.add_row(RowSense::LessEqual, dev.rate_discharge,
                            {Term{vars_.s_delta[k][s][t], 1.0},
                             Term{vars_.s_discharge[s][t], -1.0}});
                lp_.add_row(RowSense::LessEqual, dev.rate_charge,
                            {Term{vars_.s_delta[k][s][t], -1.0},
                             Term{vars_.s_charge[s][t], 1.0}});
            }
            // (7f)/(7g)
            if (opts_.include_network) {
                for (int l = 0; l < nl_; ++l) {
                    std::vector<Term> terms;
                    flow_terms(l, t, true, k, terms);
                    double shift = gamma_dot_load(l, t);
                    for (int m = 0; m < sys_.n_buses(); ++m)
                        shift += ptdf_.at(l, m) * pt.eps[m][t];
                    const double cap = sys_.lines[l].capacity;
                    rows_.k_flow_pos[k][l][t] =
                        lp_.add_row(RowSense::LessEqual, cap + shift, terms);
                    for (auto& tm : terms) tm.second = -tm.second;
                    rows_.k_flow_neg[k][l][t] =
                        lp_.add_row(RowSense::LessEqual, cap - shift, terms);
                }
            }
        }
    }

    // (24a)-(24c)
    void add_reserve_rows() {
        for (int i = 0; i < ng_; ++i) {
            const auto& g = sys_.generators[i];
            for (int t = 0; t < t_; ++t) {
                lp_.add_row(RowSense::LessEqual, 0.0,
                            {Term{vars_.q_down[i][t], -1.0},
                             Term{vars_.p[i][t], -1.0},
                             Term{vars_.on[i][t], g.p_min}});
                lp_.add_row(RowSense::LessEqual, 0.0,
                            {Term{vars_.q_up[i][t], 1.0},
                             Term{vars_.p[i][t], 1.0},
                             Term{vars_.on[i][t], -g.p_max}});
                lp_.add_row(RowSense::LessEqual, 0.0,
                            {Term{vars_.q_down[i][t], -1.0},
                             Term{vars_.on[i][t], -g.ramp_down}});
                lp_.add_row(RowSense::LessEqual, 0.0,
                            {Term{vars_.q_up[i][t], 1.0},
                             Term{vars_.on[i][t], -g.ramp_up}});
            }
        }
        rows_.req_up.resize(t_);
        rows_.req_down.resize(t_);
        for (int t = 0; t < t_; ++t) {
            std::vector<Term> up, dn;
            for (int i = 0; i < ng_; ++i) {
                up.push_back({vars_.q_up[i][t], -1.0});
                dn.push_back({vars_.q_down[i][t], 1.0});
            }
            // sum Q^up >= req_up  written as  -sum Q^up <= -req_up
            rows_.req_up[t] = lp_.add_row(RowSense::LessEqual, -req_up_[t], up);
            rows_.req_down[t] = lp_.add_row(RowSense::LessEqual, req_down_[t], dn);
        }
    }

    const CaseSystem& sys_;
    const PtdfMatrix& ptdf_;
    std::span<const ExtremePoint> k_;
    ModelOptions opts_;
    int t_, ng_, nl_, ns_;
    std::vector<CostCurve> curves_;
    const CommitmentSolution* fixed_ = nullptr;
    const std::vector<StorageSchedule>* fixed_storage_ = nullptr;
    bool with_reserve_ = false;
    std::span<const double> req_up_, req_down_;
    LinearProgram lp_;
    UcVariables vars_;
    UcRows rows_;
};

void require_valid(const CaseSystem& sys) {
    auto violations = validate_case(sys);
    if (!violations.empty())
        throw std::invalid_argument("invalid case: " + violations.front() +
                                    (violations.size() > 1 ? " (+more)" : ""));
}

}  // namespace

BuiltModel build_master(const CaseSystem& sys, const PtdfMatrix& ptdf,
                        std::span<const ExtremePoint> extreme_points,
                        const ModelOptions& opts) {
    require_valid(sys);
    UcModelBuilder builder(sys, ptdf, extreme_points, opts);
    return builder.build();
}

BuiltModel build_traditional_uc(const CaseSystem& sys, const PtdfMatrix& ptdf,
                                std::span<const double> req_up,
                                std::span<const double> req_down,
                                const ModelOptions& opts) {
    require_valid(sys);
    for (double r : req_up)
        if (r < 0) throw std::invalid_argument("req_up must be >= 0");
    for (double r : req_down)
        if (r > 0) throw std::invalid_argument("req_down must be <= 0");
    UcModelBuilder builder(sys, ptdf, {}, opts);
    builder.set_reserve(req_up, req_down);
    return builder.build();
}

BuiltModel build_red(const CaseSystem& sys, const PtdfMatrix& ptdf,
                     const CommitmentSolution& commitment,
                     std::span<const ExtremePoint> extreme_points,
                     const ModelOptions& opts,
                     const std::vector<StorageSchedule>* fixed_storage) {
    require_valid(sys);
    if (sys.n_storages() > 0 && fixed_storage == nullptr)
        throw std::invalid_argument("build_red: storage modes must be fixed");
    UcModelBuilder builder(sys, ptdf, extreme_points, opts);
    builder.set_fixed(&commitment, fixed_storage);
    return builder.build();
}

namespace {
std::uint8_t round_binary(double v) { return v > 0.5 ? 1 : 0; }
}  // namespace

CommitmentSolution extract_commitment(const CaseSystem& sys,
                                      const BuiltModel& model,
                                      const SolveResult& result) {
    CommitmentSolution out;
    const int ng = sys.n_units();
    const int t_ = sys.horizon;
    out.on.assign(ng, std::vector<std::uint8_t>(t_, 0));
    out.startup = out.on;
    out.shutdown = out.on;
    for (int i = 0; i < ng; ++i)
        for (int t = 0; t < t_; ++t) {
            out.on[i][t] = round_binary(result.primal[model.vars.on[i][t]]);
            out.startup[i][t] = round_binary(result.primal[model.vars.startup[i][t]]);
            out.shutdown[i][t] =
                round_binary(result.primal[model.vars.shutdown[i][t]]);
        }
    return out;
}

BaseDispatch extract_base_dispatch(const CaseSystem& sys, const BuiltModel& model,
                                   const SolveResult& result) {
    BaseDispatch out;
    const int t_ = sys.horizon;
    out.p.assign(sys.n_units(), std::vector<double>(t_, 0.0));
    for (int i = 0; i < sys.n_units(); ++i)
        for (int t = 0; t < t_; ++t)
            out.p[i][t] = result.primal[model.vars.p[i][t]];
    out.storage.resize(sys.n_storages());
    for (int s = 0; s < sys.n_storages(); ++s) {
        auto& sch = out.storage[s];
        sch.energy.resize(t_);
        sch.discharge.resize(t_);
        sch.charge.resize(t_);
        sch.mode_discharge.assign(t_, 0);
        sch.mode_charge.assign(t_, 0);
        for (int t = 0; t < t_; ++t) {
            sch.energy[t] = result.primal[model.vars.s_energy[s][t]];
            sch.discharge[t] = result.primal[model.vars.s_discharge[s][t]];
            sch.charge[t] = result.primal[model.vars.s_charge[s][t]];
            if (model.vars.s_mode_discharge[s][t] >= 0) {
                sch.mode_discharge[t] =
                    round_binary(result.primal[model.vars.s_mode_discharge[s][t]]);
                sch.mode_charge[t] =
                    round_binary(result.primal[model.vars.s_mode_charge[s][t]]);
            }
        }
    }
    return out;
}

RecourseDispatch extract_recourse(const CaseSystem& sys, const BuiltModel& model,
                                  const SolveResult& result) {
    RecourseDispatch out;
    const int nk = static_cast<int>(model.vars.delta_p.size());
    out.delta_p.resize(nk);
    out.delta_storage.resize(nk);
    for (int k = 0; k < nk; ++k) {
        out.delta_p[k].assign(sys.n_units(), std::vector<double>(sys.horizon, 0.0));
        out.delta_storage[k].assign(sys.n_storages(),
                                    std::vector<double>(sys.horizon, 0.0));
        for (int i = 0; i < sys.n_units(); ++i)
            for (int t = 0; t < sys.horizon; ++t)
                out.delta_p[k][i][t] = result.primal[model.vars.delta_p[k][i][t]];
        for (int s = 0; s < sys.n_storages(); ++s)
            for (int t = 0; t < sys.horizon; ++t)
                out.delta_storage[k][s][t] =
                    result.primal[model.vars.s_delta[k][s][t]];
    }
    return out;
}

double commitment_cost(const CaseSystem& sys, const CommitmentSolution& commitment,
                       int n_cost_blocks) {
    double cost = 0.0;
    for (int i = 0; i < sys.n_units(); ++i) {
        const auto curve = build_cost_curve(sys.generators[i], n_cost_blocks);
        for (int t = 0; t < sys.horizon; ++t)
            cost += curve.no_load_cost * commitment.on[i][t] +
                    sys.generators[i].startup_cost * commitment.startup[i][t] +
                    sys.generators[i].shutdown_cost * commitment.shutdown[i][t];
    }
    return cost;
}

}  // namespace rucmkt
