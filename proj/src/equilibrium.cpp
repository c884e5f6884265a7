#include "rucmkt/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rucmkt/lp.hpp"

namespace rucmkt {

namespace {

// Profit of a schedule at posted prices: energy revenue + reserve credits
// minus block dispatch cost.  Commitment-fixed costs are excluded throughout
// (commitment is not the unit's decision here), so gaps are unaffected.
double schedule_profit(const CaseSystem& sys, int unit, const PriceSet& prices,
                       const CommitmentSolution& commitment,
                       const std::vector<double>& p, const CostCurve& curve) {
    const auto& g = sys.generators[unit];
    const int m = g.bus;
    double profit = 0.0;
    for (int t = 0; t < sys.horizon; ++t) {
        const double on = commitment.on[unit][t];
        const double q_up =
            std::min(on * g.p_max - p[t],
                     g.ramp_unc_up * (1.0 - commitment.startup[unit][t]));
        const double q_dn =
            std::max(on * g.p_min - p[t],
                     -g.ramp_unc_down * (1.0 - commitment.shutdown_next(unit, t)));
        profit += prices.lmp[m][t] * p[t] + prices.ump_up[m][t] * q_up +
                  prices.ump_down[m][t] * q_dn - curve.dispatch_cost(p[t]);
    }
    return profit;
}

}  // namespace

PmpResult solve_pmp(const CaseSystem& sys, int unit, const PriceSet& prices,
                    const CommitmentSolution& commitment,
                    const BaseDispatch& dispatch, int n_cost_blocks) {
    const auto& g = sys.generators[unit];
    const int m = g.bus;
    const int t_ = sys.horizon;
    const CostCurve curve = build_cost_curve(g, n_cost_blocks);
    using Term = LinearProgram::Term;

    // Maximize profit == minimize its negation.
    LinearProgram lp;
    std::vector<int> pv(t_), qu(t_), qd(t_);
    std::vector<std::vector<int>> blk(curve.blocks.size(), std::vector<int>(t_));
    for (int t = 0; t < t_; ++t) {
        pv[t] = lp.add_variable(-kInf, kInf, -prices.lmp[m][t]);
        qu[t] = lp.add_variable(-kInf, kInf, -prices.ump_up[m][t]);
        qd[t] = lp.add_variable(-kInf, kInf, -prices.ump_down[m][t]);
        const double on = commitment.on[unit][t];
        for (std::size_t j = 0; j < curve.blocks.size(); ++j)
            blk[j][t] = lp.add_variable(0.0, curve.blocks[j].width() * on,
                                        curve.blocks[j].marginal);
    }
    for (int t = 0; t < t_; ++t) {
        const double on = commitment.on[unit][t];
        const double y = commitment.startup[unit][t];
        const double z = commitment.shutdown[unit][t];
        const double z_next = commitment.shutdown_next(unit, t);
        const double p_prev = t == 0 && g.initially_on() ? g.p0 : 0.0;

        // P = p_min I + sum blocks
        std::vector<Term> link{{pv[t], 1.0}};
        for (auto& jb : blk) link.push_back({jb[t], -1.0});
        lp.add_row(RowSense::Equal, g.p_min * on, link);
        // (6b)(6c)
        lp.add_row(RowSense::LessEqual, g.p_max * on, {Term{pv[t], 1.0}});
        lp.add_row(RowSense::LessEqual, -g.p_min * on, {Term{pv[t], -1.0}});
        // (6d)(6e)
        std::vector<Term> up{{pv[t], 1.0}};
        if (t > 0) up.push_back({pv[t - 1], -1.0});
        lp.add_row(RowSense::LessEqual,
                   g.ramp_up * (1 - y) + g.p_min * y + p_prev, up);
        std::vector<Term> dn{{pv[t], -1.0}};
        if (t > 0) dn.push_back({pv[t - 1], 1.0});
        lp.add_row(RowSense::LessEqual,
                   g.ramp_down * (1 - z) + g.p_min * z - p_prev, dn);
        // epigraph rows for Q^up = min{...} (price >= 0 pushes to the min)
        lp.add_row(RowSense::LessEqual, g.p_max * on,
                   {Term{qu[t], 1.0}, Term{pv[t], 1.0}});
        lp.add_row(RowSense::LessEqual, g.ramp_unc_up * (1 - y),
                   {Term{qu[t], 1.0}});
        // and Q^down = max{...} (price <= 0 pushes to the max)
        lp.add_row(RowSense::LessEqual, -g.p_min * on,
                   {Term{qd[t], -1.0}, Term{pv[t], -1.0}});
        lp.add_row(RowSense::LessEqual, g.ramp_unc_down * (1 - z_next),
                   {Term{qd[t], -1.0}});
    }

    const SolveResult res = solve_lp(lp);
    if (!res.optimal())
        throw std::runtime_error(std::string("PMP solve: ") + to_string(res.status));

    PmpResult out;
    out.schedule.resize(t_);
    for (int t = 0; t < t_; ++t) out.schedule[t] = res.primal[pv[t]];
    out.max_profit = -res.objective;
    out.profit_at_dispatch =
        schedule_profit(sys, unit, prices, commitment, dispatch.p[unit], curve);
    out.gap = out.max_profit - out.profit_at_dispatch;
    return out;
}

double ProfitReport::max_gap() const {
    double g = 0.0;
    for (const auto& u : units) g = std::max(g, u.gap);
    return g;
}

ProfitReport verify_equilibrium(const CaseSystem& sys, const PriceSet& prices,
                                const BaseDispatch& dispatch,
                                const CommitmentSolution& commitment,
                                double tolerance, int n_cost_blocks) {
    ProfitReport rep;
    rep.tolerance = tolerance;
    rep.units.reserve(sys.n_units());
    for (int i = 0; i < sys.n_units(); ++i)
        rep.units.push_back(solve_pmp(sys, i, prices, commitment, dispatch, n_cost_blocks));
    rep.equilibrium = rep.max_gap() <= tolerance;
    return rep;
}

}  // namespace rucmkt
