#include "rucmkt/worst_case.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "rucmkt/lp.hpp"

namespace rucmkt {

namespace {

// Vertices of {|z_j| <= lam, sum_j |z_j| <= budget} over the active buses:
// q = floor(budget/lam) coordinates at +-lam plus at most one residual
// coordinate when the leftover is strictly inside (0, lam).
void append_sign_patterns(const std::vector<int>& buses,
                          const std::vector<double>& levels, int n_buses,
                          std::vector<std::vector<double>>& out) {
    const int n = static_cast<int>(buses.size());
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<double> v(n_buses, 0.0);
        for (int j = 0; j < n; ++j)
            v[buses[j]] = (mask & (1u << j)) ? -levels[j] : levels[j];
        out.push_back(std::move(v));
    }
}

void combinations(int n, int q, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> idx(q);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == q) {
            fn(idx);
            return;
        }
        for (int j = start; j <= n - (q - depth); ++j) {
            idx[depth] = j;
            rec(j + 1, depth + 1);
        }
    };
    if (q == 0)
        fn({});
    else
        rec(0, 0);
}

}  // namespace

std::vector<std::vector<double>> enumerate_vertices(const UncertaintySpec& unc,
                                                    int hour) {
    const int n_buses = static_cast<int>(unc.bound.size());
    std::vector<int> active;
    for (int m = 0; m < n_buses; ++m)
        if (unc.bound[m][hour] > 0.0) active.push_back(m);

    std::vector<std::vector<double>> out;
    const double lam = unc.lambda;
    const double budget = unc.normalization == BudgetNormalization::ByBound
                              ? unc.lambda_budget
                              : unc.lambda * unc.lambda_budget;
    const int n = static_cast<int>(active.size());
    if (n == 0 || budget <= 1e-12) {
        out.emplace_back(n_buses, 0.0);
        return out;
    }

    auto scale = [&](const std::vector<int>& buses, const std::vector<double>& z) {
        std::vector<double> levels(buses.size());
        for (std::size_t j = 0; j < buses.size(); ++j)
            levels[j] = z[j] * unc.bound[buses[j]][hour];
        append_sign_patterns(buses, levels, n_buses, out);
    };

    int q = static_cast<int>(std::floor(budget / lam + 1e-12));
    if (q >= n) {
        // budget slack: the full box corners
        std::vector<int> buses = active;
        std::vector<double> z(n, lam);
        scale(buses, z);
        return out;
    }
    const double residual = budget - q * lam;
    const bool has_residual = residual > 1e-12;
    combinations(n, q, [&](const std::vector<int>& support) {
        std::vector<char> in_support(n, 0);
        for (int j : support) in_support[j] = 1;
        // support-only vertex
        {
            std::vector<int> buses;
            std::vector<double> z;
            for (int j : support) {
                buses.push_back(active[j]);
                z.push_back(lam);
            }
            if (!has_residual || q == 0) {
                if (!buses.empty()) scale(buses, z);
            }
            if (has_residual) {
                for (int e = 0; e < n; ++e) {
                    if (in_support[e]) continue;
                    auto b2 = buses;
                    auto z2 = z;
                    b2.push_back(active[e]);
                    z2.push_back(residual);
                    // keep bus order ascending for deterministic output
                    scale(b2, z2);
                }
            }
        }
    });
    if (out.empty()) out.emplace_back(n_buses, 0.0);
    return out;
}

double recourse_feasibility(const CaseSystem& sys, const PtdfMatrix& ptdf,
                            const CommitmentSolution& commitment,
                            const BaseDispatch& base, int hour,
                            std::span<const double> eps,
                            const WorstCaseOptions& opts) {
    if (static_cast<int>(eps.size()) != sys.n_buses())
        throw std::invalid_argument("recourse_feasibility: eps dimension mismatch");
    const int ng = sys.n_units();
    const int ns = sys.n_storages();
    const int nb = sys.n_buses();
    using Term = LinearProgram::Term;

    LinearProgram lp;
    std::vector<int> dp(ng), ds(ns), sp(nb), sm(nb);
    for (int i = 0; i < ng; ++i) {
        const auto& g = sys.generators[i];
        const double on = commitment.on[i][hour];
        const double lo =
            std::max(g.p_min * on - base.p[i][hour],
                     -g.ramp_unc_down * (1 - commitment.shutdown_next(i, hour)));
        const double hi =
            std::min(g.p_max * on - base.p[i][hour],
                     g.ramp_unc_up * (1 - commitment.startup[i][hour]));
        dp[i] = lp.add_variable(lo, hi, 0.0);
    }
    for (int s = 0; s < ns; ++s) {
        const auto& dev = sys.storages[s];
        const double lo = -(dev.rate_charge - base.storage[s].charge[hour]);
        const double hi = dev.rate_discharge + base.storage[s].discharge[hour];
        ds[s] = lp.add_variable(lo, hi, 0.0);
    }
    for (int m = 0; m < nb; ++m) {
        sp[m] = lp.add_variable(0, kInf, 1.0);
        sm[m] = lp.add_variable(0, kInf, 1.0);
    }

    // balance: sum dp + sum ds - sum(sp - sm) = sum eps
    double eps_sum = 0.0;
    std::vector<Term> bal;
    for (int i = 0; i < ng; ++i) bal.push_back({dp[i], 1.0});
    for (int s = 0; s < ns; ++s) bal.push_back({ds[s], 1.0});
    for (int m = 0; m < nb; ++m) {
        bal.push_back({sp[m], -1.0});
        bal.push_back({sm[m], 1.0});
        eps_sum += eps[m];
    }
    lp.add_row(RowSense::Equal, eps_sum, bal);

    if (opts.include_network) {
        // base injections
        std::vector<double> inj(nb, 0.0);
        for (int i = 0; i < ng; ++i) inj[sys.generators[i].bus] += base.p[i][hour];
        for (int s = 0; s < ns; ++s)
            inj[sys.storages[s].bus] += base.storage[s].injection(hour);
        for (int m = 0; m < nb; ++m) inj[m] -= sys.demand(m, hour);

        for (int l = 0; l < sys.n_lines(); ++l) {
            double f0 = 0.0;
            std::vector<Term> terms;
            for (int m = 0; m < nb; ++m) {
                const double gamma = ptdf.at(l, m);
                if (gamma == 0.0) continue;
                f0 += gamma * (inj[m] + eps[m] * -1.0);
                terms.push_back({sp[m], -gamma});
                terms.push_back({sm[m], gamma});
            }
            for (int i = 0; i < ng; ++i) {
                const double gamma = ptdf.at(l, sys.generators[i].bus);
                if (gamma != 0.0) terms.push_back({dp[i], gamma});
            }
            for (int s = 0; s < ns; ++s) {
                const double gamma = ptdf.at(l, sys.storages[s].bus);
                if (gamma != 0.0) terms.push_back({ds[s], gamma});
            }
            const double cap = sys.lines[l].capacity;
            lp.add_row(RowSense::LessEqual, cap - f0, terms);
            for (auto& tm : terms) tm.second = -tm.second;
            lp.add_row(RowSense::LessEqual, cap + f0, terms);
        }
    }

    const SolveResult res = solve_lp(lp);
    if (!res.optimal())
        throw std::runtime_error(std::string("recourse feasibility LP: ") +
                                 to_string(res.status));
    return std::max(0.0, res.objective);
}

ViolationReport find_worst(const CaseSystem& sys, const PtdfMatrix& ptdf,
                           const CommitmentSolution& commitment,
                           const BaseDispatch& base,
                           const WorstCaseOptions& opts) {
    ViolationReport report;
    report.per_hour.resize(sys.horizon);
    for (int t = 0; t < sys.horizon; ++t) {
        const auto vertices = enumerate_vertices(sys.uncertainty, t);
        if (vertices.size() > opts.max_vertices)
            throw std::runtime_error("find_worst: vertex enumeration too large");
        HourWorst& hw = report.per_hour[t];
        hw.violation = -1.0;
        for (std::size_t v = 0; v < vertices.size(); ++v) {
            const double viol = recourse_feasibility(sys, ptdf, commitment, base,
                                                     t, vertices[v], opts);
            // strict improvement keeps the first maximizer (lexicographic order)
            if (viol > hw.violation + 1e-9) {
                hw.violation = viol;
                hw.eps = vertices[v];
                hw.vertex_index = static_cast<int>(v);
            }
        }
        hw.violation = std::max(hw.violation, 0.0);
        report.total += hw.violation;
    }
    return report;
}

ExtremePoint ViolationReport::to_extreme_point(int n_buses) const {
    ExtremePoint pt;
    pt.eps.assign(n_buses, std::vector<double>(per_hour.size(), 0.0));
    for (std::size_t t = 0; t < per_hour.size(); ++t)
        for (int m = 0; m < n_buses; ++m) pt.eps[m][t] = per_hour[t].eps[m];
    return pt;
}

}  // namespace rucmkt
