#include "test_support.hpp"

#include <Eigen/Dense>

#include <stdexcept>

#include "rucmkt/lp.hpp"

namespace rucmkt::test {

namespace {

// Derive y/z from an on/off pattern plus the initial state; reject patterns
// breaking minimum up/down windows (including the carried-in duration).
bool commitment_from_pattern(const CaseSystem& sys, unsigned pattern,
                             CommitmentSolution& out) {
    const int ng = sys.n_units();
    const int t_ = sys.horizon;
    out.on.assign(ng, std::vector<std::uint8_t>(t_, 0));
    out.startup = out.on;
    out.shutdown = out.on;
    int bit = 0;
    for (int i = 0; i < ng; ++i)
        for (int t = 0; t < t_; ++t, ++bit)
            out.on[i][t] = (pattern >> bit) & 1u;

    for (int i = 0; i < ng; ++i) {
        const auto& g = sys.generators[i];
        int prev = g.initially_on() ? 1 : 0;
        // run length carried in from before the horizon
        int run = std::abs(g.t0);
        for (int t = 0; t < t_; ++t) {
            const int cur = out.on[i][t];
            if (cur != prev) {
                if (prev == 1 && run < g.min_on) return false;
                if (prev == 0 && run < g.min_off) return false;
                out.startup[i][t] = cur;
                out.shutdown[i][t] = 1 - cur;
                run = 1;
            } else {
                ++run;
            }
            prev = cur;
        }
    }
    return true;
}

}  // namespace

double brute_force_uc_cost(const CaseSystem& sys, const PtdfMatrix& ptdf,
                           const ModelOptions& opts) {
    const int bits = sys.n_units() * sys.horizon;
    if (bits > 20) throw std::invalid_argument("brute force limited to 2^20");
    double best = std::numeric_limits<double>::infinity();
    for (unsigned pattern = 0; pattern < (1u << bits); ++pattern) {
        CommitmentSolution commitment;
        if (!commitment_from_pattern(sys, pattern, commitment)) continue;
        // cheap screen: committed capacity must cover the load
        bool plausible = true;
        for (int t = 0; t < sys.horizon && plausible; ++t) {
            double cap = 0.0;
            for (int i = 0; i < sys.n_units(); ++i)
                cap += commitment.on[i][t] * sys.generators[i].p_max;
            plausible = cap >= sys.total_demand(t) - 1e-9;
        }
        if (!plausible) continue;
        BuiltModel model = build_red(sys, ptdf, commitment, {}, opts);
        const SolveResult res = solve_lp(model.lp);
        if (!res.optimal()) continue;
        best = std::min(best, res.objective);
    }
    return best;
}

PtdfMatrix ptdf_pseudo_inverse_oracle(const std::vector<Line>& lines, int n_buses,
                                      int reference_bus) {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n_buses, n_buses);
    for (const auto& l : lines) {
        const double y = 1.0 / l.reactance;
        b(l.from_bus, l.from_bus) += y;
        b(l.to_bus, l.to_bus) += y;
        b(l.from_bus, l.to_bus) -= y;
        b(l.to_bus, l.from_bus) -= y;
    }
    const Eigen::MatrixXd pinv =
        b.completeOrthogonalDecomposition().pseudoInverse();
    PtdfMatrix out;
    out.reference_bus = reference_bus;
    out.gamma.assign(lines.size(), std::vector<double>(n_buses, 0.0));
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const auto& l = lines[li];
        for (int m = 0; m < n_buses; ++m) {
            if (m == reference_bus) continue;
            Eigen::VectorXd inj = Eigen::VectorXd::Zero(n_buses);
            inj(m) = 1.0;
            inj(reference_bus) -= 1.0;
            const Eigen::VectorXd theta = pinv * inj;
            out.gamma[li][m] = (theta(l.from_bus) - theta(l.to_bus)) / l.reactance;
        }
    }
    return out;
}

std::vector<std::vector<double>> vertex_oracle_2d(const UncertaintySpec& unc,
                                                  int hour) {
    std::vector<int> active;
    for (std::size_t m = 0; m < unc.bound.size(); ++m)
        if (unc.bound[m][hour] > 0) active.push_back(static_cast<int>(m));
    if (active.size() != 2)
        throw std::invalid_argument("2-D oracle needs exactly two uncertain buses");

    const double lam = unc.lambda;
    const double budget = unc.normalization == BudgetNormalization::ByBound
                              ? unc.lambda_budget
                              : unc.lambda * unc.lambda_budget;
    // half-planes a1 z1 + a2 z2 <= rhs over normalized coordinates
    struct Hp {
        double a1, a2, rhs;
    };
    std::vector<Hp> hp{{1, 0, lam},  {-1, 0, lam},  {0, 1, lam},  {0, -1, lam},
                       {1, 1, budget}, {1, -1, budget}, {-1, 1, budget},
                       {-1, -1, budget}};
    std::vector<std::pair<double, double>> pts;
    for (std::size_t a = 0; a < hp.size(); ++a)
        for (std::size_t b = a + 1; b < hp.size(); ++b) {
            const double det = hp[a].a1 * hp[b].a2 - hp[a].a2 * hp[b].a1;
            if (std::abs(det) < 1e-12) continue;
            const double z1 = (hp[a].rhs * hp[b].a2 - hp[a].a2 * hp[b].rhs) / det;
            const double z2 = (hp[a].a1 * hp[b].rhs - hp[a].rhs * hp[b].a1) / det;
            bool feasible = true;
            for (const auto& h : hp)
                feasible = feasible && h.a1 * z1 + h.a2 * z2 <= h.rhs + 1e-9;
            if (!feasible) continue;
            bool duplicate = false;
            for (const auto& [e1, e2] : pts)
                duplicate = duplicate ||
                            (std::abs(e1 - z1) < 1e-7 && std::abs(e2 - z2) < 1e-7);
            if (!duplicate) pts.emplace_back(z1, z2);
        }
    std::vector<std::vector<double>> out;
    for (const auto& [z1, z2] : pts) {
        std::vector<double> v(unc.bound.size(), 0.0);
        v[active[0]] = z1 * unc.bound[active[0]][hour];
        v[active[1]] = z2 * unc.bound[active[1]][hour];
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace rucmkt::test
