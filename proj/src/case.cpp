#include "rucmkt/case.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace rucmkt {

bool UncertaintySpec::any_uncertainty() const {
    for (const auto& row : bound)
        for (double u : row)
            if (u > 0.0) return true;
    return false;
}

double CostCurve::dispatch_cost(double p) const {
    double cost = 0.0;
    for (const auto& blk : blocks) {
        if (p <= blk.p_from) break;
        cost += blk.marginal * (std::min(p, blk.p_to) - blk.p_from);
    }
    return cost;
}

namespace {

bool network_connected(const std::vector<Line>& lines, int n_buses) {
    if (n_buses == 0) return false;
    std::vector<std::vector<int>> adj(n_buses);
    for (const auto& l : lines) {
        adj[l.from_bus].push_back(l.to_bus);
        adj[l.to_bus].push_back(l.from_bus);
    }
    std::vector<char> seen(n_buses, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
        int b = q.front();
        q.pop();
        for (int nb : adj[b])
            if (!seen[nb]) {
                seen[nb] = 1;
                ++count;
                q.push(nb);
            }
    }
    return count == n_buses;
}

}  // namespace

PtdfMatrix compute_ptdf(const std::vector<Line>& lines, int n_buses,
                        int reference_bus) {
    if (reference_bus < 0 || reference_bus >= n_buses)
        throw std::runtime_error("compute_ptdf: reference bus out of range");
    for (const auto& l : lines)
        if (l.reactance <= 0.0)
            throw std::runtime_error("compute_ptdf: non-positive reactance");
    if (n_buses > 1 && !network_connected(lines, n_buses))
        throw std::runtime_error("compute_ptdf: network is disconnected");

    Eigen::MatrixXd b_bus = Eigen::MatrixXd::Zero(n_buses, n_buses);
    for (const auto& l : lines) {
        const double b = 1.0 / l.reactance;
        b_bus(l.from_bus, l.from_bus) += b;
        b_bus(l.to_bus, l.to_bus) += b;
        b_bus(l.from_bus, l.to_bus) -= b;
        b_bus(l.to_bus, l.from_bus) -= b;
    }

    // Reduced susceptance matrix without the reference row/column.
    const int n_red = n_buses - 1;
    std::vector<int> keep;
    keep.reserve(n_red);
    for (int m = 0; m < n_buses; ++m)
        if (m != reference_bus) keep.push_back(m);

    Eigen::MatrixXd b_red(n_red, n_red);
    for (int r = 0; r < n_red; ++r)
        for (int c = 0; c < n_red; ++c) b_red(r, c) = b_bus(keep[r], keep[c]);

    Eigen::FullPivLU<Eigen::MatrixXd> lu(b_red);
    if (n_red > 0 && !lu.isInvertible())
        throw std::runtime_error("compute_ptdf: singular susceptance matrix");

    // Angles per unit injection at each kept bus (withdrawal at reference).
    Eigen::MatrixXd theta_red =
        n_red > 0 ? lu.solve(Eigen::MatrixXd::Identity(n_red, n_red))
                  : Eigen::MatrixXd();

    PtdfMatrix out;
    out.reference_bus = reference_bus;
    out.gamma.assign(lines.size(), std::vector<double>(n_buses, 0.0));
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const auto& l = lines[li];
        for (int c = 0; c < n_red; ++c) {
            double th_from = 0.0, th_to = 0.0;
            for (int r = 0; r < n_red; ++r) {
                if (keep[r] == l.from_bus) th_from = theta_red(r, c);
                if (keep[r] == l.to_bus) th_to = theta_red(r, c);
            }
            out.gamma[li][keep[c]] = (th_from - th_to) / l.reactance;
        }
    }
    return out;
}

CostCurve build_cost_curve(const Generator& gen, int n_blocks) {
    if (n_blocks < 1) throw std::invalid_argument("build_cost_curve: n_blocks < 1");
    if (gen.p_max <= gen.p_min)
        throw std::invalid_argument("build_cost_curve: p_max <= p_min");

    CostCurve curve;
    const double width = (gen.p_max - gen.p_min) / n_blocks;
    curve.blocks.reserve(n_blocks);
    for (int j = 0; j < n_blocks; ++j) {
        CostBlock blk;
        blk.p_from = gen.p_min + j * width;
        blk.p_to = gen.p_min + (j + 1) * width;
        const double midpoint = 0.5 * (blk.p_from + blk.p_to);
        blk.marginal = 2.0 * gen.cost_a * midpoint + gen.cost_b;
        curve.blocks.push_back(blk);
    }
    curve.no_load_cost =
        gen.cost_c + gen.cost_a * gen.p_min * gen.p_min + gen.cost_b * gen.p_min;
    return curve;
}

std::vector<std::string> validate_case(const CaseSystem& sys) {
    std::vector<std::string> out;
    auto fail = [&out](const std::string& msg) { out.push_back(msg); };
    std::ostringstream ss;

    const int nb = sys.n_buses();
    if (sys.horizon <= 0) fail("horizon must be positive");
    if (nb == 0) fail("case has no buses");
    for (int m = 0; m < nb; ++m)
        if (sys.buses[m].id != m)
            fail("Bus ids must be dense 0..N-1 (bus " + std::to_string(m) + ")");

    for (std::size_t li = 0; li < sys.lines.size(); ++li) {
        const auto& l = sys.lines[li];
        const std::string tag = "Line " + std::to_string(li);
        if (l.from_bus < 0 || l.from_bus >= nb || l.to_bus < 0 || l.to_bus >= nb)
            fail(tag + ": endpoint bus does not exist");
        else if (l.from_bus == l.to_bus)
            fail(tag + ": from_bus equals to_bus");
        if (l.reactance <= 0.0) fail(tag + ": reactance must be > 0");
        if (l.capacity <= 0.0) fail(tag + ": capacity must be > 0");
    }

    for (std::size_t gi = 0; gi < sys.generators.size(); ++gi) {
        const auto& g = sys.generators[gi];
        const std::string tag =
            "Generator " + (g.name.empty() ? std::to_string(gi) : g.name);
        if (g.bus < 0 || g.bus >= nb) fail(tag + ": bus does not exist");
        if (!(0.0 <= g.p_min && g.p_min <= g.p_max))
            fail(tag + ": requires 0 <= p_min <= p_max");
        if (g.ramp_up < 0 || g.ramp_down < 0 || g.ramp_unc_up < 0 ||
            g.ramp_unc_down < 0)
            fail(tag + ": ramp limits must be >= 0");
        if (g.min_on < 1 || g.min_off < 1)
            fail(tag + ": min on/off times must be >= 1 h");
        if (g.t0 == 0) fail(tag + ": t0 must be nonzero (signed on/off duration)");
        if (g.t0 > 0 && !(g.p_min <= g.p0 && g.p0 <= g.p_max))
            fail(tag + ": initial output p0 outside [p_min, p_max]");
    }

    for (std::size_t si = 0; si < sys.storages.size(); ++si) {
        const auto& s = sys.storages[si];
        const std::string tag =
            "Storage " + (s.name.empty() ? std::to_string(si) : s.name);
        if (s.bus < 0 || s.bus >= nb) fail(tag + ": bus does not exist");
        if (!(0.0 <= s.e0 && s.e0 <= s.e_max)) fail(tag + ": e0 outside [0, e_max]");
        if (s.rate_discharge < 0 || s.rate_charge < 0) fail(tag + ": rates must be >= 0");
        if (!(s.eff_discharge > 0 && s.eff_discharge <= 1.0) ||
            !(s.eff_charge > 0 && s.eff_charge <= 1.0))
            fail(tag + ": efficiencies must lie in (0, 1]");
    }

    if (static_cast<int>(sys.load.base_load.size()) != sys.horizon)
        fail("LoadProfile: base_load length must equal the horizon");
    for (double d : sys.load.base_load)
        if (d < 0.0) fail("LoadProfile: base_load must be >= 0");
    if (static_cast<int>(sys.load.distribution.size()) != nb) {
        fail("LoadProfile: distribution length must equal bus count");
    } else {
        double sum = 0.0;
        bool neg = false;
        for (double f : sys.load.distribution) {
            sum += f;
            neg = neg || f < 0.0;
        }
        if (neg) fail("LoadProfile: distribution fractions must be >= 0");
        if (std::abs(sum - 1.0) > 1e-9)
            fail("LoadProfile: distribution must sum to 1 (got " +
                 std::to_string(sum) + ")");
    }

    const auto& unc = sys.uncertainty;
    if (static_cast<int>(unc.bound.size()) != nb) {
        fail("UncertaintySpec: bound must have one row per bus");
    } else {
        for (int m = 0; m < nb; ++m) {
            if (static_cast<int>(unc.bound[m].size()) != sys.horizon) {
                fail("UncertaintySpec: bound rows must cover the horizon");
                break;
            }
            for (double u : unc.bound[m])
                if (u < 0.0) {
                    fail("UncertaintySpec: bounds must be >= 0");
                    m = nb;
                    break;
                }
        }
    }
    if (unc.lambda <= 0.0) fail("UncertaintySpec: lambda must be > 0");
    if (unc.lambda_budget <= 0.0) fail("UncertaintySpec: lambda_budget must be > 0");

    return out;
}

}  // namespace rucmkt
