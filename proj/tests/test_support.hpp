#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "rucmkt/case.hpp"
#include "rucmkt/json_io.hpp"
#include "rucmkt/uc_model.hpp"

namespace rucmkt::test {

inline std::string data_dir() {
#ifdef RUCMKT_DATA_DIR
    return RUCMKT_DATA_DIR;
#else
    return "data";
#endif
}

inline CaseSystem load_sixbus() {
    return load_case(data_dir() + "/sixbus.json");
}

inline CaseSystem truncate_case(CaseSystem sys, int hours) {
    sys.horizon = hours;
    sys.load.base_load.resize(hours);
    for (auto& row : sys.uncertainty.bound) row.resize(hours);
    return sys;
}

/// Minimal 1-bus system: one unit, flat-ish load, optional uncertainty.
inline CaseSystem single_bus_case(int hours, double load, double ubound,
                                  double ramp_unc = 30.0) {
    CaseSystem sys;
    sys.name = "single-bus";
    sys.horizon = hours;
    sys.buses = {{0, "bus0"}};
    Generator g;
    g.name = "G";
    g.bus = 0;
    g.p_min = 5;
    g.p_max = 200;
    g.p0 = load;
    g.cost_a = 0.001;
    g.cost_b = 20.0;
    g.cost_c = 10.0;
    g.ramp_up = g.ramp_down = 100.0;
    g.ramp_unc_up = g.ramp_unc_down = ramp_unc;
    g.startup_cost = 50;
    g.shutdown_cost = 10;
    g.min_on = g.min_off = 1;
    g.t0 = 5;
    sys.generators = {g};
    sys.load.base_load.assign(hours, load);
    sys.load.distribution = {1.0};
    sys.uncertainty.bound = {std::vector<double>(hours, ubound)};
    sys.uncertainty.lambda = 1.0;
    sys.uncertainty.lambda_budget = 1.0;
    return sys;
}

/// 2-bus, 1-line system with the generator at bus 0 and load at bus 1.
inline CaseSystem two_bus_case(int hours, double load, double u_at_bus1,
                               double line_cap = 500.0) {
    CaseSystem sys;
    sys.name = "two-bus";
    sys.horizon = hours;
    sys.buses = {{0, "bus0"}, {1, "bus1"}};
    sys.lines = {{0, 1, 0.1, line_cap}};
    Generator g;
    g.name = "G";
    g.bus = 0;
    g.p_min = 5;
    g.p_max = 300;
    g.p0 = load;
    g.cost_a = 0.002;
    g.cost_b = 15.0;
    g.cost_c = 20.0;
    g.ramp_up = g.ramp_down = 150.0;
    g.ramp_unc_up = g.ramp_unc_down = 60.0;
    g.startup_cost = 40;
    g.shutdown_cost = 5;
    g.min_on = g.min_off = 1;
    g.t0 = 3;
    sys.generators = {g};
    sys.load.base_load.assign(hours, load);
    sys.load.distribution = {0.0, 1.0};
    sys.uncertainty.bound = {std::vector<double>(hours, 0.0),
                             std::vector<double>(hours, u_at_bus1)};
    sys.uncertainty.lambda = 1.0;
    sys.uncertainty.lambda_budget = 1.0;
    return sys;
}

/// Seeded 3-bus / 2-line / 4-hour instance for the settlement property
/// suites.  Parameter ranges keep the worst case coverable by construction:
/// the bus-2 unit can serve its area alone and recourse headroom dominates
/// every uncertainty bound.
inline CaseSystem random_small_case(unsigned seed) {
    std::mt19937 rng(seed);
    auto uni = [&rng](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    const int hours = 4;
    CaseSystem sys;
    sys.name = "rand-" + std::to_string(seed);
    sys.horizon = hours;
    sys.buses = {{0, "bus0"}, {1, "bus1"}, {2, "bus2"}};

    const double peak = uni(60, 110);
    const double w1 = uni(0.30, 0.50);
    const double w2 = uni(0.30, 0.50);
    const double w0 = std::max(0.0, 1.0 - w1 - w2);
    sys.load.distribution = {w0, w1, w2};
    const double profile[4] = {0.7, 0.85, 1.0, 0.9};
    for (int t = 0; t < hours; ++t) sys.load.base_load.push_back(peak * profile[t]);

    Generator g0;
    g0.name = "big";
    g0.bus = 0;
    g0.p_min = uni(5, 10);
    g0.p_max = uni(100, 150);
    g0.cost_a = uni(0.0, 0.005);
    g0.cost_b = uni(10, 18);
    g0.cost_c = uni(50, 150);
    g0.ramp_up = g0.ramp_down = uni(40, 80);
    g0.ramp_unc_up = g0.ramp_unc_down = uni(40, 80);
    g0.startup_cost = uni(20, 100);
    g0.shutdown_cost = uni(0, 40);
    g0.min_on = g0.min_off = 1;
    g0.t0 = 2;
    g0.p0 = g0.p_min + uni(0, 30);

    Generator g1;
    g1.name = "local";
    g1.bus = 2;
    g1.p_min = uni(2, 5);
    g1.p_max = (w1 + w2) * peak * 1.2 + 20;  // can carry the far side alone
    g1.cost_a = uni(0.0, 0.002);
    g1.cost_b = uni(25, 40);
    g1.cost_c = uni(10, 60);
    g1.ramp_up = g1.ramp_down = uni(30, 60);
    g1.ramp_unc_up = g1.ramp_unc_down = uni(10, 25);
    g1.startup_cost = uni(10, 80);
    g1.shutdown_cost = uni(0, 20);
    g1.min_on = g1.min_off = 1;
    g1.t0 = 2;
    g1.p0 = g1.p_min + uni(0, 10);
    sys.generators = {g0, g1};

    const double load1_peak = w1 * peak;
    Line l01{0, 1, uni(0.05, 0.3), std::max(load1_peak, g0.p_min + 10.0) * uni(1.05, 1.6)};
    Line l12{1, 2, uni(0.05, 0.3), w2 * peak * uni(0.4, 1.2) + 10.0};
    sys.lines = {l01, l12};

    sys.uncertainty.bound.assign(3, std::vector<double>(hours, 0.0));
    const double u2_cap = 0.7 * std::min(g1.ramp_unc_up, g1.p_max - g1.p_min);
    for (int t = 0; t < hours; ++t)
        sys.uncertainty.bound[2][t] =
            std::min(uni(0.05, 0.15) * w2 * sys.load.base_load[t], u2_cap);
    if (uni(0, 1) < 0.5) {
        for (int t = 0; t < hours; ++t)
            sys.uncertainty.bound[0][t] = std::min(uni(0.3, 1.0) * 2.5, 2.5);
    }
    sys.uncertainty.lambda = 1.0;
    sys.uncertainty.lambda_budget = uni(0, 1) < 0.5 ? 1.0 : 2.0;
    return sys;
}

/// Exhaustive commitment-lattice oracle: enumerate every on/off pattern,
/// derive startup/shutdown flags, filter by min up/down and initial state,
/// price the survivors with a fixed-commitment dispatch LP.
double brute_force_uc_cost(const CaseSystem& sys, const PtdfMatrix& ptdf,
                           const ModelOptions& opts);

/// Dense-inverse PTDF oracle (full-matrix pseudo-inverse route).
PtdfMatrix ptdf_pseudo_inverse_oracle(const std::vector<Line>& lines, int n_buses,
                                      int reference_bus);

/// 2-D polytope vertex oracle: pairwise half-plane intersections of the
/// normalized box+budget set, scaled by the hour bounds.
std::vector<std::vector<double>> vertex_oracle_2d(const UncertaintySpec& unc,
                                                  int hour);

}  // namespace rucmkt::test
