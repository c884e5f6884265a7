#pragma once

#include <string>
#include <vector>

namespace rucmkt {

/// A network node.  Bus ids are dense 0..n_buses-1.
struct Bus {
    int id = 0;
    std::string name;
};

/// Transmission line with DC parameters.  Positive flow direction is
/// from_bus -> to_bus.
struct Line {
    int from_bus = 0;
    int to_bus = 0;
    double reactance = 0.0;  // p.u., > 0
    double capacity = 0.0;   // MW, symmetric limit
};

/// Thermal unit.  Cost is quadratic a*P^2 + b*P + c; the market model uses
/// the piecewise-linear curve from build_cost_curve().
struct Generator {
    std::string name;
    int bus = 0;
    double p_min = 0.0;
    double p_max = 0.0;
    double p0 = 0.0;  // output at hour 0- (meaningful when initially on)
    double cost_a = 0.0;
    double cost_b = 0.0;
    double cost_c = 0.0;
    double ramp_up = 0.0;        // r^u, MW/h between consecutive hours
    double ramp_down = 0.0;      // r^d
    double ramp_unc_up = 0.0;    // R^u, MW recourse headroom within the hour
    double ramp_unc_down = 0.0;  // R^d
    double startup_cost = 0.0;
    double shutdown_cost = 0.0;
    int min_on = 1;   // h
    int min_off = 1;  // h
    int t0 = 0;       // >0: hours already on, <0: hours already off

    bool initially_on() const { return t0 > 0; }
};

/// Simple storage device.  Discharge power is carried as a non-positive
/// variable (grid injection is -(p_discharge + p_charge)).
struct StorageDevice {
    std::string name;
    int bus = 0;
    double e_max = 0.0;  // MWh
    double e0 = 0.0;     // MWh, also the required terminal level
    double rate_discharge = 0.0;  // R^D, MW/h
    double rate_charge = 0.0;     // R^C, MW/h
    double eff_discharge = 1.0;   // rho^d in (0,1]
    double eff_charge = 1.0;      // rho^c in (0,1]
};

/// Hourly system load split across buses by a fixed distribution.
struct LoadProfile {
    std::vector<double> base_load;     // MW per hour
    std::vector<double> distribution;  // fraction per bus, sums to 1
};

enum class BudgetNormalization {
    ByBound,           // sum_m |eps_m| / u_m  <= Lambda^Delta  (as printed)
    ByEffectiveBound,  // sum_m |eps_m| / (Lambda u_m) <= Lambda^Delta
};

/// Box + budget uncertainty set.  Per bus/hour bound u_{m,t}; effective
/// per-bus interval is [-Lambda*u, Lambda*u]; the per-hour budget caps the
/// normalized 1-norm at lambda_budget.
struct UncertaintySpec {
    std::vector<std::vector<double>> bound;  // [bus][hour], >= 0; 0 = certain
    double lambda = 1.0;         // Lambda
    double lambda_budget = 1.0;  // Lambda^Delta
    BudgetNormalization normalization = BudgetNormalization::ByBound;

    bool any_uncertainty() const;
};

/// DC power-transfer distribution factors.  gamma[l][m] is the flow induced
/// on line l by 1 MW injected at bus m and withdrawn at the reference bus.
struct PtdfMatrix {
    int reference_bus = 0;
    std::vector<std::vector<double>> gamma;  // [line][bus]

    double at(int line, int bus) const { return gamma[line][bus]; }
};

struct CostBlock {
    double p_from = 0.0;
    double p_to = 0.0;
    double marginal = 0.0;  // $/MWh

    double width() const { return p_to - p_from; }
};

/// Piecewise-linear offer curve.  no_load_cost is the full commitment-hour
/// fixed charge (c + a*p_min^2 + b*p_min); blocks cover [p_min, p_max].
struct CostCurve {
    std::vector<CostBlock> blocks;
    double no_load_cost = 0.0;

    // Block-integral of marginal cost from p_min up to p (p within range).
    double dispatch_cost(double p) const;
    // Total hourly cost while committed at output p.
    double total_cost(double p) const { return no_load_cost + dispatch_cost(p); }
};

/// Full market instance.
struct CaseSystem {
    std::string name;
    int horizon = 0;  // N_T hours
    std::vector<Bus> buses;
    std::vector<Line> lines;
    std::vector<Generator> generators;
    std::vector<StorageDevice> storages;
    LoadProfile load;
    UncertaintySpec uncertainty;

    int n_buses() const { return static_cast<int>(buses.size()); }
    int n_lines() const { return static_cast<int>(lines.size()); }
    int n_units() const { return static_cast<int>(generators.size()); }
    int n_storages() const { return static_cast<int>(storages.size()); }

    double demand(int bus, int t) const {
        return load.base_load[t] * load.distribution[bus];
    }
    double total_demand(int t) const { return load.base_load[t]; }
};

/// DC PTDF w.r.t. reference_bus.  Throws std::runtime_error when the network
/// is disconnected or the susceptance matrix is singular.
PtdfMatrix compute_ptdf(const std::vector<Line>& lines, int n_buses,
                        int reference_bus);

/// Equal-width blocks over [p_min, p_max]; block marginal is the quadratic
/// derivative 2a*P + b at the block midpoint.
CostCurve build_cost_curve(const Generator& gen, int n_blocks);

/// Returns human-readable violations; empty means the case is well formed.
std::vector<std::string> validate_case(const CaseSystem& sys);

}  // namespace rucmkt
