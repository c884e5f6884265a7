#include "doctest.h"

#include <cmath>
#include <numeric>

#include "rucmkt/ccg.hpp"
#include "rucmkt/lp.hpp"
#include "rucmkt/pricing.hpp"
#include "rucmkt/uc_model.hpp"
#include "test_support.hpp"

using namespace rucmkt;

namespace {

ExtremePoint zero_point(const CaseSystem& sys) {
    ExtremePoint pt;
    pt.eps.assign(sys.n_buses(), std::vector<double>(sys.horizon, 0.0));
    return pt;
}

}  // namespace

TEST_CASE("master: deterministic six-bus commits all three units at hour 21") {
    const auto sys = test::load_sixbus();
    const PtdfMatrix ptdf = compute_ptdf(sys.lines, sys.n_buses(), 0);
    BuiltModel master = build_master(sys, ptdf, {});
    const SolveResult res = solve_milp(master.lp);
    REQUIRE(res.optimal());
    const auto commitment = extract_commitment(sys, master, res);
    for (int i = 0; i < 3; ++i) CHECK(commitment.on[i][20] == 1);
}

TEST_CASE("master: one extreme point adds exactly the recourse block") {
    const auto sys = test::truncate_case(test::load_sixbus(), 6);
    const PtdfMatrix ptdf = compute_ptdf(sys.lines, sys.n_buses(), 0);
    BuiltModel base = build_master(sys, ptdf, {});
    std::vector<ExtremePoint> k{zero_point(sys)};
    BuiltModel with_k = build_master(sys, ptdf, k);
    const int t = sys.horizon, ng = sys.n_units(), nl = sys.n_lines();
    // (28a) + (28b)x2 + (28c) + (28d) per unit + (28e) both directions
    const int expected_rows = t * (1 + 4 * ng + 2 * nl);
    CHECK(with_k.lp.n_rows() - base.lp.n_rows() == expected_rows);
    CHECK(with_k.lp.n_variables() - base.lp.n_variables() == ng * t);
}

TEST_CASE("master: objective nondecreasing in the extreme-point set") {
    const auto sys = test::truncate_case(test::load_sixbus(), 6);
    const PtdfMatrix ptdf = compute_ptdf(sys.lines, sys.n_buses(), 0);
    std::vector<ExtremePoint> points;
    double prev = -1e30;
    for (int n = 0; n <= 2; ++n) {
        BuiltModel m = build_master(sys, ptdf, points);
        const SolveResult res = solve_milp(m.lp);
        REQUIRE(res.optimal());
        CHECK(res.objective >= prev - 1e-6);
        prev = res.objective;
        // grow K with a scaled copy of the bound profile
        ExtremePoint pt = zero_point(sys);
        for (int m2 = 0; m2 < sys.n_buses(); ++m2)
            for (int t = 0; t < sys.horizon; ++t)
                pt.eps[m2][t] = 0.4 * (n + 1) * sys.uncertainty.bound[m2][t];
        points.push_back(std::move(pt));
    }
}

TEST_CASE("master: commitment logic holds on the solved fixture") {
    const auto sys = test::load_sixbus();
    const PtdfMatrix ptdf = compute_ptdf(sys.lines, sys.n_buses(), 0);
    BuiltModel master = build_master(sys, ptdf, {});
    const SolveResult res = solve_milp(master.lp);
    REQUIRE(res.optimal());
    const auto c = extract_commitment(sys, master, res);
    for (int i = 0; i < sys.n_units(); ++i) {
        const auto& g = sys.generators[i];
        int prev = g.initially_on() ? 1 : 0;
        for (int t = 0; t < sys.horizon; ++t) {
            CHECK(c.on[i][t] - prev == c.startup[i][t] - c.shutdown[i][t]);
            CHECK(c.startup[i][t] + c.shutdown[i][t] <= 1);
            prev = c.on[i][t];
        }
        // min up/down windows
        for (int t = 0; t < sys.horizon; ++t) {
            int ups = 0, downs = 0;
            for (int tau = std::max(0, t - g.min_on + 1); tau <= t; ++tau)
                ups += c.startup[i][tau];
            for (int tau = std::max(0, t - g.min_off + 1); tau <= t; ++tau)
                downs += c.shutdown[i][tau];
            CHECK(ups <= c.on[i][t]);
            CHECK(downs <= 1 - c.on[i][t]);
        }
    }
}

TEST_CASE("master: initial on/off durations are forced") {
    auto sys = test::single_bus_case(4, 50.0, 0.0);
    // expensive unit that must stay on 3 more hours (t0=1 of min_on=4)
    sys.generators[0].min_on = 4;
    sys.generators[0].min_off = 2;
    sys.generators[0].t0 = 1;
    sys.generators[0].p0 = sys.generators[0].p_min;
    // cheap second unit able to carry the load alone
    Generator cheap = sys.generators[0];
    cheap.name = "cheap";
    cheap.cost_b = 1.0;
    cheap.min_on = cheap.min_off = 1;
    cheap.t0 = 5;
    cheap.p0 = 50;
    sys.generators.push_back(cheap);
    const PtdfMatrix ptdf;  // no lines
    BuiltModel master = build_master(sys, ptdf, {});
    const SolveResult res = solve_milp(master.lp);
    REQUIRE(res.optimal());
    const auto c = extract_commitment(sys, master, res);
    CHECK(c.on[0][0] == 1);
    CHECK(c.on[0][1] == 1);
    CHECK(c.on[0][2] == 1);
}

TEST_CASE("master: storage round trip is neutral at unit efficiency") {
    auto sys = test::single_bus_case(6, 40.0, 0.0);
    // peaky load so arbitrage is attractive
    sys.load.base_load = {20, 20, 60, 80, 40, 20};
    sys.generators[0].p_max = 70;  // storage needed at the peak
    StorageDevice dev;
    dev.name = "ess";
    dev.bus = 0;
    dev.e_max = 40;
    dev.e0 = 20;
    dev.rate_discharge = 15;
    dev.rate_charge = 15;
    sys.storages = {dev};
    BuiltModel master = build_master(sys, PtdfMatrix{}, {});
    const SolveResult res = solve_milp(master.lp);
    REQUIRE(res.optimal());
    const auto dispatch = extract_base_dispatch(sys, master, res);
    const auto& sch = dispatch.storage[0];
    double net = 0.0;
    for (int t = 0; t < sys.horizon; ++t) {
        net += sch.discharge[t] + sch.charge[t];
        CHECK(sch.mode_discharge[t] + sch.mode_charge[t] <= 1);
        CHECK(sch.energy[t] >= -1e-7);
        CHECK(sch.energy[t] <= dev.e_max + 1e-7);
    }
    CHECK(net == doctest::Approx(0.0).epsilon(1e-7));
    CHECK(sch.energy[sys.horizon - 1] == doctest::Approx(dev.e0));
    // the peak hour actually uses the device
    CHECK(sch.discharge[3] < -1e-6);
}

TEST_CASE("traditional: zero requirements reduce to the deterministic UC") {
    const auto sys = test::truncate_case(test::load_sixbus(), 8);
    const PtdfMatrix ptdf = compute_ptdf(sys.lines, sys.n_buses(), 0);
    const std::vector<double> zeros(sys.horizon, 0.0);
    BuiltModel det = build_master(sys, ptdf, {});
    BuiltModel trad = build_traditional_uc(sys, ptdf, zeros, zeros);
    const SolveResult a = solve_milp(det.lp);
    const SolveResult b = solve_milp(trad.lp);
    REQUIRE(a.optimal());
    REQUIRE(b.optimal());
    CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-9));
}

TEST_CASE("traditional: unmeetable upward requirement is infeasible") {
    auto sys = test::single_bus_case(3, 50.0, 0.0);
    const double over = sys.generators[0].ramp_up + 1.0;
    const std::vector<double> req_up(sys.horizon, over);
    const std::vector<double> req_down(sys.horizon, 0.0);
    BuiltModel trad = build_traditional_uc(sys, PtdfMatrix{}, req_up, req_down);
    CHECK(solve_milp(trad.lp).status == SolveStatus::Infeasible);
}

TEST_CASE("build rejects an invalid case") {
    auto sys = test::load_sixbus();
    sys.load.distribution[3] = 0.7;  // breaks the sum-to-one invariant
    const PtdfMatrix ptdf;
    CHECK_THROWS_AS((void)build_master(sys, ptdf, {}), std::invalid_argument);
}

TEST_CASE("red: commitment cost offset makes objectives comparable") {
    const auto sys = test::truncate_case(test::load_sixbus(), 6);
    const PtdfMatrix ptdf = compute_ptdf(sys.lines, sys.n_buses(), 0);
    BuiltModel master = build_master(sys, ptdf, {});
    const SolveResult res = solve_milp(master.lp);
    REQUIRE(res.optimal());
    const auto commitment = extract_commitment(sys, master, res);
    BuiltModel red = build_red(sys, ptdf, commitment, {});
    const SolveResult red_res = solve_lp(red.lp);
    REQUIRE(red_res.optimal());
    CHECK(red_res.objective == doctest::Approx(res.objective).epsilon(1e-7));
}
