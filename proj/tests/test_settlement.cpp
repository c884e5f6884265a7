#include "doctest.h"

#include <cmath>
#include <random>

#include "rucmkt/ccg.hpp"
#include "rucmkt/pipeline.hpp"
#include "rucmkt/settlement.hpp"
#include "test_support.hpp"

using namespace rucmkt;

namespace {

const SolveArtifacts& solved_sixbus() {
    static const SolveArtifacts fixture =
        run_robust_pipeline(rucmkt::test::load_sixbus(), ModelOptions{}, 1e-4);
    return fixture;
}

constexpr int kHour21 = 20;

PriceSet table_prices_hour21() {
    // synthetic single-hour price set with the published hour-21 figures
    PriceSet p;
    p.lmp = {{14.97}, {32.64}, {34.4}, {43.71}, {41.94}, {35.26}};
    p.ump_k = {{{14.87}, {0}, {14.87}, {0}, {0}, {0}},
               {{-17.67}, {0}, {1.77}, {0}, {0}, {0}}};
    p.ump_up = {{14.87}, {0}, {16.64}, {0}, {0}, {0}};
    p.ump_down = {{-17.67}, {0}, {0}, {0}, {0}, {0}};
    return p;
}

}  // namespace

TEST_CASE("uncertainty charge: table arithmetic reproduces $1013.62 at bus 1") {
    const PriceSet prices = table_prices_hour21();
    std::vector<ExtremePoint> k(2);
    k[0].eps = {{31.15}, {0}, {8.31}, {0}, {0}, {0}};
    k[1].eps = {{-31.15}, {0}, {8.31}, {0}, {0}, {0}};
    const auto psi = uncertainty_charge(prices, k);
    CHECK(psi[0][0] == doctest::Approx(14.87 * 31.15 + 17.67 * 31.15));
    CHECK(psi[0][0] == doctest::Approx(1013.62).epsilon(1e-4));
    CHECK(psi[2][0] == doctest::Approx(14.87 * 8.31 + 1.77 * 8.31));
}

TEST_CASE("uncertainty charge: certain buses pay nothing") {
    const auto& f = solved_sixbus();
    const auto psi =
        uncertainty_charge(f.prices, f.ccg.extreme_points);
    for (const int m : {1, 3, 4, 5})
        for (int t = 0; t < f.sys.horizon; ++t)
            CHECK(psi[m][t] == doctest::Approx(0.0));
}

TEST_CASE("uncertainty charge: zero prices mean zero charges") {
    PriceSet zero = table_prices_hour21();
    for (auto& k : zero.ump_k)
        for (auto& row : k) row.assign(1, 0.0);
    std::vector<ExtremePoint> k(2);
    k[0].eps = {{31.15}, {0}, {8.31}, {0}, {0}, {0}};
    k[1].eps = {{-31.15}, {0}, {8.31}, {0}, {0}, {0}};
    const auto psi = uncertainty_charge(zero, k);
    for (const auto& row : psi)
        for (double v : row) CHECK(v == 0.0);
}

TEST_CASE("uncertainty charge: budget form agrees with the per-point form") {
    const auto& f = solved_sixbus();
    const auto psi = uncertainty_charge(f.prices, f.ccg.extreme_points);
    const auto psi_budget = uncertainty_charge_budget_form(f.sys, f.prices);
    for (int m = 0; m < f.sys.n_buses(); ++m)
        for (int t = 0; t < f.sys.horizon; ++t)
            CHECK(psi[m][t] == doctest::Approx(psi_budget[m][t]).epsilon(1e-9));
}

TEST_CASE("reserve credit: G1 earns $780.96 at hour 21 on table data") {
    const PriceSet prices = table_prices_hour21();
    ReserveQuantities reserves;
    reserves.q_up = {{24}, {12}, {3.46}};
    reserves.q_down = {{-24}, {-12}, {-5}};
    reserves.df_pos = reserves.df_neg = {};
    CaseSystem sys = rucmkt::test::load_sixbus();
    sys.horizon = 1;
    const auto credit = reserve_credit(sys, prices, reserves);
    CHECK(credit[0][0] == doctest::Approx(14.87 * 24 + 17.67 * 24));
    CHECK(credit[0][0] == doctest::Approx(780.96).epsilon(1e-4));
}

TEST_CASE("reserve credit: offline units and zero prices earn nothing") {
    const auto& f = solved_sixbus();
    for (int i = 0; i < f.sys.n_units(); ++i)
        for (int t = 0; t < f.sys.horizon; ++t)
            if (!f.ccg.commitment.on[i][t]) {
                CHECK(f.reserves.q_up[i][t] == doctest::Approx(0.0));
                CHECK(f.ledger.theta_g[i][t] == doctest::Approx(0.0));
            }
    const int m = 1;  // bus 2 carries no uncertainty prices at many hours
    for (int t = 0; t < f.sys.horizon; ++t)
        if (f.prices.ump_up[m][t] == 0.0 && f.prices.ump_down[m][t] == 0.0)
            CHECK(f.ledger.theta_g[1][t] == doctest::Approx(0.0));
}

TEST_CASE("reserve credit: per-point route matches the aggregated route") {
    const auto& f = solved_sixbus();
    CHECK(f.ledger.eq14_eq18_max_gap <= 0.01);
}

TEST_CASE("transmission credit: zero-dual lines earn nothing") {
    const auto& f = solved_sixbus();
    const auto& d = f.red.duals;
    for (int l = 0; l < f.sys.n_lines(); ++l)
        for (int t = 0; t < f.sys.horizon; ++t) {
            double eta = 0.0;
            for (std::size_t k = 0; k < d.eta_pos_k.size(); ++k)
                eta += d.eta_pos_k[k][l][t] + d.eta_neg_k[k][l][t];
            if (eta == 0.0) CHECK(f.ledger.theta_t[l][t] == doctest::Approx(0.0));
        }
}

TEST_CASE("transmission credit: $131.90 at hour 21 on the six-bus system") {
    const auto& f = solved_sixbus();
    double theta_t_h21 = 0.0;
    for (int l = 0; l < f.sys.n_lines(); ++l)
        theta_t_h21 += f.ledger.theta_t[l][kHour21];
    CHECK(std::abs(theta_t_h21 - 131.90) <= 0.5);
}

TEST_CASE("energy settlement: hour-21 congestion cost is $5,422.87") {
    const auto& f = solved_sixbus();
    CHECK(std::abs(f.ledger.energy.congestion_cost[kHour21] - 5422.87) <= 0.5);
}

TEST_CASE("energy settlement: uniform prices collect no congestion rent") {
    const auto& f = solved_sixbus();
    PriceSet flat = f.prices;
    for (auto& row : flat.lmp)
        for (double& v : row) v = 25.0;
    const auto energy = energy_settlement(flat, f.sys, f.red.dispatch);
    for (int t = 0; t < f.sys.horizon; ++t)
        CHECK(energy.congestion_cost[t] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("energy settlement: single bus pays exactly what generators earn") {
    auto sys = rucmkt::test::single_bus_case(3, 80.0, 0.0);
    const auto artifacts = run_robust_pipeline(sys, ModelOptions{}, 1e-4);
    for (int t = 0; t < sys.horizon; ++t)
        CHECK(artifacts.ledger.energy.load_payment[t] ==
              doctest::Approx(artifacts.ledger.energy.energy_credit[t]));
}

TEST_CASE("ftr: the published §III-A3 portfolio clears the SFT") {
    const auto& f = solved_sixbus();
    const FtrPortfolio portfolio =
        load_ftr(rucmkt::test::data_dir() + "/sixbus_ftr.json", 6);
    const FtrResult ftr = ftr_check_and_credit(portfolio, f.sys, f.ptdf, f.prices);
    CHECK(ftr.sft_ok);
    CHECK(std::abs(ftr.credit[kHour21] - 5554.77) <= 0.5);
}

TEST_CASE("ftr: zero portfolio earns zero credit") {
    const auto& f = solved_sixbus();
    FtrPortfolio zero;
    zero.injection.assign(6, 0.0);
    const FtrResult ftr = ftr_check_and_credit(zero, f.sys, f.ptdf, f.prices);
    CHECK(ftr.sft_ok);
    CHECK(ftr.total_credit == doctest::Approx(0.0));
}

TEST_CASE("ftr: unbalanced portfolios are rejected") {
    const auto& f = solved_sixbus();
    FtrPortfolio bad;
    bad.injection = {10, 0, 0, 0, 0, 0};
    CHECK_THROWS_AS(
        (void)ftr_check_and_credit(bad, f.sys, f.ptdf, f.prices),
        std::invalid_argument);
}

TEST_CASE("ftr: pairwise rights net to balanced injections") {
    const std::vector<std::tuple<int, int, double>> rights{
        {0, 3, 100.0}, {1, 4, 50.0}, {0, 4, 25.0}};
    const FtrPortfolio p = portfolio_from_rights(6, rights);
    CHECK(p.injection[0] == doctest::Approx(125.0));
    CHECK(p.injection[3] == doctest::Approx(-100.0));
    CHECK(p.injection[4] == doctest::Approx(-75.0));
    double net = 0.0;
    for (double v : p.injection) net += v;
    CHECK(net == doctest::Approx(0.0));
}

TEST_CASE("adequacy: hour-21 underfunding of $131.90 is covered exactly") {
    const auto& f = solved_sixbus();
    const FtrPortfolio portfolio =
        load_ftr(rucmkt::test::data_dir() + "/sixbus_ftr.json", 6);
    const FtrResult ftr = ftr_check_and_credit(portfolio, f.sys, f.ptdf, f.prices);
    const double underfunding =
        ftr.credit[kHour21] - f.ledger.energy.congestion_cost[kHour21];
    CHECK(std::abs(underfunding - 131.90) <= 0.5);
    double theta_t_h21 = 0.0;
    for (int l = 0; l < f.sys.n_lines(); ++l)
        theta_t_h21 += f.ledger.theta_t[l][kHour21];
    CHECK(std::abs(underfunding - theta_t_h21) <= 0.01);
}

TEST_CASE("adequacy: theorem 2 identity on the six-bus system") {
    const auto& f = solved_sixbus();
    const AdequacyReport rep = revenue_adequacy_report(f.ledger);
    CHECK(rep.theorem2_ok);
    CHECK(rep.eq14_matches_eq18);
    CHECK(rep.overall_adequacy_ok);
    CHECK(std::abs(rep.identity_gap) <=
          1e-6 * std::max(1.0, std::abs(rep.psi_total)));
    // per-hour version of the identity
    for (int t = 0; t < f.sys.horizon; ++t) {
        double psi = 0.0, theta = 0.0;
        for (int m = 0; m < f.sys.n_buses(); ++m) psi += f.ledger.psi[m][t];
        for (int i = 0; i < f.sys.n_units(); ++i) theta += f.ledger.theta_g[i][t];
        for (int l = 0; l < f.sys.n_lines(); ++l) theta += f.ledger.theta_t[l][t];
        CHECK(std::abs(psi - theta) <= money_tolerance(std::abs(psi)));
    }
}

TEST_CASE("adequacy: zero uncertainty settles trivially") {
    auto sys = rucmkt::test::load_sixbus();
    for (auto& row : sys.uncertainty.bound)
        std::fill(row.begin(), row.end(), 0.0);
    const auto artifacts = run_robust_pipeline(sys, ModelOptions{}, 1e-4);
    const AdequacyReport rep = revenue_adequacy_report(artifacts.ledger);
    CHECK(rep.psi_total == doctest::Approx(0.0));
    CHECK(rep.theta_g_total == doctest::Approx(0.0));
    CHECK(rep.theta_t_total == doctest::Approx(0.0));
    CHECK(rep.theorem2_ok);
}

TEST_CASE("adequacy: identity holds on seeded random systems (smoke)") {
    for (unsigned seed = 1; seed <= 10; ++seed) {
        const CaseSystem sys = rucmkt::test::random_small_case(seed);
        REQUIRE(validate_case(sys).empty());
        const auto artifacts = run_robust_pipeline(sys, ModelOptions{}, 1e-4);
        const AdequacyReport rep = revenue_adequacy_report(artifacts.ledger);
        INFO("seed ", seed, " gap ", rep.identity_gap);
        CHECK(rep.theorem2_ok);
        CHECK(rep.overall_adequacy_ok);
    }
}

TEST_CASE("adequacy: theorem 1 bound for random SFT-feasible portfolios") {
    const auto& f = solved_sixbus();
    std::mt19937 rng(2024);
    std::normal_distribution<double> gauss(0.0, 60.0);
    for (int trial = 0; trial < 25; ++trial) {
        FtrPortfolio p;
        p.injection.resize(6);
        double mean = 0.0;
        for (double& v : p.injection) {
            v = gauss(rng);
            mean += v / 6.0;
        }
        for (double& v : p.injection) v -= mean;
        // project into the SFT region by scaling
        double scale = 1.0;
        for (int l = 0; l < f.sys.n_lines(); ++l) {
            double flow = 0.0;
            for (int m = 0; m < 6; ++m) flow += f.ptdf.at(l, m) * p.injection[m];
            if (std::abs(flow) > f.sys.lines[l].capacity)
                scale = std::min(scale, f.sys.lines[l].capacity / std::abs(flow));
        }
        for (double& v : p.injection) v *= 0.99 * scale;
        const FtrResult ftr = ftr_check_and_credit(p, f.sys, f.ptdf, f.prices);
        REQUIRE(ftr.sft_ok);
        for (int t = 0; t < f.sys.horizon; ++t) {
            double theta_t = 0.0;
            for (int l = 0; l < f.sys.n_lines(); ++l)
                theta_t += f.ledger.theta_t[l][t];
            const double underfunding =
                ftr.credit[t] - f.ledger.energy.congestion_cost[t];
            CHECK(underfunding <= theta_t + 0.01);
        }
    }
}
