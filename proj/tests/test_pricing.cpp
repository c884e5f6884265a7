#include "doctest.h"

#include <cmath>

#include "rucmkt/ccg.hpp"
#include "rucmkt/pricing.hpp"
#include "test_support.hpp"

using namespace rucmkt;

namespace {

struct SolvedSixbus {
    CaseSystem sys;
    PtdfMatrix ptdf;
    CcgResult ccg;
    RedSolution red;
    PriceSet prices;
    ReserveQuantities reserves;
};

const SolvedSixbus& solved_sixbus() {
    static const SolvedSixbus fixture = [] {
        SolvedSixbus f;
        f.sys = rucmkt::test::load_sixbus();
        f.ptdf = compute_ptdf(f.sys.lines, f.sys.n_buses(), 0);
        f.ccg = run_ccg(f.sys);
        f.red = solve_red(f.sys, f.ptdf, f.ccg.commitment, f.ccg.extreme_points);
        f.prices = extract_prices(f.sys, f.ptdf, f.red.duals);
        f.reserves = compute_reserves(f.sys, f.ptdf, f.ccg.commitment,
                                      f.red.dispatch);
        return f;
    }();
    return fixture;
}

constexpr int kHour21 = 20;

}  // namespace

TEST_CASE("red: converged six-bus dispatch matches the published table") {
    const auto& f = solved_sixbus();
    CHECK(f.red.dispatch.p[0][kHour21] == doctest::Approx(195.19).epsilon(3e-4));
    CHECK(f.red.dispatch.p[1][kHour21] == doctest::Approx(25.58).epsilon(3e-4));
    CHECK(f.red.dispatch.p[2][kHour21] == doctest::Approx(16.54).epsilon(3e-4));
}

TEST_CASE("red: row counts follow the block structure") {
    const auto& f = solved_sixbus();
    const auto sys = rucmkt::test::truncate_case(f.sys, 4);
    const int t = sys.horizon, ng = sys.n_units(), nl = sys.n_lines();
    CommitmentSolution commitment;
    commitment.on.assign(ng, std::vector<std::uint8_t>(t, 1));
    commitment.startup.assign(ng, std::vector<std::uint8_t>(t, 0));
    commitment.shutdown.assign(ng, std::vector<std::uint8_t>(t, 0));
    for (int nk = 0; nk <= 2; ++nk) {
        std::vector<ExtremePoint> points(
            nk, ExtremePoint{std::vector<std::vector<double>>(
                    sys.n_buses(), std::vector<double>(t, 0.0))});
        BuiltModel red = build_red(sys, f.ptdf, commitment, points);
        // base: block links + balance + 2 caps + 2 ramps + 2 flows
        const int base_rows = ng * t + t + 2 * ng * t + 2 * ng * t + 2 * nl * t;
        const int k_rows = nk * t * (1 + 4 * ng + 2 * nl);
        CHECK(red.lp.n_rows() == base_rows + k_rows);
    }
}

TEST_CASE("prices: hour-21 LMPs match the published table") {
    const auto& f = solved_sixbus();
    const double expected[6] = {14.97, 32.64, 34.4, 43.71, 41.94, 35.26};
    for (int m = 0; m < 6; ++m)
        CHECK(std::abs(f.prices.lmp[m][kHour21] - expected[m]) <= 0.05);
}

TEST_CASE("prices: hour-21 UMPs match the published table") {
    const auto& f = solved_sixbus();
    const double up[6] = {14.87, 14.87, 16.63, 25.94, 24.17, 17.49};
    const double down[6] = {-17.67, 0, 0, 0, 0, 0};
    for (int m = 0; m < 6; ++m) {
        CHECK(std::abs(f.prices.ump_up[m][kHour21] - up[m]) <= 0.05);
        CHECK(std::abs(f.prices.ump_down[m][kHour21] - down[m]) <= 0.05);
    }
}

TEST_CASE("prices: no congestion collapses LMP to the system price") {
    auto sys = rucmkt::test::two_bus_case(3, 90.0, 5.0, /*line_cap=*/10000.0);
    sys.generators[0].ramp_unc_up = 3.0;  // force a nonempty extreme-point set
    sys.generators[0].ramp_unc_down = 3.0;
    Generator peaker = sys.generators[0];
    peaker.name = "peaker";
    peaker.bus = 1;
    peaker.p_min = 1;
    peaker.p_max = 40;
    peaker.p0 = 10;
    peaker.cost_b = 45.0;
    peaker.ramp_unc_up = peaker.ramp_unc_down = 10.0;
    sys.generators.push_back(peaker);
    const PtdfMatrix ptdf = compute_ptdf(sys.lines, sys.n_buses(), 0);
    const CcgResult ccg = run_ccg(sys);
    REQUIRE(!ccg.extreme_points.empty());
    const RedSolution red = solve_red(sys, ptdf, ccg.commitment, ccg.extreme_points);
    const PriceSet prices = extract_prices(sys, ptdf, red.duals);
    for (int t = 0; t < sys.horizon; ++t) {
        CHECK(prices.lmp[0][t] == doctest::Approx(red.duals.lambda[t]));
        CHECK(prices.lmp[1][t] == doctest::Approx(red.duals.lambda[t]));
        for (std::size_t k = 0; k < ccg.extreme_points.size(); ++k)
            CHECK(prices.ump_k[k][1][t] ==
                  doctest::Approx(red.duals.lambda_k[k][t]));
    }
}

TEST_CASE("prices: LMP decomposition against an independent recomputation") {
    const auto& f = solved_sixbus();
    const int nk = static_cast<int>(f.red.duals.lambda_k.size());
    for (int m = 0; m < f.sys.n_buses(); ++m)
        for (int t = 0; t < f.sys.horizon; ++t) {
            double congestion = 0.0;
            for (int l = 0; l < f.sys.n_lines(); ++l) {
                congestion -= f.ptdf.at(l, m) *
                              (f.red.duals.eta_pos[l][t] - f.red.duals.eta_neg[l][t]);
                for (int k = 0; k < nk; ++k)
                    congestion -= f.ptdf.at(l, m) * (f.red.duals.eta_pos_k[k][l][t] -
                                                     f.red.duals.eta_neg_k[k][l][t]);
            }
            CHECK(f.prices.lmp[m][t] - f.red.duals.lambda[t] ==
                  doctest::Approx(congestion).epsilon(1e-9));
        }
}

TEST_CASE("reserves: hour-21 quantities match the published table") {
    const auto& f = solved_sixbus();
    CHECK(f.reserves.q_up[0][kHour21] == doctest::Approx(24.0).epsilon(1e-6));
    CHECK(f.reserves.q_down[0][kHour21] == doctest::Approx(-24.0).epsilon(1e-6));
    CHECK(f.reserves.q_up[1][kHour21] == doctest::Approx(12.0).epsilon(1e-6));
    CHECK(f.reserves.q_down[1][kHour21] == doctest::Approx(-12.0).epsilon(1e-6));
    CHECK(std::abs(f.reserves.q_up[2][kHour21] - 3.46) <= 0.05);
    CHECK(f.reserves.q_down[2][kHour21] == doctest::Approx(-5.0).epsilon(1e-6));
}

TEST_CASE("reserves: line 2 keeps about 2.37 MW of positive headroom at hour 21") {
    // printed flow 97.63 on a 100 MW line; the paper's "2.47" does not match
    // its own flow figure, the difference is 2.37
    const auto& f = solved_sixbus();
    CHECK(std::abs(f.reserves.df_pos[1][kHour21] - 2.37) <= 0.05);
    CHECK(std::abs((100.0 - f.reserves.df_pos[1][kHour21]) - 97.63) <= 0.05);
}

TEST_CASE("reserves: zero injections leave the full line capacity") {
    auto sys = rucmkt::test::two_bus_case(2, 50.0, 0.0);
    sys.load.distribution = {1.0, 0.0};  // load co-located with the generator
    const PtdfMatrix ptdf = compute_ptdf(sys.lines, sys.n_buses(), 0);
    CommitmentSolution commitment;
    commitment.on = {{1, 1}};
    commitment.startup = {{0, 0}};
    commitment.shutdown = {{0, 0}};
    BaseDispatch dispatch;
    dispatch.p = {{50.0, 50.0}};
    const auto reserves = compute_reserves(sys, ptdf, commitment, dispatch);
    for (int t = 0; t < 2; ++t) {
        CHECK(reserves.df_pos[0][t] == doctest::Approx(sys.lines[0].capacity));
        CHECK(reserves.df_neg[0][t] == doctest::Approx(sys.lines[0].capacity));
    }
}

TEST_CASE("duals: lemma 1 sign consistency on the converged fixture") {
    const auto& f = solved_sixbus();
    for (std::size_t k = 0; k < f.ccg.extreme_points.size(); ++k)
        for (int m = 0; m < f.sys.n_buses(); ++m)
            for (int t = 0; t < f.sys.horizon; ++t) {
                const double eps = f.ccg.extreme_points[k].eps[m][t];
                const double ump = f.prices.ump_k[k][m][t];
                if (eps > 1e-9) CHECK(ump >= -1e-6);
                if (eps < -1e-9) CHECK(ump <= 1e-6);
            }
}

TEST_CASE("duals: lemma 2 binding and the per-unit price identity") {
    const auto& f = solved_sixbus();
    const auto& d = f.red.duals;
    for (std::size_t k = 0; k < f.ccg.extreme_points.size(); ++k)
        for (int i = 0; i < f.sys.n_units(); ++i) {
            const int m = f.sys.generators[i].bus;
            for (int t = 0; t < f.sys.horizon; ++t) {
                if (!f.ccg.commitment.on[i][t]) continue;
                const double identity = d.beta_up_k[k][i][t] - d.beta_lo_k[k][i][t] +
                                        d.alpha_up_k[k][i][t] -
                                        d.alpha_dn_k[k][i][t];
                CHECK(std::abs(f.prices.ump_k[k][m][t] - identity) <= 1e-6);
                const double delta = f.red.recourse.delta_p[k][i][t];
                if (f.prices.ump_k[k][m][t] > 1e-6)
                    CHECK(delta == doctest::Approx(f.reserves.q_up[i][t])
                                       .epsilon(1e-6));
                if (f.prices.ump_k[k][m][t] < -1e-6)
                    CHECK(delta == doctest::Approx(f.reserves.q_down[i][t])
                                       .epsilon(1e-6));
            }
        }
}

TEST_CASE("duals: stationarity residual vanishes") {
    const auto& f = solved_sixbus();
    CHECK(kkt_stationarity_residual(f.sys, f.ptdf, f.red.duals) <= 1e-6);
}

TEST_CASE("prices: finite-difference re-solve agrees away from degeneracy") {
    // single-bus case: LMP equals the marginal block cost, no multiplicity
    auto sys = rucmkt::test::single_bus_case(2, 100.0, 0.0);
    const CcgResult ccg = run_ccg(sys);
    const PtdfMatrix ptdf;
    const RedSolution red = solve_red(sys, ptdf, ccg.commitment, ccg.extreme_points);
    const PriceSet prices = extract_prices(sys, ptdf, red.duals);
    const double fd = lmp_finite_difference(sys, ptdf, ccg.commitment,
                                            ccg.extreme_points, 0, 1, 0.1);
    CHECK(std::abs(fd - prices.lmp[0][1]) <= 1e-3);
}

TEST_CASE("traditional: reserve prices priced off the requirement rows") {
    // no-network comparison at Lambda = 0.8 (zonal equivalence)
    auto sys = rucmkt::test::load_sixbus();
    sys.uncertainty.lambda = 0.8;
    ModelOptions opts;
    opts.include_network = false;

    CcgOptions ccg_opts;
    ccg_opts.model = opts;
    const CcgResult robust = run_ccg(sys, ccg_opts);
    const PtdfMatrix no_ptdf;
    const RedSolution red =
        solve_red(sys, no_ptdf, robust.commitment, robust.extreme_points, opts);
    const PriceSet prices = extract_prices(sys, no_ptdf, red.duals);

    const auto req_up = implied_reserve_requirement(sys, false);
    auto req_down = req_up;
    for (double& v : req_down) v = -v;
    const TraditionalPricing trad =
        solve_traditional(sys, no_ptdf, req_up, req_down, opts);

    CHECK(std::abs(trad.objective - robust.objective) <=
          1e-4 * std::abs(robust.objective));
    for (int t = 0; t < sys.horizon; ++t) {
        CHECK(std::abs(prices.ump_up[0][t] - trad.price_up[t]) <= 0.01);
        CHECK(std::abs(prices.ump_down[0][t] - trad.price_down[t]) <= 0.01);
        CHECK(std::abs(prices.lmp[0][t] - trad.lambda[t]) <= 0.01);
    }
}
