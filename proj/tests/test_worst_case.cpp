#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "rucmkt/ccg.hpp"
#include "rucmkt/lp.hpp"
#include "rucmkt/worst_case.hpp"
#include "test_support.hpp"

using namespace rucmkt;

namespace {

bool contains_vertex(const std::vector<std::vector<double>>& vertices,
                     const std::vector<double>& v, double tol = 1e-9) {
    for (const auto& cand : vertices) {
        bool same = cand.size() == v.size();
        for (std::size_t m = 0; same && m < v.size(); ++m)
            same = std::abs(cand[m] - v[m]) <= tol;
        if (same) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("vertices: six-bus hour 21 contains the paper's extreme points") {
    const auto sys = test::load_sixbus();
    const auto vertices = enumerate_vertices(sys.uncertainty, 20);
    CHECK(vertices.size() == 4);  // both buses at +-u
    std::vector<double> k1(6, 0.0), k2(6, 0.0);
    k1[0] = 31.15;
    k1[2] = 8.31;
    k2[0] = -31.15;
    k2[2] = 8.31;
    CHECK(contains_vertex(vertices, k1));
    CHECK(contains_vertex(vertices, k2));
}

TEST_CASE("vertices: zero budget collapses to the origin") {
    auto sys = test::load_sixbus();
    sys.uncertainty.lambda_budget = 0.0;
    const auto vertices = enumerate_vertices(sys.uncertainty, 5);
    REQUIRE(vertices.size() == 1);
    for (double v : vertices[0]) CHECK(v == 0.0);
}

TEST_CASE("vertices: Lambda=0.8 pair matches the half-plane oracle") {
    auto sys = test::load_sixbus();
    sys.uncertainty.lambda = 0.8;
    sys.uncertainty.lambda_budget = 2.0;
    for (const auto norm :
         {BudgetNormalization::ByBound, BudgetNormalization::ByEffectiveBound}) {
        sys.uncertainty.normalization = norm;
        const auto got = enumerate_vertices(sys.uncertainty, 20);
        const auto expect = test::vertex_oracle_2d(sys.uncertainty, 20);
        CHECK(got.size() == expect.size());
        for (const auto& v : expect) CHECK(contains_vertex(got, v, 1e-7));
    }
}

TEST_CASE("vertices: binding budget produces residual coordinates") {
    UncertaintySpec unc;
    unc.bound = {{10.0}, {10.0}, {10.0}};
    unc.lambda = 1.0;
    unc.lambda_budget = 1.5;  // support of one at 1.0 plus residual 0.5
    const auto vertices = enumerate_vertices(unc, 0);
    // 3 supports x 2 residual choices x 4 sign patterns
    CHECK(vertices.size() == 24);
    CHECK(contains_vertex(vertices, {10.0, 5.0, 0.0}));
    CHECK(contains_vertex(vertices, {-10.0, 0.0, 5.0}));
    for (const auto& v : vertices) {
        double norm1 = 0.0;
        for (double x : v) norm1 += std::abs(x) / 10.0;
        CHECK(norm1 == doctest::Approx(1.5));
    }
}

TEST_CASE("recourse: zero deviation is always accommodated") {
    const auto sys = test::load_sixbus();
    const PtdfMatrix ptdf = compute_ptdf(sys.lines, sys.n_buses(), 0);
    BuiltModel master = build_master(sys, ptdf, {});
    const SolveResult res = solve_milp(master.lp);
    REQUIRE(res.optimal());
    const auto commitment = extract_commitment(sys, master, res);
    const auto dispatch = extract_base_dispatch(sys, master, res);
    const std::vector<double> eps(sys.n_buses(), 0.0);
    for (int t = 0; t < sys.horizon; t += 5)
        CHECK(recourse_feasibility(sys, ptdf, commitment, dispatch, t, eps) ==
              doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("recourse: no upward headroom leaves the full deviation unserved") {
    auto sys = test::single_bus_case(2, 200.0, 0.0);  // unit pinned at p_max
    sys.generators[0].p0 = 200.0;
    CommitmentSolution commitment;
    commitment.on = {{1, 1}};
    commitment.startup = {{0, 0}};
    commitment.shutdown = {{0, 0}};
    BaseDispatch dispatch;
    dispatch.p = {{200.0, 200.0}};
    const std::vector<double> eps{7.5};
    const double viol = recourse_feasibility(sys, PtdfMatrix{}, commitment,
                                             dispatch, 0, eps);
    CHECK(viol == doctest::Approx(7.5));
}

TEST_CASE("find_worst: first six-bus iteration returns the Table-VI point") {
    const auto sys = test::load_sixbus();
    const PtdfMatrix ptdf = compute_ptdf(sys.lines, sys.n_buses(), 0);
    BuiltModel master = build_master(sys, ptdf, {});
    const SolveResult res = solve_milp(master.lp);
    REQUIRE(res.optimal());
    const auto commitment = extract_commitment(sys, master, res);
    const auto dispatch = extract_base_dispatch(sys, master, res);
    const ViolationReport report = find_worst(sys, ptdf, commitment, dispatch);
    CHECK(report.total > 0.0);
    CHECK(report.per_hour[20].eps[0] == doctest::Approx(31.15));
    CHECK(report.per_hour[20].eps[2] == doctest::Approx(8.31));
}

TEST_CASE("find_worst: enumeration equals a dense grid scan on a 1-D set") {
    // 2-bus toy, one generator, uncertainty only at the load bus
    auto sys = test::two_bus_case(2, 100.0, 20.0);
    sys.generators[0].ramp_unc_up = 12.0;  // tighter than the bound
    sys.generators[0].ramp_unc_down = 15.0;
    CommitmentSolution commitment;
    commitment.on = {{1, 1}};
    commitment.startup = {{0, 0}};
    commitment.shutdown = {{0, 0}};
    BaseDispatch dispatch;
    dispatch.p = {{100.0, 100.0}};
    const PtdfMatrix ptdf = compute_ptdf(sys.lines, sys.n_buses(), 0);

    const ViolationReport report = find_worst(sys, ptdf, commitment, dispatch);
    double grid_max = 0.0;
    const double u = 20.0;
    for (int step = -100; step <= 100; ++step) {
        const std::vector<double> eps{0.0, u * step / 100.0};
        grid_max = std::max(grid_max, recourse_feasibility(sys, ptdf, commitment,
                                                           dispatch, 0, eps));
    }
    CHECK(report.per_hour[0].violation == doctest::Approx(grid_max).epsilon(1e-6));
    CHECK(grid_max == doctest::Approx(20.0 - 12.0));  // bound minus up headroom
}

TEST_CASE("find_worst: vertex attainment on random interior samples") {
    const auto sys = test::load_sixbus();
    const PtdfMatrix ptdf = compute_ptdf(sys.lines, sys.n_buses(), 0);
    BuiltModel master = build_master(sys, ptdf, {});
    const SolveResult res = solve_milp(master.lp);
    REQUIRE(res.optimal());
    const auto commitment = extract_commitment(sys, master, res);
    const auto dispatch = extract_base_dispatch(sys, master, res);
    const ViolationReport report = find_worst(sys, ptdf, commitment, dispatch);

    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u01(-1.0, 1.0);
    const int t = 20;
    for (int draw = 0; draw < 40; ++draw) {
        std::vector<double> z(sys.n_buses(), 0.0);
        double norm1 = 0.0;
        for (int m = 0; m < sys.n_buses(); ++m)
            if (sys.uncertainty.bound[m][t] > 0) {
                z[m] = u01(rng) * sys.uncertainty.lambda;
                norm1 += std::abs(z[m]) / sys.uncertainty.lambda;
            }
        if (norm1 > sys.uncertainty.lambda_budget)
            for (double& v : z) v *= sys.uncertainty.lambda_budget / norm1;
        std::vector<double> eps(sys.n_buses(), 0.0);
        for (int m = 0; m < sys.n_buses(); ++m)
            eps[m] = z[m] * sys.uncertainty.bound[m][t];
        const double viol =
            recourse_feasibility(sys, ptdf, commitment, dispatch, t, eps);
        CHECK(viol <= report.per_hour[t].violation + 1e-7);
    }
}

TEST_CASE("find_worst: per-hour maxima are independent across hours") {
    const auto sys = test::load_sixbus();
    const PtdfMatrix ptdf = compute_ptdf(sys.lines, sys.n_buses(), 0);
    BuiltModel master = build_master(sys, ptdf, {});
    const SolveResult res = solve_milp(master.lp);
    REQUIRE(res.optimal());
    const auto commitment = extract_commitment(sys, master, res);
    const auto dispatch = extract_base_dispatch(sys, master, res);
    const ViolationReport report = find_worst(sys, ptdf, commitment, dispatch);
    double sum = 0.0;
    for (const auto& hw : report.per_hour) sum += hw.violation;
    CHECK(report.total == doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("find_worst: sign-symmetric system sees symmetric violations") {
    // one generator mid-range with symmetric headroom shortfall
    auto sys = test::single_bus_case(1, 100.0, 25.0, /*ramp_unc=*/10.0);
    CommitmentSolution commitment;
    commitment.on = {{1}};
    commitment.startup = {{0}};
    commitment.shutdown = {{0}};
    BaseDispatch dispatch;
    dispatch.p = {{100.0}};
    const std::vector<double> up{25.0}, down{-25.0};
    const double v_up =
        recourse_feasibility(sys, PtdfMatrix{}, commitment, dispatch, 0, up);
    const double v_dn =
        recourse_feasibility(sys, PtdfMatrix{}, commitment, dispatch, 0, down);
    CHECK(v_up == doctest::Approx(15.0));
    CHECK(v_dn == doctest::Approx(v_up));
}
