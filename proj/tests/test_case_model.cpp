#include "doctest.h"

#include <cmath>
#include <random>

#include "rucmkt/case.hpp"
#include "rucmkt/json_io.hpp"
#include "test_support.hpp"

using namespace rucmkt;
using test::load_sixbus;

TEST_CASE("ptdf: two buses, one line") {
    const std::vector<Line> lines{{0, 1, 0.1, 50.0}};
    const PtdfMatrix ptdf = compute_ptdf(lines, 2, 1);
    CHECK(ptdf.at(0, 0) == doctest::Approx(1.0));
    CHECK(ptdf.at(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("ptdf: reference column is zero") {
    const auto sys = load_sixbus();
    for (int ref = 0; ref < sys.n_buses(); ++ref) {
        const PtdfMatrix ptdf = compute_ptdf(sys.lines, sys.n_buses(), ref);
        for (int l = 0; l < sys.n_lines(); ++l)
            CHECK(ptdf.at(l, ref) == doctest::Approx(0.0));
    }
}

TEST_CASE("ptdf: six-bus matches the dense pseudo-inverse oracle") {
    const auto sys = load_sixbus();
    const PtdfMatrix ptdf = compute_ptdf(sys.lines, sys.n_buses(), 0);
    const PtdfMatrix oracle =
        test::ptdf_pseudo_inverse_oracle(sys.lines, sys.n_buses(), 0);
    for (int l = 0; l < sys.n_lines(); ++l)
        for (int m = 0; m < sys.n_buses(); ++m)
            CHECK(ptdf.at(l, m) == doctest::Approx(oracle.at(l, m)).epsilon(1e-9));
}

TEST_CASE("ptdf: flows of balanced injections are reference-invariant") {
    const auto sys = load_sixbus();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-50.0, 50.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> inj(sys.n_buses());
        double sum = 0.0;
        for (double& v : inj) {
            v = dist(rng);
            sum += v;
        }
        for (double& v : inj) v -= sum / sys.n_buses();
        std::vector<double> flow_ref0(sys.n_lines(), 0.0);
        for (int ref = 0; ref < sys.n_buses(); ++ref) {
            const PtdfMatrix ptdf = compute_ptdf(sys.lines, sys.n_buses(), ref);
            for (int l = 0; l < sys.n_lines(); ++l) {
                double f = 0.0;
                for (int m = 0; m < sys.n_buses(); ++m)
                    f += ptdf.at(l, m) * inj[m];
                if (ref == 0)
                    flow_ref0[l] = f;
                else
                    CHECK(f == doctest::Approx(flow_ref0[l]).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("ptdf: disconnected network is rejected") {
    // two islands: 0-1 and 2-3
    const std::vector<Line> lines{{0, 1, 0.1, 50.0}, {2, 3, 0.1, 50.0}};
    CHECK_THROWS(compute_ptdf(lines, 4, 0));
}

TEST_CASE("cost curve: six-bus marginal blocks match the quadratic midpoints") {
    const auto sys = load_sixbus();
    const CostCurve g1 = build_cost_curve(sys.generators[0], 5);
    CHECK(g1.blocks[0].p_from == doctest::Approx(100));
    CHECK(g1.blocks[0].p_to == doctest::Approx(124));
    CHECK(g1.blocks[0].marginal == doctest::Approx(14.396));
    CHECK(g1.blocks[1].marginal == doctest::Approx(14.588));
    CHECK(g1.blocks[4].marginal == doctest::Approx(15.164));

    const CostCurve g2 = build_cost_curve(sys.generators[1], 5);
    CHECK(g2.blocks[0].marginal == doctest::Approx(32.638));
    CHECK(g2.blocks[4].marginal == doctest::Approx(32.782));

    const CostCurve g3 = build_cost_curve(sys.generators[2], 5);
    CHECK(g3.blocks[0].p_from == doctest::Approx(10));
    CHECK(g3.blocks[0].p_to == doctest::Approx(12));
    CHECK(g3.blocks[0].marginal == doctest::Approx(17.71));
    CHECK(g3.blocks[4].marginal == doctest::Approx(17.79));
}

TEST_CASE("cost curve: linear cost gives flat blocks") {
    Generator g;
    g.p_min = 10;
    g.p_max = 50;
    g.cost_a = 0.0;
    g.cost_b = 7.5;
    g.cost_c = 3.0;
    const CostCurve curve = build_cost_curve(g, 4);
    for (const auto& blk : curve.blocks)
        CHECK(blk.marginal == doctest::Approx(7.5));
}

TEST_CASE("cost curve: block integral tracks the quadratic") {
    const auto sys = load_sixbus();
    for (const auto& g : sys.generators) {
        const int n_blocks = 5;
        const CostCurve curve = build_cost_curve(g, n_blocks);
        const double width = (g.p_max - g.p_min) / n_blocks;
        const double bound = g.cost_a * width * width * n_blocks / 4.0;
        for (double p = g.p_min; p <= g.p_max + 1e-9; p += width / 3.0) {
            const double quad = g.cost_a * (p * p - g.p_min * g.p_min) +
                                g.cost_b * (p - g.p_min);
            CHECK(std::abs(curve.dispatch_cost(p) - quad) <= bound + 1e-9);
        }
        // exact at block boundaries (midpoint rule is exact for linear slopes)
        for (std::size_t j = 0; j < curve.blocks.size(); ++j) {
            const double p = curve.blocks[j].p_to;
            const double quad = g.cost_a * (p * p - g.p_min * g.p_min) +
                                g.cost_b * (p - g.p_min);
            CHECK(curve.dispatch_cost(p) == doctest::Approx(quad).epsilon(1e-12));
        }
    }
}

TEST_CASE("cost curve: marginals nondecreasing for convex cost") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> a(0.0, 0.01), b(5.0, 40.0);
    for (int trial = 0; trial < 50; ++trial) {
        Generator g;
        g.p_min = 5 + trial;
        g.p_max = g.p_min + 20 + trial;
        g.cost_a = a(rng);
        g.cost_b = b(rng);
        const CostCurve curve = build_cost_curve(g, 5);
        for (std::size_t j = 1; j < curve.blocks.size(); ++j)
            CHECK(curve.blocks[j].marginal >= curve.blocks[j - 1].marginal);
    }
}

TEST_CASE("cost curve: committed-hour fixed charge folds the p_min cost") {
    const auto sys = load_sixbus();
    const auto& g = sys.generators[0];
    const CostCurve curve = build_cost_curve(g, 5);
    CHECK(curve.no_load_cost ==
          doctest::Approx(g.cost_c + g.cost_a * g.p_min * g.p_min +
                          g.cost_b * g.p_min));
    // total cost at p_max within the block-integral error of the quadratic
    const double quad = g.cost_a * g.p_max * g.p_max + g.cost_b * g.p_max + g.cost_c;
    CHECK(curve.total_cost(g.p_max) == doctest::Approx(quad).epsilon(1e-9));
}

TEST_CASE("validate: bundled six-bus fixture is clean") {
    CHECK(validate_case(load_sixbus()).empty());
}

TEST_CASE("validate: bad distribution sum names the load profile") {
    auto sys = load_sixbus();
    sys.load.distribution[2] = 0.1;  // now sums to 0.9
    const auto violations = validate_case(sys);
    REQUIRE(!violations.empty());
    bool found = false;
    for (const auto& v : violations)
        found = found || v.find("LoadProfile") != std::string::npos;
    CHECK(found);
}

TEST_CASE("validate: generator on a nonexistent bus") {
    auto sys = load_sixbus();
    sys.generators[1].bus = 17;
    const auto violations = validate_case(sys);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("bus does not exist") != std::string::npos);
}

TEST_CASE("case json round trip") {
    const auto sys = load_sixbus();
    const auto back = case_from_json(case_to_json(sys));
    CHECK(back.horizon == sys.horizon);
    CHECK(back.lines.size() == sys.lines.size());
    CHECK(back.generators.size() == sys.generators.size());
    CHECK(back.generators[2].t0 == -2);
    CHECK(back.load.distribution == sys.load.distribution);
    CHECK(back.uncertainty.bound == sys.uncertainty.bound);
    CHECK(back.uncertainty.lambda_budget ==
          doctest::Approx(sys.uncertainty.lambda_budget));
}
