#include "doctest.h"

#include <cmath>

#include "rucmkt/ccg.hpp"
#include "rucmkt/equilibrium.hpp"
#include "rucmkt/pipeline.hpp"
#include "test_support.hpp"

using namespace rucmkt;

namespace {
const SolveArtifacts& solved_sixbus() {
    static const SolveArtifacts fixture =
        run_robust_pipeline(rucmkt::test::load_sixbus(), ModelOptions{}, 1e-4);
    return fixture;
}
}  // namespace

TEST_CASE("equilibrium: no six-bus unit can profit by deviating") {
    const auto& f = solved_sixbus();
    const ProfitReport rep = verify_equilibrium(f.sys, f.prices, f.red.dispatch,
                                                f.ccg.commitment, 0.01);
    CHECK(rep.equilibrium);
    for (const auto& u : rep.units) {
        CHECK(u.gap <= 0.01);
        CHECK(u.gap >= -0.01);  // the ISO schedule must be feasible for PMP
    }
}

TEST_CASE("equilibrium: a price perturbation is detectable") {
    const auto& f = solved_sixbus();
    PriceSet bumped = f.prices;
    for (int t = 0; t < f.sys.horizon; ++t)
        bumped.lmp[f.sys.generators[0].bus][t] += 1.0;  // $1/MWh at G1's bus
    const ProfitReport rep = verify_equilibrium(f.sys, bumped, f.red.dispatch,
                                                f.ccg.commitment, 0.01);
    CHECK(!rep.equilibrium);
    CHECK(rep.units[0].gap > 0.01);
}

TEST_CASE("equilibrium: single unit priced at its marginal cost is content") {
    auto sys = rucmkt::test::single_bus_case(2, 100.0, 0.0);
    const auto artifacts = run_robust_pipeline(sys, ModelOptions{}, 1e-4);
    const PmpResult pmp = solve_pmp(sys, 0, artifacts.prices,
                                    artifacts.ccg.commitment,
                                    artifacts.red.dispatch);
    CHECK(pmp.gap <= 0.01);
}

TEST_CASE("equilibrium: zero prices drive output to p_min") {
    auto sys = rucmkt::test::single_bus_case(3, 90.0, 0.0);
    const auto artifacts = run_robust_pipeline(sys, ModelOptions{}, 1e-4);
    PriceSet zero = artifacts.prices;
    for (auto& row : zero.lmp)
        for (double& v : row) v = 0.0;
    for (auto& row : zero.ump_up)
        for (double& v : row) v = 0.0;
    for (auto& row : zero.ump_down)
        for (double& v : row) v = 0.0;
    const PmpResult pmp = solve_pmp(sys, 0, zero, artifacts.ccg.commitment,
                                    artifacts.red.dispatch);
    for (int t = 0; t < sys.horizon; ++t)
        CHECK(pmp.schedule[t] ==
              doctest::Approx(sys.generators[0].p_min).epsilon(1e-7));
    // with variable costs only, the cheapest feasible schedule costs nothing
    CHECK(pmp.max_profit == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("equilibrium: indifference at a block-marginal price") {
    auto sys = rucmkt::test::single_bus_case(1, 100.0, 0.0);
    const auto& g = sys.generators[0];
    const CostCurve curve = build_cost_curve(g, 5);
    CommitmentSolution commitment;
    commitment.on = {{1}};
    commitment.startup = {{0}};
    commitment.shutdown = {{0}};
    BaseDispatch dispatch;
    const double inside = 0.5 * (curve.blocks[2].p_from + curve.blocks[2].p_to);
    dispatch.p = {{inside}};
    PriceSet prices;
    prices.lmp = {{curve.blocks[2].marginal}};
    prices.ump_k = {};
    prices.ump_up = {{0.0}};
    prices.ump_down = {{0.0}};
    const PmpResult pmp = solve_pmp(sys, 0, prices, commitment, dispatch);
    // any point inside block 3 is optimal, so the ISO dispatch is too
    CHECK(pmp.gap <= 1e-6);
}

TEST_CASE("equilibrium: uniform price and cost scaling preserves optimality") {
    const auto& f = solved_sixbus();
    const double scale = 3.0;
    PriceSet scaled = f.prices;
    for (auto* grid : {&scaled.lmp, &scaled.ump_up, &scaled.ump_down})
        for (auto& row : *grid)
            for (double& v : row) v *= scale;
    for (auto& k : scaled.ump_k)
        for (auto& row : k)
            for (double& v : row) v *= scale;
    CaseSystem scaled_sys = f.sys;
    for (auto& g : scaled_sys.generators) {
        g.cost_a *= scale;
        g.cost_b *= scale;
        g.cost_c *= scale;
    }
    const ProfitReport base = verify_equilibrium(f.sys, f.prices, f.red.dispatch,
                                                 f.ccg.commitment, 0.01);
    const ProfitReport rescaled = verify_equilibrium(
        scaled_sys, scaled, f.red.dispatch, f.ccg.commitment, 0.01 * scale);
    CHECK(base.equilibrium);
    CHECK(rescaled.equilibrium);
    for (int i = 0; i < f.sys.n_units(); ++i)
        CHECK(rescaled.units[i].max_profit ==
              doctest::Approx(scale * base.units[i].max_profit).epsilon(1e-6));
}
