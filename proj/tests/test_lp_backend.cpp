#include "doctest.h"

#include <cmath>
#include <sstream>

#include "rucmkt/ccg.hpp"
#include "rucmkt/lp.hpp"
#include "rucmkt/uc_model.hpp"
#include "test_support.hpp"

using namespace rucmkt;

TEST_CASE("lp: dual sign convention is pinned") {
    // min x  s.t.  -x <= -1,  x in [0, 10]
    LinearProgram lp;
    const int x = lp.add_variable(0, 10, 1.0);
    const int row = lp.add_row(RowSense::LessEqual, -1.0, {{x, -1.0}});
    const SolveResult res = solve_lp(lp);
    REQUIRE(res.optimal());
    CHECK(res.primal[x] == doctest::Approx(1.0));
    CHECK(res.row_dual[row] == doctest::Approx(1.0));  // non-negative multiplier
}

TEST_CASE("lp: equality dual is d(obj)/d(rhs)") {
    // min x + y  s.t.  x + y = 2
    LinearProgram lp;
    const int x = lp.add_variable(0, kInf, 1.0);
    const int y = lp.add_variable(0, kInf, 1.0);
    const int row = lp.add_row(RowSense::Equal, 2.0, {{x, 1.0}, {y, 1.0}});
    const SolveResult res = solve_lp(lp);
    REQUIRE(res.optimal());
    CHECK(res.objective == doctest::Approx(2.0));
    CHECK(res.row_dual[row] == doctest::Approx(1.0));
}

TEST_CASE("lp: infeasible and unbounded are reported, not thrown") {
    LinearProgram bad;
    const int x = bad.add_variable(0, 1, 1.0);
    bad.add_row(RowSense::LessEqual, -5.0, {{x, -1.0}});  // x >= 5 impossible
    CHECK(solve_lp(bad).status == SolveStatus::Infeasible);

    LinearProgram unb;
    unb.add_variable(-kInf, kInf, 1.0);
    const SolveStatus s = solve_lp(unb).status;
    CHECK((s == SolveStatus::Unbounded || s == SolveStatus::Infeasible) == true);
    CHECK(s != SolveStatus::Optimal);
}

TEST_CASE("lp: strong duality and complementary slackness") {
    // a small random-ish dispatch LP exercised through the public surface
    LinearProgram lp;
    const int a = lp.add_variable(0, 60, 3.0);
    const int b = lp.add_variable(0, 80, 7.0);
    const int c = lp.add_variable(0, 100, 12.0);
    lp.add_row(RowSense::Equal, 150.0, {{a, 1.0}, {b, 1.0}, {c, 1.0}});
    lp.add_row(RowSense::LessEqual, 110.0, {{a, 1.0}, {b, 1.0}});
    const SolveResult res = solve_lp(lp);
    REQUIRE(res.optimal());

    // c'x == y'b + z'x  (duality identity with the raw solver convention)
    double cx = 3 * res.primal[a] + 7 * res.primal[b] + 12 * res.primal[c];
    double yb = res.row_dual[0] * 150.0 - res.row_dual[1] * 110.0;
    // row 1 is <=: normalized dual mu = -raw, so raw contribution is -mu*b
    double zx = 0.0;
    for (int v = 0; v < lp.n_variables(); ++v) zx += res.reduced_cost[v] * res.primal[v];
    CHECK(cx == doctest::Approx(yb + zx).epsilon(1e-6));

    // complementary slackness on the <= row
    const double activity = res.primal[a] + res.primal[b];
    CHECK(res.row_dual[1] * (110.0 - activity) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(res.row_dual[1] >= -1e-9);
}

TEST_CASE("milp: forced binary") {
    LinearProgram lp;
    const int y = lp.add_variable(0, 1, 1.0, VarType::Binary);
    lp.add_row(RowSense::LessEqual, -0.5, {{y, -1.0}});  // y >= 0.5
    const SolveResult res = solve_milp(lp);
    REQUIRE(res.optimal());
    CHECK(res.primal[y] == doctest::Approx(1.0));
    CHECK(res.row_dual.empty());
}

TEST_CASE("milp: costless binaries with no constraints stay at zero") {
    LinearProgram lp;
    for (int i = 0; i < 5; ++i) lp.add_variable(0, 1, 0.0, VarType::Binary);
    const SolveResult res = solve_milp(lp);
    REQUIRE(res.optimal());
    for (double v : res.primal) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("milp: solve_lp refuses integer variables") {
    LinearProgram lp;
    lp.add_variable(0, 1, 1.0, VarType::Binary);
    CHECK_THROWS_AS((void)solve_lp(lp), std::invalid_argument);
}

TEST_CASE("milp: deterministic six-bus master equals the brute-force lattice "
          "on a 4-hour truncation") {
    const auto sys = test::truncate_case(test::load_sixbus(), 4);
    const PtdfMatrix ptdf = compute_ptdf(sys.lines, sys.n_buses(), 0);
    const ModelOptions opts;
    BuiltModel master = build_master(sys, ptdf, {}, opts);
    const SolveResult res = solve_milp(master.lp);
    REQUIRE(res.optimal());
    const double oracle = test::brute_force_uc_cost(sys, ptdf, opts);
    CHECK(res.objective == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("lp format export mentions every row") {
    LinearProgram lp;
    const int x = lp.add_variable(0, 10, 1.0, VarType::Continuous, "x");
    lp.add_row(RowSense::LessEqual, 5.0, {{x, 2.0}}, "cap");
    std::ostringstream os;
    lp.write_lp_format(os);
    const std::string text = os.str();
    CHECK(text.find("Minimize") != std::string::npos);
    CHECK(text.find("cap:") != std::string::npos);
    CHECK(text.find("Bounds") != std::string::npos);
}
