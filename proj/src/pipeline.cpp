#include "rucmkt/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>

#include "rucmkt/equilibrium.hpp"
#include "rucmkt/json_io.hpp"

namespace rucmkt {

using nlohmann::json;
namespace fs = std::filesystem;

SolveArtifacts run_robust_pipeline(const CaseSystem& sys, const ModelOptions& opts,
                                   double delta) {
    SolveArtifacts a;
    a.sys = sys;
    a.model_opts = opts;
    a.delta = delta;
    if (opts.include_network)
        a.ptdf = compute_ptdf(sys.lines, sys.n_buses(), opts.reference_bus);
    else
        a.ptdf.gamma.clear();

    CcgOptions ccg_opts;
    ccg_opts.delta = delta;
    ccg_opts.model = opts;
    a.ccg = run_ccg(sys, ccg_opts);

    const std::vector<StorageSchedule>* storage_modes =
        sys.n_storages() > 0 ? &a.ccg.dispatch.storage : nullptr;
    a.red = solve_red(sys, a.ptdf, a.ccg.commitment, a.ccg.extreme_points, opts,
                      storage_modes);
    a.prices = extract_prices(sys, a.ptdf, a.red.duals);
    a.reserves = compute_reserves(sys, a.ptdf, a.ccg.commitment, a.red.dispatch);
    a.ledger = build_ledger(sys, a.ptdf, a.prices, a.red.duals, a.red,
                            a.ccg.commitment, a.ccg.extreme_points);
    return a;
}

namespace {

json config_json(const RunConfig& cfg) {
    return {{"case_path", cfg.case_path},
            {"lambda", cfg.lambda ? json(*cfg.lambda) : json()},
            {"lambda_budget", cfg.lambda_budget ? json(*cfg.lambda_budget) : json()},
            {"delta_mw", cfg.delta},
            {"n_cost_blocks", cfg.n_cost_blocks},
            {"reference_bus", cfg.reference_bus},
            {"include_network", cfg.include_network},
            {"mode", cfg.mode == RunMode::Robust ? "robust"
                     : cfg.mode == RunMode::Traditional ? "traditional"
                                                        : "compare"},
            {"seed", cfg.seed}};
}

void write_price_csvs(const fs::path& dir, const PriceSet& prices) {
    write_matrix_csv(dir / "lmp.csv", "bus", "$/MWh", prices.lmp);
    write_matrix_csv(dir / "ump_up.csv", "bus", "$/MWh", prices.ump_up);
    write_matrix_csv(dir / "ump_down.csv", "bus", "$/MWh", prices.ump_down);
}

}  // namespace

void write_artifacts(const fs::path& dir, const SolveArtifacts& a,
                     const RunConfig& cfg) {
    fs::create_directories(dir);
    save_json(case_to_json(a.sys), dir / "case.json");
    save_json(config_json(cfg), dir / "run_config.json");
    save_json(to_json(a.ccg.commitment), dir / "commitment.json");
    save_json(to_json(a.red.dispatch), dir / "dispatch.json");
    save_json(to_json(a.ccg.extreme_points), dir / "extreme_points.json");
    save_json(to_json(a.red.recourse), dir / "recourse.json");
    save_json(to_json(a.red.duals), dir / "duals.json");
    save_json(to_json(a.prices), dir / "prices.json");
    save_json(to_json(a.reserves), dir / "reserves.json");
    save_json(to_json(a.ledger), dir / "ledger.json");
    save_json(to_json(a.ccg.trace), dir / "trace.json");
    json summary{{"objective_usd", a.red.objective},
                 {"master_objective_usd", a.ccg.objective},
                 {"iterations", a.ccg.trace.iterations.size()},
                 {"extreme_points", a.ccg.extreme_points.size()},
                 {"delta_mw", a.delta}};
    save_json(summary, dir / "summary.json");
    write_price_csvs(dir, a.prices);
    write_matrix_csv(dir / "ledger_psi.csv", "bus", "$", a.ledger.psi);
    // run_meta.json isolates the only nondeterministic field (timestamp)
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    std::ofstream meta(dir / "run_meta.json");
    meta << "{\n  \"timestamp_unix\": "
         << std::chrono::duration_cast<std::chrono::seconds>(now).count()
         << "\n}\n";
}

SolveArtifacts read_artifacts(const fs::path& dir) {
    SolveArtifacts a;
    a.sys = case_from_json(load_json(dir / "case.json"));
    const json cfg = load_json(dir / "run_config.json");
    a.model_opts.n_cost_blocks = cfg.at("n_cost_blocks").get<int>();
    a.model_opts.reference_bus = cfg.at("reference_bus").get<int>();
    a.model_opts.include_network = cfg.at("include_network").get<bool>();
    a.delta = cfg.at("delta_mw").get<double>();
    if (a.model_opts.include_network)
        a.ptdf =
            compute_ptdf(a.sys.lines, a.sys.n_buses(), a.model_opts.reference_bus);
    a.ccg.commitment = commitment_from_json(load_json(dir / "commitment.json"));
    a.red.dispatch = dispatch_from_json(load_json(dir / "dispatch.json"));
    a.ccg.dispatch = a.red.dispatch;
    a.ccg.extreme_points =
        extreme_points_from_json(load_json(dir / "extreme_points.json"));
    a.red.recourse = recourse_from_json(load_json(dir / "recourse.json"));
    a.red.duals = duals_from_json(load_json(dir / "duals.json"));
    a.prices = prices_from_json(load_json(dir / "prices.json"));
    a.reserves = reserves_from_json(load_json(dir / "reserves.json"));
    a.ledger = ledger_from_json(load_json(dir / "ledger.json"));
    return a;
}

namespace {

CaseSystem load_case_with_overrides(const RunConfig& cfg) {
    CaseSystem sys = load_case(cfg.case_path);
    if (cfg.lambda) sys.uncertainty.lambda = *cfg.lambda;
    if (cfg.lambda_budget) sys.uncertainty.lambda_budget = *cfg.lambda_budget;
    const auto violations = validate_case(sys);
    if (!violations.empty()) {
        std::cerr << "invalid case:\n";
        for (const auto& v : violations) std::cerr << "  - " << v << "\n";
        throw std::runtime_error("case validation failed");
    }
    return sys;
}

int solve_robust(const RunConfig& cfg, const CaseSystem& sys) {
    ModelOptions opts;
    opts.include_network = cfg.include_network;
    opts.n_cost_blocks = cfg.n_cost_blocks;
    opts.reference_bus = cfg.reference_bus;
    SolveArtifacts a = run_robust_pipeline(sys, opts, cfg.delta);
    write_artifacts(cfg.out_dir, a, cfg);
    std::cout << "robust clearing: objective $" << a.red.objective << ", |K|="
              << a.ccg.extreme_points.size() << ", "
              << a.ccg.trace.iterations.size() << " iterations\n"
              << "artifacts written to " << cfg.out_dir << "\n";
    return 0;
}

int solve_traditional_mode(const RunConfig& cfg, const CaseSystem& sys) {
    ModelOptions opts;
    opts.include_network = cfg.include_network;
    opts.n_cost_blocks = cfg.n_cost_blocks;
    opts.reference_bus = cfg.reference_bus;
    const PtdfMatrix ptdf =
        opts.include_network
            ? compute_ptdf(sys.lines, sys.n_buses(), opts.reference_bus)
            : PtdfMatrix{};
    const auto req_up = implied_reserve_requirement(sys, false);
    auto req_down = req_up;
    for (double& v : req_down) v = -v;
    const TraditionalPricing trad =
        solve_traditional(sys, ptdf, req_up, req_down, opts);

    fs::create_directories(cfg.out_dir);
    save_json(case_to_json(sys), fs::path(cfg.out_dir) / "case.json");
    save_json(config_json(cfg), fs::path(cfg.out_dir) / "run_config.json");
    save_json(to_json(trad.commitment), fs::path(cfg.out_dir) / "commitment.json");
    save_json(to_json(trad.dispatch), fs::path(cfg.out_dir) / "dispatch.json");
    save_json(json{{"objective_usd", trad.objective},
                   {"lambda_usd_per_mwh", trad.lambda},
                   {"reserve_price_up_usd_per_mwh", trad.price_up},
                   {"reserve_price_down_usd_per_mwh", trad.price_down},
                   {"req_up_mw", req_up},
                   {"req_down_mw", req_down}},
              fs::path(cfg.out_dir) / "traditional_prices.json");
    std::cout << "traditional clearing: objective $" << trad.objective
              << "\nartifacts written to " << cfg.out_dir << "\n";
    return 0;
}

int solve_compare(const RunConfig& cfg, const CaseSystem& sys) {
    // Comparison drops network rows on both sides (the robust-vs-reserve
    // equivalence only holds zonally).
    ModelOptions opts;
    opts.include_network = false;
    opts.n_cost_blocks = cfg.n_cost_blocks;
    opts.reference_bus = cfg.reference_bus;

    CcgOptions ccg_opts;
    ccg_opts.delta = cfg.delta;
    ccg_opts.model = opts;
    const CcgResult robust = run_ccg(sys, ccg_opts);
    const PtdfMatrix no_ptdf;
    const std::vector<StorageSchedule>* storage_modes =
        sys.n_storages() > 0 ? &robust.dispatch.storage : nullptr;
    const RedSolution red = solve_red(sys, no_ptdf, robust.commitment,
                                      robust.extreme_points, opts, storage_modes);
    const PriceSet prices = extract_prices(sys, no_ptdf, red.duals);

    json readings = json::array();
    bool any_match = false;
    for (const bool budget_capped : {false, true}) {
        const auto req_up = implied_reserve_requirement(sys, budget_capped);
        auto req_down = req_up;
        for (double& v : req_down) v = -v;
        const TraditionalPricing trad =
            solve_traditional(sys, no_ptdf, req_up, req_down, opts);
        const double rel_obj_gap =
            std::abs(trad.objective - robust.objective) /
            std::max(1.0, std::abs(robust.objective));
        double max_ump_gap = 0.0, max_lmp_gap = 0.0;
        for (int t = 0; t < sys.horizon; ++t) {
            max_ump_gap = std::max(
                max_ump_gap, std::abs(prices.ump_up[0][t] - trad.price_up[t]));
            max_ump_gap = std::max(
                max_ump_gap, std::abs(prices.ump_down[0][t] - trad.price_down[t]));
            max_lmp_gap =
                std::max(max_lmp_gap, std::abs(prices.lmp[0][t] - trad.lambda[t]));
        }
        const bool match = rel_obj_gap <= 1e-4 && max_ump_gap <= 0.01;
        any_match = any_match || match;
        readings.push_back({{"requirement_reading",
                             budget_capped ? "budget_capped" : "sum_effective_bounds"},
                            {"req_up_mw", req_up},
                            {"robust_objective_usd", robust.objective},
                            {"traditional_objective_usd", trad.objective},
                            {"relative_objective_gap", rel_obj_gap},
                            {"max_ump_vs_reserve_price_gap", max_ump_gap},
                            {"max_lmp_gap", max_lmp_gap},
                            {"match", match}});
    }
    fs::create_directories(cfg.out_dir);
    save_json(json{{"readings", readings}, {"ump_equals_reserve_price", any_match}},
              fs::path(cfg.out_dir) / "comparison.json");
    std::cout << "comparison written to " << cfg.out_dir
              << (any_match ? " (UMP = traditional reserve price)" : " (NO match)")
              << "\n";
    return any_match ? 0 : 1;
}

}  // namespace

int cmd_solve(const RunConfig& cfg) {
    if (!fs::exists(cfg.case_path)) {
        std::cerr << "case file not found: " << cfg.case_path << "\n";
        return 2;
    }
    try {
        const CaseSystem sys = load_case_with_overrides(cfg);
        switch (cfg.mode) {
            case RunMode::Robust: return solve_robust(cfg, sys);
            case RunMode::Traditional: return solve_traditional_mode(cfg, sys);
            case RunMode::Compare: return solve_compare(cfg, sys);
        }
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "solve failed: " << e.what() << "\n";
        return 1;
    }
}

int cmd_audit(const fs::path& artifacts_dir,
              const std::optional<fs::path>& ftr_path) {
    if (!fs::exists(artifacts_dir / "case.json")) {
        std::cerr << "no artifacts at " << artifacts_dir << "\n";
        return 2;
    }
    if (ftr_path && !fs::exists(*ftr_path)) {
        std::cerr << "FTR file not found: " << *ftr_path << "\n";
        return 2;
    }
    try {
        SolveArtifacts a = read_artifacts(artifacts_dir);
        if (ftr_path) {
            const FtrPortfolio portfolio = load_ftr(*ftr_path, a.sys.n_buses());
            a.ledger.ftr = ftr_check_and_credit(portfolio, a.sys, a.ptdf, a.prices);
        }
        const AdequacyReport adequacy = revenue_adequacy_report(a.ledger);

        bool ok = adequacy.all_ok();
        std::cout << "revenue adequacy audit\n"
                  << "  uncertainty payment   $" << adequacy.psi_total << "\n"
                  << "  generation res credit $" << adequacy.theta_g_total << "\n"
                  << "  transmission credit   $" << adequacy.theta_t_total << "\n"
                  << "  identity gap          $" << adequacy.identity_gap << "  ["
                  << (adequacy.theorem2_ok ? "PASS" : "FAIL") << "]\n";
        if (adequacy.has_ftr) {
            std::cout << "  FTR credit            $" << adequacy.ftr_credit << "\n"
                      << "  congestion cost       $" << adequacy.congestion_cost
                      << "\n"
                      << "  FTR underfunding      $" << adequacy.underfunding
                      << "  [" << (adequacy.theorem1_ok ? "PASS" : "FAIL") << "]\n"
                      << "  covered by trans. res residual $"
                      << adequacy.theta_t_cover_residual << "\n"
                      << "  SFT                   "
                      << (adequacy.sft_ok ? "PASS" : "FAIL") << "\n";
        }

        // Lemma sign-consistency and binding audits
        double lemma1_worst = 0.0;
        for (std::size_t k = 0; k < a.ccg.extreme_points.size(); ++k)
            for (int m = 0; m < a.sys.n_buses(); ++m)
                for (int t = 0; t < a.sys.horizon; ++t) {
                    const double eps = a.ccg.extreme_points[k].eps[m][t];
                    const double ump = a.prices.ump_k[k][m][t];
                    if (eps > 1e-9) lemma1_worst = std::max(lemma1_worst, -ump);
                    if (eps < -1e-9) lemma1_worst = std::max(lemma1_worst, ump);
                }
        const bool lemma1_ok = lemma1_worst <= 1e-6;
        const double kkt = kkt_stationarity_residual(a.sys, a.ptdf, a.red.duals);
        const bool kkt_ok = kkt <= 1e-6;
        std::cout << "  lemma 1 sign worst    " << lemma1_worst << "  ["
                  << (lemma1_ok ? "PASS" : "FAIL") << "]\n"
                  << "  KKT residual          " << kkt << "  ["
                  << (kkt_ok ? "PASS" : "FAIL") << "]\n";

        const ProfitReport equilibrium = verify_equilibrium(
            a.sys, a.prices, a.red.dispatch, a.ccg.commitment, 0.01,
            a.model_opts.n_cost_blocks);
        std::cout << "  equilibrium max gap   $" << equilibrium.max_gap() << "  ["
                  << (equilibrium.equilibrium ? "PASS" : "FAIL") << "]\n";

        ok = ok && lemma1_ok && kkt_ok && equilibrium.equilibrium;
        save_json(json{{"adequacy", to_json(adequacy)},
                       {"lemma1_worst", lemma1_worst},
                       {"kkt_residual", kkt},
                       {"equilibrium", to_json(equilibrium)},
                       {"all_ok", ok}},
                  artifacts_dir / "audit.json");
        std::cout << (ok ? "AUDIT PASS" : "AUDIT FAIL") << "\n";
        return ok ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "audit failed: " << e.what() << "\n";
        return 1;
    }
}

int cmd_heatmap(const fs::path& artifacts_dir, const fs::path& out_dir) {
    if (!fs::exists(artifacts_dir / "prices.json")) {
        std::cerr << "no price artifacts at " << artifacts_dir << "\n";
        return 2;
    }
    try {
        const PriceSet prices =
            prices_from_json(load_json(artifacts_dir / "prices.json"));
        fs::create_directories(out_dir);
        write_price_csvs(out_dir, prices);
        std::cout << "heat-map CSVs written to " << out_dir << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "heatmap failed: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace rucmkt
