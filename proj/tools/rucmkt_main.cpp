#include <CLI11.hpp>

#include <filesystem>
#include <optional>
#include <string>

#include "rucmkt/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "rucmkt - day-ahead market clearing with robust unit commitment,\n"
        "LMP/UMP pricing, and settlement/FTR audits"};
    app.require_subcommand(1);

    rucmkt::RunConfig cfg;
    double lambda = -1.0, budget = -1.0;
    bool no_network = false;
    std::string mode = "robust";

    auto* solve = app.add_subcommand("solve", "clear the market for a case file");
    solve->add_option("--case", cfg.case_path, "case JSON file")->required();
    solve->add_option("--lambda", lambda, "per-bus uncertainty budget override");
    solve->add_option("--budget", budget, "system uncertainty budget override");
    solve->add_option("--delta", cfg.delta, "CCG feasibility tolerance, MW");
    solve->add_option("--blocks", cfg.n_cost_blocks, "cost blocks per unit");
    solve->add_option("--ref-bus", cfg.reference_bus, "PTDF reference bus");
    solve->add_option("--mode", mode, "robust | traditional | compare");
    solve->add_flag("--no-network", no_network, "drop transmission constraints");
    solve->add_option("--out", cfg.out_dir, "artifact output directory")->required();
    solve->add_option("--seed", cfg.seed, "seed for randomized audits");

    std::string artifacts_dir, ftr_file, heat_out;
    auto* audit = app.add_subcommand(
        "audit", "run settlement/FTR/equilibrium audits on solve artifacts");
    audit->add_option("--artifacts", artifacts_dir, "artifact directory")->required();
    audit->add_option("--ftr", ftr_file, "FTR portfolio JSON");

    auto* heatmap =
        app.add_subcommand("heatmap", "export bus-by-hour price CSVs");
    heatmap->add_option("--artifacts", artifacts_dir, "artifact directory")
        ->required();
    heatmap->add_option("--out", heat_out, "output directory (default: artifacts)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (solve->parsed()) {
        if (lambda > 0) cfg.lambda = lambda;
        if (budget > 0) cfg.lambda_budget = budget;
        cfg.include_network = !no_network;
        if (mode == "robust")
            cfg.mode = rucmkt::RunMode::Robust;
        else if (mode == "traditional")
            cfg.mode = rucmkt::RunMode::Traditional;
        else if (mode == "compare")
            cfg.mode = rucmkt::RunMode::Compare;
        else {
            std::fprintf(stderr, "unknown mode: %s\n", mode.c_str());
            return 2;
        }
        return rucmkt::cmd_solve(cfg);
    }
    if (audit->parsed()) {
        std::optional<std::filesystem::path> ftr;
        if (!ftr_file.empty()) ftr = ftr_file;
        return rucmkt::cmd_audit(artifacts_dir, ftr);
    }
    if (heatmap->parsed())
        return rucmkt::cmd_heatmap(artifacts_dir,
                                   heat_out.empty() ? artifacts_dir : heat_out);
    return 2;
}
