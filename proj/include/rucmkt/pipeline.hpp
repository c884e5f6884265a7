#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "rucmkt/case.hpp"
#include "rucmkt/ccg.hpp"
#include "rucmkt/pricing.hpp"
#include "rucmkt/settlement.hpp"

namespace rucmkt {

enum class RunMode { Robust, Traditional, Compare };

struct RunConfig {
    std::string case_path;
    std::optional<double> lambda;        // override the case file value
    std::optional<double> lambda_budget;
    double delta = 1e-4;
    int n_cost_blocks = 5;
    int reference_bus = 0;
    bool include_network = true;
    RunMode mode = RunMode::Robust;
    std::string out_dir;
    unsigned seed = 0;  // for randomized audit draws
};

/// Everything a solved robust run produces, kept in memory.
struct SolveArtifacts {
    CaseSystem sys;
    PtdfMatrix ptdf;
    CcgResult ccg;
    RedSolution red;
    PriceSet prices;
    ReserveQuantities reserves;
    SettlementLedger ledger;
    ModelOptions model_opts;
    double delta = 1e-4;
};

SolveArtifacts run_robust_pipeline(const CaseSystem& sys, const ModelOptions& opts,
                                   double delta);

void write_artifacts(const std::filesystem::path& dir, const SolveArtifacts& a,
                     const RunConfig& cfg);
SolveArtifacts read_artifacts(const std::filesystem::path& dir);

// CLI entry points; return process exit codes (0 ok, 1 audit failure,
// 2 usage/configuration error).
int cmd_solve(const RunConfig& cfg);
int cmd_audit(const std::filesystem::path& artifacts_dir,
              const std::optional<std::filesystem::path>& ftr_path);
int cmd_heatmap(const std::filesystem::path& artifacts_dir,
                const std::filesystem::path& out_dir);

}  // namespace rucmkt
