#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "rucmkt/case.hpp"
#include "rucmkt/ccg.hpp"
#include "rucmkt/equilibrium.hpp"
#include "rucmkt/pricing.hpp"
#include "rucmkt/settlement.hpp"
#include "rucmkt/uc_model.hpp"

namespace rucmkt {

// Case file (schema documented in data/case_schema.md)
CaseSystem case_from_json(const nlohmann::json& j);
nlohmann::json case_to_json(const CaseSystem& sys);
CaseSystem load_case(const std::filesystem::path& path);
void save_case(const CaseSystem& sys, const std::filesystem::path& path);

// Artifact serialization
nlohmann::json to_json(const CommitmentSolution& c);
CommitmentSolution commitment_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BaseDispatch& d);
BaseDispatch dispatch_from_json(const nlohmann::json& j);
nlohmann::json to_json(const std::vector<ExtremePoint>& k);
std::vector<ExtremePoint> extreme_points_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DualBundle& d);
DualBundle duals_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PriceSet& p);
PriceSet prices_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ReserveQuantities& r);
ReserveQuantities reserves_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RecourseDispatch& r);
RecourseDispatch recourse_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SettlementLedger& l);
SettlementLedger ledger_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CcgTrace& t);
nlohmann::json to_json(const ProfitReport& r);
nlohmann::json to_json(const AdequacyReport& r);

/// FTR file: {"injections": [...]} or {"rights": [[from,to,mw], ...]}.
FtrPortfolio ftr_from_json(const nlohmann::json& j, int n_buses);
FtrPortfolio load_ftr(const std::filesystem::path& path, int n_buses);

// bus-by-hour CSV with unit-labelled headers
void write_matrix_csv(const std::filesystem::path& path,
                      const std::string& row_label, const std::string& unit,
                      const std::vector<std::vector<double>>& m);
std::vector<std::vector<double>> read_matrix_csv(const std::filesystem::path& path);

nlohmann::json load_json(const std::filesystem::path& path);
void save_json(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace rucmkt
