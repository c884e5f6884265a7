#include "rucmkt/json_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rucmkt {

using nlohmann::json;

namespace {

json grid_json(const std::vector<std::vector<double>>& g) { return json(g); }

std::vector<std::vector<double>> grid_from(const json& j) {
    return j.get<std::vector<std::vector<double>>>();
}

json bits_json(const std::vector<std::vector<std::uint8_t>>& g) {
    json out = json::array();
    for (const auto& row : g) {
        json r = json::array();
        for (auto v : row) r.push_back(static_cast<int>(v));
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<std::vector<std::uint8_t>> bits_from(const json& j) {
    std::vector<std::vector<std::uint8_t>> out;
    for (const auto& row : j) {
        std::vector<std::uint8_t> r;
        for (const auto& v : row) r.push_back(v.get<int>() != 0);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    json j;
    in >> j;
    return j;
}

void save_json(const json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

CaseSystem case_from_json(const json& j) {
    CaseSystem sys;
    sys.name = j.value("name", "");
    sys.horizon = j.at("horizon").get<int>();
    for (const auto& b : j.at("buses")) {
        Bus bus;
        bus.id = b.at("id").get<int>();
        bus.name = b.value("name", "bus" + std::to_string(bus.id));
        sys.buses.push_back(std::move(bus));
    }
    for (const auto& l : j.at("lines")) {
        Line line;
        line.from_bus = l.at("from").get<int>();
        line.to_bus = l.at("to").get<int>();
        line.reactance = l.at("reactance_pu").get<double>();
        line.capacity = l.at("capacity_mw").get<double>();
        sys.lines.push_back(line);
    }
    for (const auto& g : j.at("generators")) {
        Generator gen;
        gen.name = g.value("name", "");
        gen.bus = g.at("bus").get<int>();
        gen.p_min = g.at("p_min_mw").get<double>();
        gen.p_max = g.at("p_max_mw").get<double>();
        gen.p0 = g.value("p0_mw", 0.0);
        gen.cost_a = g.value("cost_a", 0.0);
        gen.cost_b = g.value("cost_b", 0.0);
        gen.cost_c = g.value("cost_c", 0.0);
        gen.ramp_up = g.at("ramp_up_mw").get<double>();
        gen.ramp_down = g.at("ramp_down_mw").get<double>();
        gen.ramp_unc_up = g.at("ramp_unc_up_mw").get<double>();
        gen.ramp_unc_down = g.at("ramp_unc_down_mw").get<double>();
        gen.startup_cost = g.value("startup_cost", 0.0);
        gen.shutdown_cost = g.value("shutdown_cost", 0.0);
        gen.min_on = g.value("min_on_h", 1);
        gen.min_off = g.value("min_off_h", 1);
        gen.t0 = g.at("t0_h").get<int>();
        sys.generators.push_back(std::move(gen));
    }
    if (j.contains("storages"))
        for (const auto& s : j.at("storages")) {
            StorageDevice dev;
            dev.name = s.value("name", "");
            dev.bus = s.at("bus").get<int>();
            dev.e_max = s.at("e_max_mwh").get<double>();
            dev.e0 = s.at("e0_mwh").get<double>();
            dev.rate_discharge = s.at("rate_discharge_mw").get<double>();
            dev.rate_charge = s.at("rate_charge_mw").get<double>();
            dev.eff_discharge = s.value("eff_discharge", 1.0);
            dev.eff_charge = s.value("eff_charge", 1.0);
            sys.storages.push_back(std::move(dev));
        }
    const auto& loads = j.at("loads");
    sys.load.base_load = loads.at("base_load_mw").get<std::vector<double>>();
    sys.load.distribution = loads.at("distribution").get<std::vector<double>>();
    const auto& unc = j.at("uncertainty");
    sys.uncertainty.lambda = unc.value("lambda", 1.0);
    sys.uncertainty.lambda_budget = unc.value("lambda_budget", 1.0);
    sys.uncertainty.normalization =
        unc.value("budget_normalization", std::string("by_bound")) ==
                "by_effective_bound"
            ? BudgetNormalization::ByEffectiveBound
            : BudgetNormalization::ByBound;
    sys.uncertainty.bound.assign(sys.buses.size(),
                                 std::vector<double>(sys.horizon, 0.0));
    if (unc.contains("bounds_mw"))
        for (const auto& row : unc.at("bounds_mw")) {
            const int bus = row.at("bus").get<int>();
            if (bus < 0 || bus >= static_cast<int>(sys.buses.size()))
                throw std::runtime_error("uncertainty bound on unknown bus");
            sys.uncertainty.bound[bus] = row.at("by_hour").get<std::vector<double>>();
        }
    return sys;
}

json case_to_json(const CaseSystem& sys) {
    json j;
    j["name"] = sys.name;
    j["horizon"] = sys.horizon;
    j["buses"] = json::array();
    for (const auto& b : sys.buses)
        j["buses"].push_back({{"id", b.id}, {"name", b.name}});
    j["lines"] = json::array();
    for (const auto& l : sys.lines)
        j["lines"].push_back({{"from", l.from_bus},
                              {"to", l.to_bus},
                              {"reactance_pu", l.reactance},
                              {"capacity_mw", l.capacity}});
    j["generators"] = json::array();
    for (const auto& g : sys.generators)
        j["generators"].push_back({{"name", g.name},
                                   {"bus", g.bus},
                                   {"p_min_mw", g.p_min},
                                   {"p_max_mw", g.p_max},
                                   {"p0_mw", g.p0},
                                   {"cost_a", g.cost_a},
                                   {"cost_b", g.cost_b},
                                   {"cost_c", g.cost_c},
                                   {"ramp_up_mw", g.ramp_up},
                                   {"ramp_down_mw", g.ramp_down},
                                   {"ramp_unc_up_mw", g.ramp_unc_up},
                                   {"ramp_unc_down_mw", g.ramp_unc_down},
                                   {"startup_cost", g.startup_cost},
                                   {"shutdown_cost", g.shutdown_cost},
                                   {"min_on_h", g.min_on},
                                   {"min_off_h", g.min_off},
                                   {"t0_h", g.t0}});
    j["storages"] = json::array();
    for (const auto& s : sys.storages)
        j["storages"].push_back({{"name", s.name},
                                 {"bus", s.bus},
                                 {"e_max_mwh", s.e_max},
                                 {"e0_mwh", s.e0},
                                 {"rate_discharge_mw", s.rate_discharge},
                                 {"rate_charge_mw", s.rate_charge},
                                 {"eff_discharge", s.eff_discharge},
                                 {"eff_charge", s.eff_charge}});
    j["loads"] = {{"base_load_mw", sys.load.base_load},
                  {"distribution", sys.load.distribution}};
    json bounds = json::array();
    for (std::size_t m = 0; m < sys.uncertainty.bound.size(); ++m) {
        bool any = false;
        for (double v : sys.uncertainty.bound[m]) any = any || v > 0;
        if (any)
            bounds.push_back(
                {{"bus", static_cast<int>(m)}, {"by_hour", sys.uncertainty.bound[m]}});
    }
    j["uncertainty"] = {
        {"lambda", sys.uncertainty.lambda},
        {"lambda_budget", sys.uncertainty.lambda_budget},
        {"budget_normalization",
         sys.uncertainty.normalization == BudgetNormalization::ByEffectiveBound
             ? "by_effective_bound"
             : "by_bound"},
        {"bounds_mw", std::move(bounds)}};
    return j;
}

CaseSystem load_case(const std::filesystem::path& path) {
    return case_from_json(load_json(path));
}

void save_case(const CaseSystem& sys, const std::filesystem::path& path) {
    save_json(case_to_json(sys), path);
}

json to_json(const CommitmentSolution& c) {
    return {{"on", bits_json(c.on)},
            {"startup", bits_json(c.startup)},
            {"shutdown", bits_json(c.shutdown)}};
}

CommitmentSolution commitment_from_json(const json& j) {
    CommitmentSolution c;
    c.on = bits_from(j.at("on"));
    c.startup = bits_from(j.at("startup"));
    c.shutdown = bits_from(j.at("shutdown"));
    return c;
}

json to_json(const BaseDispatch& d) {
    json storage = json::array();
    for (const auto& s : d.storage) {
        json bits_d = json::array(), bits_c = json::array();
        for (auto v : s.mode_discharge) bits_d.push_back(static_cast<int>(v));
        for (auto v : s.mode_charge) bits_c.push_back(static_cast<int>(v));
        storage.push_back({{"energy_mwh", s.energy},
                           {"discharge_mw", s.discharge},
                           {"charge_mw", s.charge},
                           {"mode_discharge", bits_d},
                           {"mode_charge", bits_c}});
    }
    return {{"p_mw", grid_json(d.p)}, {"storage", std::move(storage)}};
}

BaseDispatch dispatch_from_json(const json& j) {
    BaseDispatch d;
    d.p = grid_from(j.at("p_mw"));
    for (const auto& s : j.at("storage")) {
        StorageSchedule sch;
        sch.energy = s.at("energy_mwh").get<std::vector<double>>();
        sch.discharge = s.at("discharge_mw").get<std::vector<double>>();
        sch.charge = s.at("charge_mw").get<std::vector<double>>();
        for (const auto& v : s.at("mode_discharge"))
            sch.mode_discharge.push_back(v.get<int>() != 0);
        for (const auto& v : s.at("mode_charge"))
            sch.mode_charge.push_back(v.get<int>() != 0);
        d.storage.push_back(std::move(sch));
    }
    return d;
}

json to_json(const std::vector<ExtremePoint>& k) {
    json out = json::array();
    for (const auto& pt : k) out.push_back({{"eps_mw", grid_json(pt.eps)}});
    return out;
}

std::vector<ExtremePoint> extreme_points_from_json(const json& j) {
    std::vector<ExtremePoint> out;
    for (const auto& p : j) out.push_back(ExtremePoint{grid_from(p.at("eps_mw"))});
    return out;
}

namespace {
json grid3_json(const std::vector<std::vector<std::vector<double>>>& g) {
    json out = json::array();
    for (const auto& m : g) out.push_back(grid_json(m));
    return out;
}
std::vector<std::vector<std::vector<double>>> grid3_from(const json& j) {
    std::vector<std::vector<std::vector<double>>> out;
    for (const auto& m : j) out.push_back(grid_from(m));
    return out;
}
}  // namespace

json to_json(const DualBundle& d) {
    return {{"lambda", d.lambda},
            {"lambda_k", d.lambda_k},
            {"beta_up", grid_json(d.beta_up)},
            {"beta_lo", grid_json(d.beta_lo)},
            {"alpha_up", grid_json(d.alpha_up)},
            {"alpha_dn", grid_json(d.alpha_dn)},
            {"eta_pos", grid_json(d.eta_pos)},
            {"eta_neg", grid_json(d.eta_neg)},
            {"beta_up_k", grid3_json(d.beta_up_k)},
            {"beta_lo_k", grid3_json(d.beta_lo_k)},
            {"alpha_up_k", grid3_json(d.alpha_up_k)},
            {"alpha_dn_k", grid3_json(d.alpha_dn_k)},
            {"eta_pos_k", grid3_json(d.eta_pos_k)},
            {"eta_neg_k", grid3_json(d.eta_neg_k)}};
}

DualBundle duals_from_json(const json& j) {
    DualBundle d;
    d.lambda = j.at("lambda").get<std::vector<double>>();
    d.lambda_k = grid_from(j.at("lambda_k"));
    d.beta_up = grid_from(j.at("beta_up"));
    d.beta_lo = grid_from(j.at("beta_lo"));
    d.alpha_up = grid_from(j.at("alpha_up"));
    d.alpha_dn = grid_from(j.at("alpha_dn"));
    d.eta_pos = grid_from(j.at("eta_pos"));
    d.eta_neg = grid_from(j.at("eta_neg"));
    d.beta_up_k = grid3_from(j.at("beta_up_k"));
    d.beta_lo_k = grid3_from(j.at("beta_lo_k"));
    d.alpha_up_k = grid3_from(j.at("alpha_up_k"));
    d.alpha_dn_k = grid3_from(j.at("alpha_dn_k"));
    d.eta_pos_k = grid3_from(j.at("eta_pos_k"));
    d.eta_neg_k = grid3_from(j.at("eta_neg_k"));
    return d;
}

json to_json(const PriceSet& p) {
    return {{"lmp_usd_per_mwh", grid_json(p.lmp)},
            {"ump_k_usd_per_mwh", grid3_json(p.ump_k)},
            {"ump_up_usd_per_mwh", grid_json(p.ump_up)},
            {"ump_down_usd_per_mwh", grid_json(p.ump_down)}};
}

PriceSet prices_from_json(const json& j) {
    PriceSet p;
    p.lmp = grid_from(j.at("lmp_usd_per_mwh"));
    p.ump_k = grid3_from(j.at("ump_k_usd_per_mwh"));
    p.ump_up = grid_from(j.at("ump_up_usd_per_mwh"));
    p.ump_down = grid_from(j.at("ump_down_usd_per_mwh"));
    return p;
}

json to_json(const ReserveQuantities& r) {
    return {{"q_up_mw", grid_json(r.q_up)},
            {"q_down_mw", grid_json(r.q_down)},
            {"df_pos_mw", grid_json(r.df_pos)},
            {"df_neg_mw", grid_json(r.df_neg)}};
}

ReserveQuantities reserves_from_json(const json& j) {
    ReserveQuantities r;
    r.q_up = grid_from(j.at("q_up_mw"));
    r.q_down = grid_from(j.at("q_down_mw"));
    r.df_pos = grid_from(j.at("df_pos_mw"));
    r.df_neg = grid_from(j.at("df_neg_mw"));
    return r;
}

json to_json(const RecourseDispatch& r) {
    return {{"delta_p_mw", grid3_json(r.delta_p)},
            {"delta_storage_mw", grid3_json(r.delta_storage)}};
}

RecourseDispatch recourse_from_json(const json& j) {
    RecourseDispatch r;
    r.delta_p = grid3_from(j.at("delta_p_mw"));
    r.delta_storage = grid3_from(j.at("delta_storage_mw"));
    return r;
}

json to_json(const SettlementLedger& l) {
    json j{{"horizon", l.horizon},
           {"psi_usd", grid_json(l.psi)},
           {"theta_g_usd", grid_json(l.theta_g)},
           {"theta_g_eq14_usd", grid_json(l.theta_g_eq14)},
           {"theta_g_storage_usd", grid_json(l.theta_g_storage)},
           {"theta_t_usd", grid_json(l.theta_t)},
           {"load_payment_usd", l.energy.load_payment},
           {"energy_credit_usd", l.energy.energy_credit},
           {"congestion_cost_usd", l.energy.congestion_cost},
           {"eq14_eq18_max_gap_usd", l.eq14_eq18_max_gap}};
    if (l.ftr) {
        j["ftr"] = {{"sft_ok", l.ftr->sft_ok},
                    {"worst_line_flow_mw", l.ftr->worst_line_flow},
                    {"credit_usd", l.ftr->credit},
                    {"total_credit_usd", l.ftr->total_credit}};
    }
    return j;
}

SettlementLedger ledger_from_json(const json& j) {
    SettlementLedger l;
    l.horizon = j.at("horizon").get<int>();
    l.psi = grid_from(j.at("psi_usd"));
    l.theta_g = grid_from(j.at("theta_g_usd"));
    l.theta_g_eq14 = grid_from(j.at("theta_g_eq14_usd"));
    l.theta_g_storage = grid_from(j.at("theta_g_storage_usd"));
    l.theta_t = grid_from(j.at("theta_t_usd"));
    l.energy.load_payment = j.at("load_payment_usd").get<std::vector<double>>();
    l.energy.energy_credit = j.at("energy_credit_usd").get<std::vector<double>>();
    l.energy.congestion_cost =
        j.at("congestion_cost_usd").get<std::vector<double>>();
    l.eq14_eq18_max_gap = j.at("eq14_eq18_max_gap_usd").get<double>();
    if (j.contains("ftr")) {
        FtrResult f;
        f.sft_ok = j["ftr"].at("sft_ok").get<bool>();
        f.worst_line_flow =
            j["ftr"].at("worst_line_flow_mw").get<std::vector<double>>();
        f.credit = j["ftr"].at("credit_usd").get<std::vector<double>>();
        f.total_credit = j["ftr"].at("total_credit_usd").get<double>();
        l.ftr = std::move(f);
    }
    return l;
}

json to_json(const CcgTrace& t) {
    json iters = json::array();
    for (const auto& it : t.iterations) {
        json rec{{"iteration", it.iteration},
                 {"master_objective_usd", it.master_objective},
                 {"violation_mw", it.violation},
                 {"wall_seconds", it.wall_seconds},
                 {"point_added", it.point_added}};
        if (it.point_added) rec["added_point_eps_mw"] = grid_json(it.added_point.eps);
        iters.push_back(std::move(rec));
    }
    return {{"iterations", std::move(iters)},
            {"final_violation_mw", t.final_violation}};
}

json to_json(const ProfitReport& r) {
    json units = json::array();
    for (const auto& u : r.units)
        units.push_back({{"profit_at_dispatch_usd", u.profit_at_dispatch},
                         {"max_profit_usd", u.max_profit},
                         {"gap_usd", u.gap},
                         {"best_schedule_mw", u.schedule}});
    return {{"units", std::move(units)},
            {"tolerance_usd", r.tolerance},
            {"equilibrium", r.equilibrium}};
}

json to_json(const AdequacyReport& r) {
    json j{{"theorem2_ok", r.theorem2_ok},
           {"psi_total_usd", r.psi_total},
           {"theta_g_total_usd", r.theta_g_total},
           {"theta_t_total_usd", r.theta_t_total},
           {"identity_gap_usd", r.identity_gap},
           {"eq14_matches_eq18", r.eq14_matches_eq18},
           {"overall_adequacy_ok", r.overall_adequacy_ok},
           {"collected_usd", r.collected},
           {"distributed_usd", r.distributed},
           {"failures", r.failures}};
    if (r.has_ftr) {
        j["sft_ok"] = r.sft_ok;
        j["theorem1_ok"] = r.theorem1_ok;
        j["ftr_credit_usd"] = r.ftr_credit;
        j["congestion_cost_usd"] = r.congestion_cost;
        j["underfunding_usd"] = r.underfunding;
        j["theta_t_cover_residual_usd"] = r.theta_t_cover_residual;
    }
    return j;
}

FtrPortfolio ftr_from_json(const json& j, int n_buses) {
    if (j.contains("injections_mw")) {
        FtrPortfolio p;
        p.injection = j.at("injections_mw").get<std::vector<double>>();
        if (static_cast<int>(p.injection.size()) != n_buses)
            throw std::runtime_error("ftr injections length mismatch");
        return p;
    }
    if (j.contains("rights")) {
        std::vector<std::tuple<int, int, double>> rights;
        for (const auto& r : j.at("rights"))
            rights.emplace_back(r.at("from").get<int>(), r.at("to").get<int>(),
                                r.at("mw").get<double>());
        return portfolio_from_rights(n_buses, rights);
    }
    throw std::runtime_error("ftr file needs 'injections_mw' or 'rights'");
}

FtrPortfolio load_ftr(const std::filesystem::path& path, int n_buses) {
    return ftr_from_json(load_json(path), n_buses);
}

void write_matrix_csv(const std::filesystem::path& path,
                      const std::string& row_label, const std::string& unit,
                      const std::vector<std::vector<double>>& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.precision(17);
    const std::size_t t_ = m.empty() ? 0 : m[0].size();
    out << row_label << " \\ hour [" << unit << "]";
    for (std::size_t t = 0; t < t_; ++t) out << "," << (t + 1);
    out << "\n";
    for (std::size_t r = 0; r < m.size(); ++r) {
        out << r;
        for (double v : m[r]) out << "," << v;
        out << "\n";
    }
}

std::vector<std::vector<double>> read_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::vector<double>> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool first = true;
        while (std::getline(ss, cell, ',')) {
            if (first) {
                first = false;
                continue;
            }
            row.push_back(std::stod(cell));
        }
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace rucmkt
