#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rucmkt/case.hpp"
#include "rucmkt/lp.hpp"

namespace rucmkt {

/// Worst uncertainty vector epsilon-hat over the whole horizon.
struct ExtremePoint {
    std::vector<std::vector<double>> eps;  // [bus][hour], MW

    double hour_sum(int t) const;
};

bool approx_equal(const ExtremePoint& a, const ExtremePoint& b, double tol);

/// Binary commitment schedule (I, y, z).
struct CommitmentSolution {
    std::vector<std::vector<std::uint8_t>> on;        // I[i][t]
    std::vector<std::vector<std::uint8_t>> startup;   // y[i][t]
    std::vector<std::vector<std::uint8_t>> shutdown;  // z[i][t]

    // z_{i,t+1} with the horizon-end convention z_{i,N_T+1} = 0.
    int shutdown_next(int i, int t) const {
        const int horizon = static_cast<int>(shutdown[i].size());
        return t + 1 < horizon ? shutdown[i][t + 1] : 0;
    }
};

struct StorageSchedule {
    std::vector<double> energy;     // E_t, MWh
    std::vector<double> discharge;  // P^D_t <= 0, MW
    std::vector<double> charge;     // P^C_t >= 0, MW
    std::vector<std::uint8_t> mode_discharge;  // I^D_t
    std::vector<std::uint8_t> mode_charge;     // I^C_t

    // Grid-side injection at hour t.
    double injection(int t) const { return -(discharge[t] + charge[t]); }
};

struct BaseDispatch {
    std::vector<std::vector<double>> p;  // [unit][hour], MW
    std::vector<StorageSchedule> storage;
};

/// Re-dispatch for each accumulated extreme point.
struct RecourseDispatch {
    // delta_p[k][unit][hour]; delta_storage[k][device][hour]
    std::vector<std::vector<std::vector<double>>> delta_p;
    std::vector<std::vector<std::vector<double>>> delta_storage;
};

struct ModelOptions {
    bool include_network = true;
    int n_cost_blocks = 5;
    int reference_bus = 0;
    // Additive load perturbation for re-solve price audits.
    int bump_bus = -1;
    int bump_hour = -1;
    double bump_mw = 0.0;
};

using VarGrid = std::vector<std::vector<int>>;   // [i][t] -> variable id
using RowGrid = std::vector<std::vector<int>>;   // [i][t] or [l][t] -> row id

/// Variable ids of a built UC/RED model.  Ids are -1 where a family is not
/// present (e.g. binaries in a RED build).
struct UcVariables {
    VarGrid on, startup, shutdown;              // units x hours (master only)
    VarGrid p;                                  // units x hours
    std::vector<VarGrid> block;                 // per cost block
    std::vector<VarGrid> delta_p;               // per extreme point k
    // storage
    VarGrid s_energy, s_discharge, s_charge;    // devices x hours
    VarGrid s_mode_discharge, s_mode_charge;    // master only
    std::vector<VarGrid> s_delta;               // per k
    // traditional reserve variables (build_traditional_uc only)
    VarGrid q_up, q_down;
};

/// Row ids of the priced constraint families (Eq. 6/7 of the dispatch LP).
struct UcRows {
    std::vector<int> balance;                   // per t
    RowGrid cap_up, cap_lo;                     // (6b)(6c) per unit
    RowGrid ramp_up, ramp_dn;                   // (6d)(6e)
    RowGrid flow_pos, flow_neg;                 // (6f)(6g) per line
    std::vector<std::vector<int>> k_balance;    // [k][t]  (7a)
    std::vector<RowGrid> k_cap_up, k_cap_lo;    // (7b)(7c)
    std::vector<RowGrid> k_ramp_up, k_ramp_dn;  // (7d)(7e)
    std::vector<RowGrid> k_flow_pos, k_flow_neg;  // (7f)(7g)
    // traditional reserve requirement rows, per t
    std::vector<int> req_up, req_down;
};

struct BuiltModel {
    LinearProgram lp;
    UcVariables vars;
    UcRows rows;
};

/// Master MILP (MP): base UC + dispatch plus one recourse block per extreme
/// point.  Throws std::invalid_argument when the case fails validation.
BuiltModel build_master(const CaseSystem& sys, const PtdfMatrix& ptdf,
                        std::span<const ExtremePoint> extreme_points,
                        const ModelOptions& opts = {});

/// Deterministic UC with explicit zonal reserve constraints (Eq. 24).
/// req_up / req_down are per-hour system requirements (req_down <= 0).
BuiltModel build_traditional_uc(const CaseSystem& sys, const PtdfMatrix& ptdf,
                                std::span<const double> req_up,
                                std::span<const double> req_down,
                                const ModelOptions& opts = {});

/// Fixed-commitment robust economic dispatch LP (Eq. 5-7).  Storage mode
/// binaries, when present, are fixed from `fixed_storage`.
BuiltModel build_red(const CaseSystem& sys, const PtdfMatrix& ptdf,
                     const CommitmentSolution& commitment,
                     std::span<const ExtremePoint> extreme_points,
                     const ModelOptions& opts = {},
                     const std::vector<StorageSchedule>* fixed_storage = nullptr);

CommitmentSolution extract_commitment(const CaseSystem& sys,
                                      const BuiltModel& model,
                                      const SolveResult& result);
BaseDispatch extract_base_dispatch(const CaseSystem& sys, const BuiltModel& model,
                                   const SolveResult& result);
RecourseDispatch extract_recourse(const CaseSystem& sys, const BuiltModel& model,
                                  const SolveResult& result);

/// Commitment-dependent cost sum(F_i I + C_u y + C_d z) over the horizon.
double commitment_cost(const CaseSystem& sys, const CommitmentSolution& commitment,
                       int n_cost_blocks);

}  // namespace rucmkt
