#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "rucmkt/case.hpp"
#include "rucmkt/lp.hpp"
#include "rucmkt/uc_model.hpp"
#include "rucmkt/worst_case.hpp"

namespace rucmkt {

struct CcgOptions {
    double delta = 1e-4;      // feasibility tolerance, MW
    int max_iterations = 50;  // master solves
    ModelOptions model;
    SolveOptions solve;
};

struct CcgIterationRecord {
    int iteration = 0;             // 1-based
    double master_objective = 0.0;
    double violation = 0.0;        // Z from the oracle
    double wall_seconds = 0.0;
    bool point_added = false;
    ExtremePoint added_point;      // meaningful when point_added
};

struct CcgTrace {
    std::vector<CcgIterationRecord> iterations;
    double final_violation = 0.0;
};

struct CcgResult {
    CommitmentSolution commitment;
    BaseDispatch dispatch;
    std::vector<ExtremePoint> extreme_points;
    CcgTrace trace;
    double objective = 0.0;
};

class CcgError : public std::runtime_error {
  public:
    CcgError(const std::string& what, CcgTrace trace)
        : std::runtime_error(what), trace(std::move(trace)) {}
    CcgTrace trace;
};

/// Column-and-constraint generation: alternate master solves and the
/// worst-case oracle until the violation drops to delta.
CcgResult run_ccg(const CaseSystem& sys, const CcgOptions& opts = {});

}  // namespace rucmkt
