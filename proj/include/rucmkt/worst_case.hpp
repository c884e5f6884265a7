#pragma once

#include <span>
#include <vector>

#include "rucmkt/case.hpp"
#include "rucmkt/uc_model.hpp"

namespace rucmkt {

struct WorstCaseOptions {
    bool include_network = true;
    // Abort if one hour would enumerate more vertices than this.
    std::size_t max_vertices = 200000;
};

/// All vertices of the hour-t uncertainty polytope, scaled to MW.  Each
/// vertex is a full bus vector; buses with zero bound stay zero.  Order is
/// deterministic: supports lexicographic by bus index, residual bus
/// ascending, then sign patterns counted with + first.
std::vector<std::vector<double>> enumerate_vertices(const UncertaintySpec& unc,
                                                    int hour);

/// Minimal total slack of the hour-t recourse LP (Eq. 29 inner problem);
/// 0 means the deviation eps is fully accommodated.
double recourse_feasibility(const CaseSystem& sys, const PtdfMatrix& ptdf,
                            const CommitmentSolution& commitment,
                            const BaseDispatch& base, int hour,
                            std::span<const double> eps,
                            const WorstCaseOptions& opts = {});

struct HourWorst {
    double violation = 0.0;            // MW of unservable deviation
    std::vector<double> eps;           // arg max vertex, per bus
    int vertex_index = -1;             // position in enumeration order
};

struct ViolationReport {
    double total = 0.0;                // Z = sum of per-hour maxima
    std::vector<HourWorst> per_hour;

    ExtremePoint to_extreme_point(int n_buses) const;
};

/// Exact worst-case oracle (SP): per hour, maximize recourse infeasibility
/// over the vertex set; ties broken by enumeration order.
ViolationReport find_worst(const CaseSystem& sys, const PtdfMatrix& ptdf,
                           const CommitmentSolution& commitment,
                           const BaseDispatch& base,
                           const WorstCaseOptions& opts = {});

}  // namespace rucmkt
