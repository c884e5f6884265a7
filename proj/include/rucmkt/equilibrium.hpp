#pragma once

#include <vector>

#include "rucmkt/case.hpp"
#include "rucmkt/pricing.hpp"
#include "rucmkt/uc_model.hpp"

namespace rucmkt {

struct PmpResult {
    std::vector<double> schedule;     // profit-maximizing output per hour
    double max_profit = 0.0;          // $ over the horizon
    double profit_at_dispatch = 0.0;  // $ evaluated at the ISO schedule
    double gap = 0.0;                 // max_profit - profit_at_dispatch
};

struct ProfitReport {
    std::vector<PmpResult> units;
    double tolerance = 0.01;  // $
    bool equilibrium = false;

    double max_gap() const;
};

/// Per-unit profit maximization (PMP_i) at posted prices with the unit's own
/// capacity/ramp constraints and the reserve definitions substituted as
/// epigraph rows.  Profit excludes commitment-fixed costs (commitment is not
/// a decision here).
PmpResult solve_pmp(const CaseSystem& sys, int unit, const PriceSet& prices,
                    const CommitmentSolution& commitment,
                    const BaseDispatch& dispatch, int n_cost_blocks = 5);

/// Checks that no unit can profit by deviating from the ISO dispatch.
ProfitReport verify_equilibrium(const CaseSystem& sys, const PriceSet& prices,
                                const BaseDispatch& dispatch,
                                const CommitmentSolution& commitment,
                                double tolerance = 0.01, int n_cost_blocks = 5);

}  // namespace rucmkt
