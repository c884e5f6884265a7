#include "rucmkt/ccg.hpp"

#include <chrono>
#include <string>

namespace rucmkt {

CcgResult run_ccg(const CaseSystem& sys, const CcgOptions& opts) {
    CcgTrace trace;
    std::vector<ExtremePoint> points;
    const PtdfMatrix ptdf =
        opts.model.include_network
            ? compute_ptdf(sys.lines, sys.n_buses(), opts.model.reference_bus)
            : PtdfMatrix{};
    WorstCaseOptions wc;
    wc.include_network = opts.model.include_network;

    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        const auto t0 = std::chrono::steady_clock::now();
        BuiltModel master = build_master(sys, ptdf, points, opts.model);
        const SolveResult res = solve_milp(master.lp, opts.solve);
        if (res.status == SolveStatus::Infeasible)
            throw CcgError("master problem infeasible (case over-constrained)",
                           std::move(trace));
        if (!res.optimal())
            throw CcgError(std::string("master solve failed: ") +
                               to_string(res.status),
                           std::move(trace));

        CommitmentSolution commitment = extract_commitment(sys, master, res);
        BaseDispatch dispatch = extract_base_dispatch(sys, master, res);
        ViolationReport worst = find_worst(sys, ptdf, commitment, dispatch, wc);

        CcgIterationRecord rec;
        rec.iteration = iter;
        rec.master_objective = res.objective;
        rec.violation = worst.total;
        rec.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();

        if (worst.total <= opts.delta) {
            trace.iterations.push_back(std::move(rec));
            trace.final_violation = worst.total;
            CcgResult out;
            out.commitment = std::move(commitment);
            out.dispatch = std::move(dispatch);
            out.extreme_points = std::move(points);
            out.trace = std::move(trace);
            out.objective = res.objective;
            return out;
        }

        ExtremePoint pt = worst.to_extreme_point(sys.n_buses());
        for (const auto& existing : points)
            if (approx_equal(existing, pt, 1e-9))
                throw CcgError(
                    "worst-case oracle returned a duplicate extreme point at "
                    "iteration " + std::to_string(iter) +
                        " (solver tolerance trouble)",
                    std::move(trace));
        rec.point_added = true;
        rec.added_point = pt;
        trace.iterations.push_back(std::move(rec));
        points.push_back(std::move(pt));
    }
    throw CcgError("CCG did not converge within " +
                       std::to_string(opts.max_iterations) + " iterations",
                   std::move(trace));
}

}  // namespace rucmkt
