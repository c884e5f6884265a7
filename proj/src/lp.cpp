#include "rucmkt/lp.hpp"

#include <Highs.h>

#include <algorithm>
#include <cstdlib>
#include <ostream>
#include <stdexcept>

namespace rucmkt {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::IterationLimit: return "iteration-limit";
    }
    return "unknown";
}

int LinearProgram::add_variable(double lb, double ub, double obj, VarType type,
                                std::string name) {
    col_lb_.push_back(lb);
    col_ub_.push_back(ub);
    col_obj_.push_back(obj);
    col_type_.push_back(type);
    col_names_.push_back(std::move(name));
    if (type != VarType::Continuous) ++n_integer_;
    return static_cast<int>(col_lb_.size()) - 1;
}

int LinearProgram::add_row(RowSense sense, double rhs,
                           std::span<const Term> terms, std::string name) {
    for (const auto& [var, coeff] : terms) {
        if (var < 0 || var >= n_variables())
            throw std::invalid_argument("add_row: coefficient on unknown variable");
        col_index_.push_back(var);
        coeff_.push_back(coeff);
    }
    row_start_.push_back(static_cast<int>(col_index_.size()));
    row_sense_.push_back(sense);
    row_rhs_.push_back(rhs);
    row_names_.push_back(std::move(name));
    return static_cast<int>(row_rhs_.size()) - 1;
}

int LinearProgram::add_row(RowSense sense, double rhs,
                           std::initializer_list<Term> terms, std::string name) {
    return add_row(sense, rhs, std::span<const Term>(terms.begin(), terms.size()),
                   std::move(name));
}

void LinearProgram::set_variable_bounds(int var, double lb, double ub) {
    col_lb_[var] = lb;
    col_ub_[var] = ub;
}

void LinearProgram::relax_integrality() {
    std::fill(col_type_.begin(), col_type_.end(), VarType::Continuous);
    n_integer_ = 0;
}

void LinearProgram::write_lp_format(std::ostream& os) const {
    auto var_label = [this](int v) {
        return col_names_[v].empty() ? "x" + std::to_string(v) : col_names_[v];
    };
    os << "Minimize\n obj:";
    for (int v = 0; v < n_variables(); ++v)
        if (col_obj_[v] != 0.0)
            os << (col_obj_[v] >= 0 ? " + " : " - ") << std::abs(col_obj_[v]) << " "
               << var_label(v);
    os << "\nSubject To\n";
    for (int r = 0; r < n_rows(); ++r) {
        os << " " << (row_names_[r].empty() ? "c" + std::to_string(r) : row_names_[r])
           << ":";
        for (int e = row_start_[r]; e < row_start_[r + 1]; ++e)
            os << (coeff_[e] >= 0 ? " + " : " - ") << std::abs(coeff_[e]) << " "
               << var_label(col_index_[e]);
        os << (row_sense_[r] == RowSense::Equal ? " = " : " <= ") << row_rhs_[r]
           << "\n";
    }
    os << "Bounds\n";
    for (int v = 0; v < n_variables(); ++v)
        os << " " << col_lb_[v] << " <= " << var_label(v) << " <= " << col_ub_[v]
           << "\n";
    bool any_int = false;
    for (int v = 0; v < n_variables(); ++v)
        if (col_type_[v] != VarType::Continuous) {
            if (!any_int) os << "General\n";
            any_int = true;
            os << " " << var_label(v) << "\n";
        }
    os << "End\n";
}

struct HighsBridge {
    static HighsLp to_highs(const LinearProgram& lp, bool with_integrality) {
        HighsLp h;
        h.num_col_ = lp.n_variables();
        h.num_row_ = lp.n_rows();
        h.sense_ = ObjSense::kMinimize;
        h.offset_ = lp.obj_offset_;
        h.col_cost_ = lp.col_obj_;
        h.col_lower_ = lp.col_lb_;
        h.col_upper_ = lp.col_ub_;
        h.row_lower_.resize(lp.n_rows());
        h.row_upper_.resize(lp.n_rows());
        for (int r = 0; r < lp.n_rows(); ++r) {
            h.row_upper_[r] = lp.row_rhs_[r];
            h.row_lower_[r] =
                lp.row_sense_[r] == RowSense::Equal ? lp.row_rhs_[r] : -kInf;
        }
        h.a_matrix_.format_ = MatrixFormat::kRowwise;
        h.a_matrix_.start_.assign(lp.row_start_.begin(), lp.row_start_.end());
        h.a_matrix_.index_.assign(lp.col_index_.begin(), lp.col_index_.end());
        h.a_matrix_.value_ = lp.coeff_;
        if (with_integrality && lp.has_integrality()) {
            h.integrality_.resize(lp.n_variables());
            for (int v = 0; v < lp.n_variables(); ++v)
                h.integrality_[v] = lp.col_type_[v] == VarType::Continuous
                                        ? HighsVarType::kContinuous
                                        : HighsVarType::kInteger;
        }
        return h;
    }

    static const std::vector<RowSense>& senses(const LinearProgram& lp) {
        return lp.row_sense_;
    }
};

namespace {

double env_time_limit() {
    if (const char* s = std::getenv("RUCMKT_SOLVER_TIME_LIMIT")) {
        const double v = std::atof(s);
        if (v > 0) return v;
    }
    return 0.0;
}

SolveStatus map_status(HighsModelStatus s) {
    switch (s) {
        case HighsModelStatus::kOptimal: return SolveStatus::Optimal;
        case HighsModelStatus::kInfeasible: return SolveStatus::Infeasible;
        case HighsModelStatus::kUnbounded:
        case HighsModelStatus::kUnboundedOrInfeasible:
            return SolveStatus::Unbounded;
        default: return SolveStatus::IterationLimit;
    }
}

SolveResult run_highs(const LinearProgram& lp, const SolveOptions& opts,
                      bool milp) {
    Highs highs;
    highs.setOptionValue("output_flag", false);
    highs.setOptionValue("threads", opts.threads);
    highs.setOptionValue("random_seed", 0);
    highs.setOptionValue("primal_feasibility_tolerance", 1e-8);
    highs.setOptionValue("dual_feasibility_tolerance", 1e-8);
    if (milp) highs.setOptionValue("mip_rel_gap", opts.mip_rel_gap);
    double tl = opts.time_limit_seconds > 0 ? opts.time_limit_seconds
                                            : env_time_limit();
    if (tl > 0) highs.setOptionValue("time_limit", tl);

    const HighsLp model = HighsBridge::to_highs(lp, milp);
    if (highs.passModel(model) != HighsStatus::kOk)
        throw std::runtime_error("solver rejected the model");
    if (highs.run() == HighsStatus::kError)
        throw std::runtime_error("solver error: " +
                                 highs.modelStatusToString(highs.getModelStatus()));

    SolveResult out;
    out.status = map_status(highs.getModelStatus());
    if (out.status != SolveStatus::Optimal) return out;

    const HighsSolution& sol = highs.getSolution();
    out.objective = highs.getInfo().objective_function_value;
    out.primal = sol.col_value;
    if (!milp && sol.dual_valid) {
        out.row_dual.resize(lp.n_rows());
        const auto& senses = HighsBridge::senses(lp);
        for (int r = 0; r < lp.n_rows(); ++r) {
            // HiGHS reports d(obj)/d(rhs); flip <= rows to the non-negative
            // Lagrangian-multiplier convention.
            out.row_dual[r] = senses[r] == RowSense::Equal ? sol.row_dual[r]
                                                           : -sol.row_dual[r];
        }
        out.reduced_cost = sol.col_dual;
    }
    return out;
}

}  // namespace

SolveResult solve_lp(const LinearProgram& lp, const SolveOptions& opts) {
    if (lp.has_integrality())
        throw std::invalid_argument("solve_lp: program has integer variables");
    return run_highs(lp, opts, false);
}

SolveResult solve_milp(const LinearProgram& lp, const SolveOptions& opts) {
    return run_highs(lp, opts, true);
}

}  // namespace rucmkt
