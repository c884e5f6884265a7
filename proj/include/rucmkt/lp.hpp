#pragma once

#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rucmkt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarType { Continuous, Binary, Integer };
enum class RowSense { LessEqual, Equal };

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(SolveStatus s);

/// Sparse minimization problem built row by row.
///
/// Dual convention (normalized at the solver boundary): for an optimal LP,
/// the dual of an Equal row is d(objective)/d(rhs), and the dual of a
/// LessEqual row is the non-negative multiplier of the Lagrangian term
/// mu * (a'x - rhs).  Equality duals are sign-free.
class LinearProgram {
  public:
    using Term = std::pair<int, double>;

    int add_variable(double lb, double ub, double obj,
                     VarType type = VarType::Continuous, std::string name = {});
    int add_row(RowSense sense, double rhs, std::span<const Term> terms,
                std::string name = {});
    int add_row(RowSense sense, double rhs, std::initializer_list<Term> terms,
                std::string name = {});

    void set_objective_offset(double offset) { obj_offset_ = offset; }
    double objective_offset() const { return obj_offset_; }

    void set_variable_bounds(int var, double lb, double ub);
    void fix_variable(int var, double value) { set_variable_bounds(var, value, value); }

    /// Drop all integrality marks (for fixed-binary re-pricing solves).
    void relax_integrality();

    int n_variables() const { return static_cast<int>(col_lb_.size()); }
    int n_rows() const { return static_cast<int>(row_rhs_.size()); }
    bool has_integrality() const { return n_integer_ > 0; }

    const std::string& variable_name(int v) const { return col_names_[v]; }
    const std::string& row_name(int r) const { return row_names_[r]; }

    /// CPLEX LP-format text dump for offline debugging.
    void write_lp_format(std::ostream& os) const;

  private:
    friend struct HighsBridge;
    std::vector<double> col_lb_, col_ub_, col_obj_;
    std::vector<VarType> col_type_;
    std::vector<std::string> col_names_;
    std::vector<RowSense> row_sense_;
    std::vector<double> row_rhs_;
    std::vector<std::string> row_names_;
    // CSR rows
    std::vector<int> row_start_{0};
    std::vector<int> col_index_;
    std::vector<double> coeff_;
    double obj_offset_ = 0.0;
    int n_integer_ = 0;
};

struct SolveResult {
    SolveStatus status = SolveStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> primal;
    std::vector<double> row_dual;      // normalized, present for optimal LPs
    std::vector<double> reduced_cost;  // column duals, same availability

    bool optimal() const { return status == SolveStatus::Optimal; }
};

struct SolveOptions {
    double mip_rel_gap = 1e-6;
    double time_limit_seconds = 0.0;  // 0: use RUCMKT_SOLVER_TIME_LIMIT or none
    int threads = 1;
};

/// Solve a pure LP; primal and normalized duals on success.  Throws
/// std::invalid_argument if the program has integer variables.
SolveResult solve_lp(const LinearProgram& lp, const SolveOptions& opts = {});

/// Solve a MILP (binaries allowed); no duals are returned.
SolveResult solve_milp(const LinearProgram& lp, const SolveOptions& opts = {});

}  // namespace rucmkt
