#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace ccmdvsp::milp {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { LE, EQ, GE };

struct Term {
    int var = 0;
    double coef = 0.0;
};

struct Row {
    std::vector<Term> terms;
    Sense sense = Sense::LE;
    double rhs = 0.0;
    std::string name;
};

class Model {
public:
    int add_var(double lb, double ub, double cost, bool integer, std::string name = {});
    int add_row(Row row);
    int add_row(std::vector<Term> terms, Sense sense, double rhs, std::string name = {});

    int num_vars() const { return static_cast<int>(lb_.size()); }
    int num_rows() const { return static_cast<int>(rows_.size()); }

    double lb(int j) const { return lb_[j]; }
    double ub(int j) const { return ub_[j]; }
    double cost(int j) const { return cost_[j]; }
    bool is_integer(int j) const { return integer_[j] != 0; }
    const std::string& var_name(int j) const { return names_[j]; }
    const Row& row(int r) const { return rows_[r]; }
    const std::vector<Row>& rows() const { return rows_; }
    const std::vector<double>& lbs() const { return lb_; }
    const std::vector<double>& ubs() const { return ub_; }
    const std::vector<double>& costs() const { return cost_; }

    void set_bounds(int j, double lb, double ub);
    void set_cost(int j, double c) { cost_[j] = c; }
    void set_integer(int j, bool integer) { integer_[j] = integer ? 1 : 0; }

    double row_activity(int r, const std::vector<double>& x) const;
    // Largest violation of rows and bounds at x (0 when feasible).
    double max_violation(const std::vector<double>& x) const;
    double objective(const std::vector<double>& x) const;

    // CPLEX-style LP text format, for debugging with external tools.
    std::string to_lp_format() const;

private:
    std::vector<double> lb_, ub_, cost_;
    std::vector<char> integer_;
    std::vector<std::string> names_;
    std::vector<Row> rows_;
};

enum class Status { Optimal, Infeasible, Unbounded, IterLimit, TimeLimit, NodeLimit };
const char* to_string(Status s);

enum class VarStat : signed char { Basic, AtLower, AtUpper, Free };

// Status of structural columns followed by one slack per row. A basis for a
// model with fewer rows is extended with basic slacks.
struct Basis {
    std::vector<VarStat> stat;
};

struct LpOptions {
    int max_iterations = 200000;
    double feas_tol = 1e-7;
    double opt_tol = 1e-9;
    double pivot_tol = 1e-9;
    int bland_after = 50;  // consecutive degenerate pivots before Bland's rule
    int refactor_every = 100;
};

struct LpSolution {
    Status status = Status::Infeasible;
    std::vector<double> x;
    std::vector<double> duals;          // one per row, d obj / d rhs
    std::vector<double> reduced_costs;  // structural columns
    double objective = 0.0;
    int iterations = 0;
    Basis basis;
};

LpSolution lp_solve(const Model& m, const LpOptions& opt = {}, const Basis* warm = nullptr);
// Bound vectors override the model bounds (used by branch-and-bound).
LpSolution lp_solve(const Model& m, const std::vector<double>& lb, const std::vector<double>& ub, const LpOptions& opt,
                    const Basis* warm);

// Dual objective b'y + sum of bound terms of nonbasic reduced costs.
double dual_objective(const Model& m, const LpSolution& sol, const std::vector<double>& lb, const std::vector<double>& ub);

struct BnbOptions {
    double int_tol = 1e-6;
    double rel_gap = 1e-6;
    long max_nodes = 1000000;
    double time_limit = kInf;  // seconds
    // All feasible objective values are integers (prunes with ceil).
    bool objective_integral = false;
    LpOptions lp;
};

// Called at integer-feasible LP solutions; returns rows to add globally.
using LazyCallback = std::function<std::vector<Row>(const std::vector<double>& x)>;

struct MilpSolution {
    Status status = Status::Infeasible;
    bool has_incumbent = false;
    std::vector<double> x;
    double objective = kInf;
    double bound = -kInf;
    double gap = kInf;
    long nodes = 0;
    long lp_iterations = 0;
    int lazy_calls = 0;
    std::vector<Row> lazy_rows;        // rows added by the callback, in order
    std::vector<double> bound_history; // global dual bound after each node
};

MilpSolution bnb_solve(Model m, const LazyCallback& lazy, const BnbOptions& opt = {});

}  // namespace ccmdvsp::milp
