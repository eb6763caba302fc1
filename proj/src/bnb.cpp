#include "ccmdvsp/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

namespace ccmdvsp::milp {

namespace {

struct Node {
    long id = 0;
    double bound = -kInf;
    std::vector<double> lb, ub;
    std::shared_ptr<Basis> basis;
};

struct NodeOrder {
    bool operator()(const std::shared_ptr<Node>& a, const std::shared_ptr<Node>& b) const {
        if (a->bound != b->bound) return a->bound > b->bound;
        return a->id < b->id;
    }
};

bool row_violated(const Row& r, const std::vector<double>& x, double tol) {
    double a = 0.0;
    for (const Term& t : r.terms) a += t.coef * x[t.var];
    switch (r.sense) {
    case Sense::LE: return a > r.rhs + tol;
    case Sense::GE: return a < r.rhs - tol;
    case Sense::EQ: return std::abs(a - r.rhs) > tol;
    }
    return false;
}

}  // namespace

MilpSolution bnb_solve(Model m, const LazyCallback& lazy, const BnbOptions& opt) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - t0).count(); };

    MilpSolution out;
    const int n = m.num_vars();
    std::priority_queue<std::shared_ptr<Node>, std::vector<std::shared_ptr<Node>>, NodeOrder> open;
    long next_id = 0;
    auto root = std::make_shared<Node>();
    root->id = next_id++;
    root->lb = m.lbs();
    root->ub = m.ubs();
    open.push(root);

    // Bounds of nodes dropped without being fully solved still limit the proof.
    double lost_bound = kInf;

    auto node_bound = [&](double obj) {
        return opt.objective_integral ? std::ceil(obj - 1e-6) : obj;
    };
    auto prunable = [&](double bound) {
        if (!out.has_incumbent) return false;
        if (opt.objective_integral) return bound >= out.objective - 1e-6;
        return bound >= out.objective - std::max(1e-9, opt.rel_gap * std::abs(out.objective));
    };
    auto global_bound = [&] {
        double b = out.has_incumbent ? out.objective : kInf;
        if (!open.empty()) b = std::min(b, open.top()->bound);
        return std::min(b, lost_bound);
    };
    auto gap_of = [&](double bound) {
        if (!out.has_incumbent) return kInf;
        return std::max(0.0, out.objective - bound) / std::max(1.0, std::abs(out.objective));
    };

    Status stop = Status::Optimal;
    bool unbounded = false;
    while (!open.empty()) {
        if (out.has_incumbent && gap_of(global_bound()) <= opt.rel_gap) break;
        if (elapsed() > opt.time_limit) {
            stop = Status::TimeLimit;
            break;
        }
        if (out.nodes >= opt.max_nodes) {
            stop = Status::NodeLimit;
            break;
        }
        auto node = open.top();
        open.pop();
        if (prunable(node->bound)) continue;
        ++out.nodes;

        std::shared_ptr<Basis> basis = node->basis;
        LpSolution lp;
        while (true) {
            lp = lp_solve(m, node->lb, node->ub, opt.lp, basis.get());
            out.lp_iterations += lp.iterations;
            if (lp.status != Status::Optimal) break;
            const double nb = node_bound(lp.objective);
            if (prunable(nb)) break;

            int branch_var = -1;
            double best_frac = opt.int_tol;
            for (int j = 0; j < n; ++j) {
                if (!m.is_integer(j)) continue;
                const double f = lp.x[j] - std::floor(lp.x[j]);
                const double dist = std::min(f, 1.0 - f);
                if (dist > best_frac + 1e-12) {
                    best_frac = dist;
                    branch_var = j;
                }
            }
            if (branch_var >= 0) {
                auto child_basis = std::make_shared<Basis>(lp.basis);
                const double v = lp.x[branch_var];
                auto down = std::make_shared<Node>();
                down->id = next_id++;
                down->bound = nb;
                down->lb = node->lb;
                down->ub = node->ub;
                down->ub[branch_var] = std::floor(v);
                down->basis = child_basis;
                auto up = std::make_shared<Node>();
                up->id = next_id++;
                up->bound = nb;
                up->lb = node->lb;
                up->ub = node->ub;
                up->lb[branch_var] = std::ceil(v);
                up->basis = child_basis;
                open.push(down);
                open.push(up);
                break;
            }

            std::vector<double> x = lp.x;
            for (int j = 0; j < n; ++j)
                if (m.is_integer(j)) x[j] = std::round(x[j]);
            if (lazy) {
                ++out.lazy_calls;
                std::vector<Row> rows = lazy(x);
                bool any = false;
                for (const Row& r : rows)
                    if (row_violated(r, x, 1e-6)) any = true;
                if (any) {
                    for (Row& r : rows) {
                        out.lazy_rows.push_back(r);
                        m.add_row(std::move(r));
                    }
                    basis = std::make_shared<Basis>(lp.basis);
                    continue;
                }
            }
            const double obj = m.objective(x);
            if (!out.has_incumbent || obj < out.objective) {
                out.has_incumbent = true;
                out.objective = obj;
                out.x = x;
            }
            break;
        }
        if (lp.status == Status::Unbounded && node->id == 0) {
            unbounded = true;
            break;
        }
        if (lp.status == Status::IterLimit) lost_bound = std::min(lost_bound, node->bound);
        out.bound_history.push_back(global_bound());
    }

    out.bound = global_bound();
    if (unbounded) {
        out.status = Status::Unbounded;
        out.bound = -kInf;
        return out;
    }
    if (!out.has_incumbent) {
        if (stop != Status::Optimal) out.status = stop;
        else out.status = std::isinf(lost_bound) ? Status::Infeasible : Status::IterLimit;
        if (out.status == Status::Infeasible) out.bound = kInf;
        return out;
    }
    out.bound = std::min(out.bound, out.objective);
    out.gap = gap_of(out.bound);
    if (stop == Status::Optimal && out.gap > opt.rel_gap) stop = Status::IterLimit;
    out.status = stop;
    return out;
}

}  // namespace ccmdvsp::milp
