#include "ccmdvsp/milp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ccmdvsp::milp {

int Model::add_var(double lb, double ub, double cost, bool integer, std::string name) {
    if (lb > ub) throw std::invalid_argument("variable lower bound exceeds upper bound");
    if (integer && (!std::isfinite(lb) || !std::isfinite(ub))) throw std::invalid_argument("integer variables need finite bounds");
    lb_.push_back(lb);
    ub_.push_back(ub);
    cost_.push_back(cost);
    integer_.push_back(integer ? 1 : 0);
    if (name.empty()) name = "v" + std::to_string(lb_.size() - 1);
    names_.push_back(std::move(name));
    return num_vars() - 1;
}

int Model::add_row(Row row) {
    for (const Term& t : row.terms)
        if (t.var < 0 || t.var >= num_vars()) throw std::invalid_argument("row references unknown variable");
    if (row.name.empty()) row.name = "r" + std::to_string(rows_.size());
    rows_.push_back(std::move(row));
    return num_rows() - 1;
}

int Model::add_row(std::vector<Term> terms, Sense sense, double rhs, std::string name) {
    return add_row(Row{std::move(terms), sense, rhs, std::move(name)});
}

void Model::set_bounds(int j, double lb, double ub) {
    lb_[j] = lb;
    ub_[j] = ub;
}

double Model::row_activity(int r, const std::vector<double>& x) const {
    double a = 0.0;
    for (const Term& t : rows_[r].terms) a += t.coef * x[t.var];
    return a;
}

double Model::max_violation(const std::vector<double>& x) const {
    double v = 0.0;
    for (int j = 0; j < num_vars(); ++j) v = std::max({v, lb_[j] - x[j], x[j] - ub_[j]});
    for (int r = 0; r < num_rows(); ++r) {
        const double a = row_activity(r, x);
        switch (rows_[r].sense) {
        case Sense::LE: v = std::max(v, a - rows_[r].rhs); break;
        case Sense::GE: v = std::max(v, rows_[r].rhs - a); break;
        case Sense::EQ: v = std::max(v, std::abs(a - rows_[r].rhs)); break;
        }
    }
    return v;
}

double Model::objective(const std::vector<double>& x) const {
    double o = 0.0;
    for (int j = 0; j < num_vars(); ++j) o += cost_[j] * x[j];
    return o;
}

std::string Model::to_lp_format() const {
    std::ostringstream os;
    os.precision(17);
    auto term = [&](double c, int j, bool first) {
        if (c < 0) os << " - " << -c << " " << names_[j];
        else os << (first ? " " : " + ") << c << " " << names_[j];
    };
    os << "Minimize\n obj:";
    bool first = true;
    for (int j = 0; j < num_vars(); ++j)
        if (cost_[j] != 0.0) {
            term(cost_[j], j, first);
            first = false;
        }
    if (first) os << " 0 " << (num_vars() ? names_[0] : "x");
    os << "\nSubject To\n";
    for (const Row& r : rows_) {
        os << " " << r.name << ":";
        bool f = true;
        for (const Term& t : r.terms) {
            term(t.coef, t.var, f);
            f = false;
        }
        if (f) os << " 0 " << (num_vars() ? names_[0] : "x");
        os << (r.sense == Sense::LE ? " <= " : r.sense == Sense::GE ? " >= " : " = ") << r.rhs << "\n";
    }
    os << "Bounds\n";
    for (int j = 0; j < num_vars(); ++j) {
        os << " ";
        if (std::isinf(lb_[j]) && std::isinf(ub_[j])) os << names_[j] << " free\n";
        else {
            if (std::isinf(lb_[j])) os << "-inf";
            else os << lb_[j];
            os << " <= " << names_[j] << " <= ";
            if (std::isinf(ub_[j])) os << "+inf";
            else os << ub_[j];
            os << "\n";
        }
    }
    bool any_int = false;
    for (int j = 0; j < num_vars(); ++j)
        if (integer_[j]) {
            if (!any_int) os << "General\n";
            any_int = true;
            os << " " << names_[j] << "\n";
        }
    os << "End\n";
    return os.str();
}

const char* to_string(Status s) {
    switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterLimit: return "iteration_limit";
    case Status::TimeLimit: return "time_limit";
    case Status::NodeLimit: return "node_limit";
    }
    return "unknown";
}

namespace {

struct SingularBasis {};

// Bounded primal simplex on  A x + s = b, lo <= (x, s) <= up,  with a dense
// explicit basis inverse. Phase 1 minimises the sum of bound violations of
// the basic variables (composite objective), phase 2 the true cost.
class Simplex {
public:
    Simplex(const Model& m, const std::vector<double>& lb, const std::vector<double>& ub, const LpOptions& opt)
        : M_(m), opt_(opt), n_(m.num_vars()), m_(m.num_rows()), N_(n_ + m_) {
        lo_.resize(N_);
        up_.resize(N_);
        cost_.assign(N_, 0.0);
        for (int j = 0; j < n_; ++j) {
            lo_[j] = lb[j];
            up_[j] = ub[j];
            cost_[j] = m.cost(j);
        }
        b_.resize(m_);
        std::vector<int> count(n_ + 1, 0);
        for (int r = 0; r < m_; ++r) {
            const Row& row = m.row(r);
            b_[r] = row.rhs;
            switch (row.sense) {
            case Sense::LE: lo_[n_ + r] = 0.0; up_[n_ + r] = kInf; break;
            case Sense::GE: lo_[n_ + r] = -kInf; up_[n_ + r] = 0.0; break;
            case Sense::EQ: lo_[n_ + r] = 0.0; up_[n_ + r] = 0.0; break;
            }
            for (const Term& t : row.terms) ++count[t.var + 1];
        }
        for (int j = 0; j < n_; ++j) count[j + 1] += count[j];
        col_start_ = count;
        col_row_.resize(count[n_]);
        col_val_.resize(count[n_]);
        std::vector<int> fill(count.begin(), count.end() - 1);
        for (int r = 0; r < m_; ++r)
            for (const Term& t : m.row(r).terms) {
                col_row_[fill[t.var]] = r;
                col_val_[fill[t.var]++] = t.coef;
            }
    }

    LpSolution run(const Basis* warm) {
        bool warm_ok = warm && init_from(*warm);
        if (warm_ok) {
            try {
                refactor();
            } catch (const SingularBasis&) {
                warm_ok = false;
            }
        }
        if (!warm_ok) {
            init_slack_basis();
            refactor();
        }
        return iterate();
    }

private:
    const Model& M_;
    LpOptions opt_;
    int n_, m_, N_;
    std::vector<double> lo_, up_, cost_, b_;
    std::vector<int> col_start_, col_row_;
    std::vector<double> col_val_;
    std::vector<int> head_;
    std::vector<VarStat> stat_;
    std::vector<double> x_;
    std::vector<double> binv_;
    int iters_ = 0;
    int since_refactor_ = 0;

    template <class F>
    void for_column(int j, F&& f) const {
        if (j < n_) {
            for (int q = col_start_[j]; q < col_start_[j + 1]; ++q) f(col_row_[q], col_val_[q]);
        } else {
            f(j - n_, 1.0);
        }
    }

    double nonbasic_value(int j) const {
        switch (stat_[j]) {
        case VarStat::AtLower: return lo_[j];
        case VarStat::AtUpper: return up_[j];
        default: return 0.0;
        }
    }

    void fix_nonbasic(int j) {
        if (stat_[j] == VarStat::Basic) return;
        const bool has_lo = std::isfinite(lo_[j]);
        const bool has_up = std::isfinite(up_[j]);
        if (stat_[j] == VarStat::AtLower && !has_lo) stat_[j] = has_up ? VarStat::AtUpper : VarStat::Free;
        else if (stat_[j] == VarStat::AtUpper && !has_up) stat_[j] = has_lo ? VarStat::AtLower : VarStat::Free;
        else if (stat_[j] == VarStat::Free && (has_lo || has_up)) stat_[j] = has_lo ? VarStat::AtLower : VarStat::AtUpper;
        x_[j] = nonbasic_value(j);
    }

    bool init_from(const Basis& w) {
        if (static_cast<int>(w.stat.size()) < n_ || static_cast<int>(w.stat.size()) > N_) return false;
        stat_ = w.stat;
        stat_.resize(N_, VarStat::Basic);
        head_.clear();
        for (int j = 0; j < N_; ++j)
            if (stat_[j] == VarStat::Basic) head_.push_back(j);
        if (static_cast<int>(head_.size()) != m_) return false;
        x_.assign(N_, 0.0);
        for (int j = 0; j < N_; ++j) fix_nonbasic(j);
        return true;
    }

    void init_slack_basis() {
        stat_.assign(N_, VarStat::AtLower);
        x_.assign(N_, 0.0);
        head_.resize(m_);
        for (int r = 0; r < m_; ++r) {
            head_[r] = n_ + r;
            stat_[n_ + r] = VarStat::Basic;
        }
        for (int j = 0; j < n_; ++j) fix_nonbasic(j);
    }

    // Builds the explicit inverse from the kernel formed by basic structural
    // columns on the rows whose slack is nonbasic.
    void refactor() {
        std::vector<int> slack_pos(m_, -1), q_pos(n_, -1);
        std::vector<int> Q;
        for (int p = 0; p < m_; ++p) {
            const int c = head_[p];
            if (c >= n_) slack_pos[c - n_] = p;
            else {
                q_pos[c] = static_cast<int>(Q.size());
                Q.push_back(c);
            }
        }
        std::vector<int> Rk;
        std::vector<int> rk_index(m_, -1);
        for (int r = 0; r < m_; ++r)
            if (slack_pos[r] < 0) {
                rk_index[r] = static_cast<int>(Rk.size());
                Rk.push_back(r);
            }
        const int q = static_cast<int>(Q.size());
        if (static_cast<int>(Rk.size()) != q) throw SingularBasis{};
        // K = A[Rk, Q], inverted by Gauss-Jordan with partial pivoting.
        std::vector<double> K(static_cast<std::size_t>(q) * q, 0.0), Kinv(static_cast<std::size_t>(q) * q, 0.0);
        for (int bcol = 0; bcol < q; ++bcol)
            for_column(Q[bcol], [&](int r, double v) {
                if (rk_index[r] >= 0) K[static_cast<std::size_t>(rk_index[r]) * q + bcol] = v;
            });
        for (int a = 0; a < q; ++a) Kinv[static_cast<std::size_t>(a) * q + a] = 1.0;
        for (int c = 0; c < q; ++c) {
            int piv = -1;
            double best = 1e-11;
            for (int r = c; r < q; ++r) {
                const double v = std::abs(K[static_cast<std::size_t>(r) * q + c]);
                if (v > best) {
                    best = v;
                    piv = r;
                }
            }
            if (piv < 0) throw SingularBasis{};
            if (piv != c) {
                for (int t = 0; t < q; ++t) {
                    std::swap(K[static_cast<std::size_t>(piv) * q + t], K[static_cast<std::size_t>(c) * q + t]);
                    std::swap(Kinv[static_cast<std::size_t>(piv) * q + t], Kinv[static_cast<std::size_t>(c) * q + t]);
                }
            }
            const double inv = 1.0 / K[static_cast<std::size_t>(c) * q + c];
            for (int t = 0; t < q; ++t) {
                K[static_cast<std::size_t>(c) * q + t] *= inv;
                Kinv[static_cast<std::size_t>(c) * q + t] *= inv;
            }
            for (int r = 0; r < q; ++r) {
                if (r == c) continue;
                const double f = K[static_cast<std::size_t>(r) * q + c];
                if (f == 0.0) continue;
                for (int t = 0; t < q; ++t) {
                    K[static_cast<std::size_t>(r) * q + t] -= f * K[static_cast<std::size_t>(c) * q + t];
                    Kinv[static_cast<std::size_t>(r) * q + t] -= f * Kinv[static_cast<std::size_t>(c) * q + t];
                }
            }
        }
        // After elimination K = I, so Kinv maps v[Rk] to the structural values
        // in the order of Q.
        binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int p = 0; p < m_; ++p) {
            const int c = head_[p];
            double* row = &binv_[static_cast<std::size_t>(p) * m_];
            if (c < n_) {
                const int bq = q_pos[c];
                for (int a = 0; a < q; ++a) row[Rk[a]] = Kinv[static_cast<std::size_t>(bq) * q + a];
            }
        }
        for (int r = 0; r < m_; ++r) {
            const int p = slack_pos[r];
            if (p < 0) continue;
            double* row = &binv_[static_cast<std::size_t>(p) * m_];
            row[r] = 1.0;
            for (const Term& t : M_.row(r).terms) {
                const int bq = q_pos[t.var];
                if (bq < 0 || t.coef == 0.0) continue;
                const double* kr = &Kinv[static_cast<std::size_t>(bq) * q];
                for (int a = 0; a < q; ++a) row[Rk[a]] -= t.coef * kr[a];
            }
        }
        since_refactor_ = 0;
        recompute_basics();
    }

    void recompute_basics() {
        std::vector<double> rhs = b_;
        for (int j = 0; j < N_; ++j) {
            if (stat_[j] == VarStat::Basic) continue;
            const double v = x_[j];
            if (v == 0.0) continue;
            for_column(j, [&](int r, double a) { rhs[r] -= a * v; });
        }
        for (int p = 0; p < m_; ++p) {
            const double* row = &binv_[static_cast<std::size_t>(p) * m_];
            double s = 0.0;
            for (int r = 0; r < m_; ++r) s += row[r] * rhs[r];
            x_[head_[p]] = s;
        }
    }

    double infeasibility(int c) const {
        if (x_[c] < lo_[c] - opt_.feas_tol) return lo_[c] - x_[c];
        if (x_[c] > up_[c] + opt_.feas_tol) return x_[c] - up_[c];
        return 0.0;
    }

    void compute_duals(const std::vector<double>& cB, std::vector<double>& y) const {
        y.assign(m_, 0.0);
        for (int p = 0; p < m_; ++p) {
            if (cB[p] == 0.0) continue;
            const double* row = &binv_[static_cast<std::size_t>(p) * m_];
            for (int r = 0; r < m_; ++r) y[r] += cB[p] * row[r];
        }
    }

    double reduced_cost(int j, const std::vector<double>& y, bool phase1) const {
        double d = phase1 ? 0.0 : cost_[j];
        for_column(j, [&](int r, double a) { d -= y[r] * a; });
        return d;
    }

    void pivot(int p, const std::vector<double>& alpha) {
        double* prow = &binv_[static_cast<std::size_t>(p) * m_];
        const double inv = 1.0 / alpha[p];
        for (int r = 0; r < m_; ++r) prow[r] *= inv;
        for (int i = 0; i < m_; ++i) {
            if (i == p || alpha[i] == 0.0) continue;
            double* row = &binv_[static_cast<std::size_t>(i) * m_];
            const double f = alpha[i];
            for (int r = 0; r < m_; ++r) row[r] -= f * prow[r];
        }
    }

    LpSolution iterate() {
        std::vector<double> cB(m_), y, alpha(m_);
        int degenerate_streak = 0;
        bool bland = false;
        bool verified = false;
        while (true) {
            if (iters_ >= opt_.max_iterations) return finish(Status::IterLimit);
            if (since_refactor_ >= opt_.refactor_every) refactor();
            bool phase1 = false;
            for (int p = 0; p < m_; ++p) {
                const int c = head_[p];
                if (x_[c] < lo_[c] - opt_.feas_tol) {
                    cB[p] = -1.0;
                    phase1 = true;
                } else if (x_[c] > up_[c] + opt_.feas_tol) {
                    cB[p] = 1.0;
                    phase1 = true;
                } else {
                    cB[p] = 0.0;
                }
            }
            if (!phase1)
                for (int p = 0; p < m_; ++p) cB[p] = cost_[head_[p]];
            compute_duals(cB, y);

            int enter = -1;
            double enter_d = 0.0;
            double best = 0.0;
            for (int j = 0; j < N_; ++j) {
                const VarStat st = stat_[j];
                if (st == VarStat::Basic) continue;
                if (lo_[j] == up_[j]) continue;
                const double d = reduced_cost(j, y, phase1);
                bool eligible = false;
                if (st == VarStat::AtLower) eligible = d < -opt_.opt_tol;
                else if (st == VarStat::AtUpper) eligible = d > opt_.opt_tol;
                else eligible = std::abs(d) > opt_.opt_tol;
                if (!eligible) continue;
                if (bland) {
                    enter = j;
                    enter_d = d;
                    break;
                }
                if (std::abs(d) > best) {
                    best = std::abs(d);
                    enter = j;
                    enter_d = d;
                }
            }
            if (enter < 0) {
                if (!verified) {
                    // Clear accumulated drift once before concluding.
                    refactor();
                    verified = true;
                    continue;
                }
                if (phase1) return finish(Status::Infeasible);
                return finish(Status::Optimal);
            }
            verified = false;
            const double dir = enter_d < 0.0 ? 1.0 : -1.0;

            std::fill(alpha.begin(), alpha.end(), 0.0);
            for_column(enter, [&](int r, double a) {
                for (int p = 0; p < m_; ++p) alpha[p] += binv_[static_cast<std::size_t>(p) * m_ + r] * a;
            });

            double theta = kInf;
            int leave = -1;
            bool leave_upper = false;
            double leave_bound = 0.0;
            for (int p = 0; p < m_; ++p) {
                const double a = alpha[p];
                if (std::abs(a) <= opt_.pivot_tol) continue;
                const double rate = -dir * a;
                const int c = head_[p];
                const double xv = x_[c];
                const bool below = xv < lo_[c] - opt_.feas_tol;
                const bool above = xv > up_[c] + opt_.feas_tol;
                double bound;
                bool to_upper;
                if (rate < 0.0) {
                    if (below) continue;
                    if (above) {
                        bound = up_[c];
                        to_upper = true;
                    } else {
                        if (!std::isfinite(lo_[c])) continue;
                        bound = lo_[c];
                        to_upper = false;
                    }
                } else {
                    if (above) continue;
                    if (below) {
                        bound = lo_[c];
                        to_upper = false;
                    } else {
                        if (!std::isfinite(up_[c])) continue;
                        bound = up_[c];
                        to_upper = true;
                    }
                }
                const double limit = std::max(0.0, (bound - xv) / rate);
                bool take = false;
                if (leave < 0 || limit < theta - 1e-12) take = true;
                else if (limit <= theta + 1e-12) {
                    if (bland) take = c < head_[leave];
                    else take = std::abs(a) > std::abs(alpha[leave]);
                }
                if (take) {
                    theta = limit;
                    leave = p;
                    leave_upper = to_upper;
                    leave_bound = bound;
                }
            }
            const double range = up_[enter] - lo_[enter];
            const bool flip = std::isfinite(range) && range <= theta;
            if (flip) theta = range;
            if (!std::isfinite(theta)) {
                if (phase1) return finish(Status::Infeasible);
                return finish(Status::Unbounded);
            }

            ++iters_;
            if (theta <= 1e-12) {
                if (++degenerate_streak >= opt_.bland_after) bland = true;
            } else {
                degenerate_streak = 0;
                bland = false;
            }
            x_[enter] += dir * theta;
            for (int p = 0; p < m_; ++p)
                if (alpha[p] != 0.0) x_[head_[p]] -= dir * theta * alpha[p];
            if (flip) {
                stat_[enter] = dir > 0 ? VarStat::AtUpper : VarStat::AtLower;
                x_[enter] = dir > 0 ? up_[enter] : lo_[enter];
                continue;
            }
            const int out = head_[leave];
            x_[out] = leave_bound;
            stat_[out] = (leave_upper && lo_[out] != up_[out]) ? VarStat::AtUpper : VarStat::AtLower;
            pivot(leave, alpha);
            head_[leave] = enter;
            stat_[enter] = VarStat::Basic;
            ++since_refactor_;
        }
    }

    LpSolution finish(Status st) {
        LpSolution sol;
        sol.status = st;
        sol.iterations = iters_;
        sol.x.assign(x_.begin(), x_.begin() + n_);
        sol.basis.stat = stat_;
        std::vector<double> cB(m_);
        for (int p = 0; p < m_; ++p) cB[p] = cost_[head_[p]];
        compute_duals(cB, sol.duals);
        sol.reduced_costs.resize(n_);
        for (int j = 0; j < n_; ++j) sol.reduced_costs[j] = stat_[j] == VarStat::Basic ? 0.0 : reduced_cost(j, sol.duals, false);
        sol.objective = 0.0;
        for (int j = 0; j < n_; ++j) sol.objective += cost_[j] * sol.x[j];
        return sol;
    }
};

}  // namespace

LpSolution lp_solve(const Model& m, const std::vector<double>& lb, const std::vector<double>& ub, const LpOptions& opt,
                    const Basis* warm) {
    for (int j = 0; j < m.num_vars(); ++j)
        if (lb[j] > ub[j] + opt.feas_tol) {
            LpSolution sol;
            sol.status = Status::Infeasible;
            return sol;
        }
    Simplex sx(m, lb, ub, opt);
    return sx.run(warm);
}

LpSolution lp_solve(const Model& m, const LpOptions& opt, const Basis* warm) { return lp_solve(m, m.lbs(), m.ubs(), opt, warm); }

double dual_objective(const Model& m, const LpSolution& sol, const std::vector<double>& lb, const std::vector<double>& ub) {
    double v = 0.0;
    for (int r = 0; r < m.num_rows(); ++r) v += m.row(r).rhs * sol.duals[r];
    for (int j = 0; j < m.num_vars(); ++j) {
        const double d = sol.reduced_costs[j];
        if (d == 0.0) continue;
        const double bound = d > 0 ? lb[j] : ub[j];
        if (std::isfinite(bound)) v += d * bound;
        else v += d * sol.x[j];
    }
    return v;
}

}  // namespace ccmdvsp::milp
