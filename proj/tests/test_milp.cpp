#include <doctest.h>

#include <cmath>
#include <random>

#include "ccmdvsp/milp.hpp"

using namespace ccmdvsp::milp;

TEST_CASE("lp: single bound row") {
    Model m;
    int x = m.add_var(0, kInf, 1, false, "x");
    m.add_row({{x, 1.0}}, Sense::GE, 3);
    auto sol = lp_solve(m);
    REQUIRE(sol.status == Status::Optimal);
    CHECK(sol.x[0] == doctest::Approx(3));
    CHECK(sol.duals[0] == doctest::Approx(1));
}

TEST_CASE("lp: infeasible and unbounded") {
    Model m;
    int x = m.add_var(0, 1, 1, false);
    m.add_row({{x, 1.0}}, Sense::GE, 2);
    CHECK(lp_solve(m).status == Status::Infeasible);

    Model u;
    int a = u.add_var(-kInf, kInf, -1, false);
    int b = u.add_var(0, kInf, 0, false);
    u.add_row({{a, 1.0}, {b, -1.0}}, Sense::LE, 0);
    CHECK(lp_solve(u).status == Status::Unbounded);
}

TEST_CASE("lp: strong duality on random feasible LPs") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-5, 5);
    std::uniform_int_distribution<int> coin(0, 2);
    int checked = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const int n = 3 + trial % 8, rows = 2 + trial % 7;
        Model m;
        std::vector<double> x0(n);
        for (int j = 0; j < n; ++j) {
            const double lb = coin(rng) == 0 ? -kInf : std::floor(U(rng));
            const double ub = coin(rng) == 0 ? kInf : (std::isfinite(lb) ? lb : -3.0) + 1 + std::abs(U(rng));
            m.add_var(lb, ub, U(rng), false);
            double lo = std::isfinite(lb) ? lb : -4.0, hi = std::isfinite(ub) ? ub : lo + 6.0;
            x0[j] = lo + (hi - lo) * 0.5;
        }
        for (int r = 0; r < rows; ++r) {
            std::vector<Term> t;
            double act = 0;
            for (int j = 0; j < n; ++j)
                if (coin(rng)) {
                    double c = std::round(U(rng));
                    if (c == 0) continue;
                    t.push_back({j, c});
                    act += c * x0[j];
                }
            const int sense = coin(rng);
            if (sense == 0) m.add_row(t, Sense::LE, act + std::abs(U(rng)));
            else if (sense == 1) m.add_row(t, Sense::GE, act - std::abs(U(rng)));
            else m.add_row(t, Sense::EQ, act);
        }
        auto sol = lp_solve(m);
        if (sol.status == Status::Unbounded) continue;
        REQUIRE(sol.status == Status::Optimal);
        CHECK(m.max_violation(sol.x) < 1e-6);
        CHECK(dual_objective(m, sol, m.lbs(), m.ubs()) == doctest::Approx(sol.objective).epsilon(1e-6));
        // dual sign conditions
        for (int r = 0; r < m.num_rows(); ++r) {
            if (m.row(r).sense == Sense::LE) CHECK(sol.duals[r] <= 1e-7);
            if (m.row(r).sense == Sense::GE) CHECK(sol.duals[r] >= -1e-7);
        }
        ++checked;
    }
    CHECK(checked > 60);
}

TEST_CASE("lp: warm start from a smaller basis") {
    Model m;
    int x = m.add_var(0, 10, -1, false);
    int y = m.add_var(0, 10, -1, false);
    m.add_row({{x, 1.0}, {y, 1.0}}, Sense::LE, 8);
    auto first = lp_solve(m);
    REQUIRE(first.status == Status::Optimal);
    m.add_row({{x, 1.0}, {y, -1.0}}, Sense::EQ, 2);
    auto second = lp_solve(m, {}, &first.basis);
    REQUIRE(second.status == Status::Optimal);
    CHECK(second.x[0] == doctest::Approx(5));
    CHECK(second.x[1] == doctest::Approx(3));
}

TEST_CASE("bnb: knapsack matches enumeration") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> w(3, 30), val(1, 40);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 10;
        std::vector<int> W(n), V(n);
        for (int j = 0; j < n; ++j) {
            W[j] = w(rng);
            V[j] = val(rng);
        }
        const int cap = 60 + trial;
        Model m;
        std::vector<Term> row;
        for (int j = 0; j < n; ++j) {
            m.add_var(0, 1, -V[j], true);
            row.push_back({j, double(W[j])});
        }
        m.add_row(row, Sense::LE, cap);
        int best = 0;
        for (int mask = 0; mask < (1 << n); ++mask) {
            int ww = 0, vv = 0;
            for (int j = 0; j < n; ++j)
                if (mask >> j & 1) {
                    ww += W[j];
                    vv += V[j];
                }
            if (ww <= cap) best = std::max(best, vv);
        }
        BnbOptions opt;
        opt.objective_integral = true;
        auto sol = bnb_solve(m, nullptr, opt);
        REQUIRE(sol.status == Status::Optimal);
        CHECK(-sol.objective == doctest::Approx(best));
        for (std::size_t h = 1; h < sol.bound_history.size(); ++h) CHECK(sol.bound_history[h] >= sol.bound_history[h - 1] - 1e-9);
    }
}

TEST_CASE("bnb: integral LP solves at the root") {
    Model m;
    int x = m.add_var(0, 5, 1, true);
    m.add_row({{x, 1.0}}, Sense::GE, 2);
    auto sol = bnb_solve(m, nullptr);
    CHECK(sol.status == Status::Optimal);
    CHECK(sol.nodes == 1);
    CHECK(sol.objective == doctest::Approx(2));
}

TEST_CASE("bnb: lazy rows cut off the candidate") {
    // max x + y over {0..3}^2, lazily forbidding x + y > 4 and x > 2.
    Model m;
    int x = m.add_var(0, 3, -1, true);
    int y = m.add_var(0, 3, -1, true);
    std::vector<std::vector<double>> seen;
    auto lazy = [&](const std::vector<double>& pt) {
        seen.push_back(pt);
        std::vector<Row> rows;
        if (pt[x] + pt[y] > 4 + 1e-9) rows.push_back(Row{{{x, 1.0}, {y, 1.0}}, Sense::LE, 4, ""});
        if (pt[x] > 2 + 1e-9) rows.push_back(Row{{{x, 1.0}}, Sense::LE, 2, ""});
        return rows;
    };
    auto sol = bnb_solve(m, lazy);
    REQUIRE(sol.status == Status::Optimal);
    CHECK(sol.objective == doctest::Approx(-4));
    CHECK(sol.x[x] <= 2 + 1e-9);
    CHECK(sol.lazy_rows.size() >= 1);
    for (const Row& r : sol.lazy_rows) CHECK(m.num_vars() == 2);
}

TEST_CASE("lp text export") {
    Model m;
    int x = m.add_var(0, 1, 2, true, "x");
    m.add_row({{x, 1.0}}, Sense::LE, 1, "c1");
    const std::string s = m.to_lp_format();
    CHECK(s.find("Minimize") != std::string::npos);
    CHECK(s.find("c1:") != std::string::npos);
    CHECK(s.find("General") != std::string::npos);
}
