#include "ccmdvsp/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ccmdvsp {

std::string to_string(const Requirement& req) {
    if (req.kind == Requirement::Kind::Trip) return "trip";
    return "route:" + std::to_string(req.route + 1);
}

std::vector<Requirement> violated_requirements(const Instance& inst, const Requirements& req, const std::vector<int>& v) {
    std::vector<Requirement> out;
    int total = 0;
    for (int x : v) total += x;
    if (total < req.f_trip) out.push_back(Requirement::trip());
    for (int r = 0; r < inst.num_routes(); ++r) {
        int cnt = 0;
        for (int i : inst.route(r)) cnt += v[i];
        if (cnt < req.f_route[r]) out.push_back(Requirement::of_route(r));
    }
    return out;
}

GreedyResult greedy_evaluate(const Instance& inst, const Requirements& req, const ServiceParams& params, const Schedule& sched,
                             const ScenarioSet& scen, int s) {
    const int I = inst.num_trips();
    GreedyResult g;
    g.y.assign(I, 0);
    g.v.assign(I, 0);
    g.u.resize(I);
    g.pred.assign(I, -1);
    g.bus.assign(I, -1);
    for (int i = 0; i < I; ++i) g.u[i] = inst.trip(i).e;
    for (std::size_t b = 0; b < sched.buses.size(); ++b) {
        const auto& trips = sched.buses[b].trips;
        for (std::size_t q = 0; q < trips.size(); ++q) {
            const int i = trips[q];
            const Trip& t = inst.trip(i);
            g.bus[i] = static_cast<int>(b);
            if (q == 0) {
                g.y[i] = t.s - params.lb;
                g.v[i] = 1;
                continue;
            }
            const int j = trips[q - 1];
            const int p = inst.pair_index(j, i);
            if (p < 0) throw InputError("greedy_evaluate: pair (" + std::to_string(j + 1) + "," + std::to_string(i + 1) + ") not in C");
            g.pred[i] = j;
            g.y[i] = std::max(t.s - params.lb, g.y[j] + scen.dur(s, j) + scen.pair_time(s, p) - g.u[j]);
            g.v[i] = g.y[i] <= t.s + params.ub ? 1 : 0;
        }
    }
    for (int i = 0; i < I; ++i) {
        if (g.bus[i] < 0) throw InputError("greedy_evaluate: trip " + std::to_string(i + 1) + " not covered by the schedule");
        if (g.v[i]) ++g.on_time;
        else g.delayed.push_back(i);
    }
    g.violated = violated_requirements(inst, req, g.v);
    g.z = g.violated.empty() ? 0 : 1;
    return g;
}

GreedyResult greedy_evaluate(const Instance& inst, const ServiceParams& params, const Schedule& sched, const ScenarioSet& scen,
                             int s) {
    return greedy_evaluate(inst, derive_requirements(inst, params), params, sched, scen, s);
}

OracleResult milp_subproblem_oracle(const Instance& inst, const ServiceParams& params, const Schedule& sched,
                                    const ScenarioSet& scen, int s) {
    using namespace milp;
    const int I = inst.num_trips();
    const int K = inst.num_depots();
    const Requirements req = derive_requirements(inst, params);

    // x fixed: sequenced pairs and the depot arcs of each bus.
    std::vector<char> seq(inst.num_pairs(), 0);
    for (int p : sequenced_pairs(inst, sched)) seq[p] = 1;
    std::vector<char> first(static_cast<std::size_t>(K) * I, 0);
    for (const Bus& b : sched.buses)
        if (!b.trips.empty()) first[static_cast<std::size_t>(b.depot) * I + b.trips.front()] = 1;

    double ymax = 0.0;
    for (int i = 0; i < I; ++i) ymax = std::max(ymax, double(inst.trip(i).s - params.lb));
    for (int i = 0; i < I; ++i) {
        double worst = 0.0;
        for (int p : inst.successors(i)) worst = std::max(worst, double(scen.dur(s, i) + scen.pair_time(s, p)));
        ymax += worst;
    }
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < I; ++i) ymax = std::max(ymax, double(scen.pull_out_time(s, k, i)));

    Model m;
    std::vector<int> y(I), v(I), u(I);
    for (int i = 0; i < I; ++i) {
        y[i] = m.add_var(0.0, kInf, 0.0, false, "y" + std::to_string(i + 1));
        v[i] = m.add_var(0.0, 1.0, 0.0, true, "v" + std::to_string(i + 1));
        u[i] = m.add_var(0.0, inst.trip(i).e, 0.0, false, "u" + std::to_string(i + 1));
    }
    const int z = m.add_var(0.0, 1.0, 1.0, true, "z");

    std::vector<Term> all;
    for (int i = 0; i < I; ++i) all.push_back({v[i], 1.0});
    all.push_back({z, double(req.f_trip)});
    m.add_row(all, Sense::GE, req.f_trip, "service_trips");
    for (int r = 0; r < inst.num_routes(); ++r) {
        std::vector<Term> t;
        for (int i : inst.route(r)) t.push_back({v[i], 1.0});
        t.push_back({z, double(req.f_route[r])});
        m.add_row(t, Sense::GE, req.f_route[r], "service_route" + std::to_string(r + 1));
    }
    for (int p = 0; p < inst.num_pairs(); ++p) {
        const int j = inst.pair(p).i;
        const int i = inst.pair(p).j;
        const double leg = scen.dur(s, j) + scen.pair_time(s, p);
        const double M = ymax + leg;
        // y_j + leg - u_j - M (1 - x) <= y_i
        m.add_row({{y[j], 1.0}, {u[j], -1.0}, {y[i], -1.0}}, Sense::LE, -leg + M * (1 - seq[p]));
    }
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < I; ++i) {
            const double t = scen.pull_out_time(s, k, i);
            m.add_row({{y[i], 1.0}}, Sense::GE, t - t * (1 - first[static_cast<std::size_t>(k) * I + i]));
        }
    for (int i = 0; i < I; ++i) {
        const Trip& t = inst.trip(i);
        const double motp = ymax - t.s;
        // y_i <= s_i + ub v_i + M (1 - v_i)
        m.add_row({{y[i], 1.0}, {v[i], motp - params.ub}}, Sense::LE, t.s + motp);
        m.add_row({{y[i], 1.0}}, Sense::GE, t.s - params.lb);
    }

    BnbOptions opt;
    opt.objective_integral = true;
    OracleResult out;
    MilpSolution sol = bnb_solve(m, nullptr, opt);
    out.status = sol.status;
    if (sol.status != Status::Optimal) return out;
    out.z = static_cast<int>(std::lround(sol.objective));

    m.set_bounds(z, out.z, out.z);
    m.set_cost(z, 0.0);
    for (int i = 0; i < I; ++i) m.set_cost(v[i], -1.0);
    sol = bnb_solve(m, nullptr, opt);
    out.status = sol.status;
    if (sol.status != Status::Optimal) return out;
    out.on_time = static_cast<int>(std::lround(-sol.objective));

    m.add_row(std::vector<Term>(all.begin(), all.end() - 1), Sense::GE, out.on_time, "keep_on_time");
    for (int i = 0; i < I; ++i) {
        m.set_cost(v[i], 0.0);
        m.set_cost(y[i], 1.0);
    }
    opt.objective_integral = false;
    sol = bnb_solve(m, nullptr, opt);
    out.status = sol.status;
    if (sol.status != Status::Optimal) return out;
    out.y.resize(I);
    out.v.resize(I);
    for (int i = 0; i < I; ++i) {
        out.y[i] = sol.x[y[i]];
        out.v[i] = static_cast<int>(std::lround(sol.x[v[i]]));
    }
    return out;
}

std::vector<int> violated_scenarios(const Instance& inst, const ServiceParams& params, const Schedule& sched,
                                    const ScenarioSet& scen) {
    const Requirements req = derive_requirements(inst, params);
    std::vector<int> out;
    for (int s = 0; s < scen.size(); ++s)
        if (greedy_evaluate(inst, req, params, sched, scen, s).z) out.push_back(s);
    return out;
}

int count_violated_scenarios(const Instance& inst, const ServiceParams& params, const Schedule& sched, const ScenarioSet& scen) {
    return static_cast<int>(violated_scenarios(inst, params, sched, scen).size());
}

}  // namespace ccmdvsp
