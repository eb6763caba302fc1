#include "ccmdvsp/cuts.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <boost/multiprecision/cpp_int.hpp>

namespace ccmdvsp {

namespace {

int leg(const Instance& inst, const ScenarioSet& scen, int s, int p) {
    const int j = inst.pair(p).i;
    return scen.dur(s, j) + scen.pair_time(s, p) - inst.trip(j).e;
}

bool in_scope(const Instance& inst, const Requirement& req, int trip) {
    return req.kind == Requirement::Kind::Trip || inst.trip(trip).route == req.route;
}

int allowed_delays(const Requirements& req, const Requirement& con) {
    return con.kind == Requirement::Kind::Trip ? req.max_trip_delays() : req.max_route_delays(con.route);
}

// next/prev trip along the pair set, -1 if none; false on branching or cycles.
bool link_pairs(const Instance& inst, const std::vector<int>& pairs, std::vector<int>& next, std::vector<int>& prev,
                std::vector<int>& next_pair) {
    const int I = inst.num_trips();
    next.assign(I, -1);
    prev.assign(I, -1);
    next_pair.assign(I, -1);
    for (int p : pairs) {
        const Pair& q = inst.pair(p);
        if (next[q.i] >= 0 || prev[q.j] >= 0) return false;
        next[q.i] = q.j;
        prev[q.j] = q.i;
        next_pair[q.i] = p;
    }
    // every trip on a cycle has a predecessor, so walking back from any pair never ends
    for (int p : pairs) {
        int t = inst.pair(p).i;
        int steps = 0;
        while (prev[t] >= 0) {
            t = prev[t];
            if (++steps > I) return false;
        }
    }
    return true;
}

std::vector<std::vector<int>> paths_of(const Instance& inst, const std::vector<int>& pairs) {
    std::vector<int> next, prev, np;
    if (!link_pairs(inst, pairs, next, prev, np)) throw InputError("pair set does not form vertex-disjoint paths");
    std::vector<std::vector<int>> out;
    for (int t = 0; t < inst.num_trips(); ++t) {
        if (prev[t] >= 0 || next[t] < 0) continue;
        std::vector<int> path{t};
        for (int u = next[t]; u >= 0; u = next[u]) path.push_back(u);
        out.push_back(std::move(path));
    }
    return out;
}

std::vector<int> sorted_unique(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// Largest start any trip can reach in scenario s; a safe big-M base.
double start_horizon(const Instance& inst, const ServiceParams& params, const ScenarioSet& scen, int s) {
    double ymax = 0.0;
    for (int i = 0; i < inst.num_trips(); ++i) ymax = std::max(ymax, double(inst.trip(i).s - params.lb));
    for (int i = 0; i < inst.num_trips(); ++i) {
        double worst = 0.0;
        for (int p : inst.successors(i)) worst = std::max(worst, double(scen.dur(s, i) + scen.pair_time(s, p)));
        ymax += worst;
    }
    for (int k = 0; k < inst.num_depots(); ++k)
        for (int i = 0; i < inst.num_trips(); ++i) ymax = std::max(ymax, double(scen.pull_out_time(s, k, i)));
    return ymax;
}

json arc_to_json(const Arc& a) {
    const char* kind = a.kind == Arc::Kind::Pair ? "pair" : a.kind == Arc::Kind::PullOut ? "pull_out" : "pull_in";
    return {{"kind", kind}, {"from", a.from + 1}, {"to", a.to + 1}, {"depot", a.depot + 1}};
}

}  // namespace

const char* to_string(CutKind k) {
    switch (k) {
    case CutKind::NoGood: return "no_good";
    case CutKind::StrongNoGood: return "strong_no_good";
    case CutKind::MIS: return "mis";
    case CutKind::CMIS: return "cmis";
    case CutKind::ECMIS: return "ecmis";
    }
    return "?";
}

CutKind cut_kind_from_string(const std::string& s) {
    for (CutKind k : {CutKind::NoGood, CutKind::StrongNoGood, CutKind::MIS, CutKind::CMIS, CutKind::ECMIS})
        if (s == to_string(k)) return k;
    throw InputError("unknown cut kind '" + s + "'");
}

int cut_lhs(const Instance& inst, const Cut& cut, const Schedule& sched) {
    if (cut.kind == CutKind::NoGood) {
        std::set<Arc> a1(cut.arcs.begin(), cut.arcs.end());
        int lhs = 0;
        for (const Arc& a : schedule_arcs(inst, sched)) lhs += a1.count(a) ? 1 : -1;
        return lhs;
    }
    std::vector<char> seq(inst.num_pairs(), 0);
    for (int p : sequenced_pairs(inst, sched)) seq[p] = 1;
    int lhs = 0;
    for (int p : cut.pairs) lhs += seq[p];
    return lhs;
}

bool cut_violated(const Instance& inst, const Cut& cut, const Schedule& sched, int z_s) {
    return cut_lhs(inst, cut, sched) > cut.rhs - 1 + z_s;
}

json cut_to_json(const Instance& inst, const Cut& cut) {
    json pairs = json::array();
    for (int p : cut.pairs) pairs.push_back({inst.pair(p).i + 1, inst.pair(p).j + 1});
    json j = {{"kind", to_string(cut.kind)}, {"scenario", cut.s}, {"pairs", pairs}, {"rhs", cut.rhs}};
    if (cut.kind == CutKind::NoGood) {
        json arcs = json::array();
        for (const Arc& a : cut.arcs) arcs.push_back(arc_to_json(a));
        j["arcs"] = arcs;
    }
    return j;
}

std::vector<char> operational_compat(const Instance& inst, const ServiceParams& params, const ScenarioSet& scen, int s) {
    std::vector<char> in(inst.num_pairs(), 0);
    for (int p = 0; p < inst.num_pairs(); ++p) {
        const Pair& q = inst.pair(p);
        in[p] = inst.trip(q.i).s - params.lb + leg(inst, scen, s, p) <= inst.trip(q.j).s + params.ub ? 1 : 0;
    }
    return in;
}

std::vector<ValidInequality> valid_inequalities(const Instance& inst, const ServiceParams& params, const ScenarioSet& scen,
                                                ViMode mode) {
    const Requirements req = derive_requirements(inst, params);
    std::vector<Requirement> scopes{Requirement::trip()};
    for (int r = 0; r < inst.num_routes(); ++r) scopes.push_back(Requirement::of_route(r));
    std::vector<ValidInequality> out;
    for (int s = 0; s < scen.size(); ++s) {
        const std::vector<char> cs = operational_compat(inst, params, scen, s);
        for (const Requirement& scope : scopes) {
            ValidInequality vi;
            vi.s = s;
            vi.scope = scope;
            std::set<int> heads;
            for (int p = 0; p < inst.num_pairs(); ++p) {
                if (cs[p] || !in_scope(inst, scope, inst.pair(p).j)) continue;
                vi.pairs.push_back(p);
                heads.insert(inst.pair(p).j);
            }
            if (vi.pairs.empty()) continue;
            vi.theta0 = static_cast<int>(heads.size());
            const bool trip = scope.kind == Requirement::Kind::Trip;
            if (mode == ViMode::MaxDelays) vi.theta1 = allowed_delays(req, scope);
            else vi.theta1 = trip ? req.f_trip : req.f_route[scope.route];
            out.push_back(std::move(vi));
        }
    }
    return out;
}

bool vi_violated(const Instance& inst, const ValidInequality& vi, const Schedule& sched, int z_s) {
    std::vector<char> seq(inst.num_pairs(), 0);
    for (int p : sequenced_pairs(inst, sched)) seq[p] = 1;
    int lhs = 0;
    for (int p : vi.pairs) lhs += seq[p];
    return lhs > vi.theta0 * z_s + vi.theta1 * (1 - z_s);
}

Cut no_good_cut(const Instance& inst, const Schedule& sched, int s) {
    Cut c;
    c.kind = CutKind::NoGood;
    c.s = s;
    c.arcs = schedule_arcs(inst, sched);
    std::sort(c.arcs.begin(), c.arcs.end());
    c.rhs = static_cast<int>(c.arcs.size());
    return c;
}

Cut strong_no_good_cut(const Instance& inst, const Schedule& sched, int s) {
    Cut c;
    c.kind = CutKind::StrongNoGood;
    c.s = s;
    c.pairs = sorted_unique(sequenced_pairs(inst, sched));
    c.rhs = static_cast<int>(c.pairs.size());
    return c;
}

std::vector<int> select_delay_core(const Instance& inst, const Requirements& req, const GreedyResult& g, const Requirement& con) {
    std::vector<int> cand;
    for (int i : g.delayed)
        if (in_scope(inst, con, i)) cand.push_back(i);
    const int n = allowed_delays(req, con) + 1;
    if (static_cast<int>(cand.size()) < n) throw InputError("select_delay_core: requirement " + to_string(con) + " is not violated");
    std::vector<char> is_cand(inst.num_trips(), 0), chosen(inst.num_trips(), 0);
    for (int i : cand) is_cand[i] = 1;
    std::sort(cand.begin(), cand.end(), [&](int a, int b) {
        if (g.y[a] != g.y[b]) return g.y[a] > g.y[b];
        return a < b;
    });
    std::vector<int> core;
    bool progress = true;
    while (static_cast<int>(core.size()) < n && progress) {
        progress = false;
        for (int i : cand) {
            if (chosen[i]) continue;
            std::vector<int> need{i};
            for (int j = g.pred[i]; j >= 0; j = g.pred[j])
                if (is_cand[j] && !chosen[j]) need.push_back(j);
            if (core.size() + need.size() > static_cast<std::size_t>(n)) continue;
            for (auto it = need.rbegin(); it != need.rend(); ++it) {
                chosen[*it] = 1;
                core.push_back(*it);
            }
            progress = true;
            if (static_cast<int>(core.size()) == n) break;
        }
    }
    std::sort(core.begin(), core.end());
    return core;
}

CMisContext build_cmis(const Instance& inst, const ServiceParams& params, const Schedule& sched, const ScenarioSet& scen, int s,
                       const GreedyResult& g, const Requirement& con) {
    const Requirements req = derive_requirements(inst, params);
    CMisContext ctx;
    ctx.s = s;
    ctx.con = con;
    ctx.core = select_delay_core(inst, req, g, con);
    std::vector<char> work(inst.num_trips(), 0), in_core(inst.num_trips(), 0);
    for (int i : ctx.core) work[i] = in_core[i] = 1;
    std::set<int> pairs;
    for (const Bus& bus : sched.buses) {
        while (true) {
            int i = -1;
            for (auto it = bus.trips.rbegin(); it != bus.trips.rend(); ++it)
                if (work[*it]) {
                    i = *it;
                    break;
                }
            if (i < 0) break;
            work[i] = 0;
            int target = inst.trip(i).s + params.ub + params.eps_tol;
            ctx.trace.push_back({i, target});
            while (target > 0) {
                const int j = g.pred[i];
                if (j < 0) throw InputError("build_cmis: delay of trip " + std::to_string(i + 1) + " cannot be explained");
                const int p = inst.pair_index(j, i);
                pairs.insert(p);
                const int l = leg(inst, scen, s, p);
                if (inst.trip(j).s - params.lb + l >= target) {
                    target = 0;
                } else {
                    target -= l;
                    if (in_core[j]) {
                        target = std::max(target, inst.trip(j).s + params.ub + params.eps_tol);
                        work[j] = 0;
                    }
                }
                ctx.trace.push_back({j, target});
                i = j;
            }
        }
    }
    ctx.pairs.assign(pairs.begin(), pairs.end());
    return ctx;
}

bool pairs_form_paths(const Instance& inst, const std::vector<int>& pairs) {
    std::vector<int> next, prev, np;
    return link_pairs(inst, pairs, next, prev, np);
}

bool is_infeasible_set(const Instance& inst, const ServiceParams& params, const ScenarioSet& scen, int s,
                       const std::vector<int>& pairs, const std::optional<Requirement>& scope) {
    const Requirements req = derive_requirements(inst, params);
    std::vector<int> next, prev, np;
    if (!link_pairs(inst, pairs, next, prev, np)) throw InputError("is_infeasible_set: pairs do not form vertex-disjoint paths");
    int trip_delays = 0;
    std::vector<int> route_delays(inst.num_routes(), 0);
    for (int h = 0; h < inst.num_trips(); ++h) {
        if (prev[h] >= 0 || next[h] < 0) continue;
        int y = inst.trip(h).s - params.lb;
        for (int t = h; next[t] >= 0; t = next[t]) {
            const int u = next[t];
            y = std::max(inst.trip(u).s - params.lb, y + leg(inst, scen, s, np[t]));
            if (y > inst.trip(u).s + params.ub) {
                ++trip_delays;
                ++route_delays[inst.trip(u).route];
            }
        }
    }
    auto breaks = [&](const Requirement& r) {
        const int d = r.kind == Requirement::Kind::Trip ? trip_delays : route_delays[r.route];
        return d > allowed_delays(req, r);
    };
    if (scope) return breaks(*scope);
    if (breaks(Requirement::trip())) return true;
    for (int r = 0; r < inst.num_routes(); ++r)
        if (breaks(Requirement::of_route(r))) return true;
    return false;
}

std::vector<int> mis_deletion_filter(const Instance& inst, const ServiceParams& params, const ScenarioSet& scen, int s,
                                     const std::vector<int>& pairs, const std::optional<Requirement>& scope) {
    std::vector<int> cur = sorted_unique(pairs);
    if (!is_infeasible_set(inst, params, scen, s, cur, scope)) throw InputError("mis_deletion_filter: input is not an infeasible set");
    for (std::size_t k = 0; k < cur.size();) {
        std::vector<int> trial = cur;
        trial.erase(trial.begin() + static_cast<long>(k));
        if (is_infeasible_set(inst, params, scen, s, trial, scope)) cur = std::move(trial);
        else ++k;
    }
    return cur;
}

CMisContext extend_cmis(const Instance& inst, const ServiceParams& params, const ScenarioSet& scen, const CMisContext& ctx) {
    CMisContext out = ctx;
    out.extra.clear();
    const int s = ctx.s;
    std::vector<char> used(inst.num_trips(), 0), in_core(inst.num_trips(), 0);
    for (int p : ctx.pairs) used[inst.pair(p).i] = used[inst.pair(p).j] = 1;
    for (int i : ctx.core) in_core[i] = 1;
    for (const auto& path : paths_of(inst, ctx.pairs)) {
        const int head = path[0];
        const int second = path[1];
        for (int p : inst.predecessors(second)) {
            const int a = inst.pair(p).i;
            if (a == head || used[a]) continue;
            int y = inst.trip(a).s - params.lb;
            int from = p;
            bool explains = true;
            for (std::size_t q = 1; q < path.size(); ++q) {
                const int u = path[q];
                y = std::max(inst.trip(u).s - params.lb, y + leg(inst, scen, s, from));
                if (in_core[u] && y <= inst.trip(u).s + params.ub) {
                    explains = false;
                    break;
                }
                if (q + 1 < path.size()) from = inst.pair_index(u, path[q + 1]);
            }
            if (explains) out.extra.push_back(p);
        }
    }
    std::sort(out.extra.begin(), out.extra.end());
    return out;
}

Cut cmis_cut(const CMisContext& ctx) {
    Cut c;
    c.kind = ctx.extra.empty() ? CutKind::CMIS : CutKind::ECMIS;
    c.s = ctx.s;
    c.pairs = sorted_unique([&] {
        std::vector<int> v = ctx.pairs;
        v.insert(v.end(), ctx.extra.begin(), ctx.extra.end());
        return v;
    }());
    c.rhs = static_cast<int>(ctx.pairs.size());
    return c;
}

Cut mis_cut(const Instance& inst, const ServiceParams& params, const Schedule& sched, const ScenarioSet& scen, int s) {
    Cut c;
    c.kind = CutKind::MIS;
    c.s = s;
    c.pairs = mis_deletion_filter(inst, params, scen, s, sequenced_pairs(inst, sched));
    c.rhs = static_cast<int>(c.pairs.size());
    return c;
}

CertificateReport dual_certificate(const Instance& inst, const ServiceParams& params, const Schedule& sched,
                                   const ScenarioSet& scen, int s, const GreedyResult& g, const CMisContext& ctx) {
    using Q = boost::multiprecision::cpp_rational;
    const int I = inst.num_trips();
    const int s_ = s;
    CertificateReport rep;
    const auto paths = paths_of(inst, ctx.pairs);
    std::vector<char> in_core(I, 0);
    for (int i : ctx.core) in_core[i] = 1;

    std::map<int, Q> alpha;
    std::vector<Q> pi(I, Q(0)), beta(I, Q(0));
    auto inv = [&](int trip) {
        if (g.y[trip] <= 0) throw InputError("dual_certificate: nonpositive start at trip " + std::to_string(trip + 1));
        return Q(1) / Q(g.y[trip]);
    };
    for (const auto& path : paths) {
        for (std::size_t q = 0; q + 1 < path.size(); ++q) alpha[inst.pair_index(path[q], path[q + 1])] = inv(path[q + 1]);
        beta[path[0]] = inv(path[1]);
        for (std::size_t q = 1; q + 1 < path.size(); ++q) pi[path[q]] = inv(path[q]) - inv(path[q + 1]);
        pi[path.back()] = inv(path.back());
    }
    for (const auto& [p, a] : alpha) rep.alpha.emplace_back(p, a.str());

    // Flow balance of y, once per trip.
    std::vector<Q> ybal(I, Q(0));
    for (const auto& [p, a] : alpha) {
        ybal[inst.pair(p).j] += a;
        ybal[inst.pair(p).i] -= a;
    }
    for (int i = 0; i < I; ++i) ybal[i] += beta[i] - pi[i];

    auto name = [](const char* c, int i) { return std::string(c) + "(" + std::to_string(i + 1) + ")"; };
    auto check = [](bool ok, std::string what, std::string& first) {
        if (!ok && first.empty()) first = std::move(what);
        return ok;
    };
    bool feas = true, signed_feas = true;
    for (const auto& [p, a] : alpha) feas &= check(a >= 0, "alpha >= 0", rep.violated);
    for (int i = 0; i < I; ++i) {
        feas &= check(pi[i] >= 0, name("pi >= 0", i), rep.violated);
        feas &= check(beta[i] >= 0, name("beta >= 0", i), rep.violated);
        feas &= check(ybal[i] >= 0, name("dual_y", i), rep.violated);
        signed_feas &= check(ybal[i] <= 0, name("dual_y", i), rep.signed_violated);
        const Q coef = Q(params.ub - g.y[i] + inst.trip(i).s);
        const Q lhs = (in_core[i] ? Q(1) : Q(0)) + pi[i] * coef;
        const char* vname = in_core[i] ? "v_delay" : "v_normal";
        feas &= check(lhs >= 0, name(vname, i), rep.violated);
        signed_feas &= check(lhs <= 0, name(vname, i), rep.signed_violated);
    }
    rep.printed_feasible = feas;
    rep.signed_dual_feasible = signed_feas;

    Q obj(1);
    for (const auto& [p, a] : alpha) obj += a * Q(leg(inst, scen, s_, p));
    for (int i = 0; i < I; ++i) obj += beta[i] * Q(inst.trip(i).s - params.lb) - pi[i] * Q(g.y[i]);
    rep.objective = obj.str();
    rep.objective_is_one = obj == 1;

    // Benders cut from the dual: sum alpha M x <= sum alpha M xhat - obj + z, with M = y*_i.
    Q rhs(-1);
    bool match = true;
    for (const auto& [p, a] : alpha) {
        const Q coef = a * Q(g.y[inst.pair(p).j]);
        match &= coef == 1;
        rhs += coef;
    }
    match &= rhs == Q(static_cast<long>(ctx.pairs.size()) - 1);
    match &= alpha.size() == ctx.pairs.size();
    rep.cut_matches = match;

    // Tightened primal LP, solved with the kernel.
    using namespace milp;
    const Requirements req = derive_requirements(inst, params);
    std::vector<char> seq(inst.num_pairs(), 0);
    for (int p : sequenced_pairs(inst, sched)) seq[p] = 1;
    const double horizon = start_horizon(inst, params, scen, s_);
    Model m;
    std::vector<int> y(I), v(I);
    for (int i = 0; i < I; ++i) {
        y[i] = m.add_var(0.0, kInf, 0.0, false);
        v[i] = m.add_var(0.0, kInf, 0.0, false);
    }
    const int z = m.add_var(0.0, kInf, 1.0, false);
    std::vector<Term> all;
    for (int i = 0; i < I; ++i) all.push_back({v[i], 1.0});
    all.push_back({z, double(req.f_trip)});
    m.add_row(all, Sense::GE, req.f_trip);
    for (int r = 0; r < inst.num_routes(); ++r) {
        std::vector<Term> t;
        for (int i : inst.route(r)) t.push_back({v[i], 1.0});
        t.push_back({z, double(req.f_route[r])});
        m.add_row(t, Sense::GE, req.f_route[r]);
    }
    std::vector<Term> core_row{{z, 1.0}};
    for (int i : ctx.core) core_row.push_back({v[i], 1.0});
    m.add_row(core_row, Sense::GE, 1.0);
    for (int p = 0; p < inst.num_pairs(); ++p) {
        const int j = inst.pair(p).i, i = inst.pair(p).j;
        const double l = leg(inst, scen, s_, p);
        const double M = seq[p] ? double(g.y[i]) : horizon + l;
        m.add_row({{y[i], 1.0}, {y[j], -1.0}}, Sense::GE, l - M * (1 - seq[p]));
    }
    for (const Bus& b : sched.buses)
        m.add_row({{y[b.trips.front()], 1.0}}, Sense::GE, scen.pull_out_time(s_, b.depot, b.trips.front()));
    for (int i = 0; i < I; ++i) {
        const Trip& t = inst.trip(i);
        m.add_row({{y[i], 1.0}, {v[i], double(g.y[i] - t.s - params.ub)}}, Sense::LE, g.y[i]);
        m.add_row({{y[i], 1.0}}, Sense::GE, t.s - params.lb);
    }
    const LpSolution lp = lp_solve(m);
    rep.lp_objective = lp.status == Status::Optimal ? lp.objective : kInf;
    rep.lp_optimum_is_one = lp.status == Status::Optimal && std::abs(lp.objective - 1.0) <= 1e-7;
    return rep;
}

}  // namespace ccmdvsp
