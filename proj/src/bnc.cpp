#include "ccmdvsp/bnc.hpp"

#include <chrono>
#include <cmath>

namespace ccmdvsp {

using namespace milp;

Master build_master(const Instance& inst, const ServiceParams& params, const ScenarioSet& scen, const BnCConfig& cfg) {
    params.validate();
    scen.check_matches(inst);
    const int I = inst.num_trips();
    const int K = inst.num_depots();
    const int S = scen.size();
    const long nvars = static_cast<long>(inst.num_pairs()) * K + 2L * K * I + S;
    if (nvars > cfg.max_master_vars)
        throw InputError("master model has " + std::to_string(nvars) + " variables, above the cap of " + std::to_string(cfg.max_master_vars));
    if (!cfg.z_cost.empty() && static_cast<int>(cfg.z_cost.size()) != S) throw InputError("z_cost must have one entry per scenario");

    Master ms;
    Model& m = ms.model;
    ms.pair_var.resize(static_cast<std::size_t>(inst.num_pairs()) * K);
    ms.pull_out_var.resize(static_cast<std::size_t>(K) * I);
    ms.pull_in_var.resize(static_cast<std::size_t>(K) * I);
    for (int p = 0; p < inst.num_pairs(); ++p)
        for (int k = 0; k < K; ++k)
            ms.pair_var[p * K + k] = m.add_var(0, 1, inst.pair_cost(p), true,
                                               "x_" + std::to_string(inst.pair(p).i + 1) + "_" + std::to_string(inst.pair(p).j + 1) + "_" +
                                                   std::to_string(k + 1));
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < I; ++i) {
            ms.pull_out_var[k * I + i] = m.add_var(0, 1, inst.pull_out_cost(k, i), true, "o_" + std::to_string(k + 1) + "_" + std::to_string(i + 1));
            ms.pull_in_var[k * I + i] = m.add_var(0, 1, inst.pull_in_cost(k, i), true, "n_" + std::to_string(i + 1) + "_" + std::to_string(k + 1));
        }
    for (int s = 0; s < S; ++s)
        ms.z_var.push_back(m.add_var(0, 1, cfg.z_cost.empty() ? 0.0 : cfg.z_cost[s], !cfg.relax_z, "z_" + std::to_string(s)));

    for (int i = 0; i < I; ++i) {
        std::vector<Term> once;
        for (int k = 0; k < K; ++k) {
            std::vector<Term> bal;
            once.push_back({ms.pull_out_var[k * I + i], 1.0});
            bal.push_back({ms.pull_out_var[k * I + i], 1.0});
            bal.push_back({ms.pull_in_var[k * I + i], -1.0});
            for (int p : inst.predecessors(i)) {
                once.push_back({ms.pair_var[p * K + k], 1.0});
                bal.push_back({ms.pair_var[p * K + k], 1.0});
            }
            for (int p : inst.successors(i)) bal.push_back({ms.pair_var[p * K + k], -1.0});
            m.add_row(bal, Sense::EQ, 0.0, "flow_" + std::to_string(i + 1) + "_" + std::to_string(k + 1));
        }
        m.add_row(once, Sense::EQ, 1.0, "once_" + std::to_string(i + 1));
    }
    for (int k = 0; k < K; ++k) {
        std::vector<Term> cap;
        for (int i = 0; i < I; ++i) cap.push_back({ms.pull_out_var[k * I + i], 1.0});
        m.add_row(cap, Sense::LE, inst.depot(k).capacity, "capacity_" + std::to_string(k + 1));
    }
    std::vector<Term> prob;
    for (int v : ms.z_var) prob.push_back({v, 1.0});
    if (!prob.empty()) m.add_row(prob, Sense::LE, max_violated_scenarios(S, params.epsilon), "probability");

    if (cfg.use_vi) {
        for (const ValidInequality& vi : valid_inequalities(inst, params, scen, cfg.vi_mode)) {
            std::vector<Term> t;
            for (int p : vi.pairs)
                for (int k = 0; k < K; ++k) t.push_back({ms.pair_var[p * K + k], 1.0});
            t.push_back({ms.z_var[vi.s], -double(vi.theta0 - vi.theta1)});
            m.add_row(t, Sense::LE, vi.theta1, "vi_" + std::to_string(vi.s) + "_" + to_string(vi.scope));
            ++ms.num_vi;
        }
    }
    return ms;
}

Schedule master_schedule(const Instance& inst, const Master& ms, const std::vector<double>& x) {
    const int I = inst.num_trips();
    const int K = inst.num_depots();
    std::vector<Arc> arcs;
    for (int p = 0; p < inst.num_pairs(); ++p)
        for (int k = 0; k < K; ++k)
            if (x[ms.pair_var[p * K + k]] > 0.5) arcs.push_back({Arc::Kind::Pair, inst.pair(p).i, inst.pair(p).j, k});
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < I; ++i) {
            if (x[ms.pull_out_var[k * I + i]] > 0.5) arcs.push_back({Arc::Kind::PullOut, k, i, k});
            if (x[ms.pull_in_var[k * I + i]] > 0.5) arcs.push_back({Arc::Kind::PullIn, i, k, k});
        }
    return schedule_from_arcs(inst, arcs);
}

Row cut_row(const Instance& inst, const Master& ms, const Cut& cut) {
    const int I = inst.num_trips();
    const int K = inst.num_depots();
    Row row;
    row.sense = Sense::LE;
    row.rhs = cut.rhs - 1;
    row.name = std::string(to_string(cut.kind)) + "_" + std::to_string(cut.s);
    if (cut.kind == CutKind::NoGood) {
        std::vector<double> coef(ms.model.num_vars(), 0.0);
        for (int v : ms.pair_var) coef[v] = -1.0;
        for (int v : ms.pull_out_var) coef[v] = -1.0;
        for (int v : ms.pull_in_var) coef[v] = -1.0;
        for (const Arc& a : cut.arcs) {
            int v = 0;
            switch (a.kind) {
            case Arc::Kind::Pair: v = ms.pair_var[inst.pair_index(a.from, a.to) * K + a.depot]; break;
            case Arc::Kind::PullOut: v = ms.pull_out_var[a.depot * I + a.to]; break;
            case Arc::Kind::PullIn: v = ms.pull_in_var[a.depot * I + a.from]; break;
            }
            coef[v] = 1.0;
        }
        for (int v = 0; v < static_cast<int>(coef.size()); ++v)
            if (coef[v] != 0.0) row.terms.push_back({v, coef[v]});
    } else {
        for (int p : cut.pairs)
            for (int k = 0; k < K; ++k) row.terms.push_back({ms.pair_var[p * K + k], 1.0});
    }
    row.terms.push_back({ms.z_var[cut.s], -1.0});
    return row;
}

bool CutPool::insert(const Cut& cut) {
    const bool added = keys_.emplace(static_cast<int>(cut.kind == CutKind::NoGood), cut.s, cut.pairs, cut.rhs, cut.arcs).second;
    if (added) {
        ++per_family_[to_string(cut.kind)];
        cuts_.push_back(cut);
    }
    return added;
}

std::vector<Cut> cut_generation_routine(const Schedule& sched, const std::vector<double>& zhat, CutGenState& st) {
    const Instance& inst = *st.inst;
    std::vector<Cut> out;
    for (int s = 0; s < st.scen->size(); ++s) {
        const bool open = st.cfg.relax_z ? zhat[s] < 1.0 - 1e-6 : zhat[s] < 0.5;
        if (!open) continue;
        const GreedyResult g = greedy_evaluate(inst, st.req, *st.params, sched, *st.scen, s);
        if (g.z == 0) continue;
        std::vector<Cut> found;
        switch (st.cfg.cut_family) {
        case CutKind::NoGood: found.push_back(no_good_cut(inst, sched, s)); break;
        case CutKind::StrongNoGood: found.push_back(strong_no_good_cut(inst, sched, s)); break;
        case CutKind::MIS: found.push_back(mis_cut(inst, *st.params, sched, *st.scen, s)); break;
        case CutKind::CMIS:
        case CutKind::ECMIS:
            for (const Requirement& con : g.violated) {
                CMisContext ctx = build_cmis(inst, *st.params, sched, *st.scen, s, g, con);
                if (st.cfg.cut_family == CutKind::ECMIS) ctx = extend_cmis(inst, *st.params, *st.scen, ctx);
                found.push_back(cmis_cut(ctx));
            }
            break;
        }
        bool cuts_off = false;
        for (Cut& c : found) {
            cuts_off |= cut_lhs(inst, c, sched) > c.rhs - 1 + zhat[s] + 1e-9;
            if (st.pool.insert(c)) out.push_back(std::move(c));
        }
        if (!cuts_off) {
            Cut c = strong_no_good_cut(inst, sched, s);
            if (st.pool.insert(c)) out.push_back(std::move(c));
        }
    }
    return out;
}

BnCResult solve_bnc(const Instance& inst, const ServiceParams& params, const ScenarioSet& scen, const BnCConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const Master ms = build_master(inst, params, scen, cfg);
    CutGenState st;
    st.inst = &inst;
    st.params = &params;
    st.scen = &scen;
    st.master = &ms;
    st.cfg = cfg;
    st.req = derive_requirements(inst, params);

    LazyCallback lazy = [&](const std::vector<double>& x) {
        std::vector<double> zhat;
        for (int v : ms.z_var) zhat.push_back(x[v]);
        std::vector<Row> rows;
        for (const Cut& c : cut_generation_routine(master_schedule(inst, ms, x), zhat, st)) rows.push_back(cut_row(inst, ms, c));
        return rows;
    };
    BnbOptions opt;
    opt.time_limit = cfg.time_limit;
    opt.rel_gap = cfg.gap_tol;
    opt.max_nodes = cfg.max_nodes;
    opt.objective_integral = true;
    for (double c : cfg.z_cost)
        if (c != 0.0) opt.objective_integral = false;
    const MilpSolution sol = bnb_solve(ms.model, lazy, opt);

    BnCResult r;
    r.status = sol.status;
    r.nodes = sol.nodes;
    r.lazy_calls = sol.lazy_calls;
    r.bound = sol.bound;
    r.gap = sol.gap;
    r.cuts = st.pool.per_family();
    r.cut_log = st.pool.cuts();
    r.num_vi = ms.num_vi;
    r.bound_history = sol.bound_history;
    if (sol.has_incumbent) {
        r.has_schedule = true;
        r.schedule = canonical(master_schedule(inst, ms, sol.x));
        r.objective = sol.objective;
        for (int s = 0; s < scen.size(); ++s) {
            r.z.push_back(greedy_evaluate(inst, st.req, params, r.schedule, scen, s).z);
            r.z_master.push_back(sol.x[ms.z_var[s]]);
            r.violated += r.z.back();
        }
    }
    r.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

json bnc_result_to_json(const Instance& inst, const BnCResult& r) {
    json j = {{"status", to_string(r.status)},
              {"objective", r.objective},
              {"bound", r.bound},
              {"gap", r.gap},
              {"nodes", r.nodes},
              {"cuts", r.cuts},
              {"valid_inequalities", r.num_vi},
              {"time_s", r.time_s},
              {"z", r.z},
              {"violated_scenarios", r.violated}};
    j["schedule"] = r.has_schedule ? schedule_to_json(r.schedule, inst) : json(nullptr);
    if (r.has_schedule) j["cost"] = schedule_cost(inst, r.schedule);
    return j;
}

}  // namespace ccmdvsp
