#include "ccmdvsp/baselines.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>

namespace ccmdvsp {

std::vector<int> table_compat(const Instance& inst, const TimeTable& t) {
    std::vector<int> keep;
    for (int p = 0; p < inst.num_pairs(); ++p) {
        const Pair& q = inst.pair(p);
        if (inst.trip(q.i).s + t.dur[q.i] + t.pair_time[p] <= inst.trip(q.j).s) keep.push_back(p);
    }
    return keep;
}

DetResult solve_deterministic(const Instance& inst, const TimeTable& t, double time_limit) {
    const auto t0 = std::chrono::steady_clock::now();
    InstanceData d = inst.data();
    d.compat.clear();
    d.pair_cost.clear();
    d.pair_time.clear();
    for (int p : table_compat(inst, t)) {
        d.compat.push_back(inst.pair(p));
        d.pair_cost.push_back(inst.pair_cost(p));
        d.pair_time.push_back(inst.pair_time(p));
    }
    const Instance sub(std::move(d));
    const ScenarioSet none(0, sub.num_trips(), sub.num_pairs(), sub.num_depots(), 0);
    BnCConfig cfg;
    cfg.time_limit = time_limit;
    const BnCResult r = solve_bnc(sub, ServiceParams{}, none, cfg);
    DetResult out;
    out.status = r.status;
    out.bound = r.bound;
    out.has_schedule = r.has_schedule;
    if (r.has_schedule) {
        out.schedule = r.schedule;
        out.cost = schedule_cost(inst, out.schedule);
    }
    out.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

double satisfaction_pct(const Instance& inst, const ServiceParams& params, const Schedule& sched, const ScenarioSet& scen) {
    if (scen.size() == 0) return 100.0;
    const int bad = count_violated_scenarios(inst, params, sched, scen);
    return 100.0 * (scen.size() - bad) / scen.size();
}

EvalReport evaluate_out_of_sample(const Instance& inst, const ServiceParams& params, const Schedule& sched,
                                  const ScenarioSet& eval_scen) {
    EvalReport r;
    r.I = inst.num_trips();
    r.K = inst.num_depots();
    r.objective = static_cast<double>(schedule_cost(inst, sched));
    r.eval_sat_pct = satisfaction_pct(inst, params, sched, eval_scen);
    return r;
}

const char* const kReportHeader = "method,instance,I,K,S,objective,obj_diff_vs_mean_pct,train_sat_pct,eval_sat_pct,time_s";

std::string report_csv_row(const EvalReport& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%s,%s,%d,%d,%d,%.6g,%.4f,%.4f,%.4f,%.3f", r.method.c_str(), r.instance.c_str(), r.I, r.K, r.S,
                  r.objective, r.obj_diff_vs_mean_pct, r.train_sat_pct, r.eval_sat_pct, r.time_s);
    return buf;
}

EvalReport report_from_csv_row(const std::string& line) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 10) throw InputError("report row must have 10 fields: " + line);
    EvalReport r;
    try {
        r.method = f[0];
        r.instance = f[1];
        r.I = std::stoi(f[2]);
        r.K = std::stoi(f[3]);
        r.S = std::stoi(f[4]);
        r.objective = std::stod(f[5]);
        r.obj_diff_vs_mean_pct = std::stod(f[6]);
        r.train_sat_pct = std::stod(f[7]);
        r.eval_sat_pct = std::stod(f[8]);
        r.time_s = std::stod(f[9]);
    } catch (const std::exception&) {
        throw InputError("malformed report row: " + line);
    }
    return r;
}

}  // namespace ccmdvsp
