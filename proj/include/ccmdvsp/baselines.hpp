#pragma once

#include <string>
#include <vector>

#include "ccmdvsp/bnc.hpp"
#include "ccmdvsp/core.hpp"
#include "ccmdvsp/scenario.hpp"

namespace ccmdvsp {

struct DetResult {
    milp::Status status = milp::Status::Infeasible;
    bool has_schedule = false;
    Schedule schedule;
    long long cost = 0;
    double bound = 0.0;
    double time_s = 0.0;
};

// Pairs of C that stay compatible under a fixed time table.
std::vector<int> table_compat(const Instance& inst, const TimeTable& t);

// Deterministic MDVSP over the compatibility implied by the time table.
DetResult solve_deterministic(const Instance& inst, const TimeTable& t, double time_limit = 600.0);

// Percent of scenarios in which every requirement holds.
double satisfaction_pct(const Instance& inst, const ServiceParams& params, const Schedule& sched, const ScenarioSet& scen);

struct EvalReport {
    std::string method;
    std::string instance;
    int I = 0;
    int K = 0;
    int S = 0;
    double objective = 0.0;
    double obj_diff_vs_mean_pct = 0.0;
    double train_sat_pct = 0.0;
    double eval_sat_pct = 0.0;
    double time_s = 0.0;
};

EvalReport evaluate_out_of_sample(const Instance& inst, const ServiceParams& params, const Schedule& sched,
                                  const ScenarioSet& eval_scen);

extern const char* const kReportHeader;
std::string report_csv_row(const EvalReport& r);
EvalReport report_from_csv_row(const std::string& line);

}  // namespace ccmdvsp
