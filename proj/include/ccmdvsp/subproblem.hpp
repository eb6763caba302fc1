#pragma once

#include <vector>

#include "ccmdvsp/core.hpp"
#include "ccmdvsp/milp.hpp"
#include "ccmdvsp/scenario.hpp"

namespace ccmdvsp {

struct Requirement {
    enum class Kind { Trip, Route };
    Kind kind = Kind::Trip;
    int route = -1;  // 0-based, Route only

    static Requirement trip() { return {Kind::Trip, -1}; }
    static Requirement of_route(int r) { return {Kind::Route, r}; }
    bool operator==(const Requirement&) const = default;
};

std::string to_string(const Requirement& req);

struct GreedyResult {
    int z = 0;
    std::vector<int> y;     // earliest start
    std::vector<int> v;     // 1 if on time
    std::vector<int> u;     // expressing used (= e_i)
    std::vector<int> pred;  // previous trip on the same bus, -1 for first trips
    std::vector<int> bus;   // bus index of each trip
    std::vector<int> delayed;
    std::vector<Requirement> violated;
    int on_time = 0;
};

// Requirements violated by an on-time vector.
std::vector<Requirement> violated_requirements(const Instance& inst, const Requirements& req, const std::vector<int>& v);

GreedyResult greedy_evaluate(const Instance& inst, const Requirements& req, const ServiceParams& params, const Schedule& sched,
                             const ScenarioSet& scen, int s);
GreedyResult greedy_evaluate(const Instance& inst, const ServiceParams& params, const Schedule& sched, const ScenarioSet& scen,
                             int s);

struct OracleResult {
    milp::Status status = milp::Status::Infeasible;
    int z = 0;
    int on_time = 0;
    std::vector<double> y;
    std::vector<int> v;
};

// Solves the scenario subproblem as a MILP with x fixed to the schedule:
// first min z, then with z fixed max on-time count, then min total start time.
OracleResult milp_subproblem_oracle(const Instance& inst, const ServiceParams& params, const Schedule& sched,
                                    const ScenarioSet& scen, int s);

std::vector<int> violated_scenarios(const Instance& inst, const ServiceParams& params, const Schedule& sched,
                                    const ScenarioSet& scen);
int count_violated_scenarios(const Instance& inst, const ServiceParams& params, const Schedule& sched, const ScenarioSet& scen);

}  // namespace ccmdvsp
