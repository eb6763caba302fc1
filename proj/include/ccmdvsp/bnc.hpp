#pragma once

#include <map>
#include <set>
#include <tuple>
#include <string>
#include <vector>

#include "ccmdvsp/core.hpp"
#include "ccmdvsp/cuts.hpp"
#include "ccmdvsp/milp.hpp"
#include "ccmdvsp/scenario.hpp"

namespace ccmdvsp {

struct BnCConfig {
    CutKind cut_family = CutKind::CMIS;
    bool use_vi = false;
    bool relax_z = false;
    ViMode vi_mode = ViMode::MaxDelays;
    double time_limit = 600.0;
    double gap_tol = 1e-6;
    long max_nodes = 10000000;
    long max_master_vars = 5000000;
    std::uint64_t seed = 0;
    // Extra objective weight on each z_s (Lagrangian groups); empty means none.
    std::vector<double> z_cost;
};

struct Master {
    milp::Model model;
    std::vector<int> pair_var;      // [p * K + k]
    std::vector<int> pull_out_var;  // [k * I + i]
    std::vector<int> pull_in_var;   // [k * I + i]
    std::vector<int> z_var;         // [s]
    int num_vi = 0;
};

Master build_master(const Instance& inst, const ServiceParams& params, const ScenarioSet& scen, const BnCConfig& cfg);

// Arc assignment held by an integral master point.
Schedule master_schedule(const Instance& inst, const Master& master, const std::vector<double>& x);

milp::Row cut_row(const Instance& inst, const Master& master, const Cut& cut);

// Cut pool shared across callback invocations; duplicates are dropped.
class CutPool {
public:
    bool insert(const Cut& cut);
    std::size_t size() const { return keys_.size(); }
    const std::map<std::string, int>& per_family() const { return per_family_; }
    const std::vector<Cut>& cuts() const { return cuts_; }

private:
    std::set<std::tuple<int, int, std::vector<int>, int, std::vector<Arc>>> keys_;
    std::map<std::string, int> per_family_;
    std::vector<Cut> cuts_;
};

struct CutGenState {
    const Instance* inst = nullptr;
    const ServiceParams* params = nullptr;
    const ScenarioSet* scen = nullptr;
    const Master* master = nullptr;
    BnCConfig cfg;
    Requirements req;
    CutPool pool;
};

// Cuts for every scenario the master treats as satisfied but greedy finds
// violated. Already pooled cuts are not returned again.
std::vector<Cut> cut_generation_routine(const Schedule& sched, const std::vector<double>& zhat, CutGenState& state);

struct BnCResult {
    milp::Status status = milp::Status::Infeasible;
    bool has_schedule = false;
    Schedule schedule;
    double objective = 0.0;
    double bound = 0.0;
    double gap = 0.0;
    long nodes = 0;
    long lazy_calls = 0;
    double time_s = 0.0;
    std::map<std::string, int> cuts;
    std::vector<Cut> cut_log;
    int num_vi = 0;
    std::vector<int> z;         // greedy verdict per training scenario
    std::vector<double> z_master;
    int violated = 0;
    std::vector<double> bound_history;
};

BnCResult solve_bnc(const Instance& inst, const ServiceParams& params, const ScenarioSet& scen, const BnCConfig& cfg);

json bnc_result_to_json(const Instance& inst, const BnCResult& r);

}  // namespace ccmdvsp
