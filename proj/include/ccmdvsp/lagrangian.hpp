#pragma once

#include <string>
#include <vector>

#include "ccmdvsp/bnc.hpp"
#include "ccmdvsp/core.hpp"
#include "ccmdvsp/scenario.hpp"

namespace ccmdvsp {

struct Partition {
    std::vector<std::vector<int>> groups;  // sorted trip indices
    int m_gr = 1;
};

Partition partition_trips(const Schedule& det_sched, int m_gr);

struct GroupSolution {
    Schedule schedule;       // in full-instance trip indices
    std::vector<int> z;      // per scenario
    double value = 0.0;      // cost + C^p sum mu_s z_s, in cost units
    long long cost = 0;
    bool optimal = false;
};

// C^1 = -(P-1), C^p = 1 otherwise; p is 0-based here.
double group_weight(int p, int P);

GroupSolution solve_group(const Instance& inst, const ServiceParams& params, const ScenarioSet& scen, const std::vector<int>& group,
                          const std::vector<double>& mu, int p, int P, const BnCConfig& cfg);

std::vector<double> subgradient(const std::vector<std::vector<int>>& z_by_group);

// Proximal bundle: maximize min_l (value_l + g_l'(mu - mu_l)) - |mu - center|^2 / (2t) over mu >= 0.
struct BundleCut {
    double value = 0.0;
    std::vector<double> g;
    std::vector<double> mu;
};

struct BundleState {
    std::vector<BundleCut> cuts;
    std::vector<double> center;
    double center_value = -milp::kInf;
    double t = 0.5;
    double t_max = 0.9;
    double serious_fraction = 0.1;
};

struct BundleStep {
    std::vector<double> mu;
    double model_value = 0.0;  // cutting-plane model at mu
    bool qp_ok = true;
};

BundleStep bundle_step(const BundleState& state, double qp_tol = 1e-8, int max_iter = 100000);
// max of the cutting-plane model over mu >= 0; +inf while unbounded.
double bundle_dual_bound(const BundleState& state);

struct RepairResult {
    Schedule schedule;
    bool feasible = true;
    int moves = 0;
};

RepairResult combine_and_repair(const std::vector<Schedule>& group_schedules, const Instance& inst);

struct LagrConfig {
    int group_size = 10;
    BnCConfig group;
    int max_iterations = 100;
    double tol = 1e-3;
    double t0 = 0.5;
    double det_percentile = 75.0;
    bool plain_subgradient = false;
    double subgradient_step = 0.1;
};

struct LagrIteration {
    int iteration = 0;
    double primal = 0.0;  // sum_p L^p(mu)
    double dual = 0.0;    // cutting-plane bound
    std::string step;     // serious | null | subgradient | stop
    double t = 0.0;
    int incumbent_violations = 0;
    long long incumbent_cost = 0;
};

struct LagrResult {
    BnCResult report;  // schedule, cost objective, dual bound, per-scenario z
    Partition partition;
    std::vector<LagrIteration> log;
    double best_lagrangian = -milp::kInf;  // cost units
    double dual_bound = milp::kInf;
    double mu_scale = 1.0;
    int iterations = 0;
    bool partial = false;         // some group was not solved to optimality
    bool capacity_feasible = true;
};

LagrResult solve_lagrangian(const Instance& inst, const ServiceParams& params, const ScenarioSet& scen, const LagrConfig& cfg);

std::string lagr_log_csv(const LagrResult& r);

}  // namespace ccmdvsp
