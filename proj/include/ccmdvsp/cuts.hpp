#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ccmdvsp/core.hpp"
#include "ccmdvsp/scenario.hpp"
#include "ccmdvsp/subproblem.hpp"

namespace ccmdvsp {

enum class CutKind { NoGood, StrongNoGood, MIS, CMIS, ECMIS };
const char* to_string(CutKind k);
CutKind cut_kind_from_string(const std::string& s);

// sum over pairs of sum_k x_ijk <= rhs - 1 + z_s. Every family here uses
// unit coefficients. The plain no-good additionally carries the full arc
// assignment it was built from: +1 on those arc variables, -1 on all others.
struct Cut {
    CutKind kind = CutKind::StrongNoGood;
    int s = 0;
    std::vector<int> pairs;  // sorted compat indices
    int rhs = 0;
    std::vector<Arc> arcs;   // NoGood only
};

// Pair sum of the cut at a schedule (for NoGood: matched arcs minus others).
int cut_lhs(const Instance& inst, const Cut& cut, const Schedule& sched);
// True when (sched, z_s) violates the cut.
bool cut_violated(const Instance& inst, const Cut& cut, const Schedule& sched, int z_s);

json cut_to_json(const Instance& inst, const Cut& cut);

// Membership flag in C^s for every pair of C.
std::vector<char> operational_compat(const Instance& inst, const ServiceParams& params, const ScenarioSet& scen, int s);

enum class ViMode {
    MaxDelays,     // theta_1 = I - f (route: I_r - f_r)
    PaperLiteral,  // theta_1 = f
};

// sum over pairs sum_k x <= theta0 z_s + theta1 (1 - z_s)
struct ValidInequality {
    int s = 0;
    Requirement scope;
    std::vector<int> pairs;
    int theta0 = 0;
    int theta1 = 0;
};

std::vector<ValidInequality> valid_inequalities(const Instance& inst, const ServiceParams& params, const ScenarioSet& scen,
                                                ViMode mode = ViMode::MaxDelays);
bool vi_violated(const Instance& inst, const ValidInequality& vi, const Schedule& sched, int z_s);

Cut no_good_cut(const Instance& inst, const Schedule& sched, int s);
Cut strong_no_good_cut(const Instance& inst, const Schedule& sched, int s);

std::vector<int> select_delay_core(const Instance& inst, const Requirements& req, const GreedyResult& g, const Requirement& con);

struct TraceStep {
    int trip = 0;
    int target = 0;  // start time to explain after processing this trip
};

struct CMisContext {
    int s = 0;
    Requirement con;
    std::vector<int> core;   // D^C-MIS
    std::vector<int> pairs;  // V^C-MIS, sorted compat indices
    std::vector<int> extra;  // V^Extra
    std::vector<TraceStep> trace;
};

CMisContext build_cmis(const Instance& inst, const ServiceParams& params, const Schedule& sched, const ScenarioSet& scen, int s,
                       const GreedyResult& g, const Requirement& con);

// Pairs must form vertex-disjoint paths. Without a scope any requirement counts.
bool is_infeasible_set(const Instance& inst, const ServiceParams& params, const ScenarioSet& scen, int s,
                       const std::vector<int>& pairs, const std::optional<Requirement>& scope = std::nullopt);
bool pairs_form_paths(const Instance& inst, const std::vector<int>& pairs);

std::vector<int> mis_deletion_filter(const Instance& inst, const ServiceParams& params, const ScenarioSet& scen, int s,
                                     const std::vector<int>& pairs, const std::optional<Requirement>& scope = std::nullopt);

CMisContext extend_cmis(const Instance& inst, const ServiceParams& params, const ScenarioSet& scen, const CMisContext& ctx);

Cut cmis_cut(const CMisContext& ctx);
Cut mis_cut(const Instance& inst, const ServiceParams& params, const Schedule& sched, const ScenarioSet& scen, int s);

struct CertificateReport {
    bool printed_feasible = false;   // dual system as printed, exact rationals
    std::string violated;            // first violated printed constraint
    bool objective_is_one = false;
    std::string objective;           // exact rational
    bool cut_matches = false;        // induced Benders cut == C-MIS cut
    bool lp_optimum_is_one = false;  // tightened primal LP solved by the kernel
    double lp_objective = 0.0;
    bool signed_dual_feasible = false;  // against the LP dual with standard signs
    std::string signed_violated;
    std::vector<std::pair<int, std::string>> alpha;  // pair index, value

    bool ok() const { return printed_feasible && objective_is_one && cut_matches; }
};

CertificateReport dual_certificate(const Instance& inst, const ServiceParams& params, const Schedule& sched,
                                   const ScenarioSet& scen, int s, const GreedyResult& g, const CMisContext& ctx);

}  // namespace ccmdvsp
