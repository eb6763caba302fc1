#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>

#include "ccmdvsp/core.hpp"
#include "ccmdvsp/scenario.hpp"
#include "ccmdvsp/subproblem.hpp"

namespace testsupport {

// Every partition of the trips into compatible chains, each once. Depots are
// cycled over buses; the greedy evaluator ignores them.
inline void enumerate_schedules(const ccmdvsp::Instance& inst, const std::function<void(const ccmdvsp::Schedule&)>& visit) {
    using namespace ccmdvsp;
    std::vector<int> order(inst.num_trips());
    for (int i = 0; i < inst.num_trips(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return inst.trip(a).s < inst.trip(b).s || (inst.trip(a).s == inst.trip(b).s && a < b);
    });
    Schedule cur;
    std::function<void(std::size_t)> rec = [&](std::size_t q) {
        if (q == order.size()) {
            Schedule out = cur;
            for (std::size_t b = 0; b < out.buses.size(); ++b) out.buses[b].depot = static_cast<int>(b) % inst.num_depots();
            visit(out);
            return;
        }
        const int i = order[q];
        for (std::size_t b = 0; b < cur.buses.size(); ++b) {
            if (!inst.compatible(cur.buses[b].trips.back(), i)) continue;
            cur.buses[b].trips.push_back(i);
            rec(q + 1);
            cur.buses[b].trips.pop_back();
        }
        cur.buses.push_back(Bus{0, {i}});
        rec(q + 1);
        cur.buses.pop_back();
    };
    rec(0);
}

inline bool contains_pairs(const ccmdvsp::Instance& inst, const ccmdvsp::Schedule& sched, const std::vector<int>& pairs) {
    std::vector<char> seq(inst.num_pairs(), 0);
    for (int p : ccmdvsp::sequenced_pairs(inst, sched)) seq[p] = 1;
    for (int p : pairs)
        if (!seq[p]) return false;
    return true;
}

// Every schedule containing the pairs violates the scope (any requirement when unset).
inline bool brute_infeasible_set(const ccmdvsp::Instance& inst, const ccmdvsp::ServiceParams& params, const ccmdvsp::ScenarioSet& scen,
                                 int s, const std::vector<int>& pairs, const std::optional<ccmdvsp::Requirement>& scope = std::nullopt) {
    using namespace ccmdvsp;
    bool all = true;
    enumerate_schedules(inst, [&](const Schedule& sched) {
        if (!all || !contains_pairs(inst, sched, pairs)) return;
        const GreedyResult g = greedy_evaluate(inst, params, sched, scen, s);
        const bool hit = scope ? std::find(g.violated.begin(), g.violated.end(), *scope) != g.violated.end() : g.z == 1;
        if (!hit) all = false;
    });
    return all;
}

}  // namespace testsupport

namespace testsupport {

// Cheapest depot assignment of a trip partition under the capacities; -1 if none.
inline long long best_depot_cost(const ccmdvsp::Instance& inst, ccmdvsp::Schedule& sched) {
    using namespace ccmdvsp;
    const int B = static_cast<int>(sched.buses.size());
    const int K = inst.num_depots();
    long long base = 0;
    for (const Bus& b : sched.buses)
        for (std::size_t q = 1; q < b.trips.size(); ++q) base += inst.pair_cost(inst.pair_index(b.trips[q - 1], b.trips[q]));
    long long best = -1;
    std::vector<int> assign(B, 0), best_assign;
    std::function<void(int, long long, std::vector<int>&)> rec = [&](int b, long long cost, std::vector<int>& used) {
        if (best >= 0 && cost >= best) return;
        if (b == B) {
            best = cost;
            best_assign = assign;
            return;
        }
        const Bus& bus = sched.buses[b];
        for (int k = 0; k < K; ++k) {
            if (used[k] >= inst.depot(k).capacity) continue;
            ++used[k];
            assign[b] = k;
            rec(b + 1, cost + inst.pull_out_cost(k, bus.trips.front()) + inst.pull_in_cost(k, bus.trips.back()), used);
            --used[k];
        }
    };
    std::vector<int> used(K, 0);
    rec(0, base, used);
    if (best >= 0)
        for (int b = 0; b < B; ++b) sched.buses[b].depot = best_assign[b];
    return best;
}

// SAA optimum by enumeration: cheapest schedule violating at most floor(S eps) scenarios.
inline long long brute_saa_optimum(const ccmdvsp::Instance& inst, const ccmdvsp::ServiceParams& params, const ccmdvsp::ScenarioSet& scen) {
    using namespace ccmdvsp;
    const int limit = max_violated_scenarios(scen.size(), params.epsilon);
    long long best = -1;
    enumerate_schedules(inst, [&](const Schedule& s) {
        Schedule sched = s;
        const long long c = best_depot_cost(inst, sched);
        if (c < 0 || (best >= 0 && c >= best)) return;
        if (count_violated_scenarios(inst, params, sched, scen) <= limit) best = c;
    });
    return best;
}

using namespace ccmdvsp;

// Joint model by enumeration: groups scheduled independently, the union of
// their violated scenario sets limited to floor(S eps).
inline long long brute_joint_optimum(const Instance& inst, const ServiceParams& par, const ScenarioSet& scen,
                              const std::vector<std::vector<int>>& groups) {
    const int limit = max_violated_scenarios(scen.size(), par.epsilon);
    std::vector<std::map<unsigned, long long>> best(groups.size());
    for (std::size_t p = 0; p < groups.size(); ++p) {
        std::vector<int> orig;
        const Instance sub = inst.restrict_to(groups[p], &orig);
        const ScenarioSet ss = scen.restrict_to(inst, sub, orig);
        enumerate_schedules(sub, [&](const Schedule& s) {
            Schedule sched = s;
            const long long c = best_depot_cost(sub, sched);
            if (c < 0) return;
            unsigned mask = 0;
            for (int v : violated_scenarios(sub, par, sched, ss)) mask |= 1u << v;
            auto it = best[p].find(mask);
            if (it == best[p].end() || c < it->second) best[p][mask] = c;
        });
    }
    long long opt = -1;
    std::map<unsigned, long long> acc{{0u, 0}};
    for (const auto& table : best) {
        std::map<unsigned, long long> next;
        for (const auto& [m1, c1] : acc)
            for (const auto& [m2, c2] : table) {
                const unsigned m = m1 | m2;
                if (__builtin_popcount(m) > limit) continue;
                auto it = next.find(m);
                if (it == next.end() || c1 + c2 < it->second) next[m] = c1 + c2;
            }
        acc = std::move(next);
    }
    for (const auto& [m, c] : acc)
        if (opt < 0 || c < opt) opt = c;
    return opt;
}

}  // namespace testsupport
